"""Concrete model zoo: flat space, the expanding model, frames and charts.

The expanding model has line element dt^2 - R(t)^2 dx.dx with the linear
scale factor R(t) = 1 + a t, R(0) = 1, on the domain R > 0.  It ships with
two distinguished frames: the comoving frame along the time axis, and a
drifting geodesic frame with conserved coordinate momentum u along x^1
whose metric speed at t = 0 is v = u (1 + u^2)^(-1/2).

``z_chart`` builds the coordinate chart adapted to the drifting frame; its
time integrals are evaluated by adaptive Simpson quadrature and inverted by
bisection-seeded Newton iteration on the monotone forward map.  Closed
forms for the chart-expressed metric and connection are provided for
regression against the numerically pushed fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import FrameField, make_frame
from .geometry import DIM, ChartDomainError, MetricField, as_point, minkowski_metric
from .hyperdual import HyperDual, sqrt, value
from .maps import ChartMap


# -- quadrature and monotone inversion --------------------------------------


def adaptive_simpson(f, a, b, tol=1e-12, max_depth=48):
    """Adaptive Simpson integral of a smooth scalar function."""
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    def simp(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(lo, hi, flo, fmid, fhi, whole, depth, tol):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simp(flo, flm, fmid, mid - lo)
        right = simp(fmid, frm, fhi, hi - mid)
        if depth >= max_depth or abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(lo, mid, flo, flm, fmid, left, depth + 1, tol / 2.0) + recurse(
            mid, hi, fmid, frm, fhi, right, depth + 1, tol / 2.0
        )

    fa, fb = f(a), f(b)
    mid = 0.5 * (a + b)
    fm = f(mid)
    whole = simp(fa, fm, fb, b - a)
    return recurse(a, b, fa, fm, fb, whole, 0, tol)


def invert_monotone(fn, dfn, target, lo, hi, tol=1e-12, max_iter=200):
    """Solve fn(t) = target for increasing fn by bisection-seeded Newton."""
    flo, fhi = fn(lo) - target, fn(hi) - target
    if flo > 0 or fhi < 0:
        raise ValueError("target not bracketed by the supplied interval")
    for _ in range(24):
        mid = 0.5 * (lo + hi)
        fm = fn(mid) - target
        if fm <= 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    t = 0.5 * (lo + hi)
    for _ in range(max_iter):
        resid = fn(t) - target
        step = resid / dfn(t)
        t -= step
        if not lo - 1e-9 <= t <= hi + 1e-9:
            t = 0.5 * (lo + hi)
        if abs(step) < tol:
            return t
    raise ArithmeticError("monotone inversion did not converge")


class SmoothAntiderivative:
    """F(t) = integral_0^t f, with exact dual propagation via f and f'.

    ``f`` must be dual-capable; values come from adaptive Simpson at the
    requested tolerance, derivatives from f itself.
    """

    def __init__(self, integrand, tol=1e-12):
        self.integrand = integrand
        self.tol = tol

    def _float(self, t):
        return adaptive_simpson(lambda r: value(self.integrand(r)), 0.0, t, self.tol)

    def __call__(self, t):
        if not isinstance(t, HyperDual):
            return self._float(float(t))
        base = self._float(t.val)
        fd = self.integrand(HyperDual(t.val, np.array([1.0, 0, 0, 0])))
        fval = value(fd)
        fprime = fd.grad[0] if isinstance(fd, HyperDual) else 0.0
        return t._chain(base, fval, fprime)

    def derivative(self, t):
        return value(self.integrand(t))


# -- scale factor and the expanding model -----------------------------------


@dataclass(frozen=True)
class ScaleFactor:
    """Linear scale history R(t) = 1 + a t with a >= 0; R(0) = 1."""

    a: float
    kind: str = "linear"

    def __post_init__(self):
        if self.kind != "linear":
            raise ValueError(f"unsupported scale-factor kind {self.kind!r}")
        if self.a < 0:
            raise ValueError("expansion parameter must be nonnegative")

    @property
    def t_min(self):
        return -1.0 / self.a if self.a > 0 else -np.inf

    def value(self, t):
        return 1.0 + self.a * t

    def rate(self, t):
        return self.a

    def accel(self, t):
        return 0.0


@dataclass
class FriedmannModel:
    """Expanding flat model with its comoving and drifting frames."""

    scale: ScaleFactor
    metric: MetricField
    frame_comoving: FrameField
    u: float
    frame_drifting: FrameField
    v: float

    @property
    def a(self):
        return self.scale.a


def make_friedmann(a, u=0.0) -> FriedmannModel:
    """Build the expanding model with drift momentum u along x^1.

    The drifting frame has components
    ((R^2+u^2)^(1/2)/R, u/R^2, 0, 0): unit, geodesic, irrotational.
    """
    scale = ScaleFactor(float(a))

    def metric_comps(coords):
        r = scale.value(coords[0])
        r2 = r * r
        zero = 0.0
        return [
            [1.0, zero, zero, zero],
            [zero, -r2, zero, zero],
            [zero, zero, -r2, zero],
            [zero, zero, zero, -r2],
        ]

    def domain(coords):
        return coords[0] > scale.t_min

    metric = MetricField(metric_comps, chart_id="comoving", name=f"friedmann(a={a})", domain_fn=domain)
    frame_v = make_frame((1.0, 0.0, 0.0, 0.0), metric, label="comoving")

    uu = float(u)

    def drifting_comps(coords):
        r = scale.value(coords[0])
        root = sqrt(r * r + uu * uu)
        return [root / r, uu / (r * r), 0.0, 0.0]

    frame_z = make_frame(drifting_comps, metric, label="drifting")
    v = uu / np.sqrt(1.0 + uu * uu)
    return FriedmannModel(scale, metric, frame_v, uu, frame_z, v)


def drift_speed_to_momentum(v):
    """Invert v = u (1+u^2)^(-1/2): u = v (1-v^2)^(-1/2)."""
    if not -1.0 < v < 1.0:
        raise ValueError("metric speed must satisfy |v| < 1")
    return v / np.sqrt(1.0 - v * v)


def z_chart(model: FriedmannModel, quad_tol=1e-12) -> ChartMap:
    """Chart adapted to the drifting frame.

    Forward map:
        t' = F(t) - u x1,  x1' = x1 - u H(t),  x2' = x2,  x3' = x3,
    with F(t) the integral of (R^2+u^2)^(1/2)/R and H(t) the integral of
    1/(R (R^2+u^2)^(1/2)) from 0 to t.  The inverse recovers t from
    z = t' + u x1' through the monotone map G(t) = F(t) - u^2 H(t), whose
    derivative is R/(R^2+u^2)^(1/2).
    """
    scale = model.scale
    u = model.u

    def phi_f(t):
        r = scale.value(t)
        return sqrt(r * r + u * u) / r

    def phi_h(t):
        r = scale.value(t)
        return 1.0 / (r * sqrt(r * r + u * u))

    big_f = SmoothAntiderivative(phi_f, quad_tol)
    big_h = SmoothAntiderivative(phi_h, quad_tol)

    def g_of_t(t):
        return big_f._float(t) - u * u * big_h._float(t)

    def g_rate(t):
        r = scale.value(t)
        return r / np.sqrt(r * r + u * u)

    def forward_fn(coords):
        t, x1 = coords[0], coords[1]
        return [big_f(t) - u * x1, x1 - u * big_h(t), coords[2], coords[3]]

    def _t_from_z(zval):
        # G is increasing with G(0) = 0, G -> -inf toward the domain edge.
        hi = max(1.0, abs(zval) * 4.0 + 1.0)
        while g_of_t(hi) < zval:
            hi *= 2.0
        if zval >= 0.0:
            lo = 0.1 * scale.t_min if np.isfinite(scale.t_min) else -1.0
        else:
            frac = 0.5
            while True:
                if np.isfinite(scale.t_min):
                    lo = (1.0 - frac) * scale.t_min
                else:
                    lo = -max(1.0, abs(zval) * 4.0) / frac
                if g_of_t(lo) <= zval:
                    break
                frac *= 0.5
                if frac < 1e-12:
                    raise ChartDomainError("time outside the scale-factor domain")
        return invert_monotone(g_of_t, g_rate, zval, lo, hi, tol=1e-13)

    def inverse_fn(coords):
        tp, x1p = coords[0], coords[1]
        z = tp + u * x1p
        tstar = _t_from_z(value(z))
        if isinstance(z, HyperDual):
            gp = g_rate(tstar)
            r = scale.value(tstar)
            g2 = scale.rate(tstar) * u * u / (r * r + u * u) ** 1.5
            t = z._chain(tstar, 1.0 / gp, -g2 / gp**3)
        else:
            t = tstar
        x1 = x1p + u * big_h(t)
        return [t, x1, coords[2], coords[3]]

    def inverse_jacobian_fn(coords):
        """d(t,x)/d(t',x') expressed through R at the recovered time."""
        back = inverse_fn(coords)
        r = scale.value(back[0])
        root = sqrt(r * r + u * u)
        p = root / r
        one = 1.0
        return [
            [p, u * p, 0.0, 0.0],
            [u / (r * r), (r * r + u * u) / (r * r), 0.0, 0.0],
            [0.0, 0.0, one, 0.0],
            [0.0, 0.0, 0.0, one],
        ]

    return ChartMap(
        forward_fn,
        inverse_fn,
        source_chart_id="comoving",
        target_chart_id="drift-adapted",
        name=f"z-chart(u={u})",
        inverse_jacobian_fn=inverse_jacobian_fn,
    )


def rotating_minkowski_frame(omega, radius_cap):
    """Uniformly rotating unit frame on flat space, inside its light cylinder.

    Test fixture for rotation diagnostics: nonzero vorticity, not locally
    synchronizable.
    """
    omega = float(omega)
    radius_cap = float(radius_cap)
    if radius_cap <= 0:
        raise ValueError("radius cap must be positive")
    if abs(omega) * radius_cap >= 1.0:
        raise ValueError("light-cylinder violation: need |omega| * radius_cap < 1")
    metric = minkowski_metric()

    def domain(coords):
        return coords[1] ** 2 + coords[2] ** 2 < radius_cap**2

    bounded = MetricField(
        metric.component_fn, chart_id="minkowski", name="minkowski(rotating-domain)", domain_fn=domain
    )

    def comps(coords):
        x, y = coords[1], coords[2]
        return [1.0, -omega * y, omega * x, 0.0]

    return make_frame(comps, bounded, label="rotating")


def inertial_frame(metric=None):
    """The constant time-axis frame of flat space."""
    metric = metric or minkowski_metric()
    return make_frame((1.0, 0.0, 0.0, 0.0), metric, label="inertial")


def boosted_inertial_frame(speed, metric=None):
    """A constant frame moving at ``speed`` along x^1 in flat space."""
    if not -1.0 < speed < 1.0:
        raise ValueError("boost speed must satisfy |v| < 1")
    metric = metric or minkowski_metric()
    gam = 1.0 / np.sqrt(1.0 - speed * speed)
    return make_frame((gam, gam * speed, 0.0, 0.0), metric, label="boosted")


# -- closed forms used as regression targets ---------------------------------


def friedmann_connection_closed(scale: ScaleFactor, point) -> np.ndarray:
    """Connection of the expanding metric in comoving coordinates.

    Nonzero families: Gamma^0_{kk} = R Rdot and Gamma^k_{0k} = Rdot/R.
    """
    t = as_point(point).coords[0]
    r, rd = scale.value(t), scale.rate(t)
    gam = np.zeros((DIM, DIM, DIM))
    for k in (1, 2, 3):
        gam[0, k, k] = r * rd
        gam[k, 0, k] = gam[k, k, 0] = rd / r
    return gam


def z_chart_metric_closed(model: FriedmannModel, cmap: ChartMap, primed_point) -> np.ndarray:
    """Chart-adapted metric through the printed coefficient form.

    diag(1, -Rb^2 [1 - v^2 (1 - Rb^-2)] / (1 - v^2), -Rb^2, -Rb^2) with Rb
    the scale factor at the time recovered by the full inverse map; the x^1
    coefficient simplifies to Rb^2 + u^2.
    """
    back = cmap.inverse(primed_point)
    rb = model.scale.value(back[0])
    v2 = model.v**2
    coef = rb * rb * (1.0 - v2 * (1.0 - rb**-2)) / (1.0 - v2)
    return np.diag([1.0, -coef, -rb * rb, -rb * rb])


def z_chart_connection_closed(model: FriedmannModel, cmap: ChartMap, primed_point) -> np.ndarray:
    """Connection of the chart-adapted metric, derived closed forms.

    With Rb and Rdot the scale value and rate at the recovered time and
    W = (Rb^2 + u^2)^(1/2):

        Gamma^0_{kk}          =  Rdot W
        Gamma^1_{01}          =  Rdot / W
        Gamma^1_{11}          =  u Rdot / W
        Gamma^1_{22} = ^1_{33} = -u Rdot / W
        Gamma^2_{02} = ^3_{03} =  Rdot W / Rb^2
        Gamma^2_{12} = ^3_{13} =  u Rdot W / Rb^2

    The u-proportional spatial families come from the drift of the
    recovered time along x1'.
    """
    u = model.u
    back = cmap.inverse(primed_point)
    rb = model.scale.value(back[0])
    rd = model.scale.rate(back[0])
    w = np.sqrt(rb * rb + u * u)
    gam = np.zeros((DIM, DIM, DIM))
    for k in (1, 2, 3):
        gam[0, k, k] = rd * w
    gam[1, 0, 1] = gam[1, 1, 0] = rd / w
    gam[1, 1, 1] = u * rd / w
    gam[1, 2, 2] = gam[1, 3, 3] = -u * rd / w
    for k in (2, 3):
        gam[k, 0, k] = gam[k, k, 0] = rd * w / rb**2
        gam[k, 1, k] = gam[k, k, 1] = u * rd * w / rb**2
    return gam


def theta_comoving_closed(scale: ScaleFactor, t) -> float:
    """Expansion of the comoving frame: 3 Rdot / R."""
    return 3.0 * scale.rate(t) / scale.value(t)


def theta_drifting_closed(scale: ScaleFactor, u, t) -> float:
    """Expansion of the drifting frame, derived directly.

    Rdot (3 R^2 + 2 u^2) / (R^2 (R^2 + u^2)^(1/2)); at t = 0 this is
    3a + a v^2 / 2 + O(v^4).
    """
    r, rd = scale.value(t), scale.rate(t)
    return rd * (3.0 * r * r + 2.0 * u * u) / (r * r * np.sqrt(r * r + u * u))


def theta_drifting_as_printed(scale: ScaleFactor, u, t) -> float:
    """Expansion of the drifting frame in the form printed in the source
    derivation, emitted for the record only: it disagrees with the direct
    computation at order v^2 and is not used as an oracle anywhere.
    """
    r, rd = scale.value(t), scale.rate(t)
    w = np.sqrt(r * r + u * u)
    return (r * rd + 2.0 * rd * w) / (r * r * w)


def experiment_accelerations_closed(model: FriedmannModel, v_probe):
    """Initial proper-time accelerations of the two launch cases.

    Assembled from the closed-form chart-adapted connection at the origin;
    serves as the independent target for the integrated experiment.
    Returns ((a1_case_a, a2_case_a), (a1_case_b, a2_case_b)).
    """
    a, u, v = model.a, model.u, v_probe
    w = np.sqrt(1.0 + u * u)
    g101, g111, g122, g202 = a / w, u * a / w, -u * a / w, a * w
    dt_ds2_a = 1.0 / (1.0 - (1.0 + u * u) * v * v)
    dt_ds2_b = 1.0 / (1.0 - v * v)
    acc_a = (-(2.0 * g101 * v + g111 * v * v) * dt_ds2_a, 0.0)
    acc_b = (-(g122 * v * v) * dt_ds2_b, -(2.0 * g202 * v) * dt_ds2_b)
    return acc_a, acc_b
