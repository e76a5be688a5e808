"""Unit timelike frame fields and their kinematic decomposition.

A reference frame is a unit timelike, future-pointing vector field; each of
its integral lines is an observer worldline.  The covariant derivative of
the frame's metric dual splits into acceleration, vorticity, shear and
expansion parts against the rest-space projector:

    Q_{mu;nu} = a_mu Q_nu + omega_{mu nu} + sigma_{mu nu} + (Theta/3) h_{mu nu}

with h = g - alpha (x) alpha.  Vorticity and shear are projected orthogonal
to the frame, shear is trace-free, and the five parts reassemble the full
covariant derivative exactly; the expansion rate Theta (units: inverse
time) is the covariant divergence Q^mu_{;mu}.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import (
    DIM,
    ChartPoint,
    MetricField,
    as_point,
    eval_metric,
    metric_jet,
    _gamma_from_jets,
)
from .hyperdual import jet1_vector, sqrt, value


class FrameCausalityError(ValueError):
    """Frame components are not timelike future-pointing where evaluated."""


@dataclass
class FrameField:
    """A unit timelike vector field expressed in a chart.

    ``component_fn`` returns the normalized components; ``raw_fn`` is the
    user-supplied form before unit normalization.  ``was_rescaled`` records
    whether normalization changed anything at the construction samples.
    """

    component_fn: Callable
    chart_id: str
    label: str
    metric: MetricField
    raw_fn: Optional[Callable] = None
    was_rescaled: bool = False


def make_frame(components, metric: MetricField, label="Q", sample_points=None) -> FrameField:
    """Build a frame field, normalizing to unit length pointwise.

    Args:
        components: either a length-4 constant sequence or a dual-capable
            function coords -> 4 components.
        metric: metric used for normalization and causality checks.
        label: display name.
        sample_points: points used to decide the ``was_rescaled`` flag and to
            validate causality eagerly (defaults to the chart origin).

    Raises:
        FrameCausalityError: if the components are spacelike, null or past
            pointing at any sampled point (also raised lazily at evaluation).
    """
    if callable(components):
        raw_fn = components
    else:
        const = [float(c) for c in components]

        def raw_fn(coords, _c=const):
            return list(_c)

    def normalized_fn(coords):
        q = list(raw_fn(coords))
        g = metric.component_fn(coords)
        norm2 = sum(g[i][j] * q[i] * q[j] for i in range(DIM) for j in range(DIM))
        if value(norm2) <= 0.0:
            raise FrameCausalityError(
                f"{label}: components not timelike at {[value(c) for c in coords]}"
            )
        if value(q[0]) <= 0.0:
            raise FrameCausalityError(f"{label}: components not future pointing")
        inv = 1.0 / sqrt(norm2)
        return [qi * inv for qi in q]

    if sample_points is None:
        sample_points = [np.zeros(DIM)]
    rescaled = False
    for sp in sample_points:
        coords = list(as_point(sp, metric.chart_id).coords)
        q = raw_fn(coords)
        g = metric.component_fn(coords)
        norm2 = value(sum(g[i][j] * q[i] * q[j] for i in range(DIM) for j in range(DIM)))
        if norm2 <= 0.0:
            raise FrameCausalityError(f"{label}: not timelike at sample {coords}")
        if value(q[0]) <= 0.0:
            raise FrameCausalityError(f"{label}: not future pointing at sample {coords}")
        if abs(norm2 - 1.0) > 1e-10:
            rescaled = True
    return FrameField(normalized_fn, metric.chart_id, label, metric, raw_fn, rescaled)


@dataclass
class Coframe:
    """Metric dual alpha_mu = g_{mu nu} Q^nu of a frame at a point."""

    components: np.ndarray
    point: ChartPoint


def coframe(metric: MetricField, frame: FrameField, p) -> Coframe:
    p = as_point(p, metric.chart_id)
    g = eval_metric(metric, p)
    q = np.array([value(c) for c in frame.component_fn(list(p.coords))])
    return Coframe(g @ q, p)


@dataclass
class KinematicDecomposition:
    """Acceleration, vorticity, shear, expansion and projector at a point."""

    theta: float
    accel: np.ndarray
    vorticity: np.ndarray
    shear: np.ndarray
    projection: np.ndarray
    point: ChartPoint
    frame_label: str

    def to_json_dict(self):
        return {
            "theta": self.theta,
            "accel": list(self.accel),
            "vorticity": list(self.vorticity.reshape(-1)),
            "shear": list(self.shear.reshape(-1)),
            "point": list(self.point.coords),
            "frame_label": self.frame_label,
        }


def frame_jet(frame: FrameField, p):
    """Components and first derivatives (q[mu], dq[nu, mu] = d_nu q^mu)."""
    p = as_point(p, frame.chart_id)
    return jet1_vector(frame.component_fn, p.coords)


def kinematic_decompose(metric: MetricField, frame: FrameField, p) -> KinematicDecomposition:
    """Split the covariant derivative of a frame into its kinematic parts."""
    p = as_point(p, metric.chart_id)
    g, dg = metric_jet(metric, p, order=1)
    gamma = _gamma_from_jets(g, dg)
    q, dq = frame_jet(frame, p)

    nabla = dq.T + np.einsum("mnr,r->mn", gamma, q)  # Q^mu_{;nu}
    nabla_lo = g @ nabla  # Q_{mu;nu}
    q_lo = g @ q
    theta = float(np.trace(nabla))
    accel = nabla_lo @ q
    h_lo = g - np.outer(q_lo, q_lo)
    hmix = np.eye(DIM) - np.outer(q, q_lo)  # h^a_m
    proj = np.einsum("am,bn,ab->mn", hmix, hmix, nabla_lo)
    vort = 0.5 * (proj - proj.T)
    shear = 0.5 * (proj + proj.T) - (theta / 3.0) * h_lo
    return KinematicDecomposition(theta, accel, vort, shear, h_lo, p, frame.label)


def expansion_rate(metric: MetricField, frame: FrameField, p) -> float:
    """Covariant divergence Q^mu_{;mu} alone (cheaper than the full split)."""
    p = as_point(p, metric.chart_id)
    g, dg = metric_jet(metric, p, order=1)
    gamma = _gamma_from_jets(g, dg)
    q, dq = frame_jet(frame, p)
    return float(np.trace(dq.T) + np.einsum("mmr,r->", gamma, q))


def _coframe_jet(metric: MetricField, frame: FrameField, p):
    """alpha components and first derivatives via one dual evaluation."""

    def alpha_fn(coords):
        g = metric.component_fn(coords)
        q = frame.component_fn(coords)
        return [sum(g[i][j] * q[j] for j in range(DIM)) for i in range(DIM)]

    p = as_point(p, metric.chart_id)
    return jet1_vector(alpha_fn, p.coords)


def curl_and_wedge(metric: MetricField, frame: FrameField, p):
    """(alpha, d alpha, alpha ^ d alpha) at a point.

    The 2-form is d alpha_{mu nu} = d_mu alpha_nu - d_nu alpha_mu and the
    3-form components are the cyclic combination
    alpha_mu (d alpha)_{nu rho} - alpha_nu (d alpha)_{mu rho}
    + alpha_rho (d alpha)_{mu nu}.
    """
    alpha, dalpha = _coframe_jet(metric, frame, p)
    two_form = dalpha - dalpha.T  # [mu, nu] = d_mu alpha_nu - d_nu alpha_mu
    wedge = np.zeros((DIM, DIM, DIM))
    for m in range(DIM):
        for n in range(DIM):
            for r in range(DIM):
                wedge[m, n, r] = (
                    alpha[m] * two_form[n, r]
                    - alpha[n] * two_form[m, r]
                    + alpha[r] * two_form[m, n]
                )
    return alpha, two_form, wedge


class SynchronizabilityClass(str, enum.Enum):
    PROPER_TIME = "ProperTimeSynchronizable"
    SYNCHRONIZABLE = "Synchronizable"
    LOCALLY_PROPER_TIME = "LocallyProperTimeSynchronizable"
    LOCALLY = "LocallySynchronizable"
    NON = "NonSynchronizable"


@dataclass
class SynchronizabilityResult:
    """Classification plus the raw norms it was decided on.

    The two strongest classes compare the coframe against the evaluation
    chart's own time differential, so they are chart-relative statements;
    the weaker classes are chart-free.  Callers can re-threshold using the
    reported norms.
    """

    classification: SynchronizabilityClass
    dalpha_max: float
    wedge_max: float
    alpha_spatial_max: float
    alpha_time_dev_max: float
    threshold: float
    n_samples: int

    def to_json_dict(self):
        return {
            "classification": self.classification.value,
            "dalpha_max": self.dalpha_max,
            "wedge_max": self.wedge_max,
            "alpha_spatial_max": self.alpha_spatial_max,
            "alpha_time_dev_max": self.alpha_time_dev_max,
            "threshold": self.threshold,
            "n_samples": self.n_samples,
        }


def classify_synchronizability(
    metric: MetricField, frame: FrameField, sample_points, threshold=1e-8
) -> SynchronizabilityResult:
    """Classify a frame by the exterior algebra of its coframe on samples.

    A form counts as zero when its largest component over the samples stays
    below ``threshold`` in chart units.  The classification never claims
    more than the sampled points support.
    """
    samples = list(sample_points)
    if not samples:
        raise ValueError("synchronizability needs at least one sample point")
    dal = wed = spat = tdev = 0.0
    for sp in samples:
        alpha, two_form, wedge = curl_and_wedge(metric, frame, sp)
        dal = max(dal, float(np.max(np.abs(two_form))))
        wed = max(wed, float(np.max(np.abs(wedge))))
        spat = max(spat, float(np.max(np.abs(alpha[1:]))))
        tdev = max(tdev, float(abs(alpha[0] - 1.0)))
    if wed > threshold:
        cls = SynchronizabilityClass.NON
    elif spat <= threshold and tdev <= threshold:
        cls = SynchronizabilityClass.PROPER_TIME
    elif dal <= threshold:
        cls = SynchronizabilityClass.LOCALLY_PROPER_TIME
    elif spat <= threshold:
        cls = SynchronizabilityClass.SYNCHRONIZABLE
    else:
        cls = SynchronizabilityClass.LOCALLY
    return SynchronizabilityResult(cls, dal, wed, spat, tdev, threshold, len(samples))


@dataclass
class PirfResult:
    """Free-fall and rotation evidence for the pseudo-inertial test."""

    is_pirf: bool
    max_accel: float
    max_wedge: float
    tolerance: float
    n_samples: int

    def to_json_dict(self):
        return {
            "is_pirf": self.is_pirf,
            "max_accel": self.max_accel,
            "max_wedge": self.max_wedge,
            "tolerance": self.tolerance,
            "n_samples": self.n_samples,
        }


def is_pirf(metric: MetricField, frame: FrameField, sample_points, tolerance=1e-8) -> PirfResult:
    """Frame in free fall with vanishing rotation on the sampled set.

    True iff the acceleration covector and the 3-form alpha ^ d alpha stay
    below ``tolerance`` (max-abs over components and samples).
    """
    samples = list(sample_points)
    if not samples:
        raise ValueError("pseudo-inertial test needs at least one sample point")
    max_accel = max_wedge = 0.0
    for sp in samples:
        dec = kinematic_decompose(metric, frame, sp)
        _, _, wedge = curl_and_wedge(metric, frame, sp)
        max_accel = max(max_accel, float(np.max(np.abs(dec.accel))))
        max_wedge = max(max_wedge, float(np.max(np.abs(wedge))))
    ok = max_accel < tolerance and max_wedge < tolerance
    return PirfResult(ok, max_accel, max_wedge, tolerance, len(samples))


def grid_samples(lo, hi, n=3):
    """An n^4 coordinate grid over a box, the default sampling pattern."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    axes = [np.linspace(lo[i], hi[i], n) for i in range(DIM)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, DIM)
    return [tuple(p) for p in pts]
