"""Normal-chart conditions and lab frames along geodesics."""

import numpy as np
import pytest

import framekin as fk
from framekin.hyperdual import value
from framekin.normal import TubeDomainError

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def comoving_tetrad(model, t):
    r = model.scale.value(t)
    return np.diag([1.0, 1.0 / r, 1.0 / r, 1.0 / r])


def test_minkowski_chart_is_identity(minkowski):
    chart = fk.build_normal_chart(minkowski, (0.4, 1.0, -2.0, 0.3), np.eye(4))
    p = np.array([0.4, 1.0, -2.0, 0.3])
    offs = np.array([0.01, -0.02, 0.005, 0.015])
    xi = chart.forward(tuple(p + offs))
    assert np.max(np.abs(xi - offs)) < 1e-14
    back = chart.inverse(tuple(xi))
    assert np.max(np.abs(back - (p + offs))) < 1e-14


def test_base_point_conditions(friedmann_a03):
    m = friedmann_a03
    p0 = (0.5, 0.1, -0.2, 0.3)
    chart = fk.build_normal_chart(m.metric, p0, comoving_tetrad(m, 0.5))
    pushed = chart.metric_in_chart(m.metric)
    g0 = fk.eval_metric(pushed, (0, 0, 0, 0))
    assert np.max(np.abs(g0 - ETA)) < 1e-10
    gam0 = fk.christoffel(pushed, (0, 0, 0, 0)).gamma
    assert np.max(np.abs(gam0)) < 1e-8
    assert np.max(np.abs(chart.forward(p0))) < 1e-14


def test_curvature_derivative_relation(friedmann_a03):
    m = friedmann_a03
    chart = fk.build_normal_chart(m.metric, (0.5, 0.1, -0.2, 0.3), comoving_tetrad(m, 0.5))
    dev, measured, expected = fk.normal_chart_curvature_check(m.metric, chart)
    assert np.max(np.abs(expected)) > 1e-3  # the relation is not vacuous here
    assert dev < 1e-6


def test_metric_deviation_quadratic_growth(friedmann_a03):
    m = friedmann_a03
    chart = fk.build_normal_chart(m.metric, (0.5, 0.0, 0.0, 0.0), comoving_tetrad(m, 0.5))
    exponent, ladder = fk.metric_deviation_exponent(m.metric, chart)
    assert exponent >= 1.9
    assert all(d > 0 for _, d in ladder)


def test_roundtrip_second_order_inverse(friedmann_a03):
    m = friedmann_a03
    p0 = np.array([0.5, 0.1, -0.2, 0.3])
    chart = fk.build_normal_chart(m.metric, tuple(p0), comoving_tetrad(m, 0.5))
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(20):
        x = p0 + rng.uniform(-0.01, 0.01, 4)
        back = chart.inverse(tuple(chart.forward(tuple(x))))
        worst = max(worst, float(np.max(np.abs(back - x))))
    assert worst < 1e-5  # Newton inversion makes the pair exact, well under the bound


def test_rejects_non_orthonormal_tetrad(friedmann_a03):
    with pytest.raises(ValueError):
        fk.build_normal_chart(friedmann_a03.metric, (0.5, 0, 0, 0), np.eye(4))


def test_chart_serialization(friedmann_a03):
    m = friedmann_a03
    chart = fk.build_normal_chart(m.metric, (0.5, 0, 0, 0), comoving_tetrad(m, 0.5))
    d = chart.to_json_dict()
    assert set(d) == {"base_point", "tetrad", "gamma_at_p0", "validity_radius"}
    assert len(d["gamma_at_p0"]) == 64


# -- lab frames along geodesics -------------------------------------------------


def build_comoving_lab(a, span=0.25, step=2e-3, radius=0.05):
    m = fk.make_friedmann(a)
    ctrl = fk.StepControl(method="rk4", step=step)
    path = fk.integrate_geodesic(m.metric, (0, 0, 0, 0), (1, 0, 0, 0), span, ctrl, s_min=-span)
    lab = fk.lab_frame_along_geodesic(m.metric, path, np.eye(4), validity_radius=radius)
    return m, lab


def test_flat_lab_frame_is_constant(minkowski):
    path = fk.integrate_geodesic(minkowski, (0, 0, 0, 0), (1, 0, 0, 0), 0.5, fk.StepControl(step=0.02), s_min=-0.5)
    lab = fk.lab_frame_along_geodesic(minkowski, path, np.eye(4), validity_radius=1.0)
    for p in ((0.0, 0, 0, 0), (0.2, 0.3, -0.1, 0.2)):
        q = [value(c) for c in lab.frame.component_fn(list(p))]
        assert np.max(np.abs(np.array(q) - [1, 0, 0, 0])) < 1e-12
    dec = fk.kinematic_decompose(minkowski, lab.frame, (0.1, 0.2, 0.1, -0.1))
    assert abs(dec.theta) < 1e-12


def test_lab_frame_matches_velocity_on_curve():
    m, lab = build_comoving_lab(1e-2)
    for t in (-0.2, 0.0, 0.1, 0.2):
        q = np.array([value(c) for c in lab.frame.component_fn([t, 0, 0, 0])])
        v = np.array([value(c) for c in lab.path.velocity(t)])
        assert np.max(np.abs(q - v)) < 1e-8


def test_lab_frame_chart_conditions_on_curve():
    m, lab = build_comoving_lab(1e-2)
    pushed = lab.chart.metric_in_chart(m.metric)
    for s in (0.0, 0.1, -0.15):
        g = fk.eval_metric(pushed, (s, 0, 0, 0))
        assert np.max(np.abs(g - ETA)) < 1e-8
        gam = fk.christoffel(pushed, (s, 0, 0, 0)).gamma
        assert np.max(np.abs(gam)) < 1e-8


def test_lab_frame_wedge_vanishes_on_curve():
    from framekin.frames import curl_and_wedge

    m, lab = build_comoving_lab(1e-2)
    for t in (0.0, 0.1):
        _, _, wedge = curl_and_wedge(m.metric, lab.frame, (t, 0, 0, 0))
        assert np.max(np.abs(wedge)) < 1e-8


def test_lab_expansion_zero_at_epoch():
    m, lab = build_comoving_lab(1e-3)
    res = fk.lab_frame_expansion(m.metric, lab, (0.0, 0, 0, 0))
    assert abs(res.theta) < 1e-8
    assert abs(res.theta_raw) < 1e-8
    # while the comoving congruence expands at the same event
    theta_v = fk.kinematic_decompose(m.metric, m.frame_comoving, (0.0, 0, 0, 0)).theta
    assert theta_v == pytest.approx(3e-3, abs=1e-12)


def test_lab_expansion_small_time_band():
    # on the curve the measured expansion stays within the small band spanned
    # by zero and the reference profile -3 t (Rdot/R)^2; over this range the
    # band is below 4e-7 and both comparisons are asserted
    a = 1e-3
    m, lab = build_comoving_lab(a, span=0.3)
    for t in (0.02, 0.05, 0.1):
        theta = fk.lab_frame_expansion(m.metric, lab, (t, 0, 0, 0)).theta
        printed = -3.0 * t * (a / (1 + a * t)) ** 2
        assert abs(theta) < 4e-7
        assert abs(theta - printed) < 4e-7


def test_lab_frame_free_fall_only_on_curve():
    m = fk.make_friedmann(0.5)
    ctrl = fk.StepControl(method="rk4", step=2e-3)
    path = fk.integrate_geodesic(m.metric, (0, 0, 0, 0), (1, 0, 0, 0), 0.3, ctrl, s_min=-0.3)
    lab = fk.lab_frame_along_geodesic(m.metric, path, np.eye(4), validity_radius=1.0)
    on = fk.kinematic_decompose(m.metric, lab.frame, (0.0, 0, 0, 0))
    assert np.max(np.abs(on.accel)) < 1e-8
    off = fk.kinematic_decompose(m.metric, lab.frame, (0.0, 0.4, 0, 0))
    assert np.max(np.abs(off.accel)) > 10 * 1e-8


def test_validity_tube_enforced():
    m, lab = build_comoving_lab(1e-2, radius=0.05)
    with pytest.raises(TubeDomainError):
        fk.lab_frame_expansion(m.metric, lab, (0.0, 0.2, 0, 0))
    with pytest.raises(ValueError):
        fk.lab_frame_along_geodesic(m.metric, lab.path, np.eye(4), validity_radius=-1.0)
