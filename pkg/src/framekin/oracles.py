"""Independent finite-difference evaluators.

These exist as cross-checks for the exact derivative engine and for report
evidence.  Production code paths never derive geometry from them; tests and
evidence payloads do.
"""

from __future__ import annotations

import numpy as np

from .geometry import DIM, MetricField, as_point, eval_metric
from .hyperdual import value


def fd_metric_derivatives(metric: MetricField, p, step=1e-5) -> np.ndarray:
    """Central-difference first derivatives dg[sigma, mu, nu]."""
    p = as_point(p, metric.chart_id)
    x = p.array
    dg = np.zeros((DIM, DIM, DIM))
    for s in range(DIM):
        hi = x.copy()
        lo = x.copy()
        hi[s] += step
        lo[s] -= step
        dg[s] = (eval_metric(metric, hi) - eval_metric(metric, lo)) / (2 * step)
    return dg


def fd_connection_derivatives(metric: MetricField, p, step=1e-4) -> np.ndarray:
    """Central-difference derivatives of the connection, Richardson refined.

    Returns dgamma[sigma, mu, nu, rho] = d_sigma Gamma^mu_{nu rho}.
    """
    from .geometry import christoffel

    p = as_point(p, metric.chart_id)
    x = p.array

    def diff(h):
        out = np.zeros((DIM, DIM, DIM, DIM))
        for s in range(DIM):
            hi = x.copy()
            lo = x.copy()
            hi[s] += h
            lo[s] -= h
            out[s] = (christoffel(metric, hi).gamma - christoffel(metric, lo).gamma) / (2 * h)
        return out

    d1 = diff(step)
    d2 = diff(step / 2.0)
    return (4.0 * d2 - d1) / 3.0


def fd_riemann_from_connection(metric: MetricField, p, step=1e-4) -> np.ndarray:
    """Curvature assembled from finite differences of the connection.

    Same sign convention as geometry.riemann; serves as its oracle.
    """
    from .geometry import christoffel

    p = as_point(p, metric.chart_id)
    gamma = christoffel(metric, p).gamma
    dgamma = fd_connection_derivatives(metric, p, step)
    return (
        np.einsum("cadb->abcd", dgamma)
        - np.einsum("dacb->abcd", dgamma)
        + np.einsum("acl,ldb->abcd", gamma, gamma)
        - np.einsum("adl,lcb->abcd", gamma, gamma)
    )


def fd_divergence(metric: MetricField, frame, p, step=1e-4) -> float:
    """Scalar-density divergence (1/sqrt|g|) d_mu (sqrt|g| Q^mu).

    Independent route to the expansion rate: no connection coefficients and
    no exact-derivative engine, only metric determinants and central
    differences of the frame components, Richardson refined.
    """
    p = as_point(p, metric.chart_id)
    x = p.array

    def dens(coords, mu):
        g = eval_metric(metric, coords)
        q = frame.component_fn([float(c) for c in coords])
        return np.sqrt(abs(np.linalg.det(g))) * value(q[mu])

    def diff(h):
        total = 0.0
        for mu in range(DIM):
            hi = x.copy()
            lo = x.copy()
            hi[mu] += h
            lo[mu] -= h
            total += (dens(hi, mu) - dens(lo, mu)) / (2 * h)
        return total

    d1 = diff(step)
    d2 = diff(step / 2.0)
    refined = (4.0 * d2 - d1) / 3.0
    g0 = eval_metric(metric, p)
    return float(refined / np.sqrt(abs(np.linalg.det(g0))))
