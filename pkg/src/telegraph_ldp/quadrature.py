"""Globally adaptive 7/15-point Gauss-Kronrod quadrature with bisection."""

from __future__ import annotations

import heapq

import numpy as np

from .errors import QuadratureFailure

# Kronrod abscissae on [0, 1); the odd-indexed ones are the 7-point Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:15:2] = _WG[2::-1]

MAX_DEPTH = 60


def gk15(f, a, b):
    """Kronrod estimate and |Kronrod - Gauss| on [a, b]."""
    half = 0.5 * (b - a)
    fx = np.asarray(f(0.5 * (a + b) + half * NODES), dtype=float)
    k = half * float(KRONROD_WEIGHTS @ fx)
    g = half * float(GAUSS_WEIGHTS @ fx)
    return k, abs(k - g)


def _initial_panels(a, b, grading):
    # geometric grading toward both endpoints, where integrands of interest peak
    if grading <= 0:
        return [a, b]
    mid = 0.5 * (a + b)
    fracs = 0.5 ** np.arange(grading, 0, -1)
    left = a + (mid - a) * fracs
    right = b - (b - mid) * fracs
    return np.unique(np.concatenate([[a], left, [mid], right[::-1], [b]])).tolist()


def integrate(f, a: float, b: float, rel_tol: float = 1e-10, abs_tol: float = 0.0,
              max_depth: int = MAX_DEPTH, grading: int = 4):
    """Integrate a vectorized ``f`` over ``[a, b]``.

    The panel with the largest error estimate is bisected until the summed
    estimate drops below ``max(abs_tol, rel_tol * |integral|)``. A panel that
    would need bisecting beyond ``max_depth`` raises :class:`QuadratureFailure`.

    Returns ``(value, error_estimate)``.
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        value, err = integrate(f, b, a, rel_tol, abs_tol, max_depth, grading)
        return -value, err
    heap = []
    total = 0.0
    total_err = 0.0
    edges = _initial_panels(a, b, grading)
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = gk15(f, lo, hi)
        heapq.heappush(heap, (-err, lo, hi, val, 0))
        total += val
        total_err += err
    while total_err > max(abs_tol, rel_tol * abs(total)):
        neg_err, lo, hi, val, depth = heapq.heappop(heap)
        if depth >= max_depth:
            raise QuadratureFailure(
                f"tolerance {rel_tol:g} not reached on [{a}, {b}] at subdivision depth {max_depth}"
            )
        mid = 0.5 * (lo + hi)
        v1, e1 = gk15(f, lo, mid)
        v2, e2 = gk15(f, mid, hi)
        total += v1 + v2 - val
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1, depth + 1))
        heapq.heappush(heap, (-e2, mid, hi, v2, depth + 1))
    # re-sum to shed accumulated update error
    total = sum(item[3] for item in heap)
    total_err = sum(-item[0] for item in heap)
    return total, total_err
