"""Bracketed one-dimensional minimization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OptimizationFailure

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Minimum:
    x: float
    fx: float
    iterations: int
    lo: float
    hi: float


def golden_section(f, lo: float, hi: float, xtol: float = 1e-13, max_iter: int = 500) -> Minimum:
    """Golden-section search for a unimodal ``f`` on ``[lo, hi]``.

    The endpoints are candidates too, so a minimum on the boundary is returned
    as such rather than approximated from inside.
    """
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > xtol * max(1.0, abs(a) + abs(b)) and it < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        it += 1
    candidates = [(f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi)]
    fx, x = min(candidates)
    return Minimum(x, fx, it, lo, hi)


def scan_bracket(f, lo: float, hi: float, points: int = 129, max_expand: int = 60,
                 vectorized: bool = False):
    """Coarse scan of ``f`` on ``[lo, hi]`` returning a bracket around the grid minimum.

    While the minimum sits on the upper end the bracket is widened (doubling
    its width). With ``vectorized`` the scan calls ``f`` once on the whole
    grid. Raises :class:`OptimizationFailure` if it never turns, or if
    the scanned values are not unimodal.
    """
    for _ in range(max_expand):
        xs = np.linspace(lo, hi, points)
        fs = np.asarray(f(xs), dtype=float) if vectorized else np.array([f(x) for x in xs])
        if not np.all(np.isfinite(fs)):
            raise OptimizationFailure("objective is not finite on the search bracket")
        i = int(np.argmin(fs))
        if i < points - 1:
            _check_unimodal(fs, i)
            return float(xs[max(i - 1, 0)]), float(xs[i + 1])
        hi = lo + 2.0 * (hi - lo)
    raise OptimizationFailure(f"no interior minimum found up to x = {hi:g}")


def _check_unimodal(fs, i):
    slack = 1e-12 * max(1.0, float(np.max(np.abs(fs))))
    if np.any(np.diff(fs[: i + 1]) > slack) or np.any(np.diff(fs[i:]) < -slack):
        raise OptimizationFailure("objective is not unimodal on the scanned bracket")
