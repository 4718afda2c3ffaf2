"""Exact law of D(t) for fixed t > 0.

The law is two atoms, ``alpha * exp(-lambda1 t)`` at ``c1 t`` (no switch while
moving right) and ``(1 - alpha) * exp(-lambda2 t)`` at ``-c2 t``, plus an
absolutely continuous part with density ``p(x, t)`` on ``(-c2 t, c1 t)``.

``p`` is evaluated through its logarithm: with ``A = lambda1 * tau_star`` and
``B = lambda2 * (t - tau_star)``,

    log p = -A - B + log(lambda1 + lambda2 - alpha lambda2 e^-A - (1 - alpha) lambda1 e^-B)
            - log(c1 + c2) - 2 log(e^-A + e^-B (1 - e^-A)),

which stays finite long after ``p`` itself underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInterval, NonPositiveTime
from .params import ModelParams
from .quadrature import integrate

REL_TOL = 1e-10


def _check_time(t):
    if not (t > 0 and math.isfinite(t)):
        raise NonPositiveTime(f"t must be finite and > 0, got {t!r}")


def tau_star(x, t, params: ModelParams):
    """Time spent moving right by a path that sits at ``x`` at time ``t``."""
    return (params.c2 * t + x) / (params.c1 + params.c2)


def log_density(x, t, params: ModelParams):
    """``log p(x, t)``; ``-inf`` outside the open support."""
    _check_time(t)
    x = np.asarray(x, dtype=float)
    lam1, lam2, alpha = params.lambda1, params.lambda2, params.alpha
    inside = (x > -params.c2 * t) & (x < params.c1 * t)
    xs = np.where(inside, x, 0.0)
    tau = np.clip(tau_star(xs, t, params), 0.0, t)
    a = lam1 * tau
    b = lam2 * (t - tau)
    numer = lam1 + lam2 - alpha * lam2 * np.exp(-a) - (1.0 - alpha) * lam1 * np.exp(-b)
    with np.errstate(divide="ignore"):
        log_denom = np.logaddexp(-a, -b + np.log1p(-np.exp(-a)))
    out = -a - b + np.log(numer) - math.log(params.c1 + params.c2) - 2.0 * log_denom
    out = np.where(inside, out, -np.inf)
    return out if out.ndim else float(out)


def density_p(x, t, params: ModelParams):
    """Density of the continuous part of the law of D(t); 0 off ``(-c2 t, c1 t)``."""
    out = np.exp(log_density(x, t, params))
    return out if np.ndim(out) else float(out)


def point_masses(t, params: ModelParams):
    """``(mass at c1 t, mass at -c2 t)``."""
    _check_time(t)
    return params.alpha * math.exp(-params.lambda1 * t), (1.0 - params.alpha) * math.exp(-params.lambda2 * t)


@dataclass(frozen=True)
class LawOfD:
    t: float
    params: ModelParams
    mass_up: float
    mass_down: float

    @classmethod
    def at(cls, t, params):
        up, down = point_masses(t, params)
        return cls(float(t), params, up, down)

    def density(self, x):
        return density_p(x, self.t, self.params)

    def interval_probability(self, a, b, include_atoms=(True, True)):
        return interval_probability(a, b, self.t, self.params, include_atoms)


def _log_atoms(a, b, t, params, include_atoms):
    lower, upper = include_atoms
    terms = []
    if upper and params.alpha > 0 and a <= params.c1 * t <= b:
        terms.append(math.log(params.alpha) - params.lambda1 * t)
    if lower and params.alpha < 1 and a <= -params.c2 * t <= b:
        terms.append(math.log1p(-params.alpha) - params.lambda2 * t)
    return terms


def log_continuous_mass(a, b, t, params: ModelParams, rel_tol=REL_TOL):
    """``log`` of the integral of ``p(., t)`` over ``[a, b]``; ``-inf`` if empty."""
    _check_time(t)
    if a > b:
        raise InvalidInterval(f"a={a!r} > b={b!r}")
    lo = max(a, -params.c2 * t)
    hi = min(b, params.c1 * t)
    if not lo < hi:
        return -math.inf
    # scale by the largest log-density on the panel so the integrand stays O(1)
    probe = np.linspace(lo, hi, 257)[1:-1]
    mode = min(max(params.x0 * t, lo), hi)
    shift = float(np.max(log_density(np.append(probe, mode), t, params)))
    if not math.isfinite(shift):
        shift = 0.0
    value, _ = integrate(lambda x: np.exp(log_density(x, t, params) - shift), lo, hi, rel_tol=rel_tol)
    if value <= 0:
        return -math.inf
    return shift + math.log(value)


def log_interval_probability(a, b, t, params: ModelParams, include_atoms=(True, True),
                             rel_tol=REL_TOL):
    """``log P(D(t) in [a, b])``, atoms counted as ``include_atoms`` allows.

    ``include_atoms`` is ``(lower, upper)``: whether the atom at ``-c2 t`` and
    the atom at ``c1 t`` may be counted when they fall in ``[a, b]``.
    """
    terms = _log_atoms(a, b, t, params, include_atoms)
    terms.append(log_continuous_mass(a, b, t, params, rel_tol))
    return float(np.logaddexp.reduce(terms))


def interval_probability(a, b, t, params: ModelParams, include_atoms=(True, True),
                         rel_tol=REL_TOL) -> float:
    """``P(D(t) in [a, b])`` from the closed-form atoms and adaptive quadrature of ``p``."""
    _check_time(t)
    if a > b:
        raise InvalidInterval(f"a={a!r} > b={b!r}")
    atoms = sum(math.exp(v) for v in _log_atoms(a, b, t, params, include_atoms))
    return atoms + math.exp(log_continuous_mass(a, b, t, params, rel_tol))


def cdf(x, t, params: ModelParams) -> float:
    """``P(D(t) <= x)``."""
    return interval_probability(-params.c2 * t, x, t, params) if x >= -params.c2 * t else 0.0
