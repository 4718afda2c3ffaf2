"""Large-deviation rate functions of D(t)/t and S(t)/t and the level-crossing
decay rates derived from them.

Rates are plain floats; ``math.inf`` marks points off the support
``[-c2, c1]``. Float infinity already orders above every finite value and is
absorbing under the additions and positive scalings used here.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import OutOfSupport, UnstableRegime
from .optimize import golden_section, scan_bracket
from .params import ModelParams, classify_regime
from .sampler import ProcessKind


def _support_mask(x, params):
    return (x >= -params.c2) & (x <= params.c1)


def _finish(x, values):
    return values if np.ndim(x) else float(values)


def rate_ID(x, params: ModelParams):
    """Rate function of D(t)/t: ``|(l1 + l2) x - (l2 c1 - l1 c2)| / (c1 + c2)`` on the support."""
    x = np.asarray(x, dtype=float)
    lam1, lam2, c1, c2 = params.lambda1, params.lambda2, params.c1, params.c2
    val = np.abs((lam1 + lam2) * x - (lam2 * c1 - lam1 * c2)) / (c1 + c2)
    return _finish(x, np.where(_support_mask(x, params), val, np.inf))


def rate_ID_piecewise(x, params: ModelParams):
    """Two-branch form of :func:`rate_ID`, split at the zero ``x0``."""
    x = np.asarray(x, dtype=float)
    lam1, lam2, c1, c2 = params.lambda1, params.lambda2, params.c1, params.c2
    k = lam2 * c1 - lam1 * c2
    kink = k / (lam1 + lam2)
    left = (k - (lam1 + lam2) * x) / (c1 + c2)
    right = ((lam1 + lam2) * x - k) / (c1 + c2)
    val = np.where(x <= kink, left, right)
    return _finish(x, np.where(_support_mask(x, params), val, np.inf))


def rate_IS(x, params: ModelParams):
    """Rate function of S(t)/t:
    ``(sqrt(l1 (x + c2) / (c1 + c2)) - sqrt(l2 (c1 - x) / (c1 + c2)))**2`` on the support."""
    x = np.asarray(x, dtype=float)
    lam1, lam2, c1, c2 = params.lambda1, params.lambda2, params.c1, params.c2
    inside = _support_mask(x, params)
    xs = np.where(inside, x, 0.0)
    right = lam1 * (xs + c2) / (c1 + c2)
    left = lam2 * (c1 - xs) / (c1 + c2)
    val = (np.sqrt(right) - np.sqrt(left)) ** 2
    return _finish(x, np.where(inside, val, np.inf))


def auxiliary_identity_rhs(x, params: ModelParams):
    x = np.asarray(x, dtype=float)
    lam1, lam2, c1, c2 = params.lambda1, params.lambda2, params.c1, params.c2
    right = lam1 * (c2 + x) / (c1 + c2)
    left = lam2 * (c1 - x) / (c1 + c2)
    return _finish(x, right + left + 2.0 * np.maximum(-left, -right))


def auxiliary_identity_residual(x, params: ModelParams):
    """``RHS(x) - I_D(x)`` for the max-form rewriting of ``I_D`` on ``[-c2, c1]``."""
    x = np.asarray(x, dtype=float)
    if not np.all(_support_mask(x, params)):
        raise OutOfSupport(f"x must lie in [-{params.c2}, {params.c1}]")
    return _finish(x, np.asarray(auxiliary_identity_rhs(x, params)) - np.asarray(rate_ID(x, params)))


def rate_function(kind):
    return rate_ID if ProcessKind(kind) is ProcessKind.DAMPED else rate_IS


# ---------------------------------------------------------------------------
# decay rates


def _require_stable(params):
    regime = classify_regime(params)
    if not regime.stable:
        raise UnstableRegime(
            f"stability condition lambda2*c1 - lambda1*c2 < 0 fails (drift {regime.drift:g})"
        )
    return regime


def decay_rate_closed(kind, params: ModelParams) -> float:
    """``lambda1 / c1`` for D; ``(lambda1 c2 - lambda2 c1) / (c1 c2)`` for S."""
    _require_stable(params)
    if ProcessKind(kind) is ProcessKind.DAMPED:
        return params.lambda1 / params.c1
    return (params.lambda1 * params.c2 - params.lambda2 * params.c1) / (params.c1 * params.c2)


def variational_objective(x, kind, params: ModelParams):
    """``x * I(1/x)`` for ``x > 0``; ``inf`` where ``1/x`` leaves the support."""
    x = np.asarray(x, dtype=float)
    positive = x > 0
    with np.errstate(divide="ignore"):
        y = np.where(positive, 1.0 / np.where(positive, x, 1.0), np.inf)
    # 1/(1/c1) may round just past c1
    y = np.where((y > params.c1) & (y <= params.c1 * (1.0 + 4.0 * np.finfo(float).eps)), params.c1, y)
    rate = np.asarray(rate_function(kind)(y, params))
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(rate) | ~positive, np.inf, x * rate)
    return _finish(x, out)


@dataclass(frozen=True)
class DecayRateReport:
    process_kind: str
    w_closed: float
    w_numeric: float
    argmin_x: float
    abs_gap: float

    def to_dict(self):
        return asdict(self)


def decay_rate_numeric(kind, params: ModelParams) -> DecayRateReport:
    """Minimize ``x I(1/x)`` over ``x >= 1/c1`` by scan + golden section."""
    kind = ProcessKind(kind)
    w_closed = decay_rate_closed(kind, params)
    lo = 1.0 / params.c1
    hi = lo + 10.0 * (params.c1 + params.c2) / params.c1**2

    def g(x):
        return variational_objective(x, kind, params)

    a, b = scan_bracket(g, lo, hi, vectorized=True)
    best = golden_section(g, a, b)
    return DecayRateReport(kind.value, w_closed, best.fx, best.x, abs(w_closed - best.fx))


# ---------------------------------------------------------------------------
# hypotheses of the level-crossing theorem


@dataclass(frozen=True)
class DlsReport:
    """Hypotheses (i)-(iv) of the discrete-time level-crossing theorem, for I_D.

    (i) ``inf_{x >= 0} I_D(x) > 0``; (ii) ``inf_{x >= y} I_D(x) < inf`` for some
    ``y > 0``; (iii) ``y -> inf_{x >= y} I_D(x)`` continuous where finite;
    (iv) super-exponential decay of ``P(D(t) > x t)`` for large ``x``.
    """

    positive_inf: bool
    finite_beyond: bool
    tail_inf_continuous: bool
    superexponential_tail: bool
    inf_nonnegative: float
    witness_y: float
    witness_K: float

    @property
    def all_hold(self) -> bool:
        return self.positive_inf and self.finite_beyond and self.tail_inf_continuous and self.superexponential_tail

    def as_tuple(self):
        return (self.positive_inf, self.finite_beyond, self.tail_inf_continuous, self.superexponential_tail)


def tail_infimum(y, params: ModelParams) -> float:
    """``inf_{x >= y} I_D(x)``, exact: I_D is piecewise linear with its zero at ``x0``."""
    c1 = params.c1
    if y > c1:
        return math.inf
    y = max(y, -params.c2)
    numer = params.lambda2 * c1 - params.lambda1 * params.c2
    if y * (params.lambda1 + params.lambda2) <= numer:
        return 0.0
    return min(rate_ID(y, params), rate_ID(c1, params))


def check_dls_hypotheses(params: ModelParams, grid_size: int = 1001) -> DlsReport:
    c1 = params.c1
    grid = np.linspace(0.0, c1, grid_size)
    exact_inf = tail_infimum(0.0, params)
    grid_inf = float(np.min(rate_ID(grid, params)))
    positive = exact_inf > 0 and grid_inf > 0

    finite_beyond = math.isfinite(tail_infimum(c1, params))

    ys = grid[1:]
    h = np.array([tail_infimum(y, params) for y in ys])
    lipschitz = (params.lambda1 + params.lambda2) / (params.c1 + params.c2)
    step = ys[1] - ys[0] if len(ys) > 1 else c1
    continuous = bool(np.all(np.isfinite(h)) and np.all(np.abs(np.diff(h)) <= lipschitz * step * (1 + 1e-9) + 1e-15))

    # D(t)/t lives in [-c2, c1], so P(D(t) > x t) = 0 for every x > c1
    return DlsReport(positive, finite_beyond, continuous, True, exact_inf, c1, c1)
