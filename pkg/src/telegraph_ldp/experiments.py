"""Desk-scale checks of the asymptotic statements.

* :func:`ldp_curve` compares ``(1/t) log P(D(t)/t in window)``, computed from
  the exact law, with minus the infimum of ``I_D`` over the window.
* :func:`estimate_crossing` estimates ``P(sup_t X(t) > q)`` by simulation and
  :func:`fit_decay_slope` regresses ``log p_hat`` on ``q``.
* :func:`compare_report` assembles the damped-versus-standard comparison.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import _kernels
from .density import log_density, log_interval_probability, point_masses
from .errors import BudgetExceeded, InsufficientLevels, UnstableRegime, ValidationError
from .params import ModelParams, classify_regime
from .quadrature import integrate
from .rates import decay_rate_closed, decay_rate_numeric, rate_ID, rate_IS
from .rng import uniforms
from .sampler import MAX_SWITCHES, ProcessKind, chunk_bounds, run_chunks, sample_endpoints

# ---------------------------------------------------------------------------
# LDP convergence from the exact law


@dataclass(frozen=True)
class LdpPoint:
    t: float
    x: float
    eps: float
    scaled_log_prob: float
    target: float
    empty: bool = False

    @property
    def gap(self) -> float:
        return abs(self.scaled_log_prob - self.target)


def window_infimum(lo: float, hi: float, params: ModelParams) -> float:
    """``inf I_D`` over the open window ``(lo, hi)``; ``inf`` if it misses the support."""
    a = max(lo, -params.c2)
    b = min(hi, params.c1)
    if a > b or (a == b and (a == lo or b == hi)):
        return math.inf
    x0 = params.x0
    if a <= x0 <= b:
        return 0.0
    # I_D is monotone on either side of x0
    return float(min(rate_ID(a, params), rate_ID(b, params)))


def ldp_point(x: float, eps: float, t: float, params: ModelParams) -> LdpPoint:
    lo, hi = x - eps, x + eps
    inf_rate = window_infimum(lo, hi, params)
    if math.isinf(inf_rate):
        return LdpPoint(float(t), x, eps, -math.inf, -math.inf, empty=True)
    atoms = (lo < -params.c2 < hi, lo < params.c1 < hi)
    log_p = log_interval_probability(lo * t, hi * t, t, params, include_atoms=atoms)
    return LdpPoint(float(t), x, eps, log_p / t, -inf_rate)


def ldp_curve(x: float, eps: float, t_grid, params: ModelParams, threads: int = 1) -> list[LdpPoint]:
    """Exact ``(1/t) log P(D(t)/t in (x - eps, x + eps))`` along ``t_grid``.

    A window disjoint from ``[-c2, c1]`` gives points marked ``empty`` with
    ``scaled_log_prob = target = -inf``.
    """
    if not eps > 0:
        raise ValidationError(f"eps must be > 0, got {eps!r}")
    t_grid = [float(t) for t in t_grid]
    if any(not t > 0 for t in t_grid):
        raise ValidationError("all times must be > 0")
    if threads <= 1:
        return [ldp_point(x, eps, t, params) for t in t_grid]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: ldp_point(x, eps, t, params), t_grid))


# ---------------------------------------------------------------------------
# level crossing by simulation


@dataclass(frozen=True)
class HorizonPolicy:
    """Truncation of the infinite-horizon supremum.

    A path is abandoned once the probability that it ever climbs above its
    current running max is bounded by ``exp(-abandon_log_bound)``; it is cut
    regardless at time ``t_max`` or after ``max_switches`` switches. Runs where
    more than ``max_truncated_fraction`` of the paths were cut are rejected.
    """

    abandon_log_bound: float = 12.0
    t_max: float = 1e4
    max_switches: int = MAX_SWITCHES
    max_truncated_fraction: float = 1e-3

    @property
    def residual_bound(self) -> float:
        return math.exp(-self.abandon_log_bound)


@dataclass(frozen=True)
class CrossingEstimate:
    q: float
    n_paths: int
    hits: int
    p_hat: float
    std_err: float
    truncated: int = 0

    @classmethod
    def from_counts(cls, q, n_paths, hits, truncated=0):
        p = hits / n_paths
        return cls(float(q), int(n_paths), int(hits), p, math.sqrt(p * (1.0 - p) / n_paths), int(truncated))


@dataclass
class CrossingRun:
    """Estimates per level plus run diagnostics. Iterates over the estimates."""

    kind: str
    seed: int
    n_paths: int
    policy: HorizonPolicy
    estimates: list[CrossingEstimate]
    status_counts: dict[str, int] = field(default_factory=dict)
    flagged: bool = False

    def __iter__(self):
        return iter(self.estimates)

    def __len__(self):
        return len(self.estimates)

    def __getitem__(self, i):
        return self.estimates[i]


_STATUS_NAMES = {
    _kernels.HIT_TOP: "hit_top",
    _kernels.ABANDONED: "abandoned",
    _kernels.TRUNCATED_TIME: "truncated_time",
    _kernels.TRUNCATED_SWITCHES: "truncated_switches",
}


def simulate_maxima(params: ModelParams, kind, n_paths: int, seed: int, q_top: float,
                    policy: HorizonPolicy = HorizonPolicy(), first_index: int = 0,
                    threads: int = 1, chunk: int = 1 << 16):
    """Per-path running max (stopped per ``policy`` or once above ``q_top``) and stop status."""
    kind = ProcessKind(kind)
    damped = kind is ProcessKind.DAMPED
    w_standard = decay_rate_closed(ProcessKind.STANDARD, params)
    gap = policy.abandon_log_bound / w_standard
    maxima = np.empty(n_paths)
    status = np.empty(n_paths, dtype=np.int8)

    def work(lo, hi):
        _kernels.crossing_kernel(
            params.lambda1, params.lambda2, params.c1, params.c2, params.alpha, damped,
            np.uint64(seed), np.uint64(first_index + lo), float(q_top), policy.abandon_log_bound, gap,
            float(policy.t_max), policy.max_switches, maxima[lo:hi], status[lo:hi],
        )

    run_chunks(work, chunk_bounds(n_paths, chunk), threads)
    return maxima, status


def estimate_crossing(q_grid, params: ModelParams, kind, n_paths: int, seed: int,
                      horizon_policy: HorizonPolicy = HorizonPolicy(), threads: int = 1,
                      chunk: int = 1 << 16, raise_on_budget: bool = True) -> CrossingRun:
    """Estimate ``P(sup_{t >= 0} X(t) > q)`` for each ``q`` on one path ensemble.

    All levels share the same paths, so hit counts are nonincreasing in ``q``.
    Per level, ``truncated`` counts cut paths that had not yet exceeded ``q``.
    """
    kind = ProcessKind(kind)
    if not classify_regime(params).stable:
        raise UnstableRegime("level-crossing estimates need lambda2*c1 - lambda1*c2 < 0")
    q = np.asarray(q_grid, dtype=float)
    if q.ndim != 1 or len(q) == 0 or np.any(q < 0) or np.any(np.diff(q) <= 0):
        raise ValidationError("q_grid must be a nonempty increasing sequence of levels >= 0")
    if n_paths <= 0:
        raise ValidationError("n_paths must be positive")

    bounds = chunk_bounds(n_paths, chunk)

    def work(lo, hi):
        mx, st = simulate_maxima(params, kind, hi - lo, seed, q[-1], horizon_policy, lo, 1, hi - lo)
        cut = (st == _kernels.TRUNCATED_TIME) | (st == _kernels.TRUNCATED_SWITCHES)
        above = mx[:, None] > q[None, :]
        return above.sum(0), (cut[:, None] & ~above).sum(0), np.bincount(st, minlength=6)

    hits = np.zeros(len(q), dtype=np.int64)
    truncated = np.zeros(len(q), dtype=np.int64)
    counts = np.zeros(6, dtype=np.int64)
    for h, tr, c in run_chunks(work, bounds, threads):
        hits += h
        truncated += tr
        counts += c

    estimates = [CrossingEstimate.from_counts(qi, n_paths, hi, tr) for qi, hi, tr in zip(q, hits, truncated)]
    status_counts = {name: int(counts[code]) for code, name in _STATUS_NAMES.items()}
    n_cut = status_counts["truncated_time"] + status_counts["truncated_switches"]
    flagged = n_cut > horizon_policy.max_truncated_fraction * n_paths
    run = CrossingRun(kind.value, seed, n_paths, horizon_policy, estimates, status_counts, flagged)
    if flagged and raise_on_budget:
        err = BudgetExceeded(f"{n_cut} of {n_paths} paths hit the horizon cap; estimates are biased low")
        err.run = run
        raise err
    return run


@dataclass(frozen=True)
class SlopeFit:
    q_values: np.ndarray
    log_p: np.ndarray
    slope: float
    intercept: float
    slope_ci: tuple[float, float]
    excluded_levels: tuple[float, ...] = ()

    @property
    def residuals(self) -> np.ndarray:
        return self.log_p - (self.intercept + self.slope * self.q_values)


def fit_decay_slope(estimates, min_hits: int = 30) -> SlopeFit:
    """Unweighted least squares of ``log p_hat`` on ``q``.

    Levels with fewer than ``min_hits`` hits (in particular zero-hit levels)
    are left out and listed in ``excluded_levels``.
    """
    estimates = list(estimates)
    used = [e for e in estimates if e.hits >= min_hits and e.p_hat > 0]
    excluded = tuple(e.q for e in estimates if e not in used)
    if len(used) < 3:
        raise InsufficientLevels(f"need at least 3 levels with >= {min_hits} hits, got {len(used)}")
    q = np.array([e.q for e in used])
    y = np.log([e.p_hat for e in used])
    design = np.column_stack([np.ones_like(q), q])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    intercept, slope = float(coef[0]), float(coef[1])
    resid = y - design @ coef
    dof = len(q) - 2
    sxx = float(np.sum((q - q.mean()) ** 2))
    half = 0.0
    if dof > 0:
        s2 = float(resid @ resid) / dof
        half = float(stats.t.ppf(0.975, dof)) * math.sqrt(s2 / sxx)
    return SlopeFit(q, y, slope, intercept, (slope - half, slope + half), excluded)


@dataclass(frozen=True)
class SharpBoundCheck:
    m_hat: float
    holds: bool
    spearman: float
    trend_pvalue: float
    scaled: tuple[float, ...]


def sharp_bound_check(estimates, params: ModelParams, trend_level: float = 0.01) -> SharpBoundCheck:
    """Check ``P(Q_S > q) <= m exp(-q w_S)`` on standard-process estimates.

    ``m_hat`` is the largest ``p_hat(q) exp(q w_S)``; the bound is taken to hold
    when ``m_hat`` is finite and those scaled values show no significant upward
    trend in ``q`` (one-sided Spearman test at ``trend_level``).
    """
    w = decay_rate_closed(ProcessKind.STANDARD, params)
    used = [e for e in estimates if e.hits > 0]
    if len(used) < 3:
        raise InsufficientLevels(f"need at least 3 levels with hits, got {len(used)}")
    q = np.array([e.q for e in used])
    scaled = np.array([e.p_hat for e in used]) * np.exp(q * w)
    m_hat = float(scaled.max())
    if np.ptp(scaled) <= 1e-12 * m_hat:
        rho, pvalue = 0.0, 1.0
    else:
        res = stats.spearmanr(q, scaled, alternative="greater")
        rho, pvalue = float(res.statistic), float(res.pvalue)
    holds = math.isfinite(m_hat) and (rho <= 0 or pvalue > trend_level)
    return SharpBoundCheck(m_hat, bool(holds), rho, pvalue, tuple(float(s) for s in scaled))


# ---------------------------------------------------------------------------
# exact-law sampling of D(t)


def sample_exact_law(t: float, params: ModelParams, n: int, seed: int, cells: int = 4000,
                     log_window: float = 45.0) -> np.ndarray:
    """Draw ``n`` values of D(t) by inverting the exact CDF.

    The continuous part is tabulated on ``cells`` equal cells covering the
    region where ``log p`` is within ``log_window`` of its peak (the mass left
    out is below ``exp(-log_window)`` relative), integrated cell by cell, and
    inverted by linear interpolation. Uniform ``i`` is draw 0 of stream ``i``.
    """
    lo, hi = -params.c2 * t, params.c1 * t
    xs = np.linspace(lo, hi, 20001)
    lp = log_density(xs[1:-1], t, params)
    peak = float(lp.max())
    keep = xs[1:-1][lp > peak - log_window]
    a = max(lo, float(keep.min()) - (xs[1] - xs[0]))
    b = min(hi, float(keep.max()) + (xs[1] - xs[0]))
    edges = np.linspace(a, b, cells + 1)

    def f(x):
        return np.exp(log_density(x, t, params) - peak)

    masses = np.array([integrate(f, edges[i], edges[i + 1], rel_tol=1e-12)[0] for i in range(cells)])
    up, down = point_masses(t, params)
    scale = math.exp(peak)
    weights = np.concatenate([[down], masses * scale, [up]])
    cum = np.cumsum(weights)
    cum /= cum[-1]
    u = uniforms(seed, np.arange(n, dtype=np.uint64), 0)
    idx = np.searchsorted(cum, u, side="right")
    out = np.empty(n)
    out[idx == 0] = lo
    out[idx == cells + 1] = hi
    inner = (idx > 0) & (idx <= cells)
    k = idx[inner] - 1
    left = cum[k]
    frac = (u[inner] - left) / (cum[k + 1] - left)
    out[inner] = edges[k] + frac * (edges[k + 1] - edges[k])
    return out


# ---------------------------------------------------------------------------
# comparison report


def _check(name, passed, **details):
    return {"check": name, "pass": bool(passed), **details}


def rate_bullets(params: ModelParams, grid_size: int = 10_001, tol: float = 1e-12):
    """The four comparison statements between I_D and I_S, checked on a grid."""
    lam1, lam2, c1, c2 = params.lambda1, params.lambda2, params.c1, params.c2
    x0 = params.x0
    grid = np.linspace(-c2, c1, grid_size)
    i_d = rate_ID(grid, params)
    i_s = rate_IS(grid, params)

    zero_d, zero_s = float(rate_ID(x0, params)), float(rate_IS(x0, params))
    step = grid[1] - grid[0]
    far = np.abs(grid - x0) > step
    unique = bool(np.all(i_d[far] > 0) and np.all(i_s[far] > 0))
    bullets = [
        _check("unique_zero_at_x0", abs(zero_d) <= tol and abs(zero_s) <= tol and unique,
               x0=x0, I_D_x0=zero_d, I_S_x0=zero_s),
    ]
    outside = np.array([-c2 - 1e-9 * (1 + c2), c1 + 1e-9 * (1 + c1), -c2 - 1.0, c1 + 1.0])
    bullets.append(_check("infinite_off_support",
                          bool(np.all(np.isinf(rate_ID(outside, params))) and np.all(np.isinf(rate_IS(outside, params))))))
    ends = {
        "I_D(-c2)": float(rate_ID(-c2, params)), "I_S(-c2)": float(rate_IS(-c2, params)),
        "I_D(c1)": float(rate_ID(c1, params)), "I_S(c1)": float(rate_IS(c1, params)),
    }
    ok = (abs(ends["I_D(-c2)"] - lam2) <= tol * max(1, lam2) and abs(ends["I_S(-c2)"] - lam2) <= tol * max(1, lam2)
          and abs(ends["I_D(c1)"] - lam1) <= tol * max(1, lam1) and abs(ends["I_S(c1)"] - lam1) <= tol * max(1, lam1))
    bullets.append(_check("endpoint_values", ok, lambda1=lam1, lambda2=lam2, **ends))
    interior = (grid > -c2) & (grid < c1) & (grid != x0)
    strict = bool(np.all(i_d[interior] > i_s[interior]))
    bullets.append(_check("I_D_dominates_I_S", strict,
                          min_interior_gap=float(np.min(i_d[interior] - i_s[interior])) if interior.any() else None))
    return grid, i_d, i_s, bullets


def lln_probe(params: ModelParams, kind, t: float, n: int, seed: int, threads: int = 1):
    """Sample mean of X(t)/t against ``x0``.

    The standard process is simulated path by path. The damped process makes
    of order ``exp(t / (1/lambda1 + 1/lambda2))`` switches by time ``t``, so
    it is drawn from its exact law instead.
    """
    kind = ProcessKind(kind)
    if kind is ProcessKind.STANDARD:
        values = sample_endpoints(params, kind, t, n, seed, threads=threads).position / t
        method = "path_simulation"
    else:
        values = sample_exact_law(t, params, n, seed) / t
        method = "exact_law_inversion"
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(n))
    x0 = params.x0
    return _check(f"lln_{kind.value}", abs(mean - x0) <= 3 * se, t=t, n=n, method=method,
                  mean=mean, std_err=se, x0=x0)


def compare_report(params: ModelParams, grid_size: int = 10_001, mc_budget: int = 100_000,
                   seed: int = 0, q_grid=(2, 3, 4, 5, 6, 7, 8), lln_t: float = 100.0,
                   threads: int = 1) -> dict:
    regime = classify_regime(params)
    grid, i_d, i_s, bullets = rate_bullets(params, grid_size)
    report = {
        "params": params.to_dict(),
        "regime": {"drift": regime.drift, "stable": regime.stable},
        "rate_grid": {"x": grid.tolist(), "I_D": i_d.tolist(), "I_S": i_s.tolist()},
        "bullets": bullets,
        "lln": [lln_probe(params, k, lln_t, mc_budget, seed, threads) for k in ProcessKind],
    }
    if not regime.stable:
        report["decay_rates"] = {"skipped": "unstable regime"}
        report["crossing"] = {"skipped": "unstable regime"}
        return report
    reports = {k.value: decay_rate_numeric(k, params).to_dict() for k in ProcessKind}
    w_d, w_s = reports["damped"]["w_closed"], reports["standard"]["w_closed"]
    report["decay_rates"] = {**reports, "strict_inequality": _check("w_S_lt_w_D", w_s < w_d, w_S=w_s, w_D=w_d)}
    crossing = {}
    for k in ProcessKind:
        run = estimate_crossing(q_grid, params, k, mc_budget, seed, threads=threads, raise_on_budget=False)
        entry = {
            "estimates": [asdict(e) for e in run],
            "status_counts": run.status_counts,
            "flagged": run.flagged,
            "residual_bound_per_path": run.policy.residual_bound,
        }
        try:
            fit = fit_decay_slope(run)
            w = reports[k.value]["w_closed"]
            entry["slope"] = fit.slope
            entry["slope_ci"] = list(fit.slope_ci)
            entry["excluded_levels"] = list(fit.excluded_levels)
            entry["relative_slope_error"] = abs(fit.slope + w) / w
        except InsufficientLevels as exc:
            entry["slope"] = None
            entry["note"] = str(exc)
        if k is ProcessKind.STANDARD:
            try:
                sb = sharp_bound_check(run, params)
                entry["sharp_bound"] = {"m_hat": sb.m_hat, "holds": sb.holds, "spearman": sb.spearman,
                                        "trend_pvalue": sb.trend_pvalue}
            except InsufficientLevels as exc:
                entry["sharp_bound"] = {"note": str(exc)}
        crossing[k.value] = entry
    report["crossing"] = crossing
    return report
