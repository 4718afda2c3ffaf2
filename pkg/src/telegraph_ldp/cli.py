"""Command-line front end.

Exit status: 0 on success, 1 on invalid input (bad flags, parameters, regime),
2 on numerical failure. Data go to ``--out-dir`` as CSV/JSON next to a
``<command>.manifest.json``; without ``--out-dir`` they are printed to stdout.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .density import log_density
from .errors import BudgetExceeded, NumericalError, TelegraphError, ValidationError
from .experiments import (
    HorizonPolicy,
    compare_report,
    estimate_crossing,
    fit_decay_slope,
    ldp_curve,
    sharp_bound_check,
)
from .output import csv_text, json_text, write_csv, write_json, write_manifest
from .params import load_params
from .rates import decay_rate_numeric, rate_ID, rate_IS
from .rng import RngStream
from .sampler import ProcessKind, sample_path, write_paths_csv

COMMANDS = ("density", "rate", "decay", "simulate", "ldp-verify", "crossing", "compare")
_VALUE_FLAGS = ("--grid", "--q-grid", "--x", "--times")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:step``; ``hi`` is included when ``(hi - lo) / step`` is integral within 1e-9."""
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:step, got {text!r}") from None
    if not (step > 0 and hi >= lo and math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError(f"grid needs lo <= hi and step > 0, got {text!r}")
    span = (hi - lo) / step
    n = round(span)
    if abs(span - n) <= 1e-9:
        values = [lo + k * step for k in range(n)] + [hi]
    else:
        values = [lo + k * step for k in range(math.floor(span) + 1)]
    return np.array([float(f"{v:.12g}") for v in values])


def parse_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="telegraph-ldp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--params", required=True, help="JSON file with lambda1, lambda2, c1, c2, alpha")
        p.add_argument("--out-dir", type=Path, default=None)
        p.add_argument("--threads", type=int, default=1, help="worker count; never changes results")
        return p

    p = add("density", "exact density of D(t) on a grid")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--grid", required=True, help="lo:hi:step")

    p = add("rate", "rate functions I_D and I_S on a grid")
    p.add_argument("--grid", default=None, help="lo:hi:step (default: 1001 points on [-c2, c1])")

    p = add("decay", "level-crossing decay rate, closed form and variational")
    p.add_argument("--process", choices=[k.value for k in ProcessKind], default="damped")

    p = add("simulate", "dump sampled path skeletons")
    p.add_argument("--process", choices=[k.value for k in ProcessKind], default="damped")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)

    p = add("ldp-verify", "scaled log-probabilities of windows against the rate function")
    p.add_argument("--x", default="-1,0,0.5", help="window centres")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--times", default="25,50,100,200")

    p = add("crossing", "Monte Carlo level-crossing probabilities and slope fit")
    p.add_argument("--process", choices=[k.value for k in ProcessKind], default="damped")
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q-grid", default="2:8:1")

    p = add("compare", "damped versus standard comparison report")
    p.add_argument("--grid-size", type=int, default=10_001)
    p.add_argument("--n", type=int, default=100_000, help="Monte Carlo budget")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _normalize_argv(argv):
    # let values such as -2:1:0.01 or -1,0 through argparse's option detection
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _emit(args, command, params, name, text=None, write=None, seed=None, budgets=None):
    if args.out_dir is None:
        if text is not None:
            sys.stdout.write(text)
        return []
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / name
    write(path)
    write_manifest(args.out_dir, command, args.argv, params, seed, budgets or {}, [path])
    return [path]


def _cmd_density(args, params):
    xs = parse_grid(args.grid)
    lp = np.asarray(log_density(xs, args.t, params))
    rows = [(x, args.t, math.exp(v), v) for x, v in zip(xs, lp)]
    header = ["x", "t", "p", "log_p"]
    return _emit(args, "density", params, "density.csv", csv_text(header, rows),
                 lambda path: write_csv(path, header, rows), budgets={"points": len(rows)})


def _cmd_rate(args, params):
    xs = parse_grid(args.grid) if args.grid else np.linspace(-params.c2, params.c1, 1001)
    rows = list(zip(xs, rate_ID(xs, params), rate_IS(xs, params)))
    header = ["x", "I_D", "I_S"]
    return _emit(args, "rate", params, "rate.csv", csv_text(header, rows),
                 lambda path: write_csv(path, header, rows), budgets={"points": len(rows)})


def _cmd_decay(args, params):
    report = decay_rate_numeric(args.process, params).to_dict()
    text = json_text(report)
    sys.stdout.write(text)
    if args.out_dir is None:
        return []
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = write_json(args.out_dir / f"decay_{args.process}.json", report)
    write_manifest(args.out_dir, "decay", args.argv, params, None, {}, [path])
    return [path]


def _cmd_simulate(args, params):
    paths = [sample_path(params, args.horizon, RngStream(args.seed, i), args.process) for i in range(args.n)]

    def write(path):
        with open(path, "w", newline="") as fh:
            write_paths_csv(paths, fh)

    if args.out_dir is None:
        write_paths_csv(paths, sys.stdout)
        return []
    return _emit(args, "simulate", params, "paths.csv", write=write, seed=args.seed,
                 budgets={"n_paths": args.n, "horizon": args.horizon})


def _cmd_ldp(args, params):
    rows = []
    for x in parse_list(args.x):
        for pt in ldp_curve(x, args.eps, parse_list(args.times), params, threads=args.threads):
            rows.append((pt.t, pt.x, pt.eps, pt.scaled_log_prob, pt.target))
    header = ["t", "x", "eps", "scaled_log_prob", "target"]
    return _emit(args, "ldp-verify", params, "ldp_curve.csv", csv_text(header, rows),
                 lambda path: write_csv(path, header, rows), budgets={"points": len(rows)})


def _cmd_crossing(args, params):
    q = parse_grid(args.q_grid)
    policy = HorizonPolicy()
    try:
        run = estimate_crossing(q, params, args.process, args.n, args.seed, policy, threads=args.threads)
        failure = None
    except BudgetExceeded as exc:
        run, failure = exc.run, exc
    header = ["q", "n", "hits", "p_hat", "std_err", "truncated"]
    rows = [(e.q, e.n_paths, e.hits, e.p_hat, e.std_err, e.truncated) for e in run]
    budgets = {"n_paths": args.n, "t_max": policy.t_max, "max_switches": policy.max_switches,
               "abandon_log_bound": policy.abandon_log_bound}
    emitted = _emit(args, "crossing", params, "crossing.csv", csv_text(header, rows),
                    lambda path: write_csv(path, header, rows), seed=args.seed, budgets=budgets)
    summary = {"process": args.process, "status_counts": run.status_counts, "flagged": run.flagged}
    try:
        fit = fit_decay_slope(run)
        summary.update(slope=fit.slope, slope_ci=list(fit.slope_ci), excluded_levels=list(fit.excluded_levels))
        if args.process == "standard":
            sb = sharp_bound_check(run, params)
            summary["sharp_bound"] = {"m_hat": sb.m_hat, "holds": sb.holds}
    except ValidationError as exc:
        summary["note"] = str(exc)
    if args.out_dir is not None:
        sys.stdout.write(json_text(summary))
    if failure is not None:
        raise failure
    return emitted


def _cmd_compare(args, params):
    report = compare_report(params, grid_size=args.grid_size, mc_budget=args.n, seed=args.seed,
                            threads=args.threads)
    return _emit(args, "compare", params, "compare.json", json_text(report),
                 lambda path: write_json(path, report), seed=args.seed,
                 budgets={"grid_size": args.grid_size, "mc_budget": args.n})


_HANDLERS = {
    "density": _cmd_density,
    "rate": _cmd_rate,
    "decay": _cmd_decay,
    "simulate": _cmd_simulate,
    "ldp-verify": _cmd_ldp,
    "crossing": _cmd_crossing,
    "compare": _cmd_compare,
}


def dispatch(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if not argv or argv[0] not in COMMANDS:
            raise UsageError(f"unknown command {argv[0]!r}; choose from {', '.join(COMMANDS)}"
                             if argv else f"missing command; choose from {', '.join(COMMANDS)}")
        args = build_parser().parse_args(_normalize_argv(argv))
        args.argv = argv
        try:
            params = load_params(args.params)
        except (OSError, ValueError) as exc:
            if isinstance(exc, TelegraphError):
                raise
            raise ValidationError(f"cannot read parameters from {args.params}: {exc}") from None
        _HANDLERS[args.command](args, params)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
