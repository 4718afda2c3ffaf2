"""Exact trajectories of the damped process D(t) and the standard process S(t).

A trajectory is stored as a :class:`PathSkeleton`: the initial velocity and the
switch epochs on ``(0, horizon]``. Positions are recomputed from the epochs by
piecewise-linear integration, so every quantity below is exact up to floating
point.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import ExplosionGuardTripped, NonPositiveHorizon, TimeOutOfRange
from .params import ModelParams
from .rng import RngStream, stream_uniforms

MAX_SWITCHES = 10**6
CHUNK_DRAWS = 256


class ProcessKind(str, Enum):
    DAMPED = "damped"
    STANDARD = "standard"


@dataclass(frozen=True, eq=False)
class PathSkeleton:
    params: ModelParams
    initial_up: bool
    switch_epochs: np.ndarray
    horizon: float
    kind: ProcessKind

    @property
    def initial_velocity(self) -> float:
        return self.params.c1 if self.initial_up else -self.params.c2

    @property
    def velocities(self) -> np.ndarray:
        """Velocity on each of the ``len(switch_epochs) + 1`` segments."""
        n = len(self.switch_epochs) + 1
        up = (np.arange(n) % 2 == 0) == self.initial_up
        return np.where(up, self.params.c1, -self.params.c2)

    @cached_property
    def epoch_positions(self) -> np.ndarray:
        """Positions at ``0`` followed by positions at each switch epoch."""
        vel = self.velocities
        pos = np.empty(len(self.switch_epochs) + 1)
        pos[0] = 0.0
        p, t = 0.0, 0.0
        for k, epoch in enumerate(self.switch_epochs):
            p = p + vel[k] * (epoch - t)
            t = epoch
            pos[k + 1] = p
        return pos


def _check_horizon(horizon):
    if not (horizon > 0 and math.isfinite(horizon)):
        raise NonPositiveHorizon(f"horizon must be finite and > 0, got {horizon!r}")


def _sample_path(params, horizon, stream, kind, max_switches):
    _check_horizon(horizon)
    damped = kind is ProcessKind.DAMPED
    initial_up = bool(stream_uniforms(stream, 0, 1)[0] < params.alpha)
    epochs = []
    t = 0.0
    n = 1
    while True:
        u = stream_uniforms(stream, n, CHUNK_DRAWS)
        seg = np.arange(n, n + CHUNK_DRAWS)
        up = (seg % 2 == 1) == initial_up
        rates = np.where(up, params.lambda1, params.lambda2)
        if damped:
            rates = rates * ((seg + 1) // 2)
        for ui, rate in zip(u.tolist(), rates.tolist()):
            t = t + -math.log(ui) / rate
            if t > horizon:
                return PathSkeleton(params, initial_up, np.array(epochs), float(horizon), kind)
            epochs.append(t)
            if len(epochs) > max_switches:
                raise ExplosionGuardTripped(
                    f"more than {max_switches} switches before horizon {horizon}; "
                    "reduce the horizon or the rates"
                )
        n += CHUNK_DRAWS


def sample_damped_path(params: ModelParams, horizon: float, stream: RngStream,
                       max_switches: int = MAX_SWITCHES) -> PathSkeleton:
    """One trajectory of D on [0, horizon].

    Given an initial rightward velocity, the k-th rightward holding time is
    exponential with rate ``lambda1 * k`` and the k-th leftward one has rate
    ``lambda2 * k``; the same holds with the roles swapped for an initial
    leftward velocity.
    """
    return _sample_path(params, horizon, stream, ProcessKind.DAMPED, max_switches)


def sample_standard_path(params: ModelParams, horizon: float, stream: RngStream,
                         max_switches: int = MAX_SWITCHES) -> PathSkeleton:
    """One trajectory of S on [0, horizon] (constant switch rates)."""
    return _sample_path(params, horizon, stream, ProcessKind.STANDARD, max_switches)


def sample_path(params, horizon, stream, kind, max_switches=MAX_SWITCHES) -> PathSkeleton:
    return _sample_path(params, horizon, stream, ProcessKind(kind), max_switches)


def _check_time(path, t):
    if not (0.0 <= t <= path.horizon):
        raise TimeOutOfRange(f"t={t!r} outside [0, {path.horizon}]")


def position_at(path: PathSkeleton, t: float) -> float:
    _check_time(path, t)
    if t == 0.0:
        return 0.0
    k = int(np.searchsorted(path.switch_epochs, t, side="left"))
    start = path.switch_epochs[k - 1] if k else 0.0
    pos = path.epoch_positions[k]
    return float(pos + path.velocities[k] * (t - start))


def running_max(path: PathSkeleton, upto: float) -> float:
    """Exact sup of the path on [0, upto]."""
    _check_time(path, upto)
    k = int(np.searchsorted(path.switch_epochs, upto, side="right"))
    best = float(path.epoch_positions[: k + 1].max())
    return max(best, position_at(path, upto))


def switch_count(path: PathSkeleton, t: float) -> int:
    _check_time(path, t)
    return int(np.searchsorted(path.switch_epochs, t, side="right"))


def grid_max(path: PathSkeleton, upto: float | None = None) -> float:
    """Max of the path over the integer times in [0, upto]."""
    upto = path.horizon if upto is None else upto
    _check_time(path, upto)
    return max(position_at(path, float(k)) for k in range(int(math.floor(upto)) + 1))


# ---------------------------------------------------------------------------
# batched sampling


@dataclass
class EndpointSample:
    """Per-path summaries of a batch of trajectories on [0, horizon]."""

    kind: ProcessKind
    horizon: float
    seed: int
    position: np.ndarray
    switches: np.ndarray
    initial_up: np.ndarray
    running_max: np.ndarray
    grid_max: np.ndarray


def chunk_bounds(n: int, chunk: int):
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def run_chunks(func, bounds, threads: int = 1):
    """Apply ``func(lo, hi)`` over chunks; results come back in chunk order."""
    if threads <= 1 or len(bounds) <= 1:
        return [func(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: func(*b), bounds))


def sample_endpoints(params: ModelParams, kind, horizon: float, n_paths: int, seed: int,
                     first_index: int = 0, threads: int = 1, chunk: int = 1 << 16,
                     max_switches: int = MAX_SWITCHES) -> EndpointSample:
    """Sample paths ``first_index .. first_index + n_paths - 1`` of one seed.

    Path ``i`` uses stream ``i``, so the output is independent of ``threads``
    and ``chunk``.
    """
    kind = ProcessKind(kind)
    _check_horizon(horizon)
    pos = np.empty(n_paths)
    nsw = np.empty(n_paths, dtype=np.int64)
    up0 = np.empty(n_paths, dtype=np.bool_)
    mx = np.empty(n_paths)
    gmx = np.empty(n_paths)

    def work(lo, hi):
        return _kernels.endpoint_kernel(
            params.lambda1, params.lambda2, params.c1, params.c2, params.alpha,
            kind is ProcessKind.DAMPED, float(horizon), np.uint64(seed), np.uint64(first_index + lo),
            max_switches, pos[lo:hi], nsw[lo:hi], up0[lo:hi], mx[lo:hi], gmx[lo:hi],
        )

    for (lo, _), bad in zip(chunk_bounds(n_paths, chunk), run_chunks(work, chunk_bounds(n_paths, chunk), threads)):
        if bad >= 0:
            raise ExplosionGuardTripped(
                f"path {first_index + lo + bad} exceeded {max_switches} switches before horizon {horizon}"
            )
    return EndpointSample(kind, float(horizon), seed, pos, nsw, up0, mx, gmx)


def write_paths_csv(paths, fh) -> None:
    """Dump skeletons as ``path_id, epoch_index, time, position, velocity``.

    Row ``epoch_index = 0`` is the origin; the last row of each path is at the
    horizon. ``velocity`` is the velocity on the segment starting at that row.
    """
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["path_id", "epoch_index", "time", "position", "velocity"])
    for pid, path in enumerate(paths):
        pos = path.epoch_positions
        vel = path.velocities
        times = np.concatenate([[0.0], path.switch_epochs])
        for k in range(len(times)):
            writer.writerow([pid, k, repr(float(times[k])), repr(float(pos[k])), repr(float(vel[k]))])
        writer.writerow([pid, len(times), repr(path.horizon), repr(position_at(path, path.horizon)),
                         repr(float(vel[-1]))])
