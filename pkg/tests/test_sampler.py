import math

import numpy as np
import pytest

from telegraph_ldp.errors import ExplosionGuardTripped, NonPositiveHorizon, TimeOutOfRange
from telegraph_ldp.params import validate_params
from telegraph_ldp.rng import RngStream, uniforms
from telegraph_ldp.sampler import (
    PathSkeleton,
    ProcessKind,
    grid_max,
    position_at,
    running_max,
    sample_damped_path,
    sample_endpoints,
    sample_path,
    sample_standard_path,
    switch_count,
    write_paths_csv,
)


def _first_stream_with_long_hold(seed, rate, horizon):
    for i in range(10_000):
        if -math.log(uniforms(seed, i, 1)) / rate > horizon:
            return i
    raise AssertionError("no stream found")


def _skeleton(params, up, epochs, horizon, kind=ProcessKind.DAMPED):
    return PathSkeleton(params, up, np.array(epochs, dtype=float), horizon, kind)


@pytest.mark.parametrize("sampler", [sample_damped_path, sample_standard_path])
def test_no_switch_path_is_single_up_segment(sampler):
    p = validate_params(1, 1, 1, 2, 1.0)
    i = _first_stream_with_long_hold(5, 1.0, 2.0)
    path = sampler(p, 2.0, RngStream(5, i))
    assert path.initial_up and len(path.switch_epochs) == 0
    assert position_at(path, 2.0) == pytest.approx(2.0)
    assert running_max(path, 2.0) == pytest.approx(2.0)


def test_tiny_horizon_position_vanishes(fig1):
    for i in range(20):
        path = sample_damped_path(fig1, 1e-12, RngStream(1, i))
        assert abs(position_at(path, 1e-12)) <= 2e-12


def test_nonpositive_horizon(fig1):
    with pytest.raises(NonPositiveHorizon):
        sample_damped_path(fig1, 0.0, RngStream(0, 0))
    with pytest.raises(NonPositiveHorizon):
        sample_endpoints(fig1, "standard", -1.0, 10, 0)


def test_position_at_piecewise(fig1):
    path = _skeleton(fig1, True, [0.4], 2.0)
    assert position_at(path, 0.0) == 0.0
    assert position_at(path, 0.3) == pytest.approx(0.3)
    assert position_at(path, 1.5) == pytest.approx(0.4 - 2.0 * (1.5 - 0.4))
    with pytest.raises(TimeOutOfRange):
        position_at(path, 2.5)


def test_running_max_cases(fig1):
    up = _skeleton(fig1, True, [], 3.0)
    assert running_max(up, 2.0) == pytest.approx(2.0)
    down = _skeleton(fig1, False, [], 3.0)
    assert running_max(down, 3.0) == 0.0
    zigzag = _skeleton(fig1, True, [0.5, 1.0, 2.0], 3.0)
    # 0 -> 0.5 -> -0.5 -> 0.5 -> -1.5
    assert running_max(zigzag, 3.0) == pytest.approx(0.5)
    assert running_max(zigzag, 0.25) == pytest.approx(0.25)
    with pytest.raises(TimeOutOfRange):
        running_max(zigzag, -1.0)


def test_switch_count(fig1):
    path = _skeleton(fig1, True, [0.5, 1.0, 2.0], 3.0)
    assert switch_count(path, 0.1) == 0
    assert switch_count(path, 1.0) == 2
    assert switch_count(path, 3.0) == 3
    with pytest.raises(TimeOutOfRange):
        switch_count(path, 3.5)


@pytest.mark.parametrize("kind", list(ProcessKind))
def test_path_invariants(fig1, kind):
    for i in range(200):
        path = sample_path(fig1, 6.0, RngStream(11, i), kind)
        ep = path.switch_epochs
        assert np.all(np.diff(ep) > 0) and (len(ep) == 0 or (ep[0] > 0 and ep[-1] <= 6.0))
        vel = path.velocities
        assert vel[0] == path.initial_velocity
        assert np.all(vel[1:] != vel[:-1])
        for t in np.linspace(0, 6.0, 25):
            x = position_at(path, t)
            assert -2.0 * t - 1e-12 <= x <= 1.0 * t + 1e-12
        assert grid_max(path) <= running_max(path, 6.0) <= grid_max(path) + fig1.c1


@pytest.mark.parametrize("kind", list(ProcessKind))
def test_kernel_matches_skeleton_bitwise(fig1, kind):
    batch = sample_endpoints(fig1, kind, 4.5, 300, 42, first_index=1000)
    for j in range(300):
        path = sample_path(fig1, 4.5, RngStream(42, 1000 + j), kind)
        assert batch.initial_up[j] == path.initial_up
        assert batch.switches[j] == switch_count(path, 4.5)
        assert batch.position[j] == position_at(path, 4.5)
        assert batch.running_max[j] == running_max(path, 4.5)
        assert batch.grid_max[j] == grid_max(path)


def test_batching_and_threads_do_not_change_results(fig1):
    a = sample_endpoints(fig1, "damped", 3.0, 5000, 8, chunk=5000, threads=1)
    b = sample_endpoints(fig1, "damped", 3.0, 5000, 8, chunk=333, threads=8)
    for field in ("position", "switches", "initial_up", "running_max", "grid_max"):
        assert np.array_equal(getattr(a, field), getattr(b, field))


def test_damped_holding_rates_increase():
    # given V(0)=c1, the k-th rightward hold has rate lambda1 k and the k-th leftward one lambda2 k
    p = validate_params(2.0, 3.0, 1, 1, 1.0)
    taus = []
    for i in range(3000):
        path = sample_damped_path(p, 5.0, RngStream(2, i))
        # fewer than 6 switches by t=5 has probability ~1e-4; drop those paths
        if len(path.switch_epochs) >= 6:
            taus.append(np.diff(np.concatenate([[0.0], path.switch_epochs]))[:6])
    taus = np.array(taus)
    expected = [1 / 2, 1 / 3, 1 / 4, 1 / 6, 1 / 6, 1 / 9]
    for j, mean in enumerate(expected):
        col = taus[:, j]
        assert abs(col.mean() - mean) < 4 * mean / math.sqrt(len(col))


def test_standard_poisson_switch_count():
    p = validate_params(1.5, 1.5, 1, 2, 0.3)
    s = sample_endpoints(p, "standard", 2.0, 200_000, 4)
    mean, se = s.switches.mean(), s.switches.std() / math.sqrt(len(s.switches))
    assert abs(mean - 3.0) < 3 * se
    assert abs(s.switches.var() - 3.0) < 0.05


def _euler_mean_position(params, t, dt=1e-4):
    # two-state chain: P(up) evolves by dq = (-lambda1 q + lambda2 (1 - q)) dt
    q = params.alpha
    mean = 0.0
    for _ in range(int(round(t / dt))):
        mean += (params.c1 * q - params.c2 * (1 - q)) * dt
        q += (-params.lambda1 * q + params.lambda2 * (1 - q)) * dt
    return mean


@pytest.mark.slow
@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_standard_mean_matches_euler_oracle(alpha):
    p = validate_params(1, 1, 1, 2, alpha)
    oracle = _euler_mean_position(p, 1.0)
    s = sample_endpoints(p, "standard", 1.0, 10**6, 77)
    se = s.position.std() / 1e3
    assert abs(s.position.mean() - oracle) < 3 * se


def test_symmetric_standard_law(rng):
    p = validate_params(2, 2, 1.5, 1.5, 0.5)
    s = sample_endpoints(p, "standard", 3.0, 200_000, 5)
    se = s.position.std() / math.sqrt(len(s.position))
    assert abs(s.position.mean()) < 3 * se


@pytest.mark.slow
def test_damped_no_switch_frequency(fig1):
    s = sample_endpoints(fig1, "damped", 1.0, 10**6, 99)
    n = len(s.position)
    freq = np.mean(s.initial_up & (s.switches == 0))
    target = 0.5 * math.exp(-1)
    assert abs(freq - target) < 3 * math.sqrt(target * (1 - target) / n)
    cond = s.switches[s.initial_up] == 0
    se = math.sqrt(math.exp(-1) * (1 - math.exp(-1)) / len(cond))
    assert abs(cond.mean() - math.exp(-1)) < 3 * se


def test_standard_never_hits_switch_cap():
    # rates <= 100 and horizons <= 1000 stay far below 10^6 switches
    p = validate_params(100, 100, 1, 2, 0.5)
    s = sample_endpoints(p, "standard", 1000.0, 20, 1)
    assert s.switches.max() < 10**6


def test_damped_explosion_guard():
    p = validate_params(1, 1, 1, 2, 0.5)
    with pytest.raises(ExplosionGuardTripped):
        sample_endpoints(p, "damped", 1000.0, 1, 0, max_switches=10_000)
    with pytest.raises(ExplosionGuardTripped):
        sample_damped_path(p, 1000.0, RngStream(0, 0), max_switches=10_000)


def test_paths_csv(fig1, tmp_path):
    paths = [sample_damped_path(fig1, 2.0, RngStream(0, i)) for i in range(3)]
    out = tmp_path / "paths.csv"
    with open(out, "w", newline="") as fh:
        write_paths_csv(paths, fh)
    lines = out.read_text().splitlines()
    assert lines[0] == "path_id,epoch_index,time,position,velocity"
    rows = [line.split(",") for line in lines[1:]]
    assert sum(len(p.switch_epochs) + 2 for p in paths) == len(rows)
    last = [r for r in rows if r[0] == "0"][-1]
    assert float(last[2]) == 2.0
    assert float(last[3]) == position_at(paths[0], 2.0)
