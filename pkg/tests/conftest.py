import numpy as np
import pytest

from telegraph_ldp.params import classify_regime, validate_params

_CRITERIA = []


def random_params(rng, n, stable=None, alpha=None, low=0.1, high=10.0):
    """``n`` parameter sets with log-uniform rates and speeds in [low, high]."""
    out = []
    while len(out) < n:
        lam1, lam2, c1, c2 = np.exp(rng.uniform(np.log(low), np.log(high), 4))
        a = rng.uniform() if alpha is None else alpha
        params = validate_params(lam1, lam2, c1, c2, a)
        if stable is None or classify_regime(params).stable == stable:
            out.append(params)
    return out


@pytest.fixture
def fig1():
    return validate_params(1, 1, 1, 2, 0.5)


@pytest.fixture
def unstable():
    return validate_params(1, 2, 2, 1, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20121)


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the session summary."""

    def record(name, passed, detail=""):
        _CRITERIA.append((name, bool(passed), detail))
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
