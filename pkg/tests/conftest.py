"""Shared test helpers."""

from __future__ import annotations

import numpy as np
import pytest

from spinbus import ChainSpec, ControlPulse


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pulse(rng: np.random.Generator, n_steps: int = 8, dt: float = 0.25,
                 scale: float = 1.0, beta1: bool = False) -> ControlPulse:
    b1 = tuple(float(v) for v in rng.normal(scale=scale, size=n_steps))
    beta = tuple(float(v) for v in rng.normal(scale=scale, size=n_steps)) if beta1 else None
    return ControlPulse(dt, b1, beta)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def spec4() -> ChainSpec:
    return ChainSpec.uniform(4)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Replay acceptance criterion verdicts after the test summary.

    The acceptance tests print one PASS/FAIL line per criterion; pytest's
    default capture swallows stdout of passing tests, so the lines are also
    collected and re-emitted here.
    """
    try:
        from test_acceptance import REPORT_LINES
    except ImportError:
        return
    if REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in REPORT_LINES:
            terminalreporter.write_line(line)
