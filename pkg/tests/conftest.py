import time

import numpy as np
import pytest

from fpuwave.basewave import build_causal_wave
from fpuwave.corrector import solve_with_shift
from fpuwave.potentials import biased_family, smooth_sign_family
from fpuwave.spectral import find_kc

SWEEP = (0.04, 0.02, 0.01, 0.005)


@pytest.fixture(scope="session")
def ctx95():
    return find_kc(0.95)


@pytest.fixture(scope="session")
def base95(ctx95):
    return build_causal_wave(ctx95, L=80.0, h=1 / 256)


class Sweep(dict):
    """Solutions keyed by ``delta``; ``seconds`` is the wall time of the whole sweep."""

    seconds = 0.0


def _sweep(base, family):
    t = time.perf_counter()
    out = Sweep((d, solve_with_shift(base, family(d))) for d in SWEEP)
    out.seconds = time.perf_counter() - t
    return out


@pytest.fixture(scope="session")
def cubic_sweep(base95):
    return _sweep(base95, smooth_sign_family)


@pytest.fixture(scope="session")
def biased_sweep(base95):
    return _sweep(base95, lambda d: biased_family(d, 0.3))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
