import warnings

import numpy as np
import pytest

from gravaudit.model import GeometryError, SetupGeometry, branch_distances, derive_params


@pytest.fixture
def unit_params():
    return derive_params(G=1.0, hbar=1.0, c=1.0, m=1.0, N=1, R=1.0, t=1.0, unit_system="natural")


@pytest.fixture
def collinear():
    return SetupGeometry((0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), R=0.1)


@pytest.fixture
def collinear_params():
    return derive_params(G=1.0, hbar=1.0, c=1.0, m=1.0, N=1, R=0.1, t=1.0, unit_system="natural")


@pytest.fixture(autouse=True)
def _quiet_farfield():
    from gravaudit.amplitudes import FarFieldWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FarFieldWarning)
        yield


def random_geometry(rng, R=1.0, box=40.0):
    """Uniform centers in a cube, resampled until the supports are disjoint."""
    while True:
        try:
            return SetupGeometry.from_array(rng.uniform(-box / 2, box / 2, (4, 3)), R)
        except GeometryError:
            continue


def hierarchical_geometry(rng, R=1.0):
    """1L -- 1R  2L -- 2R roughly on a line with d_RL the smallest distance
    and d_LR the largest, as in the dominant-term regime."""
    while True:
        gap = rng.uniform(3.0, 6.0) * R
        arm1, arm2 = rng.uniform(20.0, 60.0, 2) * R
        jitter = rng.normal(scale=2.0 * R, size=(4, 3))
        c = np.array([[-arm1, 0, 0], [0, 0, 0], [gap, 0, 0], [gap + arm2, 0, 0]]) + jitter
        try:
            g = SetupGeometry.from_array(c, R)
        except GeometryError:
            continue
        d = branch_distances(g)
        if d[1, 0] <= 0.3 * min(d[0, 0], d[0, 1], d[1, 1]) and d[0, 1] == d.max():
            return g


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line, print it, and fail the test when it did not pass."""

    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
