import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rfiteleport.groups import (  # noqa: E402
    cyclic_group,
    dihedral_group,
    gset_from_generators,
    make_group,
    quaternion_group,
    symmetric_group,
)
from rfiteleport.reps import make_representation, permutation_representation  # noqa: E402

SMALL_GROUPS = {
    "Z1": lambda: cyclic_group(1),
    "Z2": lambda: cyclic_group(2),
    "Z3": lambda: cyclic_group(3),
    "Z4": lambda: cyclic_group(4),
    "Z6": lambda: cyclic_group(6),
    "S3": lambda: symmetric_group(3),
    "D8": lambda: dihedral_group(4),
    "Q8": quaternion_group,
    "Z2xZ2": lambda: make_group(4, [[1, 0, 3, 2], [2, 3, 0, 1]], name="V4"),
    "S4": lambda: symmetric_group(4),
}


@pytest.fixture(params=sorted(SMALL_GROUPS))
def small_group(request):
    return SMALL_GROUPS[request.param]()


@pytest.fixture
def s3():
    return make_group(3, [[1, 0, 2], [1, 2, 0]], name="S3")


@pytest.fixture
def s3_irrep(s3):
    c, s = -0.5, math.sqrt(3) / 2
    return make_representation(s3, [[[1, 0], [0, -1]], [[c, -s], [s, c]]])


@pytest.fixture
def d8():
    return make_group(4, [[1, 2, 3, 0], [3, 2, 1, 0]], name="D8")


@pytest.fixture
def d8_irrep(d8):
    return make_representation(d8, [[[0, -1], [1, 0]], [[0, 1], [1, 0]]])


def natural_rep(G):
    return permutation_representation(gset_from_generators(G, G.generators, G.degree))


# one pass/fail line per acceptance criterion in the terminal summary
_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "_criterion", None)
    if marker and _CRITERIA.get(marker) != "FAIL":
        _CRITERIA[marker] = "PASS" if report.passed else "FAIL"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m:
        report._criterion = f"criterion {m.args[0]}: {m.args[1]}"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(f"[{_CRITERIA[name]}] {name}")


def random_unitary(d, rng):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
