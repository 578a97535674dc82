from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from flagmaps.cli import DEFAULT_CATALOG  # noqa: E402
from flagmaps.formats import load_seeds  # noqa: E402
from flagmaps.groups import build_regular, parse_cycles, role_variants  # noqa: E402


@pytest.fixture(scope="session")
def catalog():
    return load_seeds(DEFAULT_CATALOG)


@pytest.fixture(scope="session")
def seeds_by_name(catalog):
    return {s.name: s for s in catalog}


@pytest.fixture(scope="session")
def d6_seed(seeds_by_name):
    # rho0 = (1,6)(2,5)(3,4) gives the regular M3 stage
    return role_variants(seeds_by_name["chi2a1"])[2]


@pytest.fixture(scope="session")
def tetrahedron():
    return build_regular(parse_cycles("(1,2)"), parse_cycles("(2,3)"), parse_cycles("(3,4)"))


@pytest.fixture(scope="session")
def cube():
    # symmetries of the cube acting on its 8 vertices
    r0 = parse_cycles("(1,2)(3,4)(5,6)(7,8)")
    r1 = parse_cycles("(2,3)(6,7)")
    r2 = parse_cycles("(3,5)(4,6)")
    return build_regular(r0, r1, r2)


# --- acceptance report ---------------------------------------------------------

_CRITERIA: dict[int, tuple[str, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    _CRITERIA.setdefault(n, (title, []))[1].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[n]
        verdict = "PASS" if outcomes and all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict}  {title}")
