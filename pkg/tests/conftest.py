import json
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from mcd_influence.graph import Graph, read_edge_list
from mcd_influence.leiden import Partition
from tests.strategies import clique_edges

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def two_cliques():
    return Graph.from_edges(8, clique_edges(range(4)) + clique_edges(range(4, 8)) + [(3, 4)])


@pytest.fixture
def six_node():
    spec = json.loads((FIXTURES / "mcd_six_node.json").read_text())
    idx = {name: i for i, name in enumerate(spec["nodes"])}
    g = Graph.from_edges(len(idx), [(idx[a], idx[b]) for a, b in spec["edges"]])
    part = Partition.from_labels([spec["communities"][name] for name in spec["nodes"]])
    return g, part, idx, spec["expected"]


def dolphins_path():
    """Location of the Dolphins edge list, if the user supplied one."""
    env = os.environ.get("MCD_DOLPHINS_PATH")
    for cand in ([env] if env else []) + [str(FIXTURES / "dolphins.txt")]:
        if cand and Path(cand).exists():
            return Path(cand)
    return None


@pytest.fixture
def dolphins():
    p = dolphins_path()
    if p is None:
        pytest.skip("Dolphins edge list not available (set MCD_DOLPHINS_PATH)")
    return read_edge_list(p)[0]


_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        state = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _acceptance.setdefault(name, state) if report.when == "teardown" else _acceptance.__setitem__(name, state)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    from tests.test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for name, label in CRITERIA.items():
        if name in _acceptance:
            terminalreporter.write_line(f"{_acceptance[name]:4s}  {label}")
