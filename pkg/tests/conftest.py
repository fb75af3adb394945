import re
import time
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from entire_interp.cli import random_config
from entire_interp.records import records_document
from entire_interp.stage_builder import ConstructionConfig, run
from entire_interp.verifier import verify_document

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F = Fraction


@pytest.fixture(scope="session")
def e1_state():
    # w_1 only keeps the run short of a complete schedule
    return run(ConstructionConfig(0, 0, (1, 2), 2))


@pytest.fixture(scope="session")
def ac1_runs():
    """Ten randomized 12-stage constructions: (state, doc, report, seconds)."""
    out = []
    for seed in range(10):
        t0 = time.perf_counter()
        cfg = ConstructionConfig.from_json(random_config(seed))
        state = run(cfg)
        doc = records_document(state)
        report = verify_document(doc)
        out.append((state, doc, report, time.perf_counter() - t0))
    return out


@pytest.fixture(scope="session")
def small_run():
    cfg = ConstructionConfig.from_json(random_config(101, size=3))
    state = run(cfg)
    return state, records_document(state)


_AC = re.compile(r"test_acceptance\.py::test_(ac\d+)_")
_ac_status: dict = {}


def pytest_runtest_logreport(report):
    m = _AC.search(report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    key = m.group(1).upper()
    ok = report.passed and _ac_status.get(key, True)
    _ac_status[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _ac_status:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ac_status, key=lambda k: int(k[2:])):
        terminalreporter.write_line(f"{key} {'PASS' if _ac_status[key] else 'FAIL'}")
