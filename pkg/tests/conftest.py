import numpy as np
import pytest

from rotolab.theorem_b import PipelineParams, build_f1, build_f2, build_final


@pytest.fixture(scope="session")
def params():
    return PipelineParams()


@pytest.fixture(scope="session")
def stages(params):
    f1, c1 = build_f1(params)
    f2, c2 = build_f2(f1, params)
    f, c3 = build_final(f2, params)
    return {"f1": f1, "f2": f2, "f": f, "checks": {"f1": c1, "f2": c2, "f": c3}}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
