from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from heintze.spectral import build_basis

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SPECS = {
    "scalar1": [(1.0, [1])],
    "jordan2": [(1.0, [2])],
    "mixed": [(1.0, [2]), (2.0, [1])],
    "diag12": [(1.0, [1]), (2.0, [1])],
    "three": [(0.5, [3]), (1.5, [1])],
    "chains": [(1.0, [2, 1]), (3.0, [1])],
}


@pytest.fixture(params=sorted(SPECS))
def basis(request):
    return build_basis(SPECS[request.param])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
