import numpy as np
import pytest
from hypothesis import settings

from twoinner import Field, InnerSpace, TwoInnerEvaluator

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


@pytest.fixture
def r3():
    return TwoInnerEvaluator(InnerSpace.unit(3, Field.REAL))


@pytest.fixture
def c3():
    return TwoInnerEvaluator(InnerSpace.unit(3, Field.COMPLEX))


def e(k, dim=3, dtype=float):
    v = np.zeros(dim, dtype=dtype)
    v[k] = 1
    return v


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in results.values():
        terminalreporter.write_line(line)
