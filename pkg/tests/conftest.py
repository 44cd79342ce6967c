import numpy as np
import pytest

from acceg import get_problem
from acceg.problems import DEFAULT_CORPUS

# filled by test_acceptance; printed once at the end of the session
ACCEPTANCE = {}


def record_acceptance(number, title, ok, detail=""):
    ACCEPTANCE[number] = (title, bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        flag = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{flag}] {n:2d}. {title}: {detail}")


@pytest.fixture(params=DEFAULT_CORPUS)
def corpus_entry(request):
    return get_problem(request.param)


@pytest.fixture
def rotation():
    return get_problem("rotation-2")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
