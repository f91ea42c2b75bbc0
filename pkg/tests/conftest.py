import numpy as np
import pytest

from bottforge import examples

# criterion number -> list of (check name, passed)
ACCEPTANCE = {}


def record(criterion, name, passed):
    ACCEPTANCE.setdefault(criterion, []).append((name, bool(passed)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[crit]
        status = "PASS" if all(ok for _, ok in checks) else "FAIL"
        detail = ", ".join(f"{name}={'ok' if ok else 'FAILED'}" for name, ok in checks)
        terminalreporter.write_line(f"{status} criterion {crit}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def kitaev32():
    return examples.build_d_to_diii(32)


@pytest.fixture(scope="session")
def qsh32():
    return examples.build_diii_to_aii(32)


@pytest.fixture(scope="session")
def qsh16():
    return examples.build_diii_to_aii(16)
