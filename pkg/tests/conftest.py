import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def cone_sample(rng, n, k, count, scale=3.0):
    """Rejection-sample curvature vectors in Gamma_{k+1}."""
    from qklab.symfunc import in_cone

    out = []
    while len(out) < count:
        lam = rng.normal(size=n) * scale + rng.uniform(0, 2)
        if in_cone(lam, k + 1).member:
            out.append(lam)
    return out


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion; a FAIL also fails the test."""

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        if not ok:
            pytest.fail(line, pytrace=False)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
