import cmath
import math
from fractions import Fraction

import pytest


def exact_phase_sum(alpha, gamma, ns, coeffs=None):
    """Reference sum using exact rational phases reduced mod 1."""
    a, g = Fraction(alpha), Fraction(gamma)
    total = 0j
    for i, n in enumerate(ns):
        ph = (a * n * n + g * n**4) % 1
        c = 1 if coeffs is None else coeffs[i]
        total += c * cmath.exp(2j * math.pi * float(ph))
    return total


@pytest.fixture
def phase_sum_oracle():
    return exact_phase_sum


# ---- one summary line per acceptance criterion

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    n, title = mark.args
    _CRITERIA[n] = (title, "PASS" if call.excinfo is None else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, verdict = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d} {verdict}  {title}")
