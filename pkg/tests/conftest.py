import math

import pytest

from weingarten_flow.families import GeodesicSphere, SpaceForm


@pytest.fixture
def euclid_sphere():
    """Geodesic spheres in R^3 (n = 2)."""
    return GeodesicSphere(SpaceForm(0, 3))


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


QUARTER_PI = math.pi / 4


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion.

    Usage: ``criterion(number, passed, detail)``; the line is printed at once
    (visible with ``-s``) and again in the terminal summary.
    """
    def report(number: int, passed: bool, detail: str = ""):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}".rstrip()
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
