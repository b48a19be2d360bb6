import mpmath
import pytest

from igdiff import IGParams


@pytest.fixture(autouse=True)
def _mp_precision():
    with mpmath.workdps(40):
        yield


def mp_ig_pdf(a, b, x):
    a, b, x = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(x)
    return a / mpmath.sqrt(2 * mpmath.pi) * x ** mpmath.mpf(-1.5) * mpmath.exp(-((a - b * x) ** 2) / (2 * x))


def mp_ig_tail(a, b, x):
    """Closed-form upper tail at 60 digits; the two terms cancel heavily far out."""
    with mpmath.workdps(60):
        a, b, x = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(x)
        r = mpmath.sqrt(x)
        u, v = b * r - a / r, b * r + a / r
        s2 = mpmath.sqrt(2)
        return mpmath.erfc(u / s2) / 2 - mpmath.exp(2 * a * b) * mpmath.erfc(v / s2) / 2


@pytest.fixture
def p33():
    return IGParams(3.0, 3.0)


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
