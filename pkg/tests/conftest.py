import mpmath
import numpy as np
import pytest

from fgnlab.conditional import build_dn_table

mpmath.mp.dps = 40


def mp_autocov(h, t):
    """High-precision closed form of b(t)."""
    h2 = 2 * mpmath.mpf(h)
    t = mpmath.mpf(t)
    if t == 0:
        return mpmath.mpf(1)
    return ((t + 1) ** h2 - 2 * t**h2 + (t - 1) ** h2) / 2


def mp_bsum(h, n, s):
    """Brute-force sum of b(i) for i = s .. n+s-1 in high precision."""
    return mpmath.fsum(mp_autocov(h, i) for i in range(s, n + s))


def dense_cov(h, k):
    from fgnlab.fgn_model import autocovariance

    idx = np.arange(k)
    return autocovariance(h, np.abs(idx[:, None] - idx[None, :]))


@pytest.fixture(scope="session")
def dn_table_08():
    return build_dn_table(0.8, [2**j for j in range(0, 9)])


# one verdict line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
