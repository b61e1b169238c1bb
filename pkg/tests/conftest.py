import numpy as np
import pytest

from dln import Depth

DEPTHS = [Depth.finite(2), Depth.finite(3), Depth.finite(5), Depth.finite(10), Depth.infinite()]
FINITE_DEPTHS = [d for d in DEPTHS if d.is_finite]

# acceptance-criterion verdict lines, echoed after the run (capture-proof)
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)


def random_spectrum(rng, d, lo=0.3, hi=3.0, min_rel_gap=1e-3):
    """Ordered spectrum with relative gaps above min_rel_gap, so finite
    difference probes never straddle a kernel coincidence branch."""
    while True:
        sigma = np.sort(rng.uniform(lo, hi, size=d))[::-1].copy()
        if d == 1 or np.min(-np.diff(sigma)) > min_rel_gap * sigma[0]:
            return sigma


def random_full_rank(rng, d, min_rel_gap=2e-3):
    sigma = random_spectrum(rng, d, min_rel_gap=min_rel_gap)
    q1, _ = np.linalg.qr(rng.standard_normal((d, d)))
    q2, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return q1 @ np.diag(sigma) @ q2.T


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
