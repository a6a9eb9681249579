import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from poisson_wiretap import ChannelParams, IntensityConstraints, solve  # noqa: E402

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


REF = ChannelParams(alpha_b=2.0, lambda_b=1.0, alpha_e=1.0, lambda_e=2.0, delta=0.5)


@pytest.fixture(scope="session")
def ref_params():
    return REF


@pytest.fixture(scope="session")
def solved():
    """Memoized ``solve`` keyed by (mu, peak, average)."""
    cache = {}

    def get(mu, peak, average, params=REF):
        key = (mu, peak, average, params)
        if key not in cache:
            cache[key] = solve(mu, params, IntensityConstraints(peak=peak, average=average))
        return cache[key]

    return get


def random_degraded(rng: np.random.Generator) -> ChannelParams:
    """Draw parameters satisfying both degradedness inequalities."""
    alpha_e = rng.uniform(0.2, 3.0)
    alpha_b = alpha_e * (1.0 + rng.uniform(0.0, 2.0))
    lambda_b = rng.uniform(0.2, 3.0)
    lambda_e = alpha_e * (lambda_b / alpha_b) * (1.0 + rng.uniform(0.01, 2.0))
    return ChannelParams(alpha_b, lambda_b, alpha_e, lambda_e, rng.uniform(0.1, 1.0))


def random_dist(rng: np.random.Generator, peak: float, max_points: int = 6):
    from poisson_wiretap import DiscreteDistribution

    n = int(rng.integers(1, max_points + 1))
    locs = np.sort(rng.uniform(0.0, peak, n))
    if rng.random() < 0.5:
        locs[0] = 0.0
    locs = np.unique(locs)
    w = rng.dirichlet(np.ones(locs.size))
    w = np.maximum(w, 1e-6)
    return DiscreteDistribution(locs, w / w.sum())
