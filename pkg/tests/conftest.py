import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from henon import symmetric_params, validate_params  # noqa: E402
from henon.params import critical_exponent  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    lines = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


def pair(n, a, b, nu, alpha_fraction=0.5):
    """Two-component parameters with ``alpha = alpha_fraction * p``."""
    p = critical_exponent(n, a, b)
    return validate_params(n, a, b, nu, alpha_fraction * p, (1 - alpha_fraction) * p)


def random_params(rng, nonneg_a=True, n_choices=(3, 4, 5, 6)):
    """A random admissible parameter set with ``b - a`` kept away from 1."""
    n = int(rng.choice(n_choices))
    top = (n - 2) / 2
    a = rng.uniform(0.0, 0.8 * top) if nonneg_a else rng.uniform(-1.0, 0.8 * top)
    b = a + rng.uniform(0.0, 0.7)
    p = critical_exponent(n, a, b)
    frac = rng.uniform(max(0.2, 1.05 / p), min(0.8, 1 - 1.05 / p))
    return validate_params(n, a, b, rng.uniform(0.1, 3.0), frac * p, (1 - frac) * p)


@pytest.fixture
def p3():
    return validate_params(3, 0, 0, 1, 3, 3)


@pytest.fixture
def weighted():
    return validate_params(4, 0.3, 0.5, 0.2, 1.5, 10 / 3 - 1.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


__all__ = ["pair", "random_params", "symmetric_params"]
