import numpy as np
import pytest

from schervish import Dataset


def random_dataset(rng, n=None, *, ties=False, weights=False, miscalibrated=False, n_range=(50, 500)):
    """Uniform scores with Bernoulli(score) labels, optionally distorted,
    rounded to force ties, or carrying random positive weights."""
    n = int(rng.integers(*n_range)) if n is None else n
    s = rng.random(n)
    p = s
    if miscalibrated:
        p = 1.0 / (1.0 + np.exp(-(rng.uniform(-3, 3) * np.log(s / (1 - s)) + rng.uniform(-2, 2))))
    y = (rng.random(n) < p).astype(int)
    y[0], y[1] = 0, 1
    if ties:
        s = np.round(s * rng.integers(2, 12)) / 12
    w = rng.uniform(0.2, 3.0, n) if weights else None
    return Dataset.from_arrays(s, y, w)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def d4():
    # scores and labels of the small worked example
    return Dataset.from_arrays([0.2, 0.4, 0.6, 0.8], [0, 1, 0, 1])


@pytest.fixture
def d8():
    return Dataset.from_arrays([0.25] * 4 + [0.75] * 4, [1, 0, 0, 0, 1, 1, 1, 0])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
