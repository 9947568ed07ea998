import numpy as np
import pytest

from schervish.bootstrap import BootstrapSpec, bootstrap_ci, bootstrap_replicates, replicate_counts


def test_spec_validation():
    with pytest.raises(ValueError):
        BootstrapSpec(replicates=50)
    with pytest.raises(ValueError):
        BootstrapSpec(level=1.0)


def test_identical_losses():
    lo, hi, point = bootstrap_ci(np.full(50, 0.7), spec=BootstrapSpec(200))
    assert lo == pytest.approx(point, abs=1e-15) and hi == pytest.approx(point, abs=1e-15)


def test_deterministic_and_thread_independent(rng):
    x = rng.normal(size=300)
    w = rng.uniform(0.5, 2, 300)
    spec = BootstrapSpec(400, seed=9)
    a = bootstrap_ci(x, w, 2.0, spec)
    assert a == bootstrap_ci(x, w, 2.0, spec)
    assert a == bootstrap_ci(x, w, 2.0, spec, jobs=7)
    assert a != bootstrap_ci(x, w, 2.0, BootstrapSpec(400, seed=10))
    assert a[2] == pytest.approx(2 * np.dot(w, x) / w.sum())


def test_counts_resample_each_group():
    counts = replicate_counts([5, 9], seed=1, r=3)
    assert [c.sum() for c in counts] == [5, 9]
    assert all(np.array_equal(a, b) for a, b in zip(counts, replicate_counts([5, 9], 1, 3)))


def test_vector_statistic():
    reps = bootstrap_replicates([10], lambda k: (k[0][0], k[0].sum()), BootstrapSpec(100))
    assert reps.shape == (100, 2) and np.all(reps[:, 1] == 10)


def test_coverage():
    rng = np.random.default_rng(2024)
    hits = 0
    for i in range(200):
        x = rng.normal(1.0, 0.1, 400)
        lo, hi, _ = bootstrap_ci(x, spec=BootstrapSpec(500, seed=i))
        hits += lo <= 1.0 <= hi
    assert 0.90 <= hits / 200 <= 0.99


def test_width_scaling_and_duplication():
    rng = np.random.default_rng(8)
    spec = BootstrapSpec(1000, seed=1)
    widths = []
    for n in (100, 400, 1600):
        x = rng.normal(size=n)
        lo, hi, _ = bootstrap_ci(x, spec=spec)
        widths.append(hi - lo)
    for a, b in zip(widths[:-1], widths[1:]):
        assert abs(b / a - 0.5) <= 0.25 * 0.5
    x = rng.normal(size=200)
    lo, hi, _ = bootstrap_ci(x, spec=spec)
    lo4, hi4, _ = bootstrap_ci(np.tile(x, 4), np.full(800, 0.25), spec=spec)
    # four copies halve the width; rescale to compare with the original
    assert abs(2 * (hi4 - lo4) / (hi - lo) - 1) <= 0.30
