import numpy as np
import pytest

from schervish import Dataset
from schervish.calibration import CalibrationMap, pava_fit, recalibrate

from conftest import random_dataset
from oracles import exhaustive_isotonic


def test_hand_example():
    d = Dataset.from_arrays([0.1, 0.4, 0.3, 0.9], [0, 0, 1, 1])
    m = pava_fit(d)
    assert list(m.breakpoints) == [0.1, 0.3, 0.4, 0.9]
    assert list(m.levels) == [0.0, 0.5, 0.5, 1.0]


def test_monotone_labels_reproduced():
    d = Dataset.from_arrays([0.1, 0.2, 0.3, 0.4], [0, 0, 1, 1])
    assert list(pava_fit(d)(d.scores)) == [0, 0, 1, 1]


def test_constant_score_gives_prevalence():
    d = Dataset.from_arrays([0.6] * 5, [1, 0, 0, 1, 0], [1, 2, 1, 1, 1])
    m = pava_fit(d)
    assert len(m) == 1 and m(0.6) == pytest.approx(d.pi0)


def test_d8_is_identity(d8):
    m = pava_fit(d8)
    assert list(m.levels) == [0.25, 0.75]


def test_matches_exhaustive_oracle(rng):
    for _ in range(200):
        n = int(rng.integers(2, 40))
        d = random_dataset(rng, n, ties=True, weights=bool(rng.integers(2)), miscalibrated=True)
        x, want = exhaustive_isotonic(d)
        if x.size > 12:
            continue
        m = pava_fit(d)
        assert np.array_equal(m.breakpoints, x)
        assert np.max(np.abs(m.levels - want)) <= 1e-9


def test_invariants(rng):
    for _ in range(30):
        d = random_dataset(rng, weights=True, miscalibrated=True)
        m = pava_fit(d)
        assert np.all(np.diff(m.levels) >= 0) and m.levels.min() >= 0 and m.levels.max() <= 1
        r = recalibrate(d, m)
        assert np.dot(r.weights, r.scores) / r.weights.sum() == pytest.approx(d.pi0, abs=1e-10)
        assert r.pi0 == d.pi0
        again = recalibrate(r, pava_fit(r))
        assert np.allclose(again.scores, r.scores, atol=1e-12)


def test_map_clamps_and_interpolates():
    m = CalibrationMap([0.2, 0.6], [0.1, 0.5])
    assert m(0.0) == 0.1 and m(1.0) == 0.5 and m(0.4) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        CalibrationMap([0.5, 0.2], [0.1, 0.2])
    with pytest.raises(ValueError):
        CalibrationMap([0.1, 0.2], [0.3, 0.2])


def test_map_csv_round_trip(rng):
    m = pava_fit(random_dataset(rng, 100))
    back = CalibrationMap.from_csv(m.to_csv())
    assert np.array_equal(back.breakpoints, m.breakpoints) and np.array_equal(back.levels, m.levels)
