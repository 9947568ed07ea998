import numpy as np
import pytest

from schervish import Dataset, metrics, odds
from schervish.metrics import MetricKind, MetricRequest, ValueMatrix

from conftest import random_dataset


def brute_prior_adjusted(d, pi, v11, v00, threshold):
    """Row-by-row definition: importance weights, adjusted score, threshold."""
    total = 0.0
    for s, y, w in zip(d.scores, d.labels, d.weights):
        adj = odds.adjusted_score(float(s), d.pi0, pi)
        pred = 1 if adj >= threshold else 0
        iw = odds.importance_weight(d.pi0, pi, int(y))
        total += w * iw * (v11 if y == 1 else v00) * (pred == y)
    return total / d.weights.sum()


def test_accuracy_examples(d4):
    assert metrics.accuracy(Dataset.from_arrays([0.9, 0.1], [1, 0]), 0.5) == 1.0
    assert metrics.accuracy(d4, 0.5) == 0.5
    d = Dataset.from_arrays([0.7] * 5, [1, 0, 0, 1, 0])
    assert metrics.accuracy(d, 0.5) == pytest.approx(d.pi0)


def test_net_benefit_examples(d4):
    assert metrics.net_benefit(d4, 0.5, 0.5) == 0.5
    assert metrics.net_benefit(d4, 0.5, 1 / 3) == pytest.approx(0.375)
    assert metrics.net_benefit(d4, 0.9, 1 / 3) == pytest.approx(0.25)


def test_weighted_accuracy_examples(d4):
    perfect = Dataset.from_arrays([0.0, 1.0, 0.0], [0, 1, 0])
    assert metrics.weighted_accuracy(perfect, 0.5, 0.2) == 1.0
    assert metrics.weighted_accuracy(d4, 0.5, 0.5) == 0.5
    assert metrics.weighted_accuracy(d4, 0.5, 1 / 3) == pytest.approx(0.5)


def test_pama_examples(d8, rng):
    assert metrics.pama(d8, 0.5) == 0.75
    assert metrics.pama(d8, 0.75) == 0.75
    for _ in range(10):
        d = random_dataset(rng, 40)
        d = d.with_pi0(0.5)
        assert metrics.pama(d, 0.5, 0.4) == pytest.approx(metrics.accuracy(d, 0.4), abs=1e-12)


def test_pamnb_examples(d8):
    assert metrics.pamnb(d8, 0.5, 0.5) == 0.75
    assert metrics.pamnb(d8, 0.5, 1 / 3) == pytest.approx(0.5625, abs=1e-15)
    perfect = Dataset.from_arrays([0.0, 0.0, 1.0, 0.0], [0, 0, 1, 0])
    for c in (0.2, 0.5, 0.7):
        pi = perfect.pi0
        assert metrics.pamnb(perfect, pi, c) == pytest.approx(pi + c / (1 - c) * (1 - pi))


def test_pamwa_examples(d8):
    assert metrics.pamwa(d8, 0.5, 0.5, 1 / 3) == pytest.approx(metrics.pama(d8, 2 / 3, 0.5), abs=1e-12)
    assert metrics.pamwa(d8, 0.5, 0.5, 0.5) == metrics.pama(d8, 0.5)
    perfect = Dataset.from_arrays([0.0, 1.0, 1.0], [0, 1, 1])
    assert metrics.pamwa(perfect, 0.3, 0.5, 0.2) == pytest.approx(1.0)


@pytest.mark.parametrize("weights", [False, True])
def test_prior_adjusted_against_row_loop(rng, weights):
    for _ in range(20):
        d = random_dataset(rng, 60, weights=weights, miscalibrated=True)
        pi, c, tau = rng.uniform(0.01, 0.99, 3)
        assert metrics.pama(d, pi, tau) == pytest.approx(brute_prior_adjusted(d, pi, 1.0, 1.0, tau), abs=1e-12)
        assert metrics.pamnb(d, pi, c) == pytest.approx(brute_prior_adjusted(d, pi, 1.0, c / (1 - c), c), abs=1e-12)


def test_vectorised_pi_matches_scalar(rng):
    d = random_dataset(rng, 100, ties=True)
    grid = np.linspace(0, 1, 41)
    vec = metrics.pamnb(d, grid, 0.3)
    assert np.array_equal(vec, [metrics.pamnb(d, p, 0.3) for p in grid])


def test_endpoints_by_continuity(rng):
    d = random_dataset(rng, 80)
    # all weight on one class, which the adjusted classifier then predicts
    assert metrics.pama(d, 1.0) == pytest.approx(1.0 / d.pi0 * d.pi0)
    assert metrics.pama(d, 0.0) == pytest.approx(1.0)


def test_collapse_identities(rng):
    for _ in range(30):
        d = random_dataset(rng, weights=True)
        tau, pi = rng.uniform(0.05, 0.95, 2)
        acc = metrics.accuracy(d, tau)
        assert metrics.net_benefit(d, tau, 0.5) == pytest.approx(acc, abs=1e-12)
        assert metrics.weighted_accuracy(d, tau, 0.5) == pytest.approx(acc, abs=1e-12)
        assert metrics.pamnb(d, pi, 0.5) == pytest.approx(metrics.pama(d, pi), abs=1e-12)
        assert metrics.balanced_accuracy(d, tau) == pytest.approx(metrics.pama(d, 0.5, tau), abs=1e-12)
        c = rng.uniform(0.05, 0.95)
        assert metrics.balanced_net_benefit(d, c) == metrics.pamnb(d, 0.5, c)
        assert metrics.balanced_weighted_accuracy(d, tau, c) == metrics.pamwa(d, 0.5, tau, c)


def test_permutation_and_duplication_invariance(rng):
    d = random_dataset(rng, 120, ties=True)
    perm = rng.permutation(len(d))
    p = d.take(perm)
    w2 = np.ones(len(d))
    w2[:10] = 2.0
    heavy = Dataset.from_arrays(d.scores, d.labels, w2)
    split = Dataset.from_arrays(np.concatenate([d.scores, d.scores[:10]]),
                                np.concatenate([d.labels, d.labels[:10]]))
    for kind in MetricKind:
        req = MetricRequest(kind, tau=0.4, c=0.3, pi=0.2)
        assert metrics.evaluate(p, req) == pytest.approx(metrics.evaluate(d, req), abs=1e-12)
        assert metrics.evaluate(heavy, req) == pytest.approx(metrics.evaluate(split, req), abs=1e-12)


def test_bounded_by_perfect_value(rng):
    for _ in range(20):
        d = random_dataset(rng, weights=True, miscalibrated=True)
        tau, c, pi = rng.uniform(0.05, 0.95, 3)
        for kind in MetricKind:
            req = MetricRequest(kind, tau=tau, c=c, pi=pi)
            v = metrics.evaluate(d, req)
            assert -1e-12 <= v <= metrics.perfect_value(d, req) + 1e-12


def test_pointwise_reproduces_metric(rng):
    d = random_dataset(rng, 90, weights=True)
    for kind in MetricKind:
        req = MetricRequest(kind, tau=0.45, c=0.3, pi=0.6)
        v, w = metrics.pointwise(d, req)
        assert np.dot(v, w) / w.sum() == pytest.approx(metrics.evaluate(d, req), abs=1e-12)


def test_value_matrix():
    with pytest.raises(ValueError):
        ValueMatrix(0.0, 0.0)
    vm = ValueMatrix.for_metric("pamnb", 0.25, c=1 / 3, pi=0.5)
    assert (vm.v11, vm.v00) == pytest.approx((2.0, 1 / 3))


def test_request_validation():
    with pytest.raises(ValueError):
        MetricRequest("pama", tau=1.0)
    with pytest.raises(ValueError):
        MetricRequest("nonsense")
