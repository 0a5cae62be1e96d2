import numpy as np
import pytest

from demandlearn.metrics import (
    UndefinedAUCError,
    generalization_error,
    reconstruction_error,
    roc_auc,
)
from demandlearn.scenario import Dataset, ScenarioConfig, generate_scenario


def brute_force_auc(scores, mask):
    """Pairwise counting oracle: 1 per correctly ordered active/inactive
    pair, 0.5 per tie."""
    pos = [s for s, a in zip(scores, mask) if a]
    neg = [s for s, a in zip(scores, mask) if not a]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.9, 0.1, 0.8, 0.4], [1, 0, 1, 0]) == 1.0

    def test_all_ties(self):
        assert roc_auc([0.3, 0.3, 0.3, 0.3], [1, 0, 1, 0]) == 0.5

    def test_half_right(self):
        # 4 active/inactive pairs: 2 ordered correctly, 2 not
        assert roc_auc([0.9, 0.8, 0.1, 0.4], [1, 0, 1, 0]) == 0.5

    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = rng.integers(3, 12)
            # coarse grid of values so ties actually occur
            scores = rng.integers(0, 4, size=n).astype(float)
            mask = np.zeros(n, dtype=bool)
            mask[rng.choice(n, size=rng.integers(1, n), replace=False)] = True
            if mask.all():
                mask[0] = False
            assert roc_auc(scores, mask) == brute_force_auc(scores, mask)

    def test_invariant_under_increasing_transform(self):
        rng = np.random.default_rng(1)
        scores = rng.normal(size=20)
        mask = rng.random(20) < 0.4
        mask[0], mask[1] = True, False
        base = roc_auc(scores, mask)
        assert roc_auc(3.0 * scores + 5.0, mask) == pytest.approx(base)

    def test_negation_flips(self):
        rng = np.random.default_rng(2)
        scores = rng.permutation(20).astype(float)  # no ties
        mask = np.arange(20) % 3 == 0
        assert roc_auc(-scores, mask) == pytest.approx(1.0 - roc_auc(scores, mask))

    def test_undefined_for_degenerate_mask(self):
        with pytest.raises(UndefinedAUCError):
            roc_auc([1.0, 2.0], [1, 1])
        with pytest.raises(UndefinedAUCError):
            roc_auc([1.0, 2.0], [0, 0])


class TestReconstructionError:
    def test_exact_recovery(self):
        a = np.array([1.0, 0.0, 2.0])
        assert reconstruction_error(a, a) == 0.0

    def test_single_coordinate(self):
        assert reconstruction_error([0.5, 0.0], [1.0, 0.0]) == 0.5

    def test_null_estimate(self):
        star = np.zeros(20)
        star[:7] = 1.0
        assert reconstruction_error(np.zeros(20), star) == 7.0

    def test_triangle_inequality(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b, c = rng.normal(size=(3, 10))
            assert (reconstruction_error(a, c)
                    <= reconstruction_error(a, b) + reconstruction_error(b, c)
                    + 1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            reconstruction_error([1.0], [1.0, 2.0])


class TestGeneralizationError:
    def test_exact_predictor(self):
        prices = np.random.default_rng(0).normal(size=(10, 3))
        alpha = np.array([1.0, -2.0, 0.5])
        data = Dataset(prices=prices, response=prices @ alpha)
        assert generalization_error(alpha, data) == pytest.approx(0.0, abs=1e-18)

    def test_null_model(self):
        prices = np.ones((4, 2))
        response = np.array([1.0, 2.0, 3.0, 4.0])
        data = Dataset(prices=prices, response=response)
        assert generalization_error(np.zeros(2), data) == pytest.approx(30.0)

    def test_truth_recovers_noise_level(self):
        cfg = ScenarioConfig(n_consumers=20, n_samples=500, active_fraction=0.3,
                             sigma_p=1.7, seed=8)
        _, val, truth = generate_scenario(cfg)
        err = generalization_error(truth.alpha_star, val)
        assert err / val.n_samples == pytest.approx(1.7**2, rel=0.15)

    def test_truth_beats_null_on_signal(self):
        wins = 0
        for seed in range(10):
            cfg = ScenarioConfig(n_consumers=10, n_samples=120,
                                 active_fraction=0.5, sigma_p=1.0, seed=seed)
            _, val, truth = generate_scenario(cfg)
            n = truth.alpha_star.size
            if (generalization_error(truth.alpha_star, val)
                    <= generalization_error(np.zeros(n), val)):
                wins += 1
        assert wins >= 9
