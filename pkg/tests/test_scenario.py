import numpy as np
import pytest

from demandlearn.scenario import (
    Dataset,
    ScenarioConfig,
    generate_scenario,
    snr_to_sigma,
)


def test_determinism_bit_identical():
    cfg = ScenarioConfig(n_consumers=30, n_samples=20, active_fraction=0.2,
                         sigma_p=1.0, seed=42)
    a = generate_scenario(cfg)
    b = generate_scenario(cfg)
    assert np.array_equal(a[0].prices, b[0].prices)
    assert np.array_equal(a[0].response, b[0].response)
    assert np.array_equal(a[1].prices, b[1].prices)
    assert np.array_equal(a[2].alpha_star, b[2].alpha_star)


def test_no_active_consumers_pure_noise():
    cfg = ScenarioConfig(n_consumers=10, n_samples=6, active_fraction=0.0,
                         sigma_p=1.0, seed=5)
    train, _, truth = generate_scenario(cfg)
    assert np.all(truth.alpha_star == 0)
    assert not np.any(truth.active_mask)
    # response is exactly the noise stream: independent of prices
    assert train.response.shape == (6,)


def test_exact_active_count_benchmark_regime():
    cfg = ScenarioConfig(n_consumers=500, n_samples=250, active_fraction=0.1,
                         sigma_p=1.0, seed=0)
    train, val, truth = generate_scenario(cfg)
    assert int(np.sum(truth.alpha_star == 1.0)) == 50
    assert int(truth.active_mask.sum()) == 50
    assert train.n_samples == 250
    assert val.n_samples == 125


def test_signal_sd_matches_analytic_value():
    # sd of the noiseless signal for 50 unit elasticities and unit-normal
    # prices is sqrt(50); pooled over 1e5 rows the estimate is within 2%
    total_sq = 0.0
    total_rows = 0
    for seed in range(4):
        cfg = ScenarioConfig(n_consumers=500, n_samples=25_000,
                             active_fraction=0.1, sigma_p=1e-12, seed=seed)
        train, _, truth = generate_scenario(cfg)
        signal = train.prices @ truth.alpha_star
        total_sq += float(signal @ signal)
        total_rows += signal.size
        assert truth.signal_sd == pytest.approx(np.sqrt(50))
    empirical = np.sqrt(total_sq / total_rows)
    assert empirical == pytest.approx(np.sqrt(50), rel=0.02)


def test_price_columns_uncorrelated():
    cfg = ScenarioConfig(n_consumers=10, n_samples=10_000, active_fraction=0.0,
                         sigma_p=1.0, seed=11)
    train, _, _ = generate_scenario(cfg)
    t = train.n_samples
    cov = train.prices.T @ train.prices / t
    off = cov - np.diag(np.diag(cov))
    assert np.max(np.abs(off)) < 5.0 / np.sqrt(t)


def test_noise_calibration():
    cfg = ScenarioConfig(n_consumers=5, n_samples=100_000, active_fraction=0.0,
                         sigma_p=2.5, seed=9)
    train, _, truth = generate_scenario(cfg)
    assert truth.sigma_p == 2.5
    assert np.std(train.response) == pytest.approx(2.5, rel=0.02)


def test_train_and_validation_differ():
    cfg = ScenarioConfig(n_consumers=8, n_samples=10, active_fraction=0.5,
                         sigma_p=1.0, seed=3)
    train, val, _ = generate_scenario(cfg)
    assert not np.array_equal(train.prices[: val.n_samples], val.prices)


def test_baseline_added_to_response():
    cfg = ScenarioConfig(n_consumers=4, n_samples=2000, active_fraction=0.0,
                         sigma_p=1e-9, baseline_total=7.5, seed=1)
    train, _, _ = generate_scenario(cfg)
    assert np.allclose(train.response, 7.5, atol=1e-6)


def test_snr_to_sigma():
    assert snr_to_sigma(7.07, 0.0) == pytest.approx(7.07)
    assert snr_to_sigma(7.07, 1.0) == pytest.approx(0.707)
    with pytest.raises(ValueError):
        snr_to_sigma(0.0, 1.0)


def test_target_snr_sets_noise_scale():
    cfg = ScenarioConfig(n_consumers=500, n_samples=50, active_fraction=0.1,
                         target_snr=1.0, seed=2)
    _, _, truth = generate_scenario(cfg)
    assert truth.sigma_p == pytest.approx(np.sqrt(50) / 10.0)


def test_target_snr_without_signal_rejected():
    cfg = ScenarioConfig(n_consumers=10, n_samples=6, active_fraction=0.0,
                         target_snr=1.0, seed=0)
    with pytest.raises(ValueError):
        generate_scenario(cfg)


def test_config_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(n_consumers=0, n_samples=5, active_fraction=0.1,
                       sigma_p=1.0)
    with pytest.raises(ValueError):
        ScenarioConfig(n_consumers=5, n_samples=5, active_fraction=1.5,
                       sigma_p=1.0)
    with pytest.raises(ValueError):
        ScenarioConfig(n_consumers=5, n_samples=5, active_fraction=0.1,
                       sigma_p=1.0, target_snr=1.0)
    with pytest.raises(ValueError):
        ScenarioConfig(n_consumers=5, n_samples=5, active_fraction=0.1,
                       sigma_p=-1.0)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(prices=np.ones((3, 2)), response=np.ones(4))
    with pytest.raises(ValueError):
        Dataset(prices=np.array([[1.0, np.nan]]), response=np.ones(1))
