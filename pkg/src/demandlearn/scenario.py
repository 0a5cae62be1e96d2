"""Synthetic demand-response scenario generation.

Builds paired train/validation datasets in which a sparse subset of consumers
responds linearly to per-consumer price perturbations and the utility observes
only the noisy aggregate response. Prices are i.i.d. standard normal, active
consumers are a uniformly random subset of exact size, and the whole output is
a deterministic function of the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "ScenarioConfig",
    "Dataset",
    "GroundTruth",
    "generate_scenario",
    "snr_to_sigma",
]


@dataclass(frozen=True)
class Dataset:
    """A block of observations: price perturbations and aggregate response.

    Attributes:
        prices: (T, N) matrix of per-consumer price perturbations.
        response: length-T vector of aggregate consumption changes.
    """

    prices: NDArray[np.float64]
    response: NDArray[np.float64]

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=np.float64)
        response = np.asarray(self.response, dtype=np.float64)
        if prices.ndim != 2:
            raise ValueError(f"prices must be 2-D, got shape {prices.shape}")
        if response.ndim != 1 or response.shape[0] != prices.shape[0]:
            raise ValueError(
                f"response length {response.shape} does not match "
                f"prices rows {prices.shape[0]}"
            )
        if not np.all(np.isfinite(prices)):
            raise ValueError("prices contain non-finite entries")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "response", response)

    @property
    def n_samples(self) -> int:
        return self.prices.shape[0]

    @property
    def n_consumers(self) -> int:
        return self.prices.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """True elasticities and noise scale behind a generated dataset."""

    alpha_star: NDArray[np.float64]
    active_mask: NDArray[np.bool_]
    sigma_p: float
    signal_sd: float


@dataclass(frozen=True)
class ScenarioConfig:
    """Configuration for one synthetic scenario.

    Exactly one of ``sigma_p`` / ``target_snr`` must be given. ``target_snr``
    is in log10 units: sigma_p is chosen so that
    log10(signal_sd / sigma_p) == target_snr, with signal_sd computed
    analytically for unit-normal prices.
    """

    n_consumers: int
    n_samples: int
    active_fraction: float
    elasticity_value: float = 1.0
    sigma_p: float | None = None
    target_snr: float | None = None
    baseline_total: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_consumers <= 0 or self.n_samples <= 0:
            raise ValueError("n_consumers and n_samples must be positive")
        if not 0.0 <= self.active_fraction <= 1.0:
            raise ValueError("active_fraction must lie in [0, 1]")
        if (self.sigma_p is None) == (self.target_snr is None):
            raise ValueError("specify exactly one of sigma_p or target_snr")
        if self.sigma_p is not None and self.sigma_p <= 0:
            raise ValueError("sigma_p must be positive")

    @property
    def n_active(self) -> int:
        return int(round(self.active_fraction * self.n_consumers))

    @property
    def n_validation(self) -> int:
        return self.n_samples // 2


def snr_to_sigma(signal_sd: float, target_snr: float) -> float:
    """Noise std achieving a given log10 signal-to-noise ratio.

    Returns sigma_p = signal_sd / 10**target_snr so that
    log10(signal_sd / sigma_p) == target_snr.
    """
    if signal_sd <= 0:
        raise ValueError("signal_sd must be positive")
    return signal_sd / 10.0**target_snr


def _draw_block(rng: np.random.Generator, n_rows: int, alpha_star, sigma_p: float,
                baseline_total: float) -> Dataset:
    n = alpha_star.shape[0]
    prices = rng.standard_normal((n_rows, n))
    noise = rng.normal(0.0, sigma_p, size=n_rows)
    response = baseline_total + prices @ alpha_star + noise
    return Dataset(prices=prices, response=response)


def generate_scenario(config: ScenarioConfig) -> tuple[Dataset, Dataset, GroundTruth]:
    """Generate one (train, validation, ground truth) triple.

    The validation set has floor(T/2) rows drawn from an independent stream of
    the same seed. Two calls with the same config are bit-identical.
    """
    n = config.n_consumers
    k = config.n_active
    signal_sd = abs(config.elasticity_value) * np.sqrt(k)

    if config.target_snr is not None:
        if k < 1 or config.elasticity_value == 0.0:
            raise ValueError(
                "target_snr requires a nonzero signal (at least one active "
                "consumer with nonzero elasticity)"
            )
        sigma_p = snr_to_sigma(signal_sd, config.target_snr)
    else:
        sigma_p = float(config.sigma_p)

    ss = np.random.SeedSequence(config.seed)
    rng_active, rng_train, rng_val = (np.random.default_rng(s) for s in ss.spawn(3))

    active_idx = rng_active.choice(n, size=k, replace=False)
    active_mask = np.zeros(n, dtype=bool)
    active_mask[active_idx] = True
    alpha_star = np.where(active_mask, float(config.elasticity_value), 0.0)

    train = _draw_block(rng_train, config.n_samples, alpha_star, sigma_p,
                        config.baseline_total)
    val = _draw_block(rng_val, config.n_validation, alpha_star, sigma_p,
                      config.baseline_total)
    truth = GroundTruth(alpha_star=alpha_star, active_mask=active_mask,
                        sigma_p=sigma_p, signal_sd=float(signal_sd))
    return train, val, truth


def center_response(data: Dataset, baseline_total: float) -> Dataset:
    """Remove the price-insensitive aggregate baseline before fitting."""
    if baseline_total == 0.0:
        return data
    return Dataset(prices=data.prices, response=data.response - baseline_total)
