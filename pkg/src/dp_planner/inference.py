"""Confidence intervals for released proportions.

Two flavors:

* binomial_ci: the classic normal-approximation interval for an exact
  sample proportion. No privacy anywhere; used for side-by-side context.
* bootstrap_replicates + private_ci: a parametric bootstrap for noised
  releases. The noised proportion is re-noised into a center estimate,
  B binomial pseudo-samples are drawn around it, each is noised again,
  and the CI is read off the empirical quantiles of those replicates.
  Everything operates on already-noised values, so the procedure is pure
  post-processing and consumes no additional privacy budget.

Noise enters in count space (scale delta_f / epsilon on counts) and is
converted to proportions by dividing by the group size N, giving an
effective proportion-space scale of delta_f / (N * epsilon).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import ConfigError, DomainError
from .laplace import LaplaceParams, sample
from .rng import derive_rng

CI_LEVELS = (0.50, 0.80, 0.95)
DEFAULT_B = 500


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def __post_init__(self):
        if not 0 < self.level < 1:
            raise DomainError(f"level must be in (0, 1), got {self.level}")
        if self.lower > self.upper:
            raise DomainError(f"lower {self.lower} exceeds upper {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = DEFAULT_B
    levels: tuple[float, ...] = CI_LEVELS
    seed: int = 0

    def __post_init__(self):
        if self.B < 2:
            raise ConfigError(f"need at least 2 replicates, got B={self.B}")
        for level in self.levels:
            if not 0 < level < 1:
                raise ConfigError(f"CI level must be in (0, 1), got {level}")


@dataclass(frozen=True, eq=False)
class ReplicateSet:
    """Bootstrap replicates in proportion units, plus their provenance."""

    values: np.ndarray
    source_epsilon: float
    source_N: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or self.values.size < 2:
            raise DomainError("replicates must be a 1-d array of length >= 2")

    def __len__(self) -> int:
        return self.values.size


def binomial_ci(p_hat: float, N: int, alpha: float) -> ConfidenceInterval:
    """Normal-approximation CI for an exact proportion, clamped to [0, 1]."""
    if not 0 <= p_hat <= 1:
        raise DomainError(f"p_hat must be in [0, 1], got {p_hat}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    z = norm.ppf(1 - alpha / 2)
    half = z * np.sqrt(p_hat * (1 - p_hat) / N)
    return ConfidenceInterval(
        lower=float(max(0.0, p_hat - half)),
        upper=float(min(1.0, p_hat + half)),
        level=1 - alpha,
    )


def bootstrap_replicates(
    p: float,
    N: int,
    sensitivity: float = 1.0,
    epsilon: float = 1.0,
    cfg: BootstrapConfig = BootstrapConfig(),
) -> ReplicateSet:
    """Parametric bootstrap around a noised proportion p.

    p may lie outside [0, 1]; it is a noised value. The center estimate is
    clamped into [0, 1] only where a binomial probability is required.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    eps = float(epsilon)
    if eps <= 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    rng = derive_rng(cfg.seed, "bootstrap")
    noise = LaplaceParams(location=0.0, scale=float(sensitivity) / eps)
    theta_hat = p + sample(noise, rng) / N
    prob = min(1.0, max(0.0, theta_hat))
    counts = rng.binomial(N, prob, size=cfg.B)
    values = counts / N + sample(noise, rng, size=cfg.B) / N
    return ReplicateSet(values=values, source_epsilon=eps, source_N=N)


def private_ci(reps: ReplicateSet, alpha: float) -> ConfidenceInterval:
    """Empirical-quantile CI from replicates, clamped to [0, 1]."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    lower, upper = np.quantile(reps.values, [alpha / 2, 1 - alpha / 2])
    return ConfidenceInterval(
        lower=min(1.0, max(0.0, float(lower))),
        upper=min(1.0, max(0.0, float(upper))),
        level=1 - alpha,
    )


def private_cis(reps: ReplicateSet, levels: tuple[float, ...] = CI_LEVELS):
    """CIs at several levels from one ReplicateSet, keyed by level."""
    return {level: private_ci(reps, 1 - level) for level in levels}
