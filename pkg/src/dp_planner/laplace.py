"""Exact Laplace distribution math and the Laplace mechanism.

Everything downstream (risk curves, bootstrap CIs, dotplots, releases) is
built on the four primitives here: pdf, cdf, quantile, and seeded sampling.
Sampling uses the inverse-CDF transform of a uniform variate so that draw
sequences are exactly reproducible from a seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "LaplaceParams",
    "PrivacyBudget",
    "Sensitivity",
    "mechanism_params",
    "laplace_pdf",
    "laplace_cdf",
    "laplace_quantile",
    "sample",
    "laplace_mechanism",
]

# Smallest argument fed to log() during sampling; guards the measure-zero
# event of the uniform stream returning exactly 0.0.
_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class LaplaceParams:
    """Location/scale of a Laplace output distribution."""

    location: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class PrivacyBudget:
    """Privacy budget epsilon for a single query."""

    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")

    def __float__(self) -> float:
        return float(self.epsilon)


@dataclass(frozen=True)
class Sensitivity:
    """L1 sensitivity of the released statistic; 1 for COUNT queries."""

    delta_f: float = 1.0

    def __post_init__(self):
        if not self.delta_f > 0:
            raise DomainError(f"sensitivity must be positive, got {self.delta_f}")

    def __float__(self) -> float:
        return float(self.delta_f)


def mechanism_params(
    true_value: float,
    sensitivity: float | Sensitivity,
    epsilon: float | PrivacyBudget,
) -> LaplaceParams:
    """Output distribution of the Laplace mechanism: Lap(true_value, delta_f/epsilon)."""
    eps = float(epsilon)
    if not eps > 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    return LaplaceParams(location=float(true_value), scale=float(sensitivity) / eps)


def laplace_pdf(x, params: LaplaceParams):
    """Density (1/2b) * exp(-|x - mu| / b); broadcasts over array x."""
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-np.abs(x - params.location) / params.scale) / (2.0 * params.scale)
    return float(out) if out.ndim == 0 else out


def laplace_cdf(x, params: LaplaceParams):
    """P(X <= x); 0.5 at the location, monotone in x."""
    x = np.asarray(x, dtype=np.float64)
    z = (x - params.location) / params.scale
    # exp only ever sees the nonpositive half of z, so it cannot overflow
    out = np.where(
        z < 0,
        0.5 * np.exp(np.minimum(z, 0.0)),
        1.0 - 0.5 * np.exp(-np.maximum(z, 0.0)),
    )
    return float(out) if out.ndim == 0 else out


def laplace_quantile(q, params: LaplaceParams):
    """Inverse CDF: mu - b * sgn(q - 1/2) * ln(1 - 2|q - 1/2|)."""
    q = np.asarray(q, dtype=np.float64)
    if np.any(q <= 0) or np.any(q >= 1):
        raise DomainError("quantile level must lie strictly inside (0, 1)")
    u = q - 0.5
    out = params.location - params.scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    return float(out) if out.ndim == 0 else out


def sample(params: LaplaceParams, rng: np.random.Generator, size=None):
    """Seeded i.i.d. draws via the inverse-CDF transform of rng.random()."""
    u = rng.random(size) - 0.5
    t = np.maximum(1.0 - 2.0 * np.abs(u), _TINY)
    out = params.location - params.scale * np.sign(u) * np.log(t)
    return float(out) if np.ndim(out) == 0 else out


def laplace_mechanism(
    true_value: float,
    sensitivity: float | Sensitivity,
    epsilon: float | PrivacyBudget,
    rng: np.random.Generator,
    size=None,
):
    """Release true_value + Lap(0, delta_f/epsilon) noise.

    The output is unbounded in sign: a noised count can land below zero or
    above the cohort size, and is published as-is.
    """
    params = mechanism_params(true_value, sensitivity, epsilon)
    return sample(params, rng, size=size)
