"""Presentation-ready uncertainty models.

Everything a frequency-framed uncertainty display needs is computed here,
so a renderer only has to draw shapes: quantile dotplots (each dot is a
fixed slice of probability), hypothetical-outcome streams (one noise draw
per animation frame), threshold judgments read off the dots, and Monte
Carlo probability of superiority between two noise distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .inference import BootstrapConfig, ConfidenceInterval, bootstrap_replicates, private_cis
from .laplace import LaplaceParams, laplace_quantile, sample
from .rng import derive_rng, derive_seed

DEFAULT_DOTS = 25
DEFAULT_BINS = 40
FRAME_RATE = 2.5  # frames per second; the animation clock lives in the UI


@dataclass(frozen=True)
class Bin:
    lower: float
    upper: float
    dot_count: int


@dataclass(frozen=True)
class QuantileDotplot:
    dots: tuple[float, ...]
    bins: tuple[Bin, ...]
    per_dot_probability: float


@dataclass(frozen=True)
class HopFrame:
    release_draw: float
    private_ci_draws: dict[float, ConfidenceInterval] | None = None


@dataclass(frozen=True)
class HopStream:
    frames: tuple[HopFrame, ...]
    frame_rate: float
    seed: int


@dataclass(frozen=True)
class SuperiorityEstimate:
    probability: float
    standard_error: float
    trials: int


def quantile_dotplot(
    params: LaplaceParams,
    bin_count: int = DEFAULT_BINS,
    dot_count: int = DEFAULT_DOTS,
) -> QuantileDotplot:
    """Dots at the (i - 0.5)/k quantiles, stacked into equal-width bins."""
    if bin_count < 1:
        raise DomainError(f"bin_count must be >= 1, got {bin_count}")
    if dot_count < 1:
        raise DomainError(f"dot_count must be >= 1, got {dot_count}")
    dots = tuple(
        laplace_quantile((i - 0.5) / dot_count, params)
        for i in range(1, dot_count + 1)
    )
    lo, hi = dots[0], dots[-1]
    width = (hi - lo) / bin_count if hi > lo else 1.0
    counts = [0] * bin_count
    for dot in dots:
        idx = min(int((dot - lo) / width), bin_count - 1)
        counts[idx] += 1
    bins = tuple(
        Bin(lower=lo + i * width, upper=lo + (i + 1) * width, dot_count=c)
        for i, c in enumerate(counts)
    )
    return QuantileDotplot(
        dots=dots, bins=bins, per_dot_probability=1.0 / dot_count
    )


def bin_probability(dp: QuantileDotplot, bin_index: int) -> dict[str, float]:
    """Chance the release lands in one bin: dots there times 1/k."""
    if not 0 <= bin_index < len(dp.bins):
        raise DomainError(f"bin_index {bin_index} out of range")
    b = dp.bins[bin_index]
    return {
        "lower": b.lower,
        "upper": b.upper,
        "probability": b.dot_count * dp.per_dot_probability,
    }


def cdf_judgment(dp: QuantileDotplot, threshold: float, direction: str) -> float:
    """Fraction of dots at or beyond a threshold; a dot-resolution CDF read."""
    if direction == "<=":
        hits = sum(1 for d in dp.dots if d <= threshold)
    elif direction == ">":
        hits = sum(1 for d in dp.dots if d > threshold)
    else:
        raise DomainError(f"direction must be '<=' or '>', got {direction!r}")
    return hits * dp.per_dot_probability


def hop_stream(
    params: LaplaceParams,
    N: int,
    sensitivity: float,
    epsilon: float,
    cfg: BootstrapConfig,
    frame_count: int,
    extrapolation: bool,
    seed: int,
) -> HopStream:
    """Seeded batch of hypothetical outcomes from a count-space mechanism.

    Each frame is one fresh draw. With extrapolation on, the frame also
    carries private CIs bootstrapped from that draw alone: the draw is
    converted to a proportion by dividing by N and fed through the
    replicate pipeline with a frame-specific derived seed.
    """
    if frame_count < 1:
        raise DomainError(f"frame_count must be >= 1, got {frame_count}")
    rng = derive_rng(seed, "hop")
    draws = sample(params, rng, size=frame_count)
    frames = []
    for i, draw in enumerate(draws):
        cis = None
        if extrapolation:
            frame_cfg = BootstrapConfig(
                B=cfg.B, levels=cfg.levels, seed=derive_seed(seed, "hop-ci", i)
            )
            reps = bootstrap_replicates(
                float(draw) / N, N, sensitivity, epsilon, frame_cfg
            )
            cis = private_cis(reps, cfg.levels)
        frames.append(HopFrame(release_draw=float(draw), private_ci_draws=cis))
    return HopStream(frames=tuple(frames), frame_rate=FRAME_RATE, seed=seed)


def probability_of_superiority(
    params_a: LaplaceParams,
    params_b: LaplaceParams,
    trials: int = 100_000,
    seed: int = 0,
) -> SuperiorityEstimate:
    """Monte Carlo Pr(draw from A > draw from B) with its standard error."""
    if trials < 10_000:
        raise DomainError(f"trials must be >= 10000, got {trials}")
    draws_a = sample(params_a, derive_rng(seed, "superiority", "a"), size=trials)
    draws_b = sample(params_b, derive_rng(seed, "superiority", "b"), size=trials)
    p = float(np.mean(draws_a > draws_b))
    se = math.sqrt(p * (1 - p) / trials)
    return SuperiorityEstimate(probability=p, standard_error=se, trials=trials)
