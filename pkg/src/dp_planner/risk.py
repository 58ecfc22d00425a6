"""Closed-form disclosure risk and risk curves over the budget slider range.

Risk is the upper bound on an adversary's probability of correctly guessing
whether a given record entered the computation, starting from a uniform
prior over the n records: risk = (1 + (n-1) * exp(-eps/delta_f))^-1.
Subgroups never contribute separately; a query's risk is computed from its
single query-level epsilon, and the overall risk from the plain sum of the
per-query budgets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .laplace import PrivacyBudget, Sensitivity

EPSILON_MIN = 0.001
EPSILON_MAX = 2.0

# Log-spaced grid resolution used for plotting the curve.
CURVE_POINTS = 500


@dataclass(frozen=True)
class RiskPoint:
    epsilon: float
    risk: float


@dataclass(frozen=True)
class RiskCurve:
    points: tuple[RiskPoint, ...]
    n: int
    delta_f: float


def disclosure_risk(
    epsilon: float | PrivacyBudget,
    n: int,
    sensitivity: float | Sensitivity = 1.0,
) -> float:
    """Upper bound on the adversary's correct-guess probability.

    Strictly increasing in epsilon with limits 1/n (eps -> 0) and 1
    (eps -> inf); strictly decreasing in n.
    """
    eps = float(epsilon)
    if n < 2:
        raise DomainError(f"risk needs a database of at least 2 records, got n={n}")
    if not eps > 0:
        raise DomainError(f"epsilon must be positive, got {eps}")
    return 1.0 / (1.0 + (n - 1) * math.exp(-eps / float(sensitivity)))


def default_grid(
    lo: float = EPSILON_MIN, hi: float = EPSILON_MAX, points: int = CURVE_POINTS
) -> np.ndarray:
    """Log-spaced epsilon grid matching the curvature of the risk curve near 0."""
    return np.geomspace(lo, hi, points)


def risk_curve(
    grid: Sequence[float] | np.ndarray,
    n: int,
    sensitivity: float | Sensitivity = 1.0,
) -> RiskCurve:
    """Evaluate disclosure risk on an epsilon grid spanning the slider range."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise DomainError("risk curve grid must be nonempty")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("risk curve grid must be strictly increasing")
    # Tolerate float endpoints that round a hair outside the slider range.
    if grid[0] < EPSILON_MIN * (1 - 1e-12) or grid[-1] > EPSILON_MAX * (1 + 1e-12):
        raise DomainError(
            f"risk curve grid must lie within [{EPSILON_MIN}, {EPSILON_MAX}]"
        )
    points = tuple(
        RiskPoint(epsilon=float(e), risk=disclosure_risk(float(e), n, sensitivity))
        for e in grid
    )
    return RiskCurve(points=points, n=n, delta_f=float(sensitivity))


def overall_risk(
    budgets: Sequence[float | PrivacyBudget],
    n: int,
    sensitivity: float | Sensitivity = 1.0,
) -> RiskPoint:
    """Risk at the sum of per-query budgets (sequential composition)."""
    if not budgets:
        raise DomainError("overall risk needs at least one per-query budget")
    eps_total = float(sum(float(b) for b in budgets))
    return RiskPoint(epsilon=eps_total, risk=disclosure_risk(eps_total, n, sensitivity))
