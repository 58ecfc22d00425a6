"""Privacy-budget accounting across queries.

A curator splits one total budget among queries. Two slider modes:

* manual: each query's epsilon moves independently; locks are disabled.
  Overspending is allowed and surfaces as a negative remaining budget.
* responsive: moving one slider re-divides the leftover budget equally
  among the other unlocked queries, clamping each share into the legal
  epsilon range and re-spreading any surplus or deficit until stable.

States are immutable values; every mutation returns a fresh state.
Mutations that had to clamp a requested value report it in `notices`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import DomainError, StateError
from .risk import EPSILON_MAX, EPSILON_MIN

TOTAL_BUDGET_MAX = 8.0
MODES = ("manual", "responsive")


@dataclass(frozen=True)
class QueryAllocation:
    epsilon: float
    locked: bool = False

    def __post_init__(self):
        if not EPSILON_MIN <= self.epsilon <= EPSILON_MAX:
            raise DomainError(
                f"epsilon must be in [{EPSILON_MIN}, {EPSILON_MAX}], "
                f"got {self.epsilon}"
            )


@dataclass(frozen=True)
class AllocationState:
    total_budget: float
    per_query: dict[str, QueryAllocation]
    mode: str = "manual"
    notices: tuple[str, ...] = ()

    def __post_init__(self):
        if self.total_budget < 0:
            raise DomainError(f"total budget must be >= 0, got {self.total_budget}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.per_query:
            raise DomainError("need at least one query")
        if self.mode == "manual" and any(a.locked for a in self.per_query.values()):
            raise DomainError("locks are disabled in manual mode")

    def epsilon(self, query: str) -> float:
        return self._get(query).epsilon

    def locked(self, query: str) -> bool:
        return self._get(query).locked

    def _get(self, query: str) -> QueryAllocation:
        try:
            return self.per_query[query]
        except KeyError:
            raise DomainError(f"unknown query {query!r}") from None


def default_allocation(queries: list[str], total_budget: float) -> AllocationState:
    """Fresh state: manual mode, every slider parked at the minimum."""
    if len(set(queries)) != len(queries):
        raise DomainError("duplicate query names")
    return AllocationState(
        total_budget=total_budget,
        per_query={q: QueryAllocation(epsilon=EPSILON_MIN) for q in queries},
        mode="manual",
    )


def remaining_budget(s: AllocationState) -> float:
    """Total minus everything allocated; negative means overspent."""
    return s.total_budget - sum(a.epsilon for a in s.per_query.values())


def _clamp(value: float) -> tuple[float, bool]:
    clamped = min(EPSILON_MAX, max(EPSILON_MIN, value))
    return clamped, clamped != value


def set_epsilon(s: AllocationState, query: str, value: float) -> AllocationState:
    """Move one slider; in responsive mode, re-divide the rest of the budget."""
    alloc = s._get(query)
    target, was_clamped = _clamp(value)
    notices = (
        (f"epsilon for {query!r} clamped from {value} to {target}",)
        if was_clamped
        else ()
    )
    if s.mode == "manual":
        per_query = dict(s.per_query)
        per_query[query] = replace(alloc, epsilon=target)
        return replace(s, per_query=per_query, notices=notices)

    if alloc.locked:
        raise StateError(f"query {query!r} is locked")
    per_query = dict(s.per_query)
    per_query[query] = replace(alloc, epsilon=target)
    others = [q for q, a in per_query.items() if q != query and not a.locked]
    locked_sum = sum(a.epsilon for q, a in per_query.items() if a.locked)
    pool = s.total_budget - locked_sum - target
    # Equal division with iterative clamping: queries forced to a bound drop
    # out and the leftover is re-divided among the rest until none violate.
    active = list(others)
    while active:
        share = pool / len(active)
        if EPSILON_MIN <= share <= EPSILON_MAX:
            for q in active:
                per_query[q] = replace(per_query[q], epsilon=share)
            break
        bound = EPSILON_MIN if share < EPSILON_MIN else EPSILON_MAX
        per_query[active[0]] = replace(per_query[active[0]], epsilon=bound)
        pool -= bound
        active = active[1:]
    return replace(s, per_query=per_query, notices=notices)


def toggle_lock(s: AllocationState, query: str) -> AllocationState:
    """Flip one query's lock; locked sliders sit out of redistribution."""
    if s.mode != "responsive":
        raise StateError("locks are disabled in manual mode")
    alloc = s._get(query)
    per_query = dict(s.per_query)
    per_query[query] = replace(alloc, locked=not alloc.locked)
    return replace(s, per_query=per_query, notices=())


def set_mode(s: AllocationState, mode: str) -> AllocationState:
    """Switch slider behavior; entering manual clears all locks."""
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}, got {mode!r}")
    per_query = s.per_query
    if mode == "manual":
        per_query = {q: replace(a, locked=False) for q, a in s.per_query.items()}
    return replace(s, per_query=per_query, mode=mode, notices=())


def set_total(s: AllocationState, total_budget: float) -> AllocationState:
    """Change the total; allocations stay put until the next slider move."""
    clamped = min(TOTAL_BUDGET_MAX, max(0.0, total_budget))
    notices = (
        (f"total budget clamped from {total_budget} to {clamped}",)
        if clamped != total_budget
        else ()
    )
    return replace(s, total_budget=clamped, notices=notices)
