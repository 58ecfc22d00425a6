"""Session workflow: register data and queries, explore, then release once.

A session binds a dataset, a set of COUNT queries, a budget allocation,
and a master seed. Exploration (what-if payloads) is pure read: all
randomness comes from seeds derived off the master seed, so repeating a
request reproduces its payload bit for bit and nothing is debited.
Finalization draws exactly one noised value per (query, subgroup) at the
query's allocated epsilon, computes any private CIs from those draws
alone, and freezes the session; repeat calls return the stored document.

Exact query results appear only in what-if payloads (curator-facing);
release documents carry noised values, never exact counts.

Persistence is an append-only JSONL event log per session (create,
budget mutations, finalize). Replaying a log rebuilds the session,
including a byte-identical release document.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import allocator as alloc
from .errors import (
    DomainError,
    FinalizedError,
    NotFoundError,
    SpecError,
    StateError,
)
from .inference import BootstrapConfig, binomial_ci, bootstrap_replicates, private_cis
from .laplace import LaplaceParams, mechanism_params, sample
from .queries import Dataset, QuerySpec, execute, metadata, parse_query_spec
from .risk import (
    EPSILON_MAX,
    EPSILON_MIN,
    default_grid,
    disclosure_risk,
    overall_risk,
    risk_curve,
)
from .rng import derive_rng, derive_seed, seed_fingerprint
from .vizmodel import FRAME_RATE, hop_stream, quantile_dotplot

SCHEMA_VERSION = "1"
SENSITIVITY = 1.0
DEFAULT_FRAMES = 40
MAX_FRAMES = 1000
CI_LEVEL_KEYS = {0.50: "50", 0.80: "80", 0.95: "95"}


@dataclass
class Session:
    id: str
    dataset: Dataset
    queries: dict[str, QuerySpec]
    allocation: alloc.AllocationState
    seed: int
    finalized: bool = False
    release_document: dict | None = None
    spend_counts: dict[tuple[str, str], int] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _ci_json(ci) -> dict:
    return {"lower": ci.lower, "upper": ci.upper, "level": ci.level}


def _cis_json(cis: dict) -> dict:
    return {CI_LEVEL_KEYS[level]: _ci_json(ci) for level, ci in sorted(cis.items())}


def _dotplot_json(dp) -> dict:
    return {
        "dots": list(dp.dots),
        "bins": [
            {"lower": b.lower, "upper": b.upper, "dot_count": b.dot_count}
            for b in dp.bins
        ],
        "per_dot_probability": dp.per_dot_probability,
    }


def _check_epsilon(epsilon: float, field_path: str = "epsilon") -> float:
    eps = float(epsilon)
    if not EPSILON_MIN <= eps <= EPSILON_MAX:
        raise DomainError(
            f"epsilon must be in [{EPSILON_MIN}, {EPSILON_MAX}], got {eps}",
            field_path=field_path,
        )
    return eps


def allocation_json(state: alloc.AllocationState) -> dict:
    return {
        "mode": state.mode,
        "total_budget": state.total_budget,
        "per_query": {
            q: {"epsilon": a.epsilon, "locked": a.locked}
            for q, a in state.per_query.items()
        },
        "remaining_budget": alloc.remaining_budget(state),
        "notices": list(state.notices),
    }


def session_payload(session: Session) -> dict:
    """Public session snapshot: metadata, allocation, never exact counts."""
    queries = []
    for q in session.queries.values():
        meta = metadata(session.dataset, q)
        queries.append(
            {
                "name": q.name,
                "group_by": q.group_by,
                "distinct": q.distinct,
                "where": (
                    {
                        "attribute": q.where.attribute,
                        "op": q.where.op,
                        "value": q.where.value,
                    }
                    if q.where
                    else None
                ),
                "extrapolation": q.extrapolation,
                "subgroups": [
                    {"label": label, "group_size": size}
                    for label, size in meta.subgroup_sizes
                ],
                "sensitive_variables": list(meta.sensitive_variables),
            }
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "id": session.id,
        "dataset": {"name": session.dataset.name, "n": session.dataset.n},
        "queries": queries,
        "allocation": allocation_json(session.allocation),
        "finalized": session.finalized,
        "seed_fingerprint": seed_fingerprint(session.seed),
    }


def risk_curve_payload(session: Session) -> dict:
    curve = risk_curve(default_grid(), session.dataset.n, SENSITIVITY)
    return {
        "schema_version": SCHEMA_VERSION,
        "n": curve.n,
        "points": [{"epsilon": p.epsilon, "risk": p.risk} for p in curve.points],
    }


def whatif_payload(
    session: Session,
    query_name: str,
    epsilon: float | None = None,
    frames: int = DEFAULT_FRAMES,
    bootstrap_B: int = 500,
) -> dict:
    """Pure preview of a release at a hypothetical epsilon.

    Consumes no budget and mutates nothing: every random quantity is
    derived from (master seed, query, subgroup, epsilon), so identical
    requests produce identical payloads.
    """
    if session.finalized:
        raise FinalizedError("session is finalized; what-if is closed")
    q = session.queries.get(query_name)
    if q is None:
        raise NotFoundError(f"unknown query {query_name!r}", field_path="query")
    if not 1 <= frames <= MAX_FRAMES:
        raise DomainError(
            f"frames must be in [1, {MAX_FRAMES}], got {frames}", field_path="frames"
        )
    eps = _check_epsilon(
        session.allocation.epsilon(query_name) if epsilon is None else epsilon
    )
    result = execute(session.dataset, q)
    n = session.dataset.n
    cfg = BootstrapConfig(B=bootstrap_B)
    seed = session.seed

    subgroups = []
    for sg in result.subgroups:
        params = mechanism_params(float(sg.count), SENSITIVITY, eps)
        params_prop = LaplaceParams(
            location=sg.count / sg.group_size,
            scale=SENSITIVITY / (sg.group_size * eps),
        )
        stream = hop_stream(
            params,
            sg.group_size,
            SENSITIVITY,
            eps,
            BootstrapConfig(B=bootstrap_B, seed=0),
            frames,
            q.extrapolation,
            seed=derive_seed(seed, "whatif-hop", query_name, sg.label, eps),
        )
        entry = {
            "label": sg.label,
            "group_size": sg.group_size,
            "exact_count": sg.count,
            "exact_proportion": sg.proportion,
            "dotplot_count": _dotplot_json(quantile_dotplot(params)),
            "dotplot_proportion": _dotplot_json(quantile_dotplot(params_prop)),
            "hop": {
                "frame_rate": stream.frame_rate,
                "frames": [
                    {
                        "count": f.release_draw,
                        "proportion": f.release_draw / sg.group_size,
                        **(
                            {"private_cis": _cis_json(f.private_ci_draws)}
                            if f.private_ci_draws is not None
                            else {}
                        ),
                    }
                    for f in stream.frames
                ],
            },
        }
        if q.extrapolation:
            entry["nonprivate_cis"] = _cis_json(
                {
                    level: binomial_ci(sg.proportion, sg.group_size, 1 - level)
                    for level in cfg.levels
                }
            )
            preview_rng = derive_rng(
                seed, "whatif-preview", query_name, sg.label, eps
            )
            preview_draw = sample(params, preview_rng)
            reps = bootstrap_replicates(
                preview_draw / sg.group_size,
                sg.group_size,
                SENSITIVITY,
                eps,
                BootstrapConfig(
                    B=bootstrap_B,
                    seed=derive_seed(seed, "whatif-ci", query_name, sg.label, eps),
                ),
            )
            entry["private_ci_preview"] = _cis_json(private_cis(reps, cfg.levels))
        subgroups.append(entry)

    others = sum(
        a.epsilon
        for name, a in session.allocation.per_query.items()
        if name != query_name
    )
    return {
        "schema_version": SCHEMA_VERSION,
        "query": query_name,
        "epsilon": eps,
        "extrapolation": q.extrapolation,
        "frame_rate": FRAME_RATE,
        "subgroups": subgroups,
        "risk_point": {"epsilon": eps, "risk": disclosure_risk(eps, n, SENSITIVITY)},
        "risk_curve": risk_curve_payload(session),
        "remaining_budget": session.allocation.total_budget - others - eps,
    }


def build_release_document(session: Session, created_at: str) -> dict:
    """Draw each subgroup's release once and assemble the public document."""
    n = session.dataset.n
    queries = []
    spent = []
    for q in session.queries.values():
        eps = session.allocation.epsilon(q.name)
        spent.append(eps)
        result = execute(session.dataset, q)
        subgroups = []
        for sg in result.subgroups:
            params = mechanism_params(float(sg.count), SENSITIVITY, eps)
            rng = derive_rng(session.seed, "release", q.name, sg.label)
            released = float(sample(params, rng))
            key = (q.name, sg.label)
            session.spend_counts[key] = session.spend_counts.get(key, 0) + 1
            entry = {
                "label": sg.label,
                "group_size": sg.group_size,
                "released_count": released,
                "released_proportion": released / sg.group_size,
            }
            if q.extrapolation:
                reps = bootstrap_replicates(
                    released / sg.group_size,
                    sg.group_size,
                    SENSITIVITY,
                    eps,
                    BootstrapConfig(
                        B=500,
                        seed=derive_seed(
                            session.seed, "release-ci", q.name, sg.label
                        ),
                    ),
                )
                entry["private_cis"] = _cis_json(private_cis(reps))
            subgroups.append(entry)
        queries.append(
            {
                "query": q.name,
                "epsilon_spent": eps,
                "extrapolation": q.extrapolation,
                "subgroups": subgroups,
            }
        )
    overall = overall_risk(spent, n, SENSITIVITY)
    return {
        "schema_version": SCHEMA_VERSION,
        "session_id": session.id,
        "dataset": {"name": session.dataset.name, "n": n},
        "created_at": created_at,
        "seed_fingerprint": seed_fingerprint(session.seed),
        "queries": queries,
        "overall_risk": {"epsilon": overall.epsilon, "risk": overall.risk},
    }


class SessionStore:
    """Registry of datasets and sessions with optional on-disk event logs."""

    def __init__(self, data_dir: str | Path | None = None):
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, Session] = {}
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)

    # -- datasets ---------------------------------------------------------

    def register_dataset(self, name: str, dataset: Dataset) -> None:
        with self._lock:
            self.datasets[name] = dataset

    def dataset(self, name: str) -> Dataset:
        try:
            return self.datasets[name]
        except KeyError:
            raise NotFoundError(
                f"unknown dataset {name!r}", field_path="dataset"
            ) from None

    # -- event log --------------------------------------------------------

    def _log_path(self, session_id: str) -> Path | None:
        if self.data_dir is None:
            return None
        log_dir = self.data_dir / "sessions"
        log_dir.mkdir(parents=True, exist_ok=True)
        return log_dir / f"{session_id}.jsonl"

    def _append_event(self, session_id: str, event: dict) -> None:
        path = self._log_path(session_id)
        if path is None:
            return
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    def replay_logs(self) -> list[str]:
        """Rebuild sessions from disk; returns ids that replayed cleanly."""
        if self.data_dir is None:
            return []
        replayed = []
        log_dir = self.data_dir / "sessions"
        if not log_dir.is_dir():
            return []
        for path in sorted(log_dir.glob("*.jsonl")):
            events = [
                json.loads(line)
                for line in path.read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
            if not events or events[0].get("event") != "create":
                continue
            head = events[0]
            if head["dataset"] not in self.datasets:
                continue
            session = self.create_session(
                head["dataset"],
                head["queries"],
                head["total_budget"],
                head["seed"],
                session_id=head["id"],
                _log=False,
            )
            for ev in events[1:]:
                if ev["event"] == "budget":
                    self.update_budget(session.id, ev["mutation"], _log=False)
                elif ev["event"] == "finalize":
                    session.release_document = ev["document"]
                    session.finalized = True
            replayed.append(session.id)
        return replayed

    # -- lifecycle --------------------------------------------------------

    def create_session(
        self,
        dataset_name: str,
        query_specs: list[dict],
        total_budget: float,
        seed: int,
        session_id: str | None = None,
        _log: bool = True,
    ) -> Session:
        ds = self.dataset(dataset_name)
        if not query_specs:
            raise SpecError("need at least one query", field_path="queries")
        parsed = [parse_query_spec(obj) for obj in query_specs]
        names = [q.name for q in parsed]
        if len(set(names)) != len(names):
            raise SpecError("duplicate query names", field_path="queries")
        for q in parsed:
            execute(ds, q)  # full validation against the schema and data
        state = alloc.default_allocation(names, total_budget)
        session = Session(
            id=session_id or uuid.uuid4().hex,
            dataset=ds,
            queries={q.name: q for q in parsed},
            allocation=state,
            seed=int(seed),
        )
        with self._lock:
            if session.id in self.sessions:
                raise StateError(f"session {session.id!r} already exists")
            self.sessions[session.id] = session
        if _log:
            self._append_event(
                session.id,
                {
                    "event": "create",
                    "at": _now(),
                    "id": session.id,
                    "dataset": dataset_name,
                    "queries": query_specs,
                    "total_budget": total_budget,
                    "seed": int(seed),
                },
            )
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise NotFoundError(
                f"unknown session {session_id!r}", field_path="session"
            ) from None

    def update_budget(
        self, session_id: str, mutation: dict, _log: bool = True
    ) -> Session:
        session = self.get(session_id)
        with session.lock:
            if session.finalized:
                raise FinalizedError("session is finalized; budget is frozen")
            action = mutation.get("action")
            if action == "set_epsilon":
                state = alloc.set_epsilon(
                    session.allocation, mutation["query"], float(mutation["value"])
                )
            elif action == "toggle_lock":
                state = alloc.toggle_lock(session.allocation, mutation["query"])
            elif action == "set_mode":
                state = alloc.set_mode(session.allocation, mutation["mode"])
            elif action == "set_total":
                state = alloc.set_total(session.allocation, float(mutation["total"]))
            else:
                raise SpecError(
                    f"unknown budget action {action!r}", field_path="action"
                )
            session.allocation = state
        if _log:
            self._append_event(
                session_id, {"event": "budget", "at": _now(), "mutation": mutation}
            )
        return session

    def whatif(
        self,
        session_id: str,
        query_name: str,
        epsilon: float | None = None,
        frames: int = DEFAULT_FRAMES,
    ) -> dict:
        return whatif_payload(self.get(session_id), query_name, epsilon, frames)

    def finalize(self, session_id: str) -> tuple[dict, bool]:
        """Finalize once; returns (document, already_finalized)."""
        session = self.get(session_id)
        with session.lock:
            if session.finalized:
                return session.release_document, True
            doc = build_release_document(session, created_at=_now())
            session.release_document = doc
            session.finalized = True
        self._append_event(
            session_id, {"event": "finalize", "at": doc["created_at"], "document": doc}
        )
        return doc, False

    def get_release(self, session_id: str) -> dict:
        session = self.get(session_id)
        if not session.finalized or session.release_document is None:
            raise StateError("session is not finalized; no release exists")
        return session.release_document
