"""Dataset ingestion and exact COUNT query execution.

The query language is deliberately tiny: COUNT (optionally DISTINCT over a
designated entity-identifier column) with at most one GROUP BY attribute and
one WHERE comparison. Counts here are exact; noise is applied strictly
downstream. Record counts are treated as public information and never
consume privacy budget.

A schema file is JSON mapping column name -> {"type": "categorical" |
"integer" | "boolean", "is_phi": bool}. A column may additionally carry
"entity_id": true to mark it as the target of COUNT DISTINCT.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IngestError, SpecError

COLUMN_TYPES = ("categorical", "integer", "boolean")
COMPARATORS = ("==", "!=", "<", "<=", ">", ">=")

_TRUE = {"true", "1"}
_FALSE = {"false", "0"}


@dataclass(frozen=True)
class ColumnSpec:
    type: str
    is_phi: bool = False
    entity_id: bool = False

    def __post_init__(self):
        if self.type not in COLUMN_TYPES:
            raise SpecError(f"unknown column type {self.type!r}")


@dataclass
class Dataset:
    """Immutable-after-ingest table of schema-conforming rows."""

    name: str
    schema: dict[str, ColumnSpec]
    rows: list[dict[str, object]]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def entity_column(self) -> str | None:
        for col, spec in self.schema.items():
            if spec.entity_id:
                return col
        return None


@dataclass(frozen=True)
class Predicate:
    """Single-attribute comparison; order comparators require integer columns."""

    attribute: str
    op: str
    value: object

    def __post_init__(self):
        if self.op not in COMPARATORS:
            raise SpecError(f"unknown comparator {self.op!r}", field_path="where.op")

    def matches(self, row: dict[str, object]) -> bool:
        v = row[self.attribute]
        if self.op == "==":
            return v == self.value
        if self.op == "!=":
            return v != self.value
        if self.op == "<":
            return v < self.value
        if self.op == "<=":
            return v <= self.value
        if self.op == ">":
            return v > self.value
        return v >= self.value


@dataclass(frozen=True)
class QuerySpec:
    name: str
    aggregate: str = "COUNT"
    distinct: bool = False
    group_by: str | None = None
    where: Predicate | None = None
    extrapolation: bool = False


@dataclass(frozen=True)
class Subgroup:
    label: str
    count: int
    group_size: int

    @property
    def proportion(self) -> float:
        return self.count / self.group_size


@dataclass(frozen=True)
class QueryResult:
    query: str
    subgroups: tuple[Subgroup, ...]
    dataset_n: int


@dataclass(frozen=True)
class Metadata:
    data_source: str
    dataset_n: int
    subgroup_sizes: tuple[tuple[str, int], ...]
    sensitive_variables: tuple[str, ...]


def parse_schema(obj: dict) -> dict[str, ColumnSpec]:
    """Build a schema from its JSON form, rejecting unknown keys."""
    if not isinstance(obj, dict) or not obj:
        raise SpecError("schema must be a nonempty object of column specs")
    schema = {}
    for col, spec in obj.items():
        if not isinstance(spec, dict):
            raise SpecError(f"column {col!r} spec must be an object", field_path=col)
        unknown = set(spec) - {"type", "is_phi", "entity_id"}
        if unknown:
            raise SpecError(
                f"column {col!r} has unknown keys {sorted(unknown)}", field_path=col
            )
        try:
            schema[col] = ColumnSpec(
                type=spec.get("type", ""),
                is_phi=bool(spec.get("is_phi", False)),
                entity_id=bool(spec.get("entity_id", False)),
            )
        except SpecError as exc:
            raise SpecError(f"column {col!r}: {exc.message}", field_path=col) from exc
    return schema


def load_schema(path: str | Path) -> dict[str, ColumnSpec]:
    return parse_schema(json.loads(Path(path).read_text(encoding="utf-8")))


def _convert_cell(raw: str, col: str, spec: ColumnSpec, row_num: int) -> object:
    text = raw.strip()
    if spec.type == "integer":
        try:
            return int(text)
        except ValueError:
            raise IngestError(
                f"row {row_num}, column {col!r}: {raw!r} is not an integer"
            ) from None
    if spec.type == "boolean":
        low = text.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise IngestError(f"row {row_num}, column {col!r}: {raw!r} is not a boolean")
    if not text:
        raise IngestError(f"row {row_num}, column {col!r}: empty categorical value")
    return text


def ingest_csv(
    data: str | bytes,
    schema: dict[str, ColumnSpec],
    name: str = "dataset",
) -> Dataset:
    """Parse comma-separated UTF-8 text with a header row into a Dataset.

    Malformed rows are rejected with an error naming the row and column,
    never skipped silently.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    reader = csv.reader(io.StringIO(data))
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty file: no header row") from None
    header = [h.strip() for h in header]
    if len(set(header)) != len(header):
        raise IngestError("duplicate column in header row")
    unknown = [h for h in header if h not in schema]
    if unknown:
        raise IngestError(f"unknown column {unknown[0]!r} in header row")
    missing = [c for c in schema if c not in header]
    if missing:
        raise IngestError(f"schema column {missing[0]!r} missing from header row")

    rows: list[dict[str, object]] = []
    for row_num, raw_row in enumerate(reader, start=1):
        if not raw_row:
            continue  # blank line, not a record
        if len(raw_row) != len(header):
            raise IngestError(
                f"row {row_num}: expected {len(header)} cells, got {len(raw_row)}"
            )
        row = {
            col: _convert_cell(raw, col, schema[col], row_num)
            for col, raw in zip(header, raw_row)
        }
        rows.append(row)
    if not rows:
        raise IngestError("empty file: header but no data rows")
    return Dataset(name=name, schema=schema, rows=rows)


def load_dataset(csv_path: str | Path, schema_path: str | Path) -> Dataset:
    schema = load_schema(schema_path)
    text = Path(csv_path).read_text(encoding="utf-8")
    return ingest_csv(text, schema, name=Path(csv_path).stem)


def parse_query_spec(obj: dict) -> QuerySpec:
    """Build a QuerySpec from its JSON form."""
    if not isinstance(obj, dict):
        raise SpecError("query spec must be an object")
    unknown = set(obj) - {
        "name",
        "aggregate",
        "distinct",
        "group_by",
        "where",
        "extrapolation",
    }
    if unknown:
        raise SpecError(f"query spec has unknown keys {sorted(unknown)}")
    name = obj.get("name")
    if not name or not isinstance(name, str):
        raise SpecError("query spec needs a nonempty name", field_path="name")
    where = None
    if obj.get("where") is not None:
        w = obj["where"]
        if not isinstance(w, dict) or set(w) != {"attribute", "op", "value"}:
            raise SpecError(
                "where must be {attribute, op, value}", field_path="where"
            )
        op = "==" if w["op"] == "=" else w["op"]
        where = Predicate(attribute=w["attribute"], op=op, value=w["value"])
    return QuerySpec(
        name=name,
        aggregate=obj.get("aggregate", "COUNT"),
        distinct=bool(obj.get("distinct", False)),
        group_by=obj.get("group_by"),
        where=where,
        extrapolation=bool(obj.get("extrapolation", False)),
    )


def validate_query(ds: Dataset, q: QuerySpec) -> None:
    """Check a spec against the dataset schema; raises SpecError."""
    if q.aggregate != "COUNT":
        raise SpecError(
            f"only COUNT is supported, got {q.aggregate!r}", field_path="aggregate"
        )
    if q.group_by is not None and q.group_by not in ds.schema:
        raise SpecError(
            f"group_by attribute {q.group_by!r} not in schema", field_path="group_by"
        )
    if q.distinct and ds.entity_column is None:
        raise SpecError(
            "DISTINCT requires a schema column marked entity_id", field_path="distinct"
        )
    if q.where is not None:
        col = ds.schema.get(q.where.attribute)
        if col is None:
            raise SpecError(
                f"where attribute {q.where.attribute!r} not in schema",
                field_path="where.attribute",
            )
        expected = {"categorical": str, "integer": int, "boolean": bool}[col.type]
        if not isinstance(q.where.value, expected) or (
            expected is int and isinstance(q.where.value, bool)
        ):
            raise SpecError(
                f"where literal {q.where.value!r} does not match "
                f"{col.type} column {q.where.attribute!r}",
                field_path="where.value",
            )
        if q.where.op in ("<", "<=", ">", ">=") and col.type != "integer":
            raise SpecError(
                f"order comparator {q.where.op!r} requires an integer column",
                field_path="where.op",
            )


def _group_members(ds: Dataset, q: QuerySpec) -> list[tuple[str, list[dict]]]:
    if q.group_by is None:
        return [("all", ds.rows)]
    groups: dict[str, list[dict]] = {}
    for row in ds.rows:
        groups.setdefault(str(row[q.group_by]), []).append(row)
    return list(groups.items())


def _cardinality(rows: list[dict], distinct_col: str | None) -> int:
    if distinct_col is None:
        return len(rows)
    return len({row[distinct_col] for row in rows})


def execute(ds: Dataset, q: QuerySpec) -> QueryResult:
    """Run the query exactly.

    Each subgroup is a GROUP BY level; its group_size is the subgroup's
    cardinality in the full dataset and its count is the cardinality of the
    subgroup rows matching WHERE, so count/group_size is the within-group
    proportion satisfying the condition. Subgroups are ordered by descending
    group size, ties broken lexicographically by label.
    """
    validate_query(ds, q)
    distinct_col = ds.entity_column if q.distinct else None
    subgroups = []
    for label, members in _group_members(ds, q):
        matching = (
            members if q.where is None else [r for r in members if q.where.matches(r)]
        )
        subgroups.append(
            Subgroup(
                label=label,
                count=_cardinality(matching, distinct_col),
                group_size=_cardinality(members, distinct_col),
            )
        )
    if not subgroups:
        raise SpecError(f"group_by {q.group_by!r} has no distinct values")
    subgroups.sort(key=lambda s: (-s.group_size, s.label))
    return QueryResult(query=q.name, subgroups=tuple(subgroups), dataset_n=ds.n)


def metadata(ds: Dataset, q: QuerySpec) -> Metadata:
    """Public facts about the query: source, per-subgroup sizes, PHI touched."""
    validate_query(ds, q)
    result = execute(ds, q)
    touched = []
    if q.group_by is not None:
        touched.append(q.group_by)
    if q.where is not None:
        touched.append(q.where.attribute)
    if q.distinct and ds.entity_column is not None:
        touched.append(ds.entity_column)
    sensitive = tuple(
        sorted({c for c in touched if ds.schema[c].is_phi})
    )
    return Metadata(
        data_source=ds.name,
        dataset_n=ds.n,
        subgroup_sizes=tuple((s.label, s.group_size) for s in result.subgroups),
        sensitive_variables=sensitive,
    )
