"""Seeded synthetic patient cohort for demos and end-to-end tests.

The cohort is deterministic given a seed, so ground-truth counts can be
recomputed by any linear scan. Prevalence varies by ethnicity on purpose:
subgroup proportions should differ enough that plots of them are readable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .queries import ColumnSpec, Dataset
from .rng import derive_rng

ETHNICITIES = ("asian", "black", "hispanic", "white")
ETHNICITY_WEIGHTS = (0.12, 0.18, 0.22, 0.48)
DIAGNOSES = ("hypertension", "none", "prediabetes")
HYPERTENSION_RATE = {
    "asian": 0.25,
    "black": 0.41,
    "hispanic": 0.30,
    "white": 0.33,
}
PREDIABETES_RATE = 0.12
SEXES = ("female", "male")


@dataclass(frozen=True)
class CohortConfig:
    n: int = 10_000
    seed: int = 20240501


def cohort_schema() -> dict[str, ColumnSpec]:
    return {
        "patient_id": ColumnSpec(type="integer", is_phi=False, entity_id=True),
        "sex": ColumnSpec(type="categorical", is_phi=False),
        "age": ColumnSpec(type="integer", is_phi=False),
        "ethnicity": ColumnSpec(type="categorical", is_phi=False),
        "diagnosis": ColumnSpec(type="categorical", is_phi=True),
        "on_medication": ColumnSpec(type="boolean", is_phi=True),
    }


def generate_cohort(config: CohortConfig = CohortConfig()) -> Dataset:
    rng = derive_rng(config.seed, "cohort")
    ethnicity = rng.choice(ETHNICITIES, size=config.n, p=ETHNICITY_WEIGHTS)
    sex = rng.choice(SEXES, size=config.n)
    age = rng.integers(18, 91, size=config.n)
    u = rng.random(config.n)
    med = rng.random(config.n)
    rows = []
    for i in range(config.n):
        eth = str(ethnicity[i])
        hyp = HYPERTENSION_RATE[eth]
        if u[i] < hyp:
            diagnosis = "hypertension"
        elif u[i] < hyp + PREDIABETES_RATE:
            diagnosis = "prediabetes"
        else:
            diagnosis = "none"
        rows.append(
            {
                "patient_id": i + 1,
                "sex": str(sex[i]),
                "age": int(age[i]),
                "ethnicity": eth,
                "diagnosis": diagnosis,
                "on_medication": bool(
                    med[i] < (0.7 if diagnosis == "hypertension" else 0.05)
                ),
            }
        )
    return Dataset(name="synthetic_cohort", schema=cohort_schema(), rows=rows)


def write_cohort(
    out_dir: str | Path, config: CohortConfig = CohortConfig()
) -> tuple[Path, Path]:
    """Write cohort.csv and schema.json under out_dir; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds = generate_cohort(config)
    csv_path = out / "cohort.csv"
    columns = list(ds.schema)
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in ds.rows:
            writer.writerow(
                [
                    str(row[c]).lower() if ds.schema[c].type == "boolean" else row[c]
                    for c in columns
                ]
            )
    schema_path = out / "schema.json"
    schema_json = {
        col: {
            "type": spec.type,
            "is_phi": spec.is_phi,
            **({"entity_id": True} if spec.entity_id else {}),
        }
        for col, spec in ds.schema.items()
    }
    schema_path.write_text(json.dumps(schema_json, indent=2), encoding="utf-8")
    return csv_path, schema_path
