"""Generate the synthetic patient cohort CSV and its schema.

Usage: python3 scripts/make_cohort.py --n 10000 --seed 20240501 --out data/
"""

import argparse
from pathlib import Path

from dp_planner import CohortConfig, write_cohort


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=20240501)
    ap.add_argument("--out", type=Path, default=Path("data"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    csv_path, schema_path = write_cohort(
        args.out, CohortConfig(n=args.n, seed=args.seed)
    )
    print(f"wrote {csv_path} ({args.n} rows) and {schema_path}")


if __name__ == "__main__":
    main()
