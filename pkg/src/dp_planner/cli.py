"""Command-line driver: ingest, plan, release, serve.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
The DP_PLANNER_DATA_DIR environment variable overrides --data wherever
it appears. A --data value naming a directory resolves to cohort.csv
(and schema.json when --schema is omitted) inside it, matching the
layout the cohort generator writes.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .errors import PlannerError
from .inference import BootstrapConfig, bootstrap_replicates, private_ci
from .laplace import LaplaceParams, laplace_quantile
from .queries import execute, load_dataset, parse_query_spec
from .risk import EPSILON_MAX, EPSILON_MIN, disclosure_risk
from .rng import derive_seed
from .sessions import SENSITIVITY, SessionStore

ENV_DATA_DIR = "DP_PLANNER_DATA_DIR"


def _resolve_data(data: str | None, schema: str | None) -> tuple[Path, Path]:
    override = os.environ.get(ENV_DATA_DIR)
    if override:
        data = override
    if data is None:
        raise click.UsageError(f"--data is required (or set {ENV_DATA_DIR})")
    data_path = Path(data)
    if data_path.is_dir():
        schema_path = Path(schema) if schema else data_path / "schema.json"
        data_path = data_path / "cohort.csv"
    else:
        if schema is None:
            raise click.UsageError("--schema is required when --data is a file")
        schema_path = Path(schema)
    return data_path, schema_path


def _load_queries(path: str) -> list[dict]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    specs = obj if isinstance(obj, list) else [obj]
    for spec in specs:
        parse_query_spec(spec)  # surface spec errors before any work
    return specs


def _parse_grid(text: str) -> list[float]:
    try:
        grid = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise click.UsageError(f"bad epsilon grid {text!r}") from None
    if not grid:
        raise click.UsageError("epsilon grid is empty")
    for eps in grid:
        if not EPSILON_MIN <= eps <= EPSILON_MAX:
            raise click.UsageError(
                f"epsilon {eps} outside [{EPSILON_MIN}, {EPSILON_MAX}]"
            )
    return grid


@click.group()
def cli():
    """Plan and publish privacy-preserving COUNT releases."""


@cli.command()
@click.option("--data", type=str, default=None, help="CSV file or data directory.")
@click.option("--schema", type=str, default=None, help="Schema JSON file.")
def ingest(data, schema):
    """Validate a dataset and print its size and column summary."""
    data_path, schema_path = _resolve_data(data, schema)
    ds = load_dataset(data_path, schema_path)
    click.echo(f"n = {ds.n}")
    click.echo("columns:")
    for col, spec in ds.schema.items():
        flags = []
        if spec.is_phi:
            flags.append("phi")
        if spec.entity_id:
            flags.append("entity id")
        suffix = f" ({', '.join(flags)})" if flags else ""
        click.echo(f"  {col}: {spec.type}{suffix}")


@cli.command()
@click.option("--data", type=str, default=None)
@click.option("--schema", type=str, default=None)
@click.option("--queries", "queries_path", type=str, required=True)
@click.option("--epsilon-grid", default="0.01,0.1,0.5,1,2", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--format", "fmt", type=click.Choice(["table", "json"]), default="table"
)
def plan(data, schema, queries_path, epsilon_grid, seed, fmt):
    """Sweep epsilon values and tabulate risk, error bound, and CI width.

    The 95% error bound e satisfies Pr(|noise| <= e) = 0.95 for the
    count-space mechanism. The CI width is a seeded preview of the 95%
    private CI for the query's largest subgroup.
    """
    data_path, schema_path = _resolve_data(data, schema)
    ds = load_dataset(data_path, schema_path)
    specs = [parse_query_spec(s) for s in _load_queries(queries_path)]
    grid = _parse_grid(epsilon_grid)
    rows = []
    for q in specs:
        result = execute(ds, q)
        top = result.subgroups[0]
        for eps in grid:
            bound = laplace_quantile(
                0.975, LaplaceParams(0.0, SENSITIVITY / eps)
            )
            reps = bootstrap_replicates(
                top.proportion,
                top.group_size,
                SENSITIVITY,
                eps,
                BootstrapConfig(seed=derive_seed(seed, "plan", q.name, eps)),
            )
            rows.append(
                {
                    "query": q.name,
                    "epsilon": eps,
                    "risk": disclosure_risk(eps, ds.n, SENSITIVITY),
                    "error_bound_95": bound,
                    "private_ci_width_95": private_ci(reps, 0.05).width,
                }
            )
    if fmt == "json":
        click.echo(json.dumps({"schema_version": "1", "rows": rows}, indent=2))
        return
    header = f"{'query':<20} {'epsilon':>8} {'risk':>12} {'bound95':>10} {'ci_width95':>11}"
    click.echo(header)
    click.echo("-" * len(header))
    for r in rows:
        click.echo(
            f"{r['query']:<20} {r['epsilon']:>8.3f} {r['risk']:>12.6g} "
            f"{r['error_bound_95']:>10.4f} {r['private_ci_width_95']:>11.6f}"
        )


@cli.command()
@click.option("--data", type=str, default=None)
@click.option("--schema", type=str, default=None)
@click.option("--queries", "queries_path", type=str, required=True)
@click.option("--epsilon", type=float, required=True, help="Budget per query.")
@click.option("--total-budget", type=float, default=8.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=str, default="release.json", show_default=True)
def release(data, schema, queries_path, epsilon, total_budget, seed, out):
    """Finalize a release document and write it as JSON."""
    if not EPSILON_MIN <= epsilon <= EPSILON_MAX:
        raise click.UsageError(
            f"epsilon {epsilon} outside [{EPSILON_MIN}, {EPSILON_MAX}]"
        )
    data_path, schema_path = _resolve_data(data, schema)
    ds = load_dataset(data_path, schema_path)
    store = SessionStore()
    store.register_dataset(ds.name, ds)
    session = store.create_session(
        ds.name, _load_queries(queries_path), total_budget, seed
    )
    for name in session.queries:
        store.update_budget(
            session.id,
            {"action": "set_epsilon", "query": name, "value": epsilon},
        )
    document, _ = store.finalize(session.id)
    out_path = Path(out)
    out_path.write_text(json.dumps(document, indent=2), encoding="utf-8")
    click.echo(f"release written to {out_path}")
    click.echo(
        f"overall risk {document['overall_risk']['risk']:.6g} "
        f"at epsilon {document['overall_risk']['epsilon']:.6g}"
    )


@cli.command()
@click.option("--data", type=str, default=None, help="Directory of datasets.")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(data, port, host):
    """Serve the HTTP JSON API until terminated."""
    import uvicorn

    from .api import create_app

    override = os.environ.get(ENV_DATA_DIR)
    if override:
        data = override
    if data is None:
        raise click.UsageError(f"--data is required (or set {ENV_DATA_DIR})")
    data_dir = Path(data)
    if not data_dir.is_dir():
        raise click.UsageError(f"{data_dir} is not a directory")
    store = build_store(data_dir)
    uvicorn.run(create_app(store), host=host, port=port)


def build_store(data_dir: Path) -> SessionStore:
    """Register every CSV in the directory and replay saved sessions.

    Each <name>.csv pairs with <name>.schema.json when present, falling
    back to a shared schema.json.
    """
    store = SessionStore(data_dir)
    shared = data_dir / "schema.json"
    for csv_path in sorted(data_dir.glob("*.csv")):
        schema_path = data_dir / f"{csv_path.stem}.schema.json"
        if not schema_path.exists():
            schema_path = shared
        if not schema_path.exists():
            continue
        ds = load_dataset(csv_path, schema_path)
        store.register_dataset(csv_path.stem, ds)
    store.replay_logs()
    return store


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except PlannerError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # noqa: BLE001
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
