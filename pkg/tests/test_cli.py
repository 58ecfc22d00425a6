import json

import pytest
from fastapi.testclient import TestClient

from dp_planner import (
    BootstrapConfig,
    CohortConfig,
    LaplaceParams,
    bootstrap_replicates,
    derive_seed,
    disclosure_risk,
    execute,
    laplace_quantile,
    load_dataset,
    parse_query_spec,
    private_ci,
    write_cohort,
)
from dp_planner.api import create_app
from dp_planner.cli import build_store, main


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    write_cohort(d, CohortConfig(n=400, seed=11))
    return d


@pytest.fixture(scope="module")
def queries_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("spec") / "queries.json"
    path.write_text(
        json.dumps(
            [
                {
                    "name": "hyp_by_eth",
                    "aggregate": "COUNT",
                    "group_by": "ethnicity",
                    "where": {
                        "attribute": "diagnosis",
                        "op": "==",
                        "value": "hypertension",
                    },
                    "extrapolation": True,
                },
                {
                    "name": "seniors",
                    "aggregate": "COUNT",
                    "where": {"attribute": "age", "op": ">=", "value": 65},
                },
            ]
        ),
        encoding="utf-8",
    )
    return path


class TestIngest:
    def test_reports_size_and_columns(self, data_dir, capsys):
        assert main(["ingest", "--data", str(data_dir)]) == 0
        out = capsys.readouterr().out
        assert "n = 400" in out
        assert "diagnosis: categorical (phi)" in out
        assert "patient_id: integer (entity id)" in out

    def test_bad_cell_names_row_and_column(self, data_dir, tmp_path, capsys):
        csv_path = data_dir / "cohort.csv"
        lines = csv_path.read_text(encoding="utf-8").splitlines()
        parts = lines[3].split(",")
        age_idx = lines[0].split(",").index("age")
        parts[age_idx] = "elderly"
        lines[3] = ",".join(parts)
        bad = tmp_path / "cohort.csv"
        bad.write_text("\n".join(lines) + "\n", encoding="utf-8")
        (tmp_path / "schema.json").write_text(
            (data_dir / "schema.json").read_text(encoding="utf-8"),
            encoding="utf-8",
        )
        assert main(["ingest", "--data", str(tmp_path)]) == 2
        err = capsys.readouterr().err
        assert "row 3" in err
        assert "age" in err

    def test_missing_file_is_data_error(self, tmp_path):
        # empty dir resolves to cohort.csv/schema.json that do not exist
        assert main(["ingest", "--data", str(tmp_path)]) == 2

    def test_bare_file_without_schema_is_usage_error(self, tmp_path):
        assert main(["ingest", "--data", str(tmp_path / "nope.csv")]) == 1

    def test_missing_data_flag_is_usage_error(self, monkeypatch):
        monkeypatch.delenv("DP_PLANNER_DATA_DIR", raising=False)
        assert main(["ingest"]) == 1

    def test_env_var_overrides_data(self, data_dir, monkeypatch, capsys):
        monkeypatch.setenv("DP_PLANNER_DATA_DIR", str(data_dir))
        assert main(["ingest"]) == 0
        assert "n = 400" in capsys.readouterr().out


class TestPlan:
    def test_json_rows_match_library_exactly(
        self, data_dir, queries_file, capsys
    ):
        code = main(
            [
                "plan",
                "--data",
                str(data_dir),
                "--queries",
                str(queries_file),
                "--epsilon-grid",
                "0.1,1",
                "--seed",
                "3",
                "--format",
                "json",
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema_version"] == "1"
        assert len(payload["rows"]) == 4

        ds = load_dataset(data_dir / "cohort.csv", data_dir / "schema.json")
        q = parse_query_spec(
            json.loads(queries_file.read_text(encoding="utf-8"))[0]
        )
        top = execute(ds, q).subgroups[0]
        for eps in (0.1, 1.0):
            row = next(
                r
                for r in payload["rows"]
                if r["query"] == "hyp_by_eth" and r["epsilon"] == eps
            )
            assert row["risk"] == disclosure_risk(eps, ds.n, 1.0)
            assert row["error_bound_95"] == laplace_quantile(
                0.975, LaplaceParams(0.0, 1.0 / eps)
            )
            reps = bootstrap_replicates(
                top.proportion,
                top.group_size,
                1.0,
                eps,
                BootstrapConfig(seed=derive_seed(3, "plan", q.name, eps)),
            )
            assert row["private_ci_width_95"] == private_ci(reps, 0.05).width

    def test_table_format(self, data_dir, queries_file, capsys):
        code = main(
            ["plan", "--data", str(data_dir), "--queries", str(queries_file)]
        )
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].split() == [
            "query",
            "epsilon",
            "risk",
            "bound95",
            "ci_width95",
        ]
        assert len(lines) == 2 + 2 * 5  # header, rule, queries x default grid

    def test_grid_outside_range_is_usage_error(
        self, data_dir, queries_file, capsys
    ):
        code = main(
            [
                "plan",
                "--data",
                str(data_dir),
                "--queries",
                str(queries_file),
                "--epsilon-grid",
                "0.5,3.0",
            ]
        )
        assert code == 1
        assert "outside" in capsys.readouterr().err

    def test_unparseable_grid_is_usage_error(self, data_dir, queries_file):
        code = main(
            [
                "plan",
                "--data",
                str(data_dir),
                "--queries",
                str(queries_file),
                "--epsilon-grid",
                "fast",
            ]
        )
        assert code == 1

    def test_malformed_queries_json_is_data_error(self, data_dir, tmp_path):
        bad = tmp_path / "queries.json"
        bad.write_text("{not json", encoding="utf-8")
        code = main(
            ["plan", "--data", str(data_dir), "--queries", str(bad)]
        )
        assert code == 2

    def test_invalid_query_spec_is_data_error(
        self, data_dir, tmp_path, capsys
    ):
        bad = tmp_path / "queries.json"
        bad.write_text(
            json.dumps({"name": "q", "group_by": "nope"}), encoding="utf-8"
        )
        code = main(
            ["plan", "--data", str(data_dir), "--queries", str(bad)]
        )
        assert code == 2
        assert "group_by" in capsys.readouterr().err


class TestRelease:
    def test_writes_valid_document(
        self, data_dir, queries_file, tmp_path, capsys
    ):
        out = tmp_path / "release.json"
        code = main(
            [
                "release",
                "--data",
                str(data_dir),
                "--queries",
                str(queries_file),
                "--epsilon",
                "0.5",
                "--seed",
                "9",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert "overall risk" in capsys.readouterr().out
        doc = json.loads(out.read_text(encoding="utf-8"))
        assert doc["schema_version"] == "1"
        assert [q["epsilon_spent"] for q in doc["queries"]] == [0.5, 0.5]
        assert doc["overall_risk"]["risk"] == disclosure_risk(1.0, 400, 1.0)

    def test_same_seed_reproduces_document(
        self, data_dir, queries_file, tmp_path
    ):
        docs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert (
                main(
                    [
                        "release",
                        "--data",
                        str(data_dir),
                        "--queries",
                        str(queries_file),
                        "--epsilon",
                        "0.25",
                        "--seed",
                        "77",
                        "--out",
                        str(out),
                    ]
                )
                == 0
            )
            doc = json.loads(out.read_text(encoding="utf-8"))
            doc.pop("created_at")
            doc.pop("session_id")
            docs.append(doc)
        assert json.dumps(docs[0], sort_keys=True) == json.dumps(
            docs[1], sort_keys=True
        )

    def test_epsilon_outside_range_is_usage_error(
        self, data_dir, queries_file, capsys
    ):
        code = main(
            [
                "release",
                "--data",
                str(data_dir),
                "--queries",
                str(queries_file),
                "--epsilon",
                "3.0",
            ]
        )
        assert code == 1
        assert "outside" in capsys.readouterr().err


class TestServeStack:
    def test_missing_data_dir_is_usage_error(self, monkeypatch):
        monkeypatch.delenv("DP_PLANNER_DATA_DIR", raising=False)
        assert main(["serve"]) == 1

    def test_nonexistent_dir_is_usage_error(self, tmp_path):
        assert main(["serve", "--data", str(tmp_path / "nope")]) == 1

    def test_build_store_registers_and_replays(
        self, data_dir, queries_file, tmp_path
    ):
        import shutil

        for name in ("cohort.csv", "schema.json"):
            shutil.copy(data_dir / name, tmp_path / name)
        store = build_store(tmp_path)
        client = TestClient(create_app(store), raise_server_exceptions=False)
        queries = json.loads(queries_file.read_text(encoding="utf-8"))
        r = client.post(
            "/sessions",
            json={
                "dataset": "cohort",
                "queries": queries,
                "total_budget": 2.0,
                "seed": 4,
            },
        )
        assert r.status_code == 201
        sid = r.json()["id"]
        r = client.post(f"/sessions/{sid}/release")
        assert r.status_code == 200
        doc = r.json()["document"]

        revived = build_store(tmp_path)
        client2 = TestClient(
            create_app(revived), raise_server_exceptions=False
        )
        r = client2.get(f"/sessions/{sid}/release")
        assert r.status_code == 200
        assert r.json() == doc


class TestExitCodes:
    def test_unexpected_exception_is_internal_error(
        self, data_dir, monkeypatch, capsys
    ):
        import dp_planner.cli as cli_mod

        def boom(*args, **kwargs):
            raise RuntimeError("wires crossed")

        monkeypatch.setattr(cli_mod, "load_dataset", boom)
        assert main(["ingest", "--data", str(data_dir)]) == 3
        assert "internal error" in capsys.readouterr().err

    def test_unknown_subcommand_is_usage_error(self):
        assert main(["transmogrify"]) == 1

    def test_help_is_success(self, capsys):
        assert main(["--help"]) == 0
        assert "ingest" in capsys.readouterr().out
