import json

import pytest

from faircap.cli import EXIT_ALL_INFEASIBLE, EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def write_config(tmp_path, body, name="sweep.ini"):
    path = tmp_path / name
    path.write_text(body, encoding="utf-8")
    return path


SMALL_SWEEP = """
[dataset]
generate = true
n = 48
balance = 1.0
clusters = 2
noise = 0.05

[sweep]
methods = all
k = 2,3
seed = 7
"""


@pytest.fixture()
def sweep_dir(tmp_path):
    config = write_config(tmp_path, SMALL_SWEEP)
    out = tmp_path / "out"
    code = main(["run", str(config), "--output", str(out)])
    assert code == EXIT_OK
    return out


class TestGenerate:
    def test_writes_loadable_csv(self, tmp_path, capsys):
        out = tmp_path / "toy.csv"
        code = main(
            ["generate", "--out", str(out), "--n", "50", "--balance", "0.5", "--seed", "3"]
        )
        assert code == EXIT_OK
        assert out.exists()
        header = out.read_text().splitlines()[0]
        assert header == "x0,x1,group"

    def test_missing_out_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["generate"])
        assert err.value.code == EXIT_USAGE

    def test_unwritable_path_is_data_error(self, tmp_path):
        target = tmp_path / "no-such-dir" / "toy.csv"
        assert main(["generate", "--out", str(target), "--n", "10"]) == EXIT_DATA


class TestRun:
    def test_record_count_is_methods_times_k(self, sweep_dir):
        lines = (sweep_dir / "runs.jsonl").read_text().splitlines()
        rows = [json.loads(line) for line in lines]
        assert rows[0]["type"] == "provenance"
        runs = [r for r in rows if r["type"] == "run"]
        assert len(runs) == 7 * 2

    def test_provenance_carries_defaults(self, sweep_dir):
        provenance = json.loads((sweep_dir / "runs.jsonl").read_text().splitlines()[0])
        params = provenance["params"]
        assert params["t"] == "1/2"
        assert params["lambda"] == 0.3
        assert params["epsilon_hierarchical"] == 1.2
        assert params["epsilon_partitioning"] == 1.01
        assert provenance["dataset"]["balance"] == 1.0

    def test_rerun_is_byte_identical(self, tmp_path):
        config = write_config(tmp_path, SMALL_SWEEP)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["run", str(config), "--output", str(out1)]) == EXIT_OK
        assert main(["run", str(config), "--output", str(out2)]) == EXIT_OK
        assert (out1 / "runs.jsonl").read_bytes() == (out2 / "runs.jsonl").read_bytes()
        assert (out1 / "summary.csv").read_bytes() == (out2 / "summary.csv").read_bytes()

    def test_records_in_canonical_order(self, sweep_dir):
        lines = (sweep_dir / "runs.jsonl").read_text().splitlines()[1:]
        keys = [(json.loads(l)["method"], json.loads(l)["k"]) for l in lines]
        assert keys == sorted(keys)

    def test_default_k_sweep_yields_49_records(self, tmp_path):
        config = write_config(
            tmp_path,
            """
[dataset]
generate = true
n = 48
balance = 0.8

[sweep]
methods = all
seed = 3
""",
        )
        out = tmp_path / "out"
        main(["run", str(config), "--output", str(out)])
        rows = [
            json.loads(line)
            for line in (out / "runs.jsonl").read_text().splitlines()[1:]
        ]
        # default k sweep is 2..14 step 2: 7 methods x 7 values, every cell
        # present whether it succeeded or was marked infeasible
        assert len(rows) == 49
        assert {r["k"] for r in rows} == {2, 4, 6, 8, 10, 12, 14}

    def test_summary_csv_has_expected_columns(self, sweep_dir):
        header = (sweep_dir / "summary.csv").read_text().splitlines()[0]
        assert header.split(",") == [
            "method", "k", "status", "cost", "balance",
            "max_size", "min_size", "q", "t", "seed",
        ]

    def test_env_var_overrides_output(self, tmp_path, monkeypatch):
        config = write_config(tmp_path, SMALL_SWEEP)
        env_out = tmp_path / "env-out"
        monkeypatch.setenv("FAIRCAP_OUTPUT_DIR", str(env_out))
        assert main(["run", str(config)]) == EXIT_OK
        assert (env_out / "runs.jsonl").exists()

    def test_missing_config_is_usage_error(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.ini")]) == EXIT_USAGE

    def test_bad_method_is_usage_error(self, tmp_path):
        config = write_config(
            tmp_path,
            SMALL_SWEEP.replace("methods = all", "methods = kmeans"),
        )
        assert main(["run", str(config), "--output", str(tmp_path / "o")]) == EXIT_USAGE

    def test_infeasible_runs_marked_not_dropped(self, tmp_path):
        # k larger than the number of fairlets makes every method fail,
        # but the sweep still writes one marked row per cell
        config = write_config(
            tmp_path,
            """
[dataset]
generate = true
n = 12
balance = 1.0

[sweep]
methods = hier_fair_cap_vanilla,kmed_fair_cap_vanilla
k = 8
seed = 1
""",
        )
        out = tmp_path / "out"
        code = main(["run", str(config), "--output", str(out)])
        assert code == EXIT_ALL_INFEASIBLE
        rows = [
            json.loads(line)
            for line in (out / "runs.jsonl").read_text().splitlines()[1:]
        ]
        assert len(rows) == 2
        assert all(r["status"] == "infeasible" for r in rows)
        assert all("error" in r for r in rows)

    def test_trace_and_decomposition_exports(self, tmp_path):
        config = write_config(tmp_path, SMALL_SWEEP)
        out = tmp_path / "out"
        code = main([
            "run", str(config), "--output", str(out),
            "--trace", "--export-decompositions",
        ])
        assert code == EXIT_OK
        assert (out / "trace.jsonl").exists()
        assert (out / "fairlets_vanilla.json").exists()
        assert (out / "fairlets_mcf.json").exists()
        events = [
            json.loads(line) for line in (out / "trace.jsonl").read_text().splitlines()
        ]
        assert any(e["event"] == "swap" or e["event"] == "assign" for e in events)


class TestReport:
    def test_writes_all_panels(self, sweep_dir, tmp_path):
        rep = tmp_path / "rep"
        code = main(["report", str(sweep_dir), "--output", str(rep)])
        assert code == EXIT_OK
        for name in ("cost.svg", "balance.svg", "sizes.svg", "summary.txt"):
            assert (rep / name).exists(), name

    def test_balance_panel_has_threshold_line(self, sweep_dir):
        code = main(["report", str(sweep_dir)])
        assert code == EXIT_OK
        svg = (sweep_dir / "balance.svg").read_text()
        assert 'class="threshold-t"' in svg
        assert 'data-t="0.5"' in svg

    def test_missing_sweep_is_data_error(self, tmp_path):
        assert main(["report", str(tmp_path / "nowhere")]) == EXIT_DATA


class TestValidate:
    def test_valid_decomposition_accepted(self, tmp_path, capsys):
        config = write_config(tmp_path, SMALL_SWEEP)
        out = tmp_path / "out"
        main(["run", str(config), "--output", str(out), "--export-decompositions"])
        csv_path = tmp_path / "data.csv"
        main([
            "generate", "--out", str(csv_path), "--n", "48",
            "--balance", "1.0", "--clusters", "2", "--noise", "0.05", "--seed", "7",
        ])
        code = main([
            "validate", "--data", str(csv_path), "--protected-column", "group",
            "--decomposition", str(out / "fairlets_mcf.json"), "--t", "1/2",
        ])
        assert code == EXIT_OK
        assert "valid decomposition" in capsys.readouterr().out

    def test_tampered_decomposition_rejected(self, tmp_path, capsys):
        csv_path = tmp_path / "data.csv"
        main(["generate", "--out", str(csv_path), "--n", "8", "--balance", "1.0", "--seed", "2"])
        # all four protected-1 rows in one fairlet violates balance
        from faircap.ingest import DatasetSpec, load_csv

        data = load_csv(DatasetSpec(path=csv_path, protected_column="group"))
        ones = [str(i) for i in range(8) if data.protected[i] == 1]
        zeros = [str(i) for i in range(8) if data.protected[i] == 0]
        bad = json.dumps(
            [
                {"fairlet_id": 0, "center_row_id": ones[0], "member_row_ids": ones},
                {"fairlet_id": 1, "center_row_id": zeros[0], "member_row_ids": zeros},
            ]
        )
        decomp_path = tmp_path / "bad.json"
        decomp_path.write_text(bad)
        code = main([
            "validate", "--data", str(csv_path), "--protected-column", "group",
            "--decomposition", str(decomp_path), "--t", "1/2",
        ])
        assert code == EXIT_DATA
        assert "violation" in capsys.readouterr().out
