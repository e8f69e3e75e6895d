import csv
import io
import json
import re
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "fvkit.cli"]


def run_cli(*args, env_extra=None, **kw):
    import os
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(CLI + list(args), capture_output=True, text=True, env=env, **kw)


def parse_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]


class TestPmfCommands:
    def test_overlap_two_by_two(self):
        r = run_cli("pmf", "overlap", "--theta", "1", "--m", "2", "--n", "2")
        assert r.returncode == 0
        header, rows = parse_csv(r.stdout)
        assert header[:2] == ["r", "p_exact"]
        assert [(row[0], row[1]) for row in rows] == [("0", "1/6"), ("1", "2/3"), ("2", "1/6")]

    def test_overlap_single_draw(self):
        r = run_cli("pmf", "overlap", "--theta", "1", "--m", "1", "--n", "1")
        _, rows = parse_csv(r.stdout)
        assert [(row[0], row[1]) for row in rows] == [("0", "1/2"), ("1", "1/2")]

    def test_overlap_rational_theta_and_bruteforce(self):
        r = run_cli("pmf", "overlap", "--theta", "7/2", "--m", "3", "--n", "2", "--bruteforce")
        assert r.returncode == 0
        header, rows = parse_csv(r.stdout)
        assert "p_bruteforce" in header
        i_exact, i_bf = header.index("p_exact"), header.index("p_bruteforce")
        for row in rows:
            assert row[i_exact] == row[i_bf]

    def test_overlap_theta0(self):
        r = run_cli("pmf", "overlap", "--theta", "0", "--m", "2", "--n", "2")
        _, rows = parse_csv(r.stdout)
        assert rows[0][1] == "0"

    def test_death_pmf_footer_normalizes(self):
        r = run_cli("pmf", "death", "--theta", "1", "--t", "1")
        assert r.returncode == 0
        sums = [l for l in r.stdout.splitlines() if l.startswith("# sum_d_n:")]
        assert len(sums) == 1
        assert abs(float(sums[0].split(":")[1]) - 1) < 1e-10

    def test_death_pmf_json(self):
        r = run_cli("pmf", "death", "--theta", "1", "--t", "1", "--format", "json")
        doc = json.loads(r.stdout)
        assert doc["columns"] == ["n", "d_n", "term_bound"]
        assert "config_sha256" in doc

    def test_precision_exhausted_exit_code(self):
        r = run_cli("pmf", "death", "--theta", "1", "--t", "1e-7", "--max-terms", "30")
        assert r.returncode == 3
        assert "precision exhausted" in r.stderr

    def test_invalid_args_exit_code(self):
        r = run_cli("pmf", "overlap", "--theta", "1", "--m", "-3", "--n", "2")
        assert r.returncode == 2
        r = run_cli("pmf", "death", "--theta", "1")  # missing --t
        assert r.returncode == 2
        r = run_cli("verify", "bogus")
        assert r.returncode == 2


class TestSimulateCommands:
    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["simulate", "dar1", "--theta", "1", "--steps", "50", "--seed", "7"]
        run_cli(*args, "--out", str(a))
        run_cli(*args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_fv_row_count(self):
        r = run_cli("simulate", "fv", "--theta", "1", "--t", "1", "--steps", "12", "--seed", "1")
        _, rows = parse_csv(r.stdout)
        assert len(rows) == 12

    def test_measure_chain_dispatch(self):
        r = run_cli("simulate", "measure-chain", "--theta", "1", "--n", "5",
                    "--steps", "5", "--seed", "2")
        assert r.returncode == 0
        _, rows = parse_csv(r.stdout)
        assert len(rows) == 5

    def test_env_seed_fallback(self):
        r1 = run_cli("simulate", "dar1", "--theta", "1", "--steps", "5",
                     env_extra={"FVKIT_SEED": "123"})
        r2 = run_cli("simulate", "dar1", "--theta", "1", "--steps", "5", "--seed", "123")
        assert r1.stdout == r2.stdout

    def test_dump_final_round_trips(self, tmp_path):
        from fvkit.random_measures import measure_from_json
        path = tmp_path / "final.json"
        r = run_cli("simulate", "fv", "--theta", "1", "--t", "1", "--steps", "3",
                    "--seed", "4", "--dump-final", str(path))
        assert r.returncode == 0
        doc = json.loads(path.read_text())
        assert doc["seed"] == 4
        assert "config" in doc
        mu = measure_from_json(doc["measure"])
        assert abs(mu.weights.sum() + mu.residual - 1) < 1e-12

    def test_discrete_base_simulation(self):
        r = run_cli("simulate", "dar1", "--theta", "2", "--base", "0.3,0.7",
                    "--observable", "0", "--steps", "8", "--seed", "5")
        assert r.returncode == 0
        _, rows = parse_csv(r.stdout)
        assert {row[1] for row in rows} <= {"0.0", "1.0"}


class TestVerifyCommand:
    def test_urn_suite_passes(self):
        r = run_cli("verify", "urn", "--m-max", "4")
        assert r.returncode == 0
        m = re.search(r"urn: (\d+)/(\d+) checks passed", r.stderr)
        assert m and m.group(1) == m.group(2)

    def test_combinatorics_custom_grid(self):
        r = run_cli("verify", "combinatorics", "--m-max", "6")
        assert r.returncode == 0

    def test_death_suite_small_grid(self):
        r = run_cli("verify", "death", "--theta", "1", "--s", "1", "--n-max", "3")
        assert r.returncode == 0
        header, rows = parse_csv(r.stdout)
        assert header == ["suite", "check", "instance", "observed", "tolerance", "pass"]
        assert all(row[-1] == "true" for row in rows)

    def test_death_rational_theta_flag(self):
        r = run_cli("verify", "death", "--theta", "1/2", "--s", "1", "--n-max", "2")
        assert r.returncode == 0

    def test_measures_suite_quick(self):
        r = run_cli("verify", "measures", "--reps", "4000", "--theta", "1")
        assert r.returncode == 0

    def test_processes_suite_quick(self):
        r = run_cli("verify", "processes", "--reps", "500", "--theta", "1")
        assert r.returncode == 0

    def test_verify_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["verify", "measures", "--reps", "2000", "--theta", "1", "--seed", "9"]
        run_cli(*args, "--out", str(a))
        run_cli(*args, "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_json_report(self):
        r = run_cli("verify", "urn", "--m-max", "3", "--format", "json")
        doc = json.loads(r.stdout)
        assert doc["footer"]["failed"] == "0"

    def test_failed_check_exits_one(self, monkeypatch, tmp_path):
        from click.testing import CliRunner
        from fvkit import cli as cli_mod
        from fvkit import verify as verify_mod
        from fvkit.verify import VerifyReport, VerifyRow

        def broken(**kw):
            return VerifyReport("urn", (VerifyRow("x", "y", "UNEQUAL", "exact", False),))

        monkeypatch.setattr(verify_mod, "verify_urn", broken)
        out = tmp_path / "r.csv"
        result = CliRunner().invoke(cli_mod.main, ["verify", "urn", "--out", str(out)])
        assert result.exit_code == 1
        assert "failed: 1" in out.read_text()
