import json

from qqlab.cli import cli_main
from qqlab.oracles import BitWord, make_oracle, save_oracle


def w(s):
    return BitWord.from_string(s)


class TestInfo:
    def test_exit_zero_and_version(self, capsys):
        assert cli_main(["info"]) == 0
        out = capsys.readouterr().out
        assert "qqlab" in out and "qubit cap" in out


class TestIterate:
    def test_prints_result(self, tmp_path, capsys):
        save_oracle(make_oracle(1, [w("1"), w("0")]), tmp_path / "f.txt")
        rc = cli_main(["iterate", "--oracle", str(tmp_path / "f.txt"),
                       "--x", "0", "--k", "3"])
        assert rc == 0
        assert capsys.readouterr().out.strip() == "1"

    def test_missing_file(self, tmp_path, capsys):
        rc = cli_main(["iterate", "--oracle", str(tmp_path / "nope.txt"),
                       "--x", "0", "--k", "1"])
        assert rc == 2


class TestUsageErrors:
    def test_unknown_subcommand(self):
        assert cli_main(["frobnicate"]) == 2

    def test_missing_required_flag(self):
        assert cli_main(["iterate", "--x", "0", "--k", "1"]) == 2

    def test_bad_config_value(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"kind": "lemma1", "trials": 0}))
        assert cli_main(["lemma1", "--config", str(path)]) == 2


class TestSweepCommands:
    def test_lemma1_writes_report(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        rc = cli_main(["lemma1", "--n", "2", "--trials", "20", "--seed", "42",
                       "--out", str(out)])
        assert rc == 0
        assert "violations: 0" in capsys.readouterr().out
        lines = out.read_text().splitlines()
        assert len(lines) == 2 + 20
        assert out.with_suffix(".json").exists()

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert cli_main(["lemma1", "--n", "2", "--trials", "15", "--seed", "7",
                             "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_supplies_flags(self, tmp_path):
        path = tmp_path / "c.json"
        out = tmp_path / "r.csv"
        path.write_text(json.dumps({"n": 2, "trials": 9, "seed": 3,
                                    "output_path": str(out)}))
        assert cli_main(["lemma1", "--config", str(path)]) == 0
        assert len(out.read_text().splitlines()) == 2 + 9

    def test_explicit_flag_beats_config(self, tmp_path):
        path = tmp_path / "c.json"
        out = tmp_path / "r.csv"
        path.write_text(json.dumps({"n": 2, "trials": 9}))
        assert cli_main(["lemma1", "--config", str(path), "--trials", "4",
                         "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 2 + 4

    def test_adversary_sweep_runs(self, capsys):
        rc = cli_main(["adversary", "--family", "random", "--n", "5", "--T", "2",
                       "--trials", "10", "--seed", "1"])
        assert rc == 0
        assert "success_rate" in capsys.readouterr().out

    def test_montecarlo_runs(self, capsys):
        rc = cli_main(["montecarlo", "--family", "truncated-emulation", "--n", "2",
                       "--T", "3", "--trials", "30", "--seed", "2"])
        assert rc == 0


class TestCensusCommand:
    def test_tiny_census(self, capsys):
        rc = cli_main(["census", "--family", "classical-emulation", "--n", "1",
                       "--T", "2"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "total oracles: 4" in out
        assert "failing fraction: 0.0" in out

    def test_width_two_emulation_census(self, capsys):
        rc = cli_main(["census", "--family", "classical-emulation", "--n", "2",
                       "--T", "3"])
        assert rc == 0
        assert "failing fraction: 0.0" in capsys.readouterr().out

    def test_census_gate_needs_flag(self, capsys):
        assert cli_main(["census", "--n", "3", "--T", "2"]) == 2


class TestExitOnViolation:
    def test_summary_flags_checked_violations(self, capsys):
        # the theorems cannot produce a violating row, so drive the exit
        # logic directly with a fabricated report
        from qqlab.cli import _print_summary
        from qqlab.harness import ExperimentConfig, ExperimentReport
        config = ExperimentConfig(kind="lemma1").validate()
        bad_row = {"context": "fake", "lhs": 1.0, "rhs": 0.0, "slack": -1.0,
                   "vacuous": False, "checked": True, "seed": "s"}
        report = ExperimentReport(config, [bad_row], {"violations": 1})
        assert _print_summary(report) == 1
        assert "VIOLATION" in capsys.readouterr().err

    def test_unchecked_rows_do_not_fail_the_run(self):
        from qqlab.cli import _print_summary
        from qqlab.harness import ExperimentConfig, ExperimentReport
        config = ExperimentConfig(kind="lemma1").validate()
        row = {"context": "observation", "lhs": 1.0, "rhs": 0.0, "slack": -1.0,
               "vacuous": False, "checked": False, "seed": "s"}
        assert _print_summary(ExperimentReport(config, [row], {})) == 0
