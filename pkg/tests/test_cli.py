"""Command-line contract: subcommands, formats, and exit codes."""

import csv
import io
import json

from realize import cli


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def tokens(line):
    return line.split()


class TestRun:
    def test_strategy3_current_table(self, capsys):
        code, out, _ = invoke(capsys, "run", "strategy3", "--regime", "current", "--rates", "paper")
        assert code == 0
        assert "total tax:      ₱500,000.00" in out

    def test_strategy3_proposed_total(self, capsys):
        code, out, _ = invoke(capsys, "run", "strategy3", "--regime", "proposed", "--rates", "paper")
        assert code == 0
        assert "total tax:      ₱1,200,000.00" in out

    def test_missing_file(self, capsys):
        code, _, err = invoke(capsys, "run", "missing.scn")
        assert code == 2
        assert "no such file" in err

    def test_scenario_file(self, capsys, tmp_path):
        path = tmp_path / "own.scn"
        path.write_text("price ZZZ 1 10\nprice ZZZ 2 25\nat 1 buy ZZZ 100\nat 2 sell ZZZ 100\n")
        code, out, _ = invoke(capsys, "run", str(path), "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["scenario"] == "own"
        assert report["totals"]["total_tax"] == 15000  # 10% of 1,500 pesos, in centavos

    def test_parse_error_exits_2_with_position(self, capsys, tmp_path):
        path = tmp_path / "bad.scn"
        path.write_text("price ABC 1 50\nat 1 buy ABC -5\n")
        code, _, err = invoke(capsys, "run", str(path))
        assert code == 2
        assert "line 2" in err and "col" in err

    def test_runtime_error_reports_event_index(self, capsys, tmp_path):
        path = tmp_path / "oversell.scn"
        path.write_text("price ABC 1 50\nat 1 sell ABC 5\n")
        code, _, err = invoke(capsys, "run", str(path))
        assert code == 2
        assert "(event 0)" in err

    def test_statutory_rates_flag(self, capsys):
        code, out, _ = invoke(capsys, "run", "strategy1", "--rates", "statutory", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["tax"][0]["tax_due"] == 495_000_00

    def test_whole_run_window(self, capsys):
        code, out, _ = invoke(
            capsys, "run", "proposed_demo", "--regime", "proposed", "--window", "whole-run",
            "--format", "json",
        )
        assert code == 0
        report = json.loads(out)
        assert len(report["tax"]) == 1
        assert report["tax"][0]["net_capital_gain"] == 12_000_000_00

    def test_csv_and_json_carry_identical_centavos(self, capsys):
        code, json_out, _ = invoke(capsys, "run", "strategy3", "--format", "json")
        assert code == 0
        code, csv_out, _ = invoke(capsys, "run", "strategy3", "--format", "csv")
        assert code == 0
        report = json.loads(json_out)
        rows = list(csv.DictReader(io.StringIO(csv_out)))
        csv_events = [r for r in rows if r["record"] == "event"]
        assert [int(r["gain_total"]) for r in csv_events] == [
            e["gain_total"] for e in report["events"]
        ]
        csv_tax = [r for r in rows if r["record"] == "tax"]
        assert [int(r["tax_due"]) for r in csv_tax] == [t["tax_due"] for t in report["tax"]]
        csv_cash = [r for r in rows if r["record"] == "cash"]
        assert [int(r["cash_cumulative"]) for r in csv_cash] == [
            c["cumulative"] for c in report["cash"]
        ]


class TestUsageErrors:
    def test_unknown_subcommand(self, capsys):
        code, _, _ = invoke(capsys, "frobnicate")
        assert code == 64

    def test_bad_regime_value(self, capsys):
        code, _, _ = invoke(capsys, "run", "strategy3", "--regime", "sideways")
        assert code == 64

    def test_no_arguments(self, capsys):
        code, _, _ = invoke(capsys)
        assert code == 64

    def test_bad_format_value(self, capsys):
        code, _, _ = invoke(capsys, "run", "strategy3", "--format", "yaml")
        assert code == 64

    def test_invalid_format_env_var(self, capsys, monkeypatch):
        monkeypatch.setenv("REALIZE_FORMAT", "xml")
        code, _, _ = invoke(capsys, "run", "strategy3")
        assert code == 64


class TestFormatEnvVar:
    def test_env_var_sets_default_format(self, capsys, monkeypatch):
        monkeypatch.setenv("REALIZE_FORMAT", "json")
        code, out, _ = invoke(capsys, "run", "strategy3")
        assert code == 0
        assert json.loads(out)["regime"] == "current"

    def test_flag_overrides_env_var(self, capsys, monkeypatch):
        monkeypatch.setenv("REALIZE_FORMAT", "json")
        code, out, _ = invoke(capsys, "run", "strategy3", "--format", "table")
        assert code == 0
        assert "REALIZATION EVENTS" in out


class TestCompare:
    def test_strategy3(self, capsys):
        code, out, _ = invoke(capsys, "compare", "strategy3")
        assert code == 0
        assert "₱1,200,000.00" in out and "₱500,000.00" in out

    def test_strategy1_zero_delta_column(self, capsys):
        code, out, _ = invoke(capsys, "compare", "strategy1", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert all(int(r["delta"]) == 0 for r in rows)

    def test_death_avoidance(self, capsys):
        code, out, _ = invoke(capsys, "compare", "death_avoidance", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["current"]["totals"]["total_tax"] == 0
        assert report["proposed"]["totals"]["total_tax"] == 500_000_00
        t2 = next(d for d in report["deltas"] if d["tick"] == 2)
        assert t2["proposed_tax"] == 500_000_00


class TestPaperTables:
    def test_quoted_rows_appear(self, capsys):
        code, out, _ = invoke(capsys, "paper-tables")
        assert code == 0
        rows = [tokens(line) for line in out.splitlines()]
        assert ["Capital", "Loss", "(time", "3)", "(20)", "(2,000,000.00)"] in rows
        assert ["Net", "Capital", "Loss", "(time", "3)", "30", "3,000,000"] in rows
        assert ["25", "100", "-75", "100", "25", "75"] in rows

    def test_byte_stable_across_runs(self, capsys):
        _, first, _ = invoke(capsys, "paper-tables")
        _, second, _ = invoke(capsys, "paper-tables")
        assert first == second


class TestGrid:
    def test_table_has_seven_rows(self, capsys):
        code, out, _ = invoke(capsys, "grid")
        assert code == 0
        data_rows = [l for l in out.splitlines() if l.strip()[:1].isdigit()]
        assert len(data_rows) == 7

    def test_csv_values(self, capsys):
        code, out, _ = invoke(capsys, "grid", "--format", "csv")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [int(r["ordinary_gain_per_share"]) for r in rows] == [
            -7500, -5000, -2500, 0, 2500, 5000, 7500
        ]
        assert all(
            int(r["short_gain_per_share"]) == -int(r["ordinary_gain_per_share"]) for r in rows
        )


class TestCheck:
    def test_passes_against_checked_in_fixture(self, capsys):
        code, out, _ = invoke(capsys, "check")
        assert code == 0
        assert "match the checked-in fixture" in out
        assert "byte-identical" in out

    def test_fails_when_fixture_differs(self, capsys, monkeypatch):
        monkeypatch.setattr(cli, "_fixture_text", lambda: "something else\n")
        code, _, err = invoke(capsys, "check")
        assert code == 1
        assert "do not match" in err
