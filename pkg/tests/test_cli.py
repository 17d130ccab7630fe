import json
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

import slicemarket
from slicemarket.cli import main

METRIC_FILES = ["base_revenue.csv", "actual_revenue.csv", "fairness.csv", "vwpf.csv"]


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    return result


def run_args(out, extra=()):
    return [
        "run",
        "--config",
        str(slicemarket.table1_path()),
        "--slots",
        "40",
        "--repeats",
        "2",
        "--seed",
        "7",
        "--out",
        str(out),
        *extra,
    ]


class TestRunCommand:
    def test_writes_expected_files(self, runner, tmp_path):
        out = tmp_path / "results"
        result = invoke(runner, run_args(out))
        assert result.exit_code == 0, result.output
        for name in METRIC_FILES + ["timing.csv", "summary.json"]:
            assert (out / name).exists(), name
        rows = (out / "base_revenue.csv").read_text().strip().splitlines()
        assert rows[0] == "slot,mean,min,max"
        assert len(rows) == 41

    def test_summary_matches_csv_means(self, runner, tmp_path):
        out = tmp_path / "results"
        invoke(runner, run_args(out))
        summary = json.loads((out / "summary.json").read_text())
        combo = summary["combos"][0]
        rows = (out / "base_revenue.csv").read_text().strip().splitlines()[1:]
        means = [float(r.split(",")[1]) for r in rows]
        assert combo["long_term"]["base_revenue"] == pytest.approx(
            sum(means) / len(means), rel=1e-6
        )
        assert combo["benchmark_nsp"] == 2
        assert "reference_gains_pct" in summary

    def test_repeat_invocations_are_bit_identical(self, runner, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        invoke(runner, run_args(out1))
        invoke(runner, run_args(out2))
        for name in METRIC_FILES:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_multi_strategy_layout(self, runner, tmp_path):
        out = tmp_path / "grid"
        result = invoke(
            runner,
            [
                "run",
                "--config",
                str(slicemarket.table1_path()),
                "--slots",
                "10",
                "--repeats",
                "1",
                "--seed",
                "3",
                "--strategy",
                "mpsac,page",
                "--lambda-scale",
                "2,3",
                "--out",
                str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        for combo in ("mpsac_g2", "mpsac_g3", "page_g2", "page_g3"):
            assert (out / combo / "base_revenue.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert len(summary["combos"]) == 4
        strategies = {c["strategy"] for c in summary["combos"]}
        assert strategies == {"mpsac", "page"}

    def test_also_writes_other_nsp_series(self, runner, tmp_path):
        out = tmp_path / "results"
        invoke(runner, run_args(out))
        assert (out / "base_revenue_nsp1.csv").exists()

    def test_bad_config_exits_one(self, runner, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text(
            "seed: 1\nhorizon: 5\nalpha: 0.5\nepsilon: 1.0\n"
            "slices:\n  1: {lambda_G: 1.0, lambda_L: 2.0, lambda_W: 2.0}\n"
            "nsps:\n  - id: 1\n    capacity: [4.0]\n"
            "    slices:\n      1: {demand: [1.0], base_price: 1.0}\n"
            "vsps:\n  - {id: 1, slice: 9, valuation: 2.0, nsps: [1], beta: 0.1}\n"
        )
        result = runner.invoke(main, ["run", "--config", str(bad), "--out", str(tmp_path / "o")])
        assert result.exit_code == 1
        blob = result.output + str(getattr(result, "stderr", ""))
        assert "unsupported slice" in blob

    def test_missing_config_file_exits_one(self, runner, tmp_path):
        result = runner.invoke(
            main, ["run", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path / "o")]
        )
        assert result.exit_code == 1

    def test_unknown_strategy_exits_one(self, runner, tmp_path):
        result = runner.invoke(
            main,
            [
                "run",
                "--config",
                str(slicemarket.table1_path()),
                "--strategy",
                "nonsense",
                "--out",
                str(tmp_path / "o"),
            ],
        )
        assert result.exit_code == 1


class TestAuctionCommand:
    def write_bids(self, tmp_path, rows):
        path = tmp_path / "bids.csv"
        path.write_text("vsp_id,bid,demand\n" + "".join(f"{r}\n" for r in rows))
        return path

    def test_reference_instance(self, runner, tmp_path):
        bids = self.write_bids(tmp_path, ["3,4.5,3", "4,6.0,3"])
        result = invoke(
            runner,
            ["auction", str(bids), "--offered", "3", "--reserve", "1.6", "--epsilon", "1.0"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["quotas"] == {"3": 1, "4": 2}
        assert payload["prices"]["4"][0] == pytest.approx(4.5, abs=1e-9)
        assert payload["prices"]["4"][1] == pytest.approx(
            4.5 * math.log(4 / 3) / math.log(2), abs=1e-9
        )
        assert payload["prices"]["3"][0] == pytest.approx(
            6.0 * math.log(4 / 3) / math.log(2), abs=1e-9
        )

    def test_empty_bid_file(self, runner, tmp_path):
        bids = self.write_bids(tmp_path, [])
        result = invoke(runner, ["auction", str(bids), "--offered", "3", "--reserve", "1.0"])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["quotas"] == {}

    def test_single_bidder_pays_reserve(self, runner, tmp_path):
        bids = self.write_bids(tmp_path, ["7,5.0,4"])
        result = invoke(runner, ["auction", str(bids), "--offered", "2", "--reserve", "2.0"])
        payload = json.loads(result.output)
        assert payload["quotas"] == {"7": 2}
        assert payload["prices"]["7"] == [2.0, 2.0]

    def test_malformed_bid_file(self, runner, tmp_path):
        path = tmp_path / "bids.csv"
        path.write_text("who,what\n1,2\n")
        result = runner.invoke(main, ["auction", str(path), "--offered", "1", "--reserve", "1.0"])
        assert result.exit_code == 1


class TestValidateCommand:
    def test_reports_tenant_sets(self, runner):
        result = invoke(runner, ["validate", "--config", str(slicemarket.table1_path())])
        assert result.exit_code == 0
        assert "slice 3: tenants {3, 4}" in result.output


class TestOracleCommand:
    def test_p4_split(self, runner, tmp_path):
        bids = tmp_path / "bids.csv"
        bids.write_text("vsp_id,bid,demand\n3,4.5,3\n4,6.0,3\n")
        result = invoke(
            runner,
            ["oracle", "p4", str(bids), "--offered", "3", "--reserve", "1.6"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["split"] == {"3": 1, "4": 2}

    def test_p3_instance(self, runner, tmp_path):
        inst = tmp_path / "p3.json"
        inst.write_text(
            json.dumps(
                {
                    "capacity": [2, 2, 2],
                    "demands": [[1, 1, 1], [2, 1, 1]],
                    "prices": [1.0, 3.0],
                    "requested": [2, 1],
                }
            )
        )
        result = invoke(runner, ["oracle", "p3", str(inst)])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload["quotas"] == [0, 1]
        assert payload["objective"] == pytest.approx(3.0)
