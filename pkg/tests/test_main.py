import csv

import pytest

from pyNomaAS import main as cli
from pyNomaAS.analysis import validation
from pyNomaAS.analysis.validation import CheckResult
from pyNomaAS.errors import CdfRangeError
from pyNomaAS.models.selection_schemes import SCHEMES
from pyNomaAS.utils.helpers import parse_power_grid


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "params.cfg"
    path.write_text("m_b = 2\nm_r = 2\nm_t = 2\n")
    return path


class TestPowerGrid:
    def test_inclusive_range(self):
        grid = parse_power_grid("0:50:5")
        assert len(grid) == 11
        assert grid[0] == 0.0 and grid[-1] == 50.0

    def test_uneven_step_stops_before_stop(self):
        assert parse_power_grid("0:1:0.6") == [0.0, 0.6]
        grid = parse_power_grid("-20:50:15")
        assert grid == [-20.0, -5.0, 10.0, 25.0, 40.0]
        assert grid[-1] <= 50.0

    def test_float_step_keeps_stop(self):
        grid = parse_power_grid("0:1:0.1")
        assert len(grid) == 11
        assert grid[-1] == pytest.approx(1.0)

    def test_list_and_single(self):
        assert parse_power_grid("0, 10,30") == [0.0, 10.0, 30.0]
        assert parse_power_grid("20") == [20.0]


class TestSweepCommand:
    def test_analytic_grid(self, tmp_path):
        out = tmp_path / "analytic.csv"
        code = cli.main(["sweep", "--mode", "analytic", "--schemes", "max_u1_analytic", "--power", "0:50:5", "-o", str(out)])
        assert code == cli.EXIT_OK
        rows = read_csv(out)
        assert len(rows) == 11
        assert {row["kind"] for row in rows} == {"analytic"}
        assert [float(row["power_db"]) for row in rows] == [5.0 * n for n in range(11)]

    def test_same_seed_same_bytes(self, tmp_path, config):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            code = cli.main([
                "sweep", str(config), "--schemes", "max_u1,random", "--power", "0,20",
                "--trials", "3000", "--seed", "4", "-o", str(path),
            ])
            assert code == cli.EXIT_OK
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_paired_rows(self, tmp_path, config):
        out = tmp_path / "both.csv"
        code = cli.main([
            "sweep", str(config), "--mode", "both", "--schemes", "random,optimum_sumrate",
            "--power", "10", "--trials", "5000", "-o", str(out),
        ])
        assert code == cli.EXIT_OK
        rows = read_csv(out)
        assert [(row["scheme"], row["kind"]) for row in rows] == [
            ("random", "monte_carlo"), ("random", "analytic"), ("optimum_sumrate", "monte_carlo"),
        ]
        assert rows[0]["rel_diff"] == rows[1]["rel_diff"] != ""

    def test_unknown_scheme_is_usage_error(self, tmp_path, capsys):
        code = cli.main(["sweep", "--schemes", "max_u3", "-o", str(tmp_path / "x.csv")])
        assert code == cli.EXIT_USAGE
        assert "max_u3" in capsys.readouterr().err

    def test_missing_subcommand(self):
        assert cli.main([]) == cli.EXIT_USAGE

    def test_invalid_config(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("a1 = 0.5\na2 = 0.5\n")
        assert cli.main(["sweep", str(path), "--trials", "10", "-o", str(tmp_path / "x.csv")]) == cli.EXIT_CONFIG
        assert "POWER_SPLIT_INVALID" in capsys.readouterr().err

    def test_bad_power_grid(self, tmp_path):
        assert cli.main(["sweep", "--power", "10:0:5", "-o", str(tmp_path / "x.csv")]) == cli.EXIT_CONFIG

    def test_negative_power_start(self, tmp_path, capsys):
        out = tmp_path / "neg.csv"
        code = cli.main(["sweep", "--mode", "analytic", "--schemes", "random", "--power=-10:10:10", "-o", str(out)])
        assert code == cli.EXIT_OK
        assert [float(row["power_db"]) for row in read_csv(out)] == [-10.0, 0.0, 10.0]
        # without "=" argparse takes the grid for an option
        assert cli.main(["sweep", "--power", "-10:10:10", "-o", str(out)]) == cli.EXIT_USAGE
        assert "--power" in capsys.readouterr().err
        with pytest.raises(SystemExit):
            cli.main(["sweep", "--help"])
        assert "--power=-20:40:10" in capsys.readouterr().out

    def test_var_si_axis(self, tmp_path, config):
        out = tmp_path / "si.csv"
        code = cli.main([
            "sweep", str(config), "--schemes", "max_u1,random", "--power", "0,20", "--var-si", "0.1,1",
            "--trials", "2000", "-o", str(out),
        ])
        assert code == cli.EXIT_OK
        rows = read_csv(out)
        assert len(rows) == 8
        assert [float(row["var_si"]) for row in rows] == [0.1] * 4 + [1.0] * 4
        assert [float(row["power_db"]) for row in rows[:4]] == [0.0, 0.0, 20.0, 20.0]

    def test_var_si_defaults_to_config(self, tmp_path):
        path = tmp_path / "si.cfg"
        path.write_text("var_si = 0.05\n")
        out = tmp_path / "one.csv"
        code = cli.main([
            "sweep", str(path), "--mode", "analytic", "--schemes", "random", "--power", "10", "-o", str(out),
        ])
        assert code == cli.EXIT_OK
        assert float(read_csv(out)[0]["var_si"]) == 0.05

    def test_bad_var_si(self, tmp_path):
        code = cli.main(["sweep", "--var-si", "0.3,0", "--trials", "10", "-o", str(tmp_path / "x.csv")])
        assert code == cli.EXIT_CONFIG

    def test_numerical_failure_exit_code(self, tmp_path, monkeypatch, capsys):
        def failing(params, sweep, mode):
            raise CdfRangeError("cdf_gamma2_random left [0, 1]")

        monkeypatch.setattr(cli, "sweep_rows", failing)
        assert cli.main(["sweep", "--trials", "10", "-o", str(tmp_path / "x.csv")]) == cli.EXIT_CONFIG
        assert "CDF_OUT_OF_RANGE" in capsys.readouterr().err


class TestValidateCommand:
    def test_all_pass(self, capsys):
        code = cli.main(["validate", "--power", "10,20", "--trials", "50000"])
        out = capsys.readouterr().out
        assert code == cli.EXIT_OK, out
        assert "6/6 checks passed" in out

    def test_injected_failure(self, monkeypatch, capsys):
        injected = lambda params, options: CheckResult("injected", False, "boom")
        monkeypatch.setattr(validation, "CHECKS", [validation.check_alternating_identity, injected])
        code = cli.main(["validate", "--power", "10", "--trials", "2000"])
        out = capsys.readouterr().out
        assert code == cli.EXIT_VALIDATION
        assert "FAIL  injected" in out

    def test_missing_config(self, tmp_path):
        assert cli.main(["validate", str(tmp_path / "nope.cfg")]) == cli.EXIT_CONFIG


class TestDrawCommand:
    def test_dump(self, tmp_path, config):
        out = tmp_path / "channels.csv"
        assert cli.main(["draw", str(config), "--trials", "25", "--seed", "3", "-o", str(out)]) == cli.EXIT_OK
        rows = read_csv(out)
        assert len(rows) == 25
        assert "g_si_1_1" in rows[0]


class TestSchemesCommand:
    def test_listing(self, capsys):
        assert cli.main(["schemes"]) == cli.EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == len(SCHEMES)
        for line, (name, scheme) in zip(lines, SCHEMES.items()):
            assert line.startswith(name)
            assert line.endswith(scheme.description)
        listed = dict(line.split(None, 1) for line in lines)
        assert listed["max_u1_analytic"].startswith("closed form")
        assert listed["optimum_sumrate"].startswith("simulation only")
