"""
Contains tests for the command-line entry point.
"""

import json

import pytest

from pyincrements.cli import RunConfig, check_lags, main
from pyincrements.data_io import read_levels_csv
from pyincrements.falsify import CONSISTENCY_VERDICTS


@pytest.fixture(scope="module")
def arch_csv(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("data") / "a.csv")
    assert 0 == main(["simulate", "--model", "arch1", "--alpha", "0.2", "--omega", "0.5",
                      "--n", "100000", "--seed", "7", "--out", path])
    return path


class TestSimulate(object):

    def test_happy_path(self, arch_csv):
        """
        Tests that simulate writes a readable level file.
        """
        levels = read_levels_csv(arch_csv)
        assert 100001 == len(levels)
        assert 0.0 == levels.values[0]

    def test_stdout(self, capsys):
        """
        Tests that the series goes to standard output without --out.
        """
        assert 0 == main(["simulate", "--model", "wiener", "--n", "3"])
        lines = capsys.readouterr().out.splitlines()
        assert "time,level" == lines[0]
        assert 5 == len(lines)

    def test_invalid_parameter(self, capsys):
        """
        Tests that a parameter invariant violation is a usage error
        naming the parameter.
        """
        assert 1 == main(["simulate", "--model", "arch1", "--alpha", "0.2", "--omega", "1.5",
                          "--n", "100"])
        assert "omega" in capsys.readouterr().err

    def test_missing_parameter(self, capsys):
        """
        Tests that required model parameters are enforced.
        """
        assert 1 == main(["simulate", "--model", "garch11", "--alpha", "0.1", "--n", "100"])
        assert "--omega" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        """
        Tests that unknown flags are usage errors.
        """
        assert 1 == main(["simulate", "--model", "wiener", "--n", "10", "--colour", "red"])
        assert 1 == main(["bogus"])


class TestDataCommands(object):

    def test_falsify(self, arch_csv, tmp_path):
        """
        Tests that falsify writes a versioned report and plot data.
        """
        out = tmp_path / "report.json"
        plots = tmp_path / "plots"
        assert 0 == main(["falsify", "--input", arch_csv, "--window", "1000", "--lags", "1,2,4",
                          "--out", str(out), "--plots", str(plots)])
        document = json.loads(out.read_text())
        assert 1 == document["schema_version"]
        assert document["verdicts"]["consistency_verdict"] in CONSISTENCY_VERDICTS
        assert [1, 2, 4] == document["config"]["lags"]
        assert document["input"]["sha256"]
        assert (plots / "manifest.json").exists()
        assert (plots / "variance_curve.csv").exists()

    def test_falsify_deterministic(self, arch_csv, tmp_path):
        """
        Tests that two runs give byte-identical reports.
        """
        outputs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert 0 == main(["falsify", "--input", arch_csv, "--window", "1000",
                              "--lags", "1,2", "--out", str(out)])
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_diagnose_stdout(self, arch_csv, capsys):
        """
        Tests that diagnose prints its report without --out.
        """
        assert 0 == main(["diagnose", "--input", arch_csv, "--window", "1000", "--lags", "1"])
        document = json.loads(capsys.readouterr().out)
        assert "conditional_memory" in document["verdicts"]

    def test_fit(self, arch_csv, capsys):
        """
        Tests ARCH(1) and GARCH(1,1) fits per lag.
        """
        assert 0 == main(["fit", "--input", arch_csv, "--model", "arch1", "--lags", "1,2"])
        document = json.loads(capsys.readouterr().out)
        assert ["1", "2"] == list(document["estimates"]["fits"])

        assert 0 == main(["fit", "--input", arch_csv, "--model", "garch11", "--lags", "1",
                          "--max-iter", "0"])
        document = json.loads(capsys.readouterr().out)
        assert document["verdicts"]["converged"]["1"] is False
        assert "garch_white_noise" in document["verdicts"]

    def test_missing_input(self, tmp_path, capsys):
        """
        Tests that a missing input file is a data error.
        """
        assert 2 == main(["falsify", "--input", str(tmp_path / "none.csv"), "--window", "10"])
        assert "none.csv" in capsys.readouterr().err

    def test_too_short(self, tmp_path):
        """
        Tests that a series with too few windows is a data error.
        """
        path = tmp_path / "short.csv"
        path.write_text("time,level\n" + "".join("%d,%d\n" % (k, k % 3) for k in range(50)))
        assert 2 == main(["falsify", "--input", str(path), "--window", "10"])

    def test_bad_options(self, arch_csv, tmp_path):
        """
        Tests malformed lags, window and plot directory.
        """
        assert 1 == main(["falsify", "--input", arch_csv, "--window", "0"])
        assert 1 == main(["falsify", "--input", arch_csv, "--window", "10", "--lags", "a"])
        assert 1 == main(["falsify", "--input", arch_csv, "--window", "10",
                          "--significance", "2"])
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert 1 == main(["falsify", "--input", arch_csv, "--window", "1000",
                          "--plots", str(blocker)])


class TestOptions(object):

    def test_check_lags(self):
        """
        Tests that lags are parsed, sorted and deduplicated.
        """
        assert (1, 2, 4) == check_lags("4,1,2,2")

    def test_run_config(self):
        """
        Tests the plot flag and the plain form of a configuration.
        """
        config = RunConfig("falsify", input="a.csv", window_steps=10, plots="p")
        assert config.emit_plot_data
        plain = config.to_plain()
        assert "falsify" == plain["command"]
        assert plain["emit_plot_data"]
        assert "significance" in plain

    def test_help_lists_exit_statuses(self, capsys):
        """
        Tests that --help describes every exit status.
        """
        assert 0 == main(["--help"])
        out = capsys.readouterr().out
        assert "exit status:" in out
        assert "2  input data rejected" in out
        assert "3  numerical or optimization failure" in out
