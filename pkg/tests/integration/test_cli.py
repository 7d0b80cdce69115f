"""
Integration tests for CLI entry point
"""

import logging
import math

import pytest

from spinaddress.cli import CSV_HEADER, idle_table, main
from spinaddress.drive import DriveParams


class TestCLI:
    """Test cases for CLI functionality"""

    def test_drive_report(self, capsys):
        """Test drive strength, step time and idle rows"""
        main(["drive", "--no-color"])

        out = capsys.readouterr().out
        assert "0.625 MHz" in out
        assert "2.51327 us" in out
        assert "idle fidelity" in out

    def test_idle_table_values(self):
        """Test the first two idle rows against the quoted fidelities"""
        rows = idle_table(DriveParams.optimal(10.0, math.pi / 2))

        assert [m for m, _, _ in rows] == list(range(1, 11))
        assert rows[0][1] == pytest.approx(0.9994, abs=5e-5)
        assert rows[1][1] == pytest.approx(0.99985, abs=5e-5)
        assert all(blind >= trace for _, trace, blind in rows)

    def test_swap_report(self, capsys):
        """Test both accountings and the SWAP check are printed"""
        main(["swap", "--no-color"])

        out = capsys.readouterr().out
        assert "pi/2 accounting" in out
        assert "calibrated" in out
        assert "SWAP fidelity (local z):" in out

    @pytest.mark.parametrize("flag", ["--six-site", "--fixture-table1"])
    def test_plan_fixture(self, capsys, flag):
        """Test the six-site example schedule and trace table"""
        main(["plan", flag, "--no-color"])

        out = capsys.readouterr().out
        assert "Bins:" in out and "1 3 6 3 1 -3" in out
        assert "SWAP qubits 1 and 2" in out
        assert "(Y_-φ X_-θ Y_φ X_θ)_1" in out
        assert "Total time:" in out

    def test_plan_checks_spectators(self, capsys):
        """Test every spectator of the six-site example is verified at the identity"""
        main(["plan", "--six-site", "--no-color"])

        out = capsys.readouterr().out
        assert "Spectators at identity:" in out
        line = next(x for x in out.splitlines() if "Spectators at identity:" in x)
        assert line.split()[-1] == "5"
        assert "Worst spectator (exact):" in out

    def test_plan_rejects_broken_bookkeeping(self, mocker, capsys):
        """Test a spectator left rotated aborts the plan with code 2"""
        mocker.patch(
            "spinaddress.sequencer.spectator_deviations", return_value={1: 0.0, 2: 0.3}
        )
        with pytest.raises(SystemExit) as exc_info:
            main(["plan", "--six-site", "--no-color"])

        assert exc_info.value.code == 2
        assert "site 3" in capsys.readouterr().err

    def test_plan_target_outside_chain(self, capsys):
        """Test a bad target exits with code 2"""
        with pytest.raises(SystemExit) as exc_info:
            main(["plan", "--six-site", "--target", "9", "--no-color"])

        assert exc_info.value.code == 2
        assert "Error:" in capsys.readouterr().err

    def test_plan_single_bin_array(self):
        """Test a one-qubit array cannot be addressed"""
        with pytest.raises(SystemExit) as exc_info:
            main(["plan", "--size", "1", "--no-color"])

        assert exc_info.value.code == 2

    def test_invalid_configuration(self, capsys):
        """Test config errors exit with code 1 and name the field"""
        with pytest.raises(SystemExit) as exc_info:
            main(["sweep", "--estimator", "median", "--no-color"])

        assert exc_info.value.code == 1
        assert "estimator" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        """Test an unreadable config file is a config error"""
        with pytest.raises(SystemExit) as exc_info:
            main(["drive", "--config", str(tmp_path / "nope.json"), "--no-color"])

        assert exc_info.value.code == 1

    def test_verbose_enables_info_logging(self, mocker):
        """Test -v maps to INFO"""
        basic = mocker.patch("logging.basicConfig")

        main(["drive", "-v", "--no-color"])

        assert basic.call_args.kwargs["level"] == logging.INFO


class TestSweep:
    """Test cases for the sweep command"""

    def _run(self, path, *extra):
        main(
            [
                "sweep",
                "--n-qubits",
                "2,6",
                "--n-configs",
                "30",
                "--seed",
                "5",
                "--out",
                str(path),
                "--no-color",
                *extra,
            ]
        )

    def test_csv_layout(self, tmp_path):
        """Test one header and one row per size"""
        out = tmp_path / "sweep.csv"
        self._run(out)

        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert [line.split(",")[0] for line in lines[1:]] == ["2", "6"]
        assert all(line.endswith(",30,5") for line in lines[1:])

    def test_byte_identical_reruns(self, tmp_path):
        """Test identical settings give identical files, whatever the worker count"""
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        self._run(a)
        self._run(b, "--workers", "3")

        assert a.read_bytes() == b.read_bytes()

    def test_interrupted_sweep_writes_nothing(self, tmp_path, mocker, capsys):
        """Test no partial file is left behind"""
        mocker.patch(
            "spinaddress.cli.MonteCarloRunner.sweep", side_effect=KeyboardInterrupt()
        )
        out = tmp_path / "sweep.csv"

        with pytest.raises(SystemExit) as exc_info:
            self._run(out)

        assert exc_info.value.code == 130
        assert not out.exists()
        assert "Interrupted by user" in capsys.readouterr().out

    @pytest.mark.slow
    def test_sweep_reaches_99_percent_at_25_qubits(self, tmp_path):
        """Test the written sequence column stays above 0.99 at N = 25"""
        out = tmp_path / "sweep.csv"
        main(
            [
                "sweep",
                "--n-qubits",
                "25",
                "--n-configs",
                "10000",
                "--seed",
                "0",
                "--workers",
                "4",
                "--out",
                str(out),
                "--no-color",
            ]
        )

        header, row = out.read_text().splitlines()
        values = dict(zip(header.split(","), row.split(",")))
        assert float(values["f_avg_sequence"]) >= 0.99
        assert float(values["f_avg_sequence_weighted"]) >= 0.99
        assert float(values["f_avg_simple"]) < 0.99
