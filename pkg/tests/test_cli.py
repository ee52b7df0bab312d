import configparser
from pathlib import Path

import pytest

import ampcs.cli as cli

SMALL_CONFIG = """\
[system]
N = 60
K = 3
M = 24
sigma_s = 1.0

[experiment]
snr_db = 10
pe = 0.05
trials = 6
master_seed = 42
metric = nmse
methods = proposed_l1, biht

[sweep]
axis = pe
grid = 0.0, 0.1
"""

MSE_CONFIG = """\
[system]
N = 100
K = 3
M = 20
sigma_s = 1.0

[experiment]
snr_db = 10
pe = 0.05
quantizer_mode = optimal
trials = 40
master_seed = 42
metric = mse_w
methods = optimal, naive

[sweep]
axis = pe
grid = 0.0, 0.2
"""


def write_config(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestDesign:
    def test_reference_point(self, capsys):
        rc = cli.main(
            "design --N 1000 --K 10 --M 100 --sigma-s 1 --snr-db 10 --pe 0.05".split()
        )
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "0.0684678" in out
        assert "0.531216" in out
        assert "0.0760753" in out

    def test_degenerate_level_warns(self, capsys):
        rc = cli.main("design --pe 0.5".split())
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "degenerate" in out

    def test_rejects_pe_above_half(self, capsys):
        rc = cli.main("design --pe 0.6".split())
        err = capsys.readouterr().err
        assert rc == cli.EXIT_CONFIG
        assert "0.5" in err


class TestSweep:
    def test_outputs_written(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out = tmp_path / "out"
        rc = cli.main(["sweep", "--config", str(cfg), "--out", str(out)])
        assert rc == cli.EXIT_OK
        csv_path = out / "exp.csv"
        assert csv_path.exists()
        assert (out / "exp.png").exists()
        manifest = out / "exp.manifest.ini"
        assert manifest.exists()
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "axis_value,method,metric_mean,metric_stderr,analytic_value,trials"
        methods = {line.split(",")[1] for line in lines[1:]}
        assert methods == {"proposed_l1", "biht"}

    def test_mse_sweep_has_analytic_column(self, tmp_path, capsys):
        cfg = write_config(tmp_path, MSE_CONFIG)
        out = tmp_path / "out"
        rc = cli.main(["sweep", "--config", str(cfg), "--out", str(out)])
        assert rc == cli.EXIT_OK
        lines = (out / "exp.csv").read_text().splitlines()
        for line in lines[1:]:
            assert line.split(",")[4] != ""

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out1)]) == 0
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out2)]) == 0
        assert (out1 / "exp.csv").read_bytes() == (out2 / "exp.csv").read_bytes()

    def test_rerun_from_manifest(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out1)]) == 0
        manifest = out1 / "exp.manifest.ini"
        assert cli.main(["sweep", "--config", str(manifest), "--out", str(out2)]) == 0
        assert (out1 / "exp.csv").read_bytes() == (out2 / "exp.csv").read_bytes()

    def test_workers_do_not_change_output(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out1)]) == 0
        assert (
            cli.main(
                ["sweep", "--config", str(cfg), "--out", str(out2), "--workers", "2"]
            )
            == 0
        )
        assert (out1 / "exp.csv").read_bytes() == (out2 / "exp.csv").read_bytes()

    def test_empty_grid_is_config_error(self, tmp_path, capsys):
        bad = SMALL_CONFIG.replace("grid = 0.0, 0.1", "grid =")
        cfg = write_config(tmp_path, bad)
        out = tmp_path / "out"
        rc = cli.main(["sweep", "--config", str(cfg), "--out", str(out)])
        assert rc == cli.EXIT_CONFIG
        assert not out.exists()  # no partial outputs

    def test_missing_config_file(self, tmp_path, capsys):
        rc = cli.main(["sweep", "--config", str(tmp_path / "nope.ini"), "--out", "."])
        assert rc == cli.EXIT_IO

    def test_malformed_key(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_CONFIG.replace("N = 60", "N = sixty"))
        rc = cli.main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")])
        assert rc == cli.EXIT_CONFIG

    def test_seed_flag_changes_output(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SMALL_CONFIG)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["sweep", "--config", str(cfg), "--out", str(out1)]) == 0
        assert (
            cli.main(
                ["sweep", "--config", str(cfg), "--out", str(out2), "--seed", "777"]
            )
            == 0
        )
        assert (out1 / "exp.csv").read_bytes() != (out2 / "exp.csv").read_bytes()


class TestValidate:
    def test_default_checks_pass(self, capsys):
        rc = cli.main(["validate", "--trials", "100000"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_OK
        assert "ALL CHECKS PASSED" in out
        assert "FAIL" not in out
        # one machine-readable line per check
        for line in out.splitlines()[:-1]:
            assert "expected=" in line and "observed=" in line and "tolerance=" in line

    def test_zero_tolerance_fails(self, capsys):
        rc = cli.main(["validate", "--trials", "100000", "--tolerance-scale", "0"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_CHECK_FAILED
        assert "FAIL" in out

    def test_injected_wrong_constant_fails(self, capsys, monkeypatch):
        # mutation sanity: corrupt the closed form the checks compare against
        monkeypatch.setattr(cli, "min_total_mse", lambda inputs: 0.999)
        rc = cli.main(["validate", "--trials", "100000"])
        out = capsys.readouterr().out
        assert rc == cli.EXIT_CHECK_FAILED
        assert any(
            "min_total_mse_point" in line and "FAIL" in line
            for line in out.splitlines()
        )


class TestUsage:
    def test_no_command(self, capsys):
        assert cli.main([]) == cli.EXIT_CONFIG

    def test_unknown_flag(self, capsys):
        assert cli.main(["design", "--frobnicate"]) == cli.EXIT_CONFIG
