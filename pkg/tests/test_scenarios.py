import os
import subprocess
import sys
import time

import numpy as np
import pytest

from trispin import cli
from trispin.model import ModelParams
from trispin.scenarios import (ConfigError, FIGURE_IDS, parse_config_text,
                               recipe_config, reproduce_figure, resonance_report,
                               run_scenario)
from trispin.spin_core import Spin

MINIMAL = """\
[scenario]
model = s_one
name = minimal

[params]
jk2 = -0.4
jk3 = -0.4
d = -0.6

[time]
span_ps = 60
points = 200

[initial]
state = down:2:2

[output]
kind = channels
channels = up:2:1
"""


class TestConfigParsing:
    def test_minimal_config(self):
        scen = parse_config_text(MINIMAL)
        assert scen.model == "s_one"
        assert scen.channels == ("up:2:1",)

    def test_unknown_key_is_named(self):
        bad = MINIMAL.replace("jk2 = -0.4", "jk2 = -0.4\nwibble = 3")
        with pytest.raises(ConfigError, match="wibble"):
            parse_config_text(bad)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="extras"):
            parse_config_text(MINIMAL + "\n[extras]\nx = 1\n")

    def test_unknown_model_rejected(self):
        with pytest.raises(ConfigError, match="model"):
            parse_config_text(MINIMAL.replace("s_one", "s_two"))

    def test_general_model_needs_spin(self):
        with pytest.raises(ConfigError, match="'s'"):
            parse_config_text(MINIMAL.replace("model = s_one", "model = general"))
        ok = parse_config_text(MINIMAL.replace("model = s_one",
                                               "model = general\ns = 3/2"))
        assert ok.s == Spin(3)

    def test_triple_models_reject_device_params(self):
        text = MINIMAL.replace("model = s_one", "model = trimer")
        with pytest.raises(ConfigError, match="jk2"):
            parse_config_text(text)

    def test_missing_time_span_rejected(self):
        bad = MINIMAL.replace("[time]\nspan_ps = 60\npoints = 200\n\n", "")
        with pytest.raises(ConfigError, match="span_ps"):
            parse_config_text(bad)

    def test_angles_parse(self):
        from trispin.scenarios import _parse_angle
        assert _parse_angle("pi") == pytest.approx(np.pi)
        assert _parse_angle("pi/8") == pytest.approx(np.pi / 8)
        assert _parse_angle("3*pi/4") == pytest.approx(3 * np.pi / 4)
        assert _parse_angle("0.25") == 0.25
        with pytest.raises(ConfigError):
            _parse_angle("two*pi")


class TestExecution:
    def test_minimal_run_writes_csv(self, tmp_path):
        cfg = tmp_path / "scen.ini"
        cfg.write_text(MINIMAL)
        files, summary = run_scenario(str(cfg), str(tmp_path))
        assert len(files) == 1
        lines = open(files[0]).read().splitlines()
        assert lines[0].startswith("# ")
        assert "d=-0.6" in lines[0]
        assert lines[1] == "time_ps,up:2:1"
        assert len(lines) == 202

    def test_unknown_state_label_fails_cleanly(self, tmp_path):
        cfg = tmp_path / "scen.ini"
        cfg.write_text(MINIMAL.replace("state = down:2:2", "state = down:9:9"))
        with pytest.raises(ConfigError, match="down:9:9"):
            run_scenario(str(cfg), str(tmp_path))

    def test_determinism_byte_identical(self, tmp_path):
        cfg = tmp_path / "scen.ini"
        cfg.write_text(MINIMAL)
        a, _ = run_scenario(str(cfg), str(tmp_path / "a"))
        b, _ = run_scenario(str(cfg), str(tmp_path / "b"))
        assert open(a[0], "rb").read() == open(b[0], "rb").read()

    def test_recipe_equals_config_run(self, tmp_path):
        """The canned fig6 recipe and a config-file run are bit-identical."""
        files_fig, _ = reproduce_figure("fig6", str(tmp_path / "fig"))
        cfg = tmp_path / "fig6.ini"
        cfg.write_text(recipe_config("fig6"))
        files_run, _ = run_scenario(str(cfg), str(tmp_path / "run"))
        assert len(files_fig) == len(files_run) == 1
        assert open(files_fig[0], "rb").read() == open(files_run[0], "rb").read()

    def test_every_figure_recipe_runs_quickly(self, tmp_path):
        for fid in FIGURE_IDS:
            start = time.monotonic()
            files, _ = reproduce_figure(fid, str(tmp_path / fid))
            assert files, fid
            assert all(os.path.exists(f) for f in files)
            assert time.monotonic() - start < 60.0

    def test_unknown_figure_id(self, tmp_path):
        with pytest.raises(ConfigError, match="fig9"):
            reproduce_figure("fig9", str(tmp_path))

    def test_fig5_peak_value(self, tmp_path):
        files, summary = reproduce_figure("fig5", str(tmp_path))
        data = np.genfromtxt(files[0], delimiter=",", skip_header=2)
        peak = np.nanmax(data[:, 2])
        assert peak == pytest.approx(0.995, abs=0.005)

    def test_fig2_channels_reach_unity(self, tmp_path):
        files, _ = reproduce_figure("fig2", str(tmp_path))
        chan = [f for f in files if f.endswith("channels.csv")][0]
        data = np.genfromtxt(chan, delimiter=",", skip_header=2)
        assert data[:, 2].max() > 0.9999
        assert data[0, 1] == pytest.approx(1.0)

    def test_fig4_axes_cover_range(self, tmp_path):
        files, _ = reproduce_figure("fig4", str(tmp_path))
        data = np.genfromtxt(files[0], delimiter=",", skip_header=2)
        assert data[:, 0].min() == 0.0
        assert data[:, 0].max() == pytest.approx(np.pi)
        assert data[:, 1].max() == pytest.approx(np.pi)

    def test_table1_contents(self, tmp_path):
        files, text = reproduce_figure("table1", str(tmp_path))
        rows = open(files[0]).read().splitlines()
        assert len(rows) == 8
        assert "2D/3" in rows[4] and "-2D" in rows[6]
        # six verified rows: s=1/2 peaks at 8/9, s=1 peaks at 1
        body = [r.split(",") for r in rows[2:]]
        for cells in body[:2]:
            assert float(cells[9]) == pytest.approx(8 / 9, abs=1e-6)
        for cells in body[2:]:
            assert float(cells[9]) == pytest.approx(1.0, abs=1e-6)


class TestResonanceReport:
    def test_spin_one_blocks(self):
        p = ModelParams.isotropic(1, j_k=-0.40, j_h=-0.05, d=-0.60, t_hop=0.05)
        text, names, cols = resonance_report("s_one", p)
        j_r = dict(zip(names, cols))["j_r"]
        p_at = dict(zip(names, cols))["p_max_at_jr"]
        roots = sorted(set(np.round(j_r, 9)))
        assert roots == [pytest.approx(-0.4), pytest.approx(1.2)]
        assert np.abs(p_at - 1.0).max() < 1e-6

    def test_spin_half_without_exchange_anisotropy(self):
        p = ModelParams.isotropic(0.5, j_k=-0.40, j_h=-0.05, t_hop=0.05)
        text, names, cols = resonance_report("s_half", p)
        j_r = dict(zip(names, cols))["j_r"]
        assert np.all(np.isnan(j_r))
        assert "JJ" in text or "no anisotropy-driven resonance" in text

    def test_spin_half_jj_root(self):
        p = ModelParams(s2=Spin(1), s3=Spin(1), j_k2=-0.40, j_k3=-0.40,
                        j_z=-0.08, j_xy=-0.02, t_hop=0.05)
        text, names, cols = resonance_report("s_half", p)
        data = dict(zip(names, cols))
        assert np.allclose(data["j_r"], -0.06)
        assert np.abs(data["p_max_at_jr"] - 1.0).max() < 1e-6

    def test_bh3_has_no_resonance(self):
        text, names, cols = resonance_report("bh3", (-0.40, -0.60))
        data = dict(zip(names, cols))
        assert "no anisotropy-driven resonance" in text
        assert np.allclose(data["p_max"], 0.75)
        assert np.allclose(data["omega"], 0.40)


class TestCLI:
    def run_cli(self, *args, tmp_path):
        return subprocess.run([sys.executable, "-m", "trispin.cli",
                               "--outdir", str(tmp_path), *args],
                              capture_output=True, text=True)

    def test_run_and_exit_codes(self, tmp_path):
        cfg = tmp_path / "m.ini"
        cfg.write_text(MINIMAL)
        res = self.run_cli("run", str(cfg), tmp_path=tmp_path)
        assert res.returncode == 0
        assert "wrote" in res.stdout

    def test_config_error_exit_code(self, tmp_path):
        cfg = tmp_path / "m.ini"
        cfg.write_text(MINIMAL.replace("model = s_one", "model = nope"))
        res = self.run_cli("run", str(cfg), tmp_path=tmp_path)
        assert res.returncode == 2
        assert "nope" in res.stderr

    def test_missing_config_file(self, tmp_path):
        res = self.run_cli("run", str(tmp_path / "absent.ini"), tmp_path=tmp_path)
        assert res.returncode == 2

    def test_figure_dump_config(self, tmp_path):
        res = self.run_cli("figure", "fig6", "--dump-config", tmp_path=tmp_path)
        assert res.returncode == 0
        assert res.stdout == recipe_config("fig6")

    def test_scan_filter_subcommand(self, tmp_path):
        res = self.run_cli("scan-filter", "--model", "s_half", "--jk2", "-0.4",
                           "--jk3", "-0.4", "--jz", "-0.05", "--jxy", "-0.05",
                           "--thop", "0.05", "--theta-in-points", "5",
                           "--theta-out-points", "5", tmp_path=tmp_path)
        assert res.returncode == 0
        assert (tmp_path / "scan_scan.csv").exists()

    def test_outdir_environment_variable(self, tmp_path):
        env = dict(os.environ, TRISPIN_OUTDIR=str(tmp_path / "envout"))
        res = subprocess.run([sys.executable, "-m", "trispin.cli",
                              "figure", "fig3"],
                             capture_output=True, text=True, env=env)
        assert res.returncode == 0
        assert (tmp_path / "envout" / "fig3_hard_balance.csv").exists()

    def test_verify_subcommand(self, tmp_path):
        res = self.run_cli("verify", "-n", "5", tmp_path=tmp_path)
        assert res.returncode == 0
        assert "oracle checks passed" in res.stdout


class TestCsvFormat:
    def test_twelve_digits_and_lf(self, tmp_path):
        files, _ = reproduce_figure("fig6", str(tmp_path))
        raw = open(files[0], "rb").read()
        assert b"\r" not in raw
        text = raw.decode()
        row = text.splitlines()[2].split(",")
        assert len(row[0]) <= 17
        float(row[1])
