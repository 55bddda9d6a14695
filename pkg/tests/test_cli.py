import math

import numpy as np
import pytest

from gouysim import cli


# --- config parsing -----------------------------------------------------------


def test_empty_config_gives_paper_defaults(default_config):
    cfg = default_config
    assert cfg.atom.mass_kg == 1.44e-25
    assert cfg.atom.vz_mps == 50.0
    assert cfg.slit.w0_m == 10e-6
    assert cfg.cavity.lambda_m == 5.8e-3
    assert cfg.cavity.n_photons == 3e6
    assert cfg.cavity.rabi_hz == 47e3
    assert cfg.cavity.detuning_g_hz == -3.0e7
    assert cfg.cavity.detuning_i_hz == 3.2e9
    assert cfg.cavity.t_i_s == 2e-4
    assert cfg.cavity.q_factor == 4e6
    assert cfg.geometry.d_m == 0.21
    assert cfg.ramsey.ramsey_time_s == 6e-3
    assert cfg.ramsey.omega_gi_hz == pytest.approx(
        cfg.atom.omega_g_hz - cfg.atom.omega_i_hz
    )
    assert cfg.ramsey.scan_center_hz == cfg.ramsey.omega_gi_hz
    assert cfg.numerics.grid_points == 8192
    assert cfg.numerics.exact_mode is False


def test_config_overrides_and_comments():
    cfg = cli.parse_config(
        """
        # comment line
        cavity.n_photons = 1.5e6   # inline comment
        numerics.exact_mode = true
        ramsey.scan_points = 9
        """
    )
    assert cfg.cavity.n_photons == 1.5e6
    assert cfg.numerics.exact_mode is True
    assert cfg.ramsey.scan_points == 9


def test_unknown_key_is_error():
    with pytest.raises(cli.ConfigError, match=r"line 1.*atom\.masss_kg"):
        cli.parse_config("atom.masss_kg = 1")


def test_malformed_number_reports_line():
    with pytest.raises(cli.ConfigError, match="line 2"):
        cli.parse_config("atom.mass_kg = 1.44e-25\natom.vz_mps = fast")


def test_invariant_violations_name_the_field():
    with pytest.raises(cli.ConfigError, match="n_photons"):
        cli.parse_config("cavity.n_photons = -1")
    with pytest.raises(cli.ConfigError, match="scan_points"):
        cli.parse_config("ramsey.scan_points = 3")
    with pytest.raises(cli.ConfigError, match="power of two"):
        cli.parse_config("numerics.grid_points = 1000")
    with pytest.raises(cli.ConfigError, match="integer"):
        cli.parse_config("ramsey.scan_points = 8.5")
    with pytest.raises(cli.ConfigError, match="true/false"):
        cli.parse_config("numerics.exact_mode = maybe")
    with pytest.raises(cli.ConfigError, match="section.key"):
        cli.parse_config("just some text")


def test_frequency_conversion_boundary(default_config):
    atom = default_config.atom_params()
    assert atom.omega_g == pytest.approx(2 * math.pi * default_config.atom.omega_g_hz)
    cavity = default_config.cavity_params()
    assert cavity.rabi_per_photon == pytest.approx(2 * math.pi * 47e3)
    assert cavity.detuning_g == pytest.approx(-2 * math.pi * 3.0e7)


# --- CSV writing --------------------------------------------------------------


def test_write_csv_exact_bytes(tmp_path):
    path = cli.write_csv(tmp_path / "t.csv", [[1.0, 0.5]], ("x", "y"))
    assert path.read_bytes() == b"x,y\n1,0.5\n"


def test_write_csv_header_only(tmp_path):
    path = cli.write_csv(tmp_path / "t.csv", [], ("a", "b", "c"))
    assert path.read_bytes() == b"a,b,c\n"


def test_write_csv_special_values(tmp_path):
    path = cli.write_csv(
        tmp_path / "t.csv", [[math.inf, -math.inf, 0.1 + 0.2]], ("p", "q", "r")
    )
    assert path.read_bytes() == b"p,q,r\ninf,-inf,0.30000000000000004\n"


def test_write_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError, match="cells"):
        cli.write_csv(tmp_path / "t.csv", [[1.0]], ("a", "b"))


# --- scenarios ----------------------------------------------------------------


def test_design_check_scenario(default_config, tmp_path):
    result = cli.run_scenario("design-check", default_config, tmp_path)
    assert result.exit_code == 0
    assert result.summary["all_passed"] is True
    text = (tmp_path / "design_check.txt").read_text()
    assert text.count("PASS") == 7
    assert "FAIL" not in text


def test_design_check_strict_failure(tmp_path):
    cfg = cli.parse_config("cavity.q_factor = 1e5")
    result = cli.run_scenario("design-check", cfg, tmp_path, strict=True)
    assert result.exit_code == 2
    assert "FAIL" in (tmp_path / "design_check.txt").read_text()


def test_beam_scenario(default_config, tmp_path):
    result = cli.run_scenario("beam", default_config, tmp_path)
    raw = (tmp_path / "beam_raw.csv").read_text().splitlines()
    focused = (tmp_path / "beam_focused.csv").read_text().splitlines()
    assert raw[0] == "z_m,w_m,r_m,xi_rad"
    assert len(raw) == 202 and len(focused) == 202
    # the raw beam starts at its waist: flat wavefront serialized as inf
    assert raw[1].split(",")[2] == "inf"
    assert result.summary["focused_waist_m"] == pytest.approx(3.068e-7, rel=1e-3)


def test_gouy_trace_scenario(default_config, tmp_path):
    result = cli.run_scenario("gouy-trace", default_config, tmp_path)
    data = np.genfromtxt(tmp_path / "gouy_trace.csv", delimiter=",", names=True)
    assert abs(result.summary["accumulated_numeric_rad"]
               - result.summary["accumulated_analytic_rad"]) < 2e-3
    assert np.max(np.abs(data["xi_numeric_rad"] - data["xi_analytic_rad"])) < 2e-3
    assert result.summary["accumulated_analytic_rad"] == pytest.approx(1.5402, rel=1e-3)


def test_fringes_scenario(tmp_path):
    cfg = cli.parse_config("ramsey.scan_points = 11")
    result = cli.run_scenario("fringes", cfg, tmp_path)
    data = np.genfromtxt(tmp_path / "fringes.csv", delimiter=",", names=True)
    assert len(data) == 11
    assert np.all(data["p_g_off"] >= 0) and np.all(data["p_g_off"] <= 1)
    assert np.all(data["p_g_on"] >= 0) and np.all(data["p_g_on"] <= 1)
    assert abs(result.summary["fitted_phase_off_rad"]) < 1e-4


def test_shift_scenario(tmp_path):
    cfg = cli.parse_config("ramsey.scan_points = 11")
    result = cli.run_scenario("shift", cfg, tmp_path)
    assert result.summary["fringe_shift_rad"] == pytest.approx(1.7166, abs=2e-3)
    assert result.summary["contrast_on"] > 0.95
    text = (tmp_path / "shift.txt").read_text()
    assert "fringe_shift_rad" in text


def test_scenario_determinism(tmp_path):
    cfg_text = "ramsey.scan_points = 9"
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        cli.run_scenario("beam", cli.parse_config(cfg_text), out)
        cli.run_scenario("fringes", cli.parse_config(cfg_text), out)
    for name in ("beam_raw.csv", "beam_focused.csv", "fringes.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_unknown_scenario(default_config, tmp_path):
    with pytest.raises(cli.ConfigError, match="unknown scenario"):
        cli.run_scenario("warp", default_config, tmp_path)


# --- entry point --------------------------------------------------------------


def test_main_design_check(tmp_path, capsys):
    code = cli.main(["design-check", "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7


def test_main_exit_codes(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("cavity.n_photons = -1\n")
    assert cli.main(["design-check", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert cli.main(["no-such-scenario", "--out", str(tmp_path)]) == 1
    assert cli.main(["design-check", "--config", str(tmp_path / "missing.cfg")]) == 1
    strict_cfg = tmp_path / "lossy.cfg"
    strict_cfg.write_text("cavity.q_factor = 1e5\n")
    assert cli.main(
        ["design-check", "--config", str(strict_cfg), "--out", str(tmp_path), "--strict"]
    ) == 2
    assert cli.main(
        ["design-check", "--config", str(strict_cfg), "--out", str(tmp_path)]
    ) == 0
