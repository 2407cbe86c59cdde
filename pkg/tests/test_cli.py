"""CLI surface: outputs, round trips, exit codes, determinism."""

import json
import os

import numpy as np
import pytest

from lambda_forge import cli

FAST_FLUX = 'grids.flux={"start":0.0,"stop":7.0,"count":8}'


def run(args):
    return cli.main(args)


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return header, data


def test_snail_coeffs_round_trip(tmp_path):
    out = str(tmp_path)
    assert run(["snail-coeffs", "--output", out, "--set", FAST_FLUX]) == 0
    header, data = read_csv(os.path.join(out, "snail-coeffs.csv"))
    assert header == ["phi_ext_f", "phi_ext_s", "phi_min", "c2", "c3", "c4",
                      "c2_tot", "c3_tot", "l_s_tot_nH"]
    # CSV round trip: parsing reproduces the in-memory values to 1e-12
    from lambda_forge import snail
    for row in data:
        co = snail.taylor_coeffs(snail.SnailSpec(0.4, 3, row[1], 100e9))
        assert abs(co.c2 - row[3]) <= 1e-12 * abs(row[3])
        assert abs(co.c3 - row[4]) <= 1e-12 * max(abs(row[4]), 1e-300)
    # metadata sidecar carries the resolved config
    meta = json.load(open(os.path.join(out, "snail-coeffs.json")))
    assert meta["config"]["snail"]["alpha"] == 0.4
    assert "config_sha256" in meta and "wall_time_s" in meta
    assert meta["versions"]["integrator_backend"] in ("py", "cy")


def test_csv_byte_determinism(tmp_path):
    out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
    for out in (out_a, out_b):
        assert run(["snail-coeffs", "--output", out, "--set", FAST_FLUX,
                    "--no-svg"]) == 0
    a = open(os.path.join(out_a, "snail-coeffs.csv"), "rb").read()
    b = open(os.path.join(out_b, "snail-coeffs.csv"), "rb").read()
    assert a == b


def test_jobs_do_not_change_output(tmp_path):
    out_a, out_b = str(tmp_path / "a"), str(tmp_path / "b")
    assert run(["snail-coeffs", "--output", out_a, "--set", FAST_FLUX]) == 0
    assert run(["snail-coeffs", "--output", out_b, "--set", FAST_FLUX,
                "--jobs", "4"]) == 0
    a = open(os.path.join(out_a, "snail-coeffs.csv"), "rb").read()
    b = open(os.path.join(out_b, "snail-coeffs.csv"), "rb").read()
    assert a == b


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("LAMBDA_FORGE_OUTPUT", str(tmp_path / "env_out"))
    assert run(["snail-coeffs", "--set", FAST_FLUX, "--no-svg"]) == 0
    assert (tmp_path / "env_out" / "snail-coeffs.csv").exists()


def test_bad_config_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["snail-coeffs", "--config", str(bad),
                "--output", str(tmp_path)]) == 2


def test_empty_grid_exit_code_names_field(tmp_path, capsys):
    code = run(["snail-coeffs", "--output", str(tmp_path), "--set",
                'grids.flux={"start":0.0,"stop":1.0,"count":1}'])
    assert code == 2
    assert "flux" in capsys.readouterr().err


def test_unknown_key_exit_code(tmp_path, capsys):
    code = run(["chevron", "--output", str(tmp_path), "--set",
                "lambda.g3-mzh=3.0"])
    assert code == 2
    assert "g3_mzh" in capsys.readouterr().err


def test_direct_dotted_flag_override(tmp_path):
    out = str(tmp_path)
    assert run(["calibrate", "--output", out,
                "--lambda.kappa-mhz", "16.8"]) == 0
    meta = json.load(open(os.path.join(out, "calibrate.json")))
    assert meta["config"]["lambda"]["kappa_mhz"] == 16.8


def test_unknown_bare_flag_rejected(tmp_path, capsys):
    code = run(["calibrate", "--output", str(tmp_path), "--bogus-flag", "1"])
    assert code == 2
    assert "bogus" in capsys.readouterr().err


def test_numerical_failure_exit_code(tmp_path, capsys):
    # an unsolvable calibration triple maps to exit 3
    code = run(["calibrate", "--output", str(tmp_path), "--a-th", "0.1",
                "--a-red", "0.95", "--a-blue", "0.5"])
    assert code == 3
    assert "calibrate" in capsys.readouterr().err


def test_calibrate_round_trip_flags(tmp_path):
    from lambda_forge import raman

    truth = (1.0, 0.87e6, 0.6)
    amps = raman.forward_amplitudes(*truth, 16.8e6, 1 / 5.7e-6)
    out = str(tmp_path)
    assert run(["calibrate", "--output", out,
                "--a-th", repr(amps[0]), "--a-red", repr(amps[1]),
                "--a-blue", repr(amps[2])]) == 0
    header, data = read_csv(os.path.join(out, "calibrate.csv"))
    row = dict(zip(header, data[0]))
    assert row["g3_hz"] == pytest.approx(truth[1], rel=1e-6)
    assert row["p_g_th"] == pytest.approx(truth[2], rel=1e-6)
    assert row["a_half_distance"] == pytest.approx(truth[0], rel=1e-6)


def test_cool_subcommand(tmp_path):
    out = str(tmp_path)
    assert run(["cool", "--output", out, "--direction", "red", "--set",
                'grids.time_us={"start":0.0,"stop":5.0,"count":41}']) == 0
    header, data = read_csv(os.path.join(out, "cool.csv"))
    assert header[:3] == ["time_us", "P_g", "P_e"]
    meta = json.load(open(os.path.join(out, "cool.json")))
    assert meta["final_P_g"] == pytest.approx(0.94, abs=0.02)
    assert (tmp_path / "cool.svg").exists()


def test_chevron_subcommand_small_grid(tmp_path):
    out = str(tmp_path)
    assert run(["chevron", "--output", out, "--jobs", "2", "--set",
                'grids.detuning_khz={"start":-400.0,"stop":200.0,"count":5}',
                "--set",
                'grids.time_us={"start":0.0,"stop":1.5,"count":76}',
                "--set", "lambda.rtol=1e-7"]) == 0
    header, data = read_csv(os.path.join(out, "chevron.csv"))
    assert header == ["delta_khz", "time_us", "P_g"]
    assert data.shape == (5 * 76, 3)
    meta = json.load(open(os.path.join(out, "chevron.json")))
    assert meta["fitted_rabi_hz"] == pytest.approx(2.032e6, rel=0.15)
    assert (tmp_path / "chevron.svg").exists()


def test_spectrum_subcommand(tmp_path):
    out = str(tmp_path)
    assert run(["spectrum", "--output", out, "--set",
                'grids.flux=[6.4,6.5,6.6]', "--no-svg"]) == 0
    header, data = read_csv(os.path.join(out, "spectrum.csv"))
    assert header[0] == "phi_ext_f"
    # atom line is lowest at the sweet spot
    f1 = data[:, 1]
    assert f1[1] < f1[0] and f1[1] < f1[2]
    assert f1[1] == pytest.approx(0.5, rel=0.05)


def test_spectroscopy_subcommand_small_grid(tmp_path):
    out = str(tmp_path)
    assert run(["spectroscopy", "--output", out, "--set",
                "grids.flux=[6.48,6.5,6.52]", "--set",
                'grids.drive_freq_ghz={"start":7.29,"stop":7.33,"count":9}',
                "--jobs", "2"]) == 0
    header, data = read_csv(os.path.join(out, "spectroscopy.csv"))
    assert header == ["phi_ext_f", "drive_freq_ghz", "visibility",
                      "transition_ghz", "g3_hz"]
    assert data.shape == (27, 5)
    # V shape: the transition frequency is lowest at the sweet spot
    by_flux = {row[0]: row[3] for row in data}
    assert by_flux[6.5] < by_flux[6.48] and by_flux[6.5] < by_flux[6.52]
    meta = json.load(open(os.path.join(out, "spectroscopy.json")))
    assert meta["peak_visibility"] > 0
    assert (tmp_path / "spectroscopy.svg").exists()


def test_couplings_subcommand(tmp_path):
    out = str(tmp_path)
    assert run(["couplings", "--output", out, "--set",
                "grids.flux=[0.5,2.5,4.5,6.5]", "--no-svg"]) == 0
    header, data = read_csv(os.path.join(out, "couplings.csv"))
    cols = dict(zip(header, data.T))
    assert np.all(np.diff(cols["g3_bare_hz"]) > 0)
    assert cols["ratio_g0e1_over_gf"][-1] == pytest.approx(50.0, rel=1e-9)
    assert cols["g3_eff_hz"][-1] == pytest.approx(0.91e6, rel=0.1)
