"""Command-line orchestration: runs the physics modules over configured
grids and emits CSV + JSON metadata (+ optional SVG) per subcommand.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
``LAMBDA_FORGE_OUTPUT`` overrides the output directory; ``--set a.b=c``
overrides any config key by dotted path.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy

from . import __version__, backend, circuit, config as config_mod, raman
from .errors import ConfigError, LambdaForgeError
from .qcore import Trajectory
from .svgplot import HeatMap, emit_svg

SUBCOMMANDS = ("snail-coeffs", "spectrum", "couplings", "spectroscopy",
               "cool", "chevron", "calibrate")


def _parallel_map(fn, items, jobs):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _write_csv(path, header, rows):
    """17 significant digits so a parsed CSV reproduces the arrays exactly."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{float(v):.17g}" for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_metadata(path, subcommand, cfg, extras, wall_time):
    meta = {
        "subcommand": subcommand,
        "config": cfg,
        "config_sha256": config_mod.config_hash(cfg),
        "versions": {
            "lambda_forge": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "integrator_backend": backend.backend_name(),
        },
        "wall_time_s": wall_time,
    }
    meta.update(extras)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommand implementations; each returns (csv_header, csv_rows, extras,
# svg_writer or None)


def _run_snail_coeffs(cfg, jobs):
    from dataclasses import replace

    from . import snail

    spec = config_mod.build_circuit_spec(cfg)
    flux = config_mod.grid_points(cfg, "flux")

    def one(phi_f):
        phi_s = snail.flux_map(phi_f, spec.area_ratio)
        single = snail.taylor_coeffs(replace(spec.snail, phi_ext_s=phi_s))
        tot = snail.array_coeffs(single, spec.n_array)
        return (phi_f, phi_s, single.phi_min, single.c2, single.c3,
                single.c4, tot.c2, tot.c3, tot.l_s * 1e9)

    rows = _parallel_map(one, flux, jobs)
    header = ["phi_ext_f", "phi_ext_s", "phi_min", "c2", "c3", "c4",
              "c2_tot", "c3_tot", "l_s_tot_nH"]

    def svg(path):
        cols = np.asarray(rows)
        emit_svg((cols[:, 0], [cols[:, 3], cols[:, 4]], ["c2", "c3"]),
                 "line", path, x_label="flux (quanta through atom loop)",
                 y_label="expansion coefficient", title="element coefficients")

    return header, rows, {}, svg


def _run_spectrum(cfg, jobs):
    from .qcore import eigendecompose

    spec = config_mod.build_circuit_spec(cfg)
    flux = config_mod.grid_points(cfg, "flux")
    n_levels = int(cfg["circuit"]["n_levels"])

    def one(phi_f):
        h = circuit.build_hamiltonian(spec.at_flux(float(phi_f)))
        vals, _ = eigendecompose(h, n_levels + 1)
        vals = (vals - vals[0]) / (2.0 * np.pi)
        return (phi_f, *[v / 1e9 for v in vals[1:]])

    rows = _parallel_map(one, flux, jobs)
    header = ["phi_ext_f"] + [f"f_{k}_ghz" for k in range(1, n_levels + 1)]

    def svg(path):
        cols = np.asarray(rows)
        emit_svg((cols[:, 0], [cols[:, k] for k in range(1, cols.shape[1])],
                  header[1:]), "line", path,
                 x_label="flux (quanta through atom loop)",
                 y_label="excitation frequency (GHz)",
                 title="dressed spectrum")

    return header, rows, {}, svg


def _run_couplings(cfg, jobs):
    spec = config_mod.build_circuit_spec(cfg)
    flux = config_mod.grid_points(cfg, "flux")
    alpha_r = float(np.sqrt(cfg["lambda"]["alpha_r_sq"]))
    kappa = cfg["lambda"]["kappa_mhz"] * 1e6

    def one(phi_f):
        s = spec.at_flux(float(phi_f))
        rep = circuit.coupling_coefficients(s, alpha_r=alpha_r)
        coeffs = s.array_coeffs()
        ratio = (rep.coeff_g0e1 / rep.coeff_gf
                 if rep.coeff_gf != 0.0 else float("nan"))
        g3_eps = circuit.g3_over_epsilon(s, kappa)
        return (phi_f, s.snail_at_flux().phi_ext_s, coeffs.c3, rep.g3_bare,
                rep.coeff_gf, rep.coeff_g0e1, ratio,
                rep.matrix_element_phi_r_phi_q, rep.g3_eff, g3_eps)

    rows = _parallel_map(one, flux, jobs)
    header = ["phi_ext_f", "phi_ext_s", "c3_tot", "g3_bare_hz",
              "coeff_gf_hz", "coeff_g0e1_hz", "ratio_g0e1_over_gf",
              "matrix_element", "g3_eff_hz", "g3_over_epsilon"]

    def svg(path):
        cols = np.asarray(rows)
        emit_svg((cols[:, 0], [cols[:, 3] / 1e6], ["g3_bare (MHz)"]),
                 "line", path, x_label="flux (quanta through atom loop)",
                 y_label="bare coupling (MHz)", title="two-mode drive scale")

    return header, rows, {}, svg


def _run_spectroscopy(cfg, jobs):
    spec = config_mod.build_circuit_spec(cfg)
    params = config_mod.build_lambda_params(cfg)
    flux = config_mod.grid_points(cfg, "flux")
    freqs = config_mod.grid_points(cfg, "drive_freq_ghz") * 1e9
    alpha_r = float(np.sqrt(cfg["lambda"]["alpha_r_sq"]))

    def one(phi_f):
        m = raman.spectroscopy_sweep(spec, params, freqs, [phi_f], alpha_r)
        return m.visibility[0], m.transition_hz[0], m.g3_hz[0]

    results = _parallel_map(one, flux, jobs)
    rows = []
    for phi_f, (vis, f_tr, g3) in zip(flux, results):
        for f_d, v in zip(freqs, vis):
            rows.append((phi_f, f_d / 1e9, v, f_tr / 1e9, g3))
    header = ["phi_ext_f", "drive_freq_ghz", "visibility",
              "transition_ghz", "g3_hz"]
    vis2d = np.array([r[0] for r in results])
    extras = {"noise_floor": cfg["lambda"]["noise_floor"],
              "peak_visibility": float(vis2d.max())}

    def svg(path):
        emit_svg(HeatMap(x=freqs / 1e9, y=flux, values=vis2d,
                         x_label="drive frequency (GHz)",
                         y_label="flux (quanta)",
                         title="two-mode line visibility"),
                 "heatmap", path)

    return header, rows, extras, svg


def _run_cool(cfg, jobs, direction):
    params = config_mod.build_lambda_params(cfg)
    lam = cfg["lambda"]
    duration = lam["cool_duration_us"] * 1e-6
    n_times = int(config_mod.grid_points(cfg, "time_us").size)
    params_cool = raman.LambdaParams(
        delta_r=0.0, delta=0.0, chi=params.chi, epsilon=0.0,
        g3=lam["g3_cool_mhz"] * 1e6,
        kappa=params.kappa, gamma_up=params.gamma_up,
        gamma_down=params.gamma_down, dim_r=params.dim_r)
    rho0 = raman.thermal_initial_state(lam["p_g_thermal"], params.dim_r)
    traj = raman.simulate_cooling(params_cool, direction, duration,
                                  rho0=rho0, n_times=n_times,
                                  rtol=lam["rtol"], atol=lam["atol"])
    rows = [(t * 1e6, *vals) for t, vals in zip(traj.times, traj.values)]
    header = ["time_us"] + traj.observables
    extras = {
        "direction": direction,
        "g3_hz": params_cool.g3,
        "final_P_g": float(traj.column("P_g")[-1]),
        "final_P_e": float(traj.column("P_e")[-1]),
        "closed_form": dict(zip(
            ("p_g_red", "p_e_blue"),
            raman.cooled_populations(params_cool.g3, params.kappa,
                                     params.gamma_up, params.gamma_down))),
    }

    def svg(path):
        emit_svg(Trajectory(traj.times * 1e6, traj.observables, traj.values),
                 "line", path, x_label="time (us)", y_label="population",
                 title=f"{direction} pumping")

    return header, rows, extras, svg


def _run_chevron(cfg, jobs):
    params = config_mod.build_lambda_params(cfg)
    lam = cfg["lambda"]
    deltas = config_mod.grid_points(cfg, "detuning_khz") * 1e3
    times = config_mod.grid_points(cfg, "time_us") * 1e-6
    rho0 = raman.thermal_initial_state(lam["p_g_init"], params.dim_r)
    ops = raman._lambda_operators(params.dim_r)
    from dataclasses import replace

    from .qcore import expectation, lindblad_evolve

    def one(delta):
        p = replace(params, delta=float(delta))
        ev = lindblad_evolve(raman.lambda_hamiltonian(p),
                             raman.collapse_channels(p), rho0, times,
                             rtol=lam["rtol"], atol=lam["atol"])
        return np.array([expectation(ops["p_g"], s).real
                         for s in ev.states])

    surface = np.array(_parallel_map(one, deltas, jobs))
    chev = raman.Chevron(deltas=deltas, times=times, p_g=surface)
    freq, center = raman.analyze_chevron(chev)
    nbar = abs(raman.coherent_amplitude(params.epsilon, params.kappa,
                                        params.delta_r)) ** 2
    rows = [(d / 1e3, t * 1e6, surface[i, j])
            for i, d in enumerate(deltas) for j, t in enumerate(times)]
    header = ["delta_khz", "time_us", "P_g"]
    extras = {
        "fitted_rabi_hz": float(freq),
        "predicted_rabi_hz": raman.raman_rabi_rate(
            params.g3, params.epsilon, params.delta_r),
        "raw_center_hz": float(center),
        "drive_induced_offset_hz": float(-center - params.chi * nbar),
        "predicted_stark_hz": raman.stark_shift(params.g3, params.delta_r),
        "direct_drive_light_shift_hz": float(params.chi * nbar),
    }

    def svg(path):
        emit_svg(HeatMap(x=times * 1e6, y=deltas / 1e3, values=surface,
                         x_label="time (us)", y_label="detuning (kHz)",
                         title="stimulated Raman chevron: P_g"),
                 "heatmap", path)

    return header, rows, extras, svg


def _run_calibrate(cfg, jobs, amplitudes):
    lam = cfg["lambda"]
    kappa = lam["kappa_mhz"] * 1e6
    gamma_1 = 1.0 / (lam["t1_us"] * 1e-6)
    a_th, a_red, a_blue = amplitudes
    generated = a_th is None or a_red is None or a_blue is None
    if generated:
        a_th, a_red, a_blue = raman.forward_amplitudes(
            1.0, 0.87e6, lam["p_g_thermal"], kappa, gamma_1)
    res = raman.calibrate(a_th, a_red, a_blue, kappa, gamma_1)
    header = ["a_th", "a_red", "a_blue", "a_half_distance", "g3_hz",
              "p_g_th", "p_g_red", "p_e_blue", "temperature_mk",
              "residual", "iterations"]
    rows = [(a_th, a_red, a_blue, res.a_half_distance, res.g3, res.p_g_th,
             res.p_g_red, res.p_e_blue, res.temperature_k * 1e3,
             res.residual, res.iterations)]
    extras = {"inputs_forward_generated": generated,
              "g3_mhz": res.g3 / 1e6,
              "temperature_mk": res.temperature_k * 1e3}
    return header, rows, extras, None


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lambda-forge",
        description="flux-tunable atom / antenna resonator simulations")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="dotted-path config override, e.g. "
                            "--set lambda.g3-mhz=3.0")
        p.add_argument("--output", default=None, help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for grid evaluation")
        p.add_argument("--no-svg", action="store_true")
        if name == "cool":
            p.add_argument("--direction", choices=("red", "blue"),
                           default="red")
        if name == "calibrate":
            p.add_argument("--a-th", type=float, default=None)
            p.add_argument("--a-red", type=float, default=None)
            p.add_argument("--a-blue", type=float, default=None)
    return parser


def _collect_dotted_flags(extras):
    """Accept direct dotted flags, e.g. ``--lambda.g3-mhz 3.0`` or
    ``--grids.flux=[0.5,6.5]``, as sugar for --set overrides."""
    overrides = []
    i = 0
    while i < len(extras):
        token = extras[i]
        if not (token.startswith("--") and "." in token.split("=")[0]):
            raise ConfigError(f"unrecognized argument: {token}")
        body = token[2:]
        if "=" in body:
            overrides.append(body)
            i += 1
        else:
            if i + 1 >= len(extras):
                raise ConfigError(f"flag {token} needs a value")
            overrides.append(f"{body}={extras[i + 1]}")
            i += 2
    return overrides


def main(argv=None):
    args, extras = build_parser().parse_known_args(argv)
    t0 = time.monotonic()
    try:
        overrides = list(args.set) + _collect_dotted_flags(extras)
        cfg = config_mod.load_config(args.config, overrides)
        out_dir = (args.output or os.environ.get("LAMBDA_FORGE_OUTPUT")
                   or cfg["output"]["directory"])
        os.makedirs(out_dir, exist_ok=True)

        name = args.subcommand
        if name == "snail-coeffs":
            result = _run_snail_coeffs(cfg, args.jobs)
        elif name == "spectrum":
            result = _run_spectrum(cfg, args.jobs)
        elif name == "couplings":
            result = _run_couplings(cfg, args.jobs)
        elif name == "spectroscopy":
            result = _run_spectroscopy(cfg, args.jobs)
        elif name == "cool":
            result = _run_cool(cfg, args.jobs, args.direction)
        elif name == "chevron":
            result = _run_chevron(cfg, args.jobs)
        else:
            result = _run_calibrate(cfg, args.jobs,
                                    (args.a_th, args.a_red, args.a_blue))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LambdaForgeError as exc:
        print(f"numerical failure in {args.subcommand}: {exc}",
              file=sys.stderr)
        return 3

    header, rows, extras, svg_writer = result
    base = os.path.join(out_dir, args.subcommand)
    _write_csv(base + ".csv", header, rows)
    formats = cfg["output"]["formats"]
    if svg_writer is not None and "svg" in formats and not args.no_svg:
        svg_writer(base + ".svg")
    _write_metadata(base + ".json", args.subcommand, cfg, extras,
                    time.monotonic() - t0)
    print(f"{args.subcommand}: wrote {base}.csv "
          f"({len(rows)} rows) in {time.monotonic() - t0:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
