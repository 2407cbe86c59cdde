"""Raman physics through the resonator: closed-form cooling model, the
three-amplitude calibration solver, and full master-equation simulations of
cooling, stimulated Raman chevrons, and spectroscopy visibility.

Frames and conventions
----------------------
The rotating-frame Hamiltonian driven by one direct resonator tone (detuned
``delta_r`` below the resonator) and one two-mode tone (detuned
``delta_r + delta`` below the g0-e1 transition) is

    H / hbar = 2 pi [ delta_r a'a + (delta/2) sz + (chi/2) a'a sz
                      + epsilon (a + a') + g3 (a s- + a' s+) ]

with every symbol in Hz.  The ``a' s+`` form raises both modes together, so
it drives g0 <-> e1; its beam-splitter partner ``a s+ + a' s-`` drives
e0 <-> g1 with the same strength and is used by the red cooling tone.
Collapse channels are resonator decay ``kappa`` plus the atom's thermal
rates ``gamma_down`` (e -> g) and ``gamma_up`` (g -> e).
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import circuit as circuit_mod
from . import qcore
from .errors import (CalibrationError, ContractViolationError,
                     DegenerateDriveError, OutOfRegimeError)
from .units import H_PLANCK, K_BOLTZMANN, TWO_PI

DEFAULT_F_Q_HZ = 500.0e6


@dataclass(frozen=True)
class LambdaParams:
    """Rotating-frame constants, frequencies in Hz, bath rates in 1/s."""

    delta_r: float = 150.0e6
    delta: float = 0.0
    chi: float = 0.7e6
    epsilon: float = 50.8e6
    g3: float = 3.0e6
    kappa: float = 16.8e6
    gamma_up: float = 0.0
    gamma_down: float = 0.0
    dim_r: int = 6

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if self.gamma_up < 0.0 or self.gamma_down < 0.0:
            raise ValueError("bath rates must be non-negative")
        if self.dim_r < 4:
            raise ValueError("dim_r must be >= 4")

    @property
    def gamma_1(self):
        return self.gamma_up + self.gamma_down


@dataclass(frozen=True)
class CalibrationResult:
    """Output of the three-amplitude calibration."""

    a_half_distance: float
    g3: float
    p_g_th: float
    p_g_red: float
    p_e_blue: float
    temperature_k: float
    residual: float
    iterations: int


# ---------------------------------------------------------------------------
# closed forms


def coherent_amplitude(epsilon, kappa, delta_r):
    """Steady displacement of a driven damped resonator,
    epsilon / (i kappa/2 - delta_r); dimensionless, all inputs in Hz."""
    denom = 1j * kappa / 2.0 - delta_r
    if denom == 0:
        raise DegenerateDriveError(
            "kappa and delta_r cannot both be zero")
    return epsilon / denom


def cooling_rate(g3, kappa):
    """Pump-and-decay rate 4 g3^2 / kappa of the Raman cycle, in 1/s.

    Valid in the adiabatic regime g3 << kappa; enforced as g3 < kappa / 4.
    """
    if not g3 < kappa / 4.0:
        raise OutOfRegimeError(
            f"adiabatic elimination needs g3 < kappa/4; "
            f"got g3/kappa = {g3 / kappa:.3f}")
    return TWO_PI * 4.0 * g3**2 / kappa


def _pumped_populations(g_cool, gamma_up, gamma_down):
    denom = g_cool + gamma_down + gamma_up
    if denom == 0.0:
        raise ContractViolationError("all rates zero; populations undefined")
    return ((g_cool + gamma_down) / denom, (g_cool + gamma_up) / denom)


def cooled_populations(g3, kappa, gamma_up, gamma_down):
    """(ground population after red cooling, excited population after blue).

    The pumped cycle adds its rate to the helpful bath rate:
        p_g_red = (G + gamma_down) / (G + gamma_down + gamma_up)
        p_e_blue = (G + gamma_up) / (G + gamma_down + gamma_up)
    with G = 4 g3^2 / kappa converted to 1/s.
    """
    if gamma_up < 0.0 or gamma_down < 0.0:
        raise ContractViolationError("bath rates must be non-negative")
    g_cool = cooling_rate(g3, kappa) if g3 > 0.0 else 0.0
    return _pumped_populations(g_cool, gamma_up, gamma_down)


def split_rates(gamma_1, p_g_th):
    """(gamma_up, gamma_down) from the total rate and the thermal ground
    population: detailed balance gives gamma_down = p_g_th * gamma_1."""
    if not 0.0 < p_g_th < 1.0:
        raise ContractViolationError("p_g_th must be inside (0, 1)")
    return (1.0 - p_g_th) * gamma_1, p_g_th * gamma_1


def stark_shift(g3, delta_r):
    """Light shift g3^2 / delta_r of the two-mode line, Hz."""
    if delta_r == 0.0:
        raise DegenerateDriveError("delta_r must be nonzero")
    return g3**2 / delta_r


def raman_rabi_rate(g3, epsilon, delta_r):
    """Effective atom Rabi rate 2 g3 epsilon / delta_r of the two-tone
    process through the virtual resonator excitation, Hz."""
    if delta_r == 0.0:
        raise DegenerateDriveError("delta_r must be nonzero")
    return 2.0 * g3 * epsilon / delta_r


def temperature_from_ground_population(p_g, f_q_hz=DEFAULT_F_Q_HZ):
    """Two-level Boltzmann temperature for a given ground population."""
    if not 0.5 < p_g < 1.0:
        raise ContractViolationError(
            f"p_g={p_g} outside (0.5, 1); temperature undefined or negative")
    return H_PLANCK * f_q_hz / (K_BOLTZMANN * math.log(p_g / (1.0 - p_g)))


def ground_population_from_temperature(t_k, f_q_hz=DEFAULT_F_Q_HZ):
    x = math.exp(H_PLANCK * f_q_hz / (K_BOLTZMANN * t_k))
    return x / (1.0 + x)


# ---------------------------------------------------------------------------
# calibration solver


def forward_amplitudes(a_scale, g3, p_g_th, kappa, gamma_1):
    """Oscillation amplitudes (a_th, a_red, a_blue) predicted for a readout
    half-distance ``a_scale`` and the cooling model above.

    Evaluates the model formula without the adiabatic-regime gate so the
    Newton solver can traverse unphysical iterates; physical validity of a
    final answer is enforced in :func:`calibrate`.
    """
    gamma_up, gamma_down = split_rates(gamma_1, p_g_th)
    g_cool = TWO_PI * 4.0 * g3**2 / kappa
    p_red, p_blue = _pumped_populations(g_cool, gamma_up, gamma_down)
    return (a_scale * (2.0 * p_g_th - 1.0),
            a_scale * (2.0 * p_red - 1.0),
            a_scale * (2.0 * p_blue - 1.0))


def _calibration_residual(x, data, kappa, gamma_1):
    a_scale, g3, p = x
    model = forward_amplitudes(a_scale, g3, p, kappa, gamma_1)
    return np.array(model) - data


def calibrate(a_th, a_red, a_blue, kappa, gamma_1, f_q_hz=DEFAULT_F_Q_HZ):
    """Invert three measured oscillation amplitudes into
    (readout scale, g3, thermal ground population) by damped Newton.

    Requires a_red, a_blue > a_th > 0: cooling must have helped, and the
    thermal state must not be fully mixed.  The temperature reported is the
    two-level Boltzmann temperature of the recovered thermal population.
    """
    if not (a_th > 0.0 and a_red > a_th and a_blue > a_th):
        raise ContractViolationError(
            "expected a_red, a_blue > a_th > 0 "
            f"(got a_th={a_th}, a_red={a_red}, a_blue={a_blue})")
    if kappa <= 0.0 or gamma_1 <= 0.0:
        raise ContractViolationError("kappa and gamma_1 must be positive")

    data = np.array([a_th, a_red, a_blue], dtype=float)
    scale = np.linalg.norm(data)
    guesses = [
        np.array([a_red, kappa / 20.0, 0.5 + a_th / (2.0 * a_red)]),
        np.array([a_red, kappa / 100.0, 0.55]),
        np.array([2.0 * a_red, kappa / 40.0, 0.7]),
    ]

    last_residual = math.inf
    for guess in guesses:
        x = guess.copy()
        converged = False
        for iteration in range(200):
            f = _calibration_residual(x, data, kappa, gamma_1)
            res = np.linalg.norm(f) / scale
            if res < 1e-10:
                converged = True
                break
            # numerical Jacobian, relative central differences
            jac = np.empty((3, 3))
            for k in range(3):
                h = 1e-7 * max(abs(x[k]), 1e-12)
                xp, xm = x.copy(), x.copy()
                xp[k] += h
                xm[k] -= h
                xm[2] = min(max(xm[2], 1e-9), 1.0 - 1e-9)
                xp[2] = min(max(xp[2], 1e-9), 1.0 - 1e-9)
                jac[:, k] = (_calibration_residual(xp, data, kappa, gamma_1)
                             - _calibration_residual(xm, data, kappa,
                                                     gamma_1)) / (xp[k] - xm[k])
            try:
                step = np.linalg.solve(jac, f)
            except np.linalg.LinAlgError:
                break
            # damping: halve until the residual drops
            lam = 1.0
            for _ in range(30):
                x_new = x - lam * step
                x_new[2] = min(max(x_new[2], 1e-9), 1.0 - 1e-9)
                x_new[1] = abs(x_new[1])
                f_new = _calibration_residual(x_new, data, kappa, gamma_1)
                if np.linalg.norm(f_new) < np.linalg.norm(f):
                    break
                lam *= 0.5
            x = x_new
        last_residual = min(last_residual, res)
        a_scale, g3, p = x
        physical = (converged and a_scale > 0.0 and g3 >= 0.0
                    and 0.5 < p < 1.0 and g3 < kappa / 4.0)
        if physical:
            gamma_up, gamma_down = split_rates(gamma_1, p)
            p_red, p_blue = cooled_populations(g3, kappa, gamma_up,
                                               gamma_down)
            return CalibrationResult(
                a_half_distance=float(a_scale),
                g3=float(g3),
                p_g_th=float(p),
                p_g_red=float(p_red),
                p_e_blue=float(p_blue),
                temperature_k=temperature_from_ground_population(p, f_q_hz),
                residual=float(res),
                iterations=iteration + 1,
            )
    raise CalibrationError(
        f"Newton iteration found no physical root "
        f"(best relative residual {last_residual:.3e})")


# ---------------------------------------------------------------------------
# rotating-frame Hamiltonians and simulations


def _lambda_operators(dim_r):
    a = qcore.annihilation(dim_r)
    eye_r = qcore.identity(dim_r)
    eye_q = qcore.identity(2)
    return {
        "a": qcore.tensor(a, eye_q),
        "n": qcore.tensor(qcore.number(dim_r), eye_q),
        "sz": qcore.tensor(eye_r, qcore.sigma_z()),
        "sm": qcore.tensor(eye_r, qcore.sigma_minus()),
        "sp": qcore.tensor(eye_r, qcore.sigma_plus()),
        "n_sz": qcore.tensor(qcore.number(dim_r), qcore.sigma_z()),
        "p_g": qcore.tensor(eye_r, qcore.projector(2, 0)),
        "p_e": qcore.tensor(eye_r, qcore.projector(2, 1)),
        "p_vac": qcore.tensor(qcore.projector(dim_r, 0), eye_q),
    }


def lambda_hamiltonian(params):
    """Rotating-frame two-tone Hamiltonian (rad/s) on the
    (dim_r x 2) product space; see the module docstring for the five terms."""
    ops = _lambda_operators(params.dim_r)
    x = ops["a"] + ops["a"].dag()
    pair = ops["a"] @ ops["sm"]          # lowers both modes
    coupling = pair + pair.dag()
    h_hz = (params.delta_r * ops["n"] + 0.5 * params.delta * ops["sz"]
            + 0.5 * params.chi * ops["n_sz"] + params.epsilon * x
            + params.g3 * coupling)
    return TWO_PI * h_hz


def collapse_channels(params):
    """[(operator, rate 1/s)] for resonator decay and the atom bath."""
    ops = _lambda_operators(params.dim_r)
    return [
        (ops["a"], TWO_PI * params.kappa),
        (ops["sm"], params.gamma_down),
        (ops["sp"], params.gamma_up),
    ]


def thermal_initial_state(p_g, dim_r):
    """Atom thermal mixture tensored with resonator vacuum."""
    rho_q = qcore.QState(np.diag([p_g, 1.0 - p_g]).astype(complex))
    return qcore.product_state(qcore.fock_state(dim_r, 0), rho_q)


@dataclass(frozen=True)
class Chevron:
    """Ground population surface over (two-photon detuning, time)."""

    deltas: np.ndarray
    times: np.ndarray
    p_g: np.ndarray   # shape (len(deltas), len(times))


def simulate_raman_rabi(params, delta_grid, times, rho0=None,
                        rtol=1e-8, atol=1e-10):
    """Master-equation chevron: evolve the two-tone Hamiltonian at each
    two-photon detuning and record the atom ground population."""
    deltas = np.asarray(delta_grid, dtype=float)
    times = np.asarray(times, dtype=float)
    if rho0 is None:
        rho0 = thermal_initial_state(0.94, params.dim_r)
    ops = _lambda_operators(params.dim_r)
    surface = np.empty((deltas.size, times.size))
    for i, delta in enumerate(deltas):
        p = replace(params, delta=float(delta))
        ev = qcore.lindblad_evolve(lambda_hamiltonian(p),
                                   collapse_channels(p), rho0, times,
                                   rtol=rtol, atol=atol)
        surface[i] = [qcore.expectation(ops["p_g"], s).real
                      for s in ev.states]
    return Chevron(deltas=deltas, times=times, p_g=surface)


def simulate_cooling(params, direction, duration, rho0=None, n_times=201,
                     rtol=1e-8, atol=1e-10):
    """Resonant one-tone pumping of either forbidden line.

    'red' couples e0 <-> g1 (cools to the ground state), 'blue' couples
    g0 <-> e1 (pumps to the excited state); both at their resonance
    condition delta_r = delta = 0 with the dispersive term kept.
    Returns a Trajectory with P_g, P_e and the resonator occupation.
    """
    if direction not in ("red", "blue"):
        raise ValueError(f"direction must be 'red' or 'blue', got {direction!r}")
    ops = _lambda_operators(params.dim_r)
    if direction == "blue":
        pair = ops["a"] @ ops["sm"]
    else:
        pair = ops["a"] @ ops["sp"]
    coupling = pair + pair.dag()
    h = TWO_PI * (0.5 * params.chi * ops["n_sz"] + params.g3 * coupling)
    if rho0 is None:
        rho0 = thermal_initial_state(0.6, params.dim_r)
    times = np.linspace(0.0, duration, n_times)
    ev = qcore.lindblad_evolve(h, collapse_channels(params), rho0, times,
                               rtol=rtol, atol=atol)
    return ev.expect({"P_g": ops["p_g"], "P_e": ops["p_e"],
                      "n_r": ops["n"]})


# ---------------------------------------------------------------------------
# chevron analysis


def fit_oscillation_frequency(times, signal):
    """Dominant oscillation frequency by discrete Fourier peak with
    quadratic interpolation, on the mean-subtracted uniformly sampled signal."""
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    dt = times[1] - times[0]
    if not np.allclose(np.diff(times), dt, rtol=1e-9):
        raise ContractViolationError("uniform time grid required")
    spec = np.abs(np.fft.rfft(signal - signal.mean())) ** 2
    freqs = np.fft.rfftfreq(signal.size, dt)
    k = int(np.argmax(spec[1:])) + 1
    if 1 <= k < spec.size - 1:
        # quadratic peak interpolation on log power
        y0, y1, y2 = np.log(np.maximum(spec[k - 1:k + 2], 1e-300))
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom != 0.0 else 0.0
        shift = min(max(shift, -0.5), 0.5)
        return freqs[k] + shift * (freqs[1] - freqs[0])
    return freqs[k]


def fit_chevron_center(deltas, contrast):
    """Detuning of maximum oscillation contrast, refined by a parabola fit
    through the three points around the grid maximum."""
    deltas = np.asarray(deltas, dtype=float)
    contrast = np.asarray(contrast, dtype=float)
    k = int(np.argmax(contrast))
    if 0 < k < deltas.size - 1:
        y0, y1, y2 = contrast[k - 1:k + 2]
        denom = y0 - 2.0 * y1 + y2
        if denom != 0.0:
            shift = 0.5 * (y0 - y2) / denom
            shift = min(max(shift, -1.0), 1.0)
            return deltas[k] + shift * (deltas[k + 1] - deltas[k])
    return deltas[k]


def analyze_chevron(chevron):
    """(fitted Rabi frequency at the contrast maximum, center detuning)."""
    contrast = chevron.p_g.max(axis=1) - chevron.p_g.min(axis=1)
    center = fit_chevron_center(chevron.deltas, contrast)
    k = int(np.argmin(np.abs(chevron.deltas - center)))
    freq = fit_oscillation_frequency(chevron.times, chevron.p_g[k])
    return freq, center


# ---------------------------------------------------------------------------
# spectroscopy proxy


@dataclass(frozen=True)
class SpectroscopyMap:
    """Steady-state visibility surface over (flux, drive frequency)."""

    flux: np.ndarray
    drive_freq_hz: np.ndarray
    visibility: np.ndarray        # shape (len(flux), len(drive))
    transition_hz: np.ndarray     # two-mode transition frequency per flux
    g3_hz: np.ndarray             # drive strength per flux


def spectroscopy_sweep(spec, params, drive_freq_grid, flux_grid,
                       alpha_r_abs):
    """Two-tone spectroscopy proxy for the forbidden two-mode line.

    For each flux point the circuit model supplies the dressed g0 -> e1
    transition frequency and the drive strength g3 (bare coupling times the
    fixed resonator amplitude).  For each pump frequency the driven damped
    system is solved for its steady state in the pump frame, and the
    visibility proxy is the probability that the resonator is excited.
    """
    flux = np.asarray(flux_grid, dtype=float)
    freqs = np.asarray(drive_freq_grid, dtype=float)
    if flux.size == 0 or freqs.size == 0:
        raise ContractViolationError("grids must be non-empty")

    ops = _lambda_operators(params.dim_r)
    pair = ops["a"] @ ops["sm"]
    coupling = pair + pair.dag()
    channels = collapse_channels(params)
    excited = qcore.tensor(qcore.identity(params.dim_r),
                           qcore.identity(2)) - ops["p_vac"]

    vis = np.empty((flux.size, freqs.size))
    f_tr = np.empty(flux.size)
    g3s = np.empty(flux.size)
    for i, phi in enumerate(flux):
        spec_i = spec.at_flux(float(phi))
        ds = circuit_mod.DressedSystem(spec_i)
        e0 = ds.energies_hz[ds.dressed_index(0, 0)]
        f_tr[i] = ds.energies_hz[ds.dressed_index(1, 1)] - e0
        g3s[i] = circuit_mod.effective_g3(spec_i, alpha_r_abs)
        for j, f_d in enumerate(freqs):
            detuning = f_d - f_tr[i]
            h = TWO_PI * (-0.5 * detuning * ops["sz"]
                          + 0.5 * params.chi * ops["n_sz"]
                          + g3s[i] * coupling)
            rho_ss = qcore.steady_state(h, channels)
            vis[i, j] = qcore.expectation(excited, rho_ss).real
    return SpectroscopyMap(flux=flux, drive_freq_hz=freqs, visibility=vis,
                           transition_hz=f_tr, g3_hz=g3s)
