"""Two-mode circuit: flux-tunable atom inductively coupled to its antenna
resonator through a nonlinear element array.

Model
-----
The atom is a small junction (``ej_f``, ``ec_f``) shunted by a large linear
inductance ``l_q``; the resonator is ``c_r`` with unshared inductance ``l_r``
in series with the shared element array.  Both fluctuation coordinates are
expanded in the harmonic basis of their own linearized (L, C) mode:

    H_q / h = 4 ec_f n_q^2 + (1/2) E_Lq phi_q^2 - ej_f cos(phi_q + 2 pi Phi_f)
    H_r / h = f_r a'a,        f_r = 1 / (2 pi sqrt((l_r + l_s_tot) c_r))

where phi_q is the zero-mean phase fluctuation across the small junction
(the external flux enters the cosine after shifting away the static offset,
which leaves the spectrum unchanged and keeps the basis usable at any flux).
The shared branch adds a linear coupling J phi_q phi_r with
J = phi0^2 l_s_tot / (l_q (l_r + l_s_tot) h), plus the cubic mixing term

    H_3 / h = ej_s c3_tot (beta_q phi_q + beta_r phi_r)^3,
    beta_q = l_r l_s_tot / (l_q (l_r + l_s_tot)),
    beta_r = l_s_tot / (l_r + l_s_tot),

expanded into its four monomials.  The phi_q^2 phi_r and phi_q phi_r^2
monomial prefactors are the drive channels for the parity-forbidden
single-mode and two-mode transitions respectively.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import snail as snail_mod
from .errors import (ContractViolationError, LabelingError, TruncationError)
from .qcore import QOperator, eigendecompose, identity, tensor
from .units import (TWO_PI, charging_energy_hz, inductive_energy_hz)

_QUBIT_LETTERS = "gefh"


@dataclass(frozen=True)
class CircuitSpec:
    """Full two-mode device.

    ej_f, ec_f : small-junction Josephson / charging energies, Hz
    l_q        : shunt inductance of the atom, H
    l_r        : unshared resonator inductance, H
    c_r        : resonator capacitance, F
    snail      : single coupling element (its phi_ext_s field is ignored;
                 the loop flux is derived from phi_ext_f / area_ratio)
    n_array    : elements in the shared array
    area_ratio : atom-loop to element-loop area ratio
    phi_ext_f  : external flux through the atom loop, units of the flux quantum
    dim_q, dim_r : basis truncations
    """

    ej_f: float
    ec_f: float
    l_q: float
    l_r: float
    c_r: float
    snail: snail_mod.SnailSpec
    n_array: int
    area_ratio: float
    phi_ext_f: float
    dim_q: int
    dim_r: int

    def __post_init__(self):
        if self.dim_q < 20:
            raise ValueError(f"dim_q must be >= 20, got {self.dim_q}")
        if self.dim_r < 3:
            raise ValueError(f"dim_r must be >= 3, got {self.dim_r}")
        for name in ("ej_f", "ec_f", "l_q", "c_r"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.l_r < 0.0:
            raise ValueError("l_r must be non-negative")
        l_tot = self.array_coeffs().l_s
        if self.l_q <= 10.0 * (self.l_r + l_tot):
            raise ValueError(
                f"shunt inductance must dominate: l_q={self.l_q:.3e} H is not "
                f"> 10 * (l_r + l_s_tot) = {10 * (self.l_r + l_tot):.3e} H")

    def at_flux(self, phi_ext_f):
        return replace(self, phi_ext_f=phi_ext_f)

    def snail_at_flux(self):
        phi_s = snail_mod.flux_map(self.phi_ext_f, self.area_ratio)
        return replace(self.snail, phi_ext_s=phi_s)

    def array_coeffs(self):
        """Expansion coefficients of the whole shared array at this flux."""
        single = snail_mod.taylor_coeffs(self.snail_at_flux())
        return snail_mod.array_coeffs(single, self.n_array)


@dataclass(frozen=True)
class CouplingReport:
    """Three-wave coupling strengths at one flux point (all in Hz except the
    dimensionless matrix element)."""

    g3_bare: float
    coeff_gf: float
    coeff_g0e1: float
    matrix_element_phi_r_phi_q: float
    g3_eff: float = None


# ---------------------------------------------------------------------------
# single-mode building blocks


def _mode_zpf(e_c_hz, e_l_hz):
    """(frequency, phase zero-point fluctuation) of 4Ec n^2 + El phi^2 / 2."""
    freq = math.sqrt(8.0 * e_c_hz * e_l_hz)
    phi_zpf = (2.0 * e_c_hz / e_l_hz) ** 0.25
    return freq, phi_zpf


def qubit_mode_operators(spec):
    """(phi_q, n_q) fluctuation operators of the linearized atom mode,
    dim_q x dim_q, dimensionless."""
    e_l = inductive_energy_hz(spec.l_q)
    _, phi_zpf = _mode_zpf(spec.ec_f, e_l)
    a = np.diag(np.sqrt(np.arange(1, spec.dim_q)), 1)
    phi = phi_zpf * (a + a.T)
    n = 1j / (2.0 * phi_zpf) * (a.T - a)
    return phi, n


def resonator_frequency_hz(spec):
    """Bare resonator frequency from c_r and the series inductance
    l_r + l_s_tot(flux)."""
    l_tot = spec.l_r + spec.array_coeffs().l_s
    return 1.0 / (TWO_PI * math.sqrt(l_tot * spec.c_r))


def resonator_phi_zpf(spec):
    l_tot = spec.l_r + spec.array_coeffs().l_s
    e_l = inductive_energy_hz(l_tot)
    e_c = charging_energy_hz(spec.c_r)
    return _mode_zpf(e_c, e_l)[1]


def fluxonium_hamiltonian_hz(spec):
    """Atom-mode Hamiltonian matrix (Hz) in the harmonic basis."""
    e_l = inductive_energy_hz(spec.l_q)
    phi, n = qubit_mode_operators(spec)
    # cos(phi + offset) through the spectral decomposition of phi
    vals, vecs = np.linalg.eigh(phi)
    offset = TWO_PI * spec.phi_ext_f
    cos_shifted = (vecs * np.cos(vals + offset)) @ vecs.conj().T
    h = 4.0 * spec.ec_f * (n @ n) + 0.5 * e_l * (phi @ phi) \
        - spec.ej_f * cos_shifted
    return 0.5 * (h + h.conj().T)


def fluxonium_levels(spec, k=6):
    """Lowest k atom-mode eigenfrequencies (Hz, ground-referenced) and
    eigenvectors."""
    h = QOperator(fluxonium_hamiltonian_hz(spec))
    vals, vecs = eigendecompose(h, k)
    return vals - vals[0], vecs


# ---------------------------------------------------------------------------
# full Hamiltonian


def phi_q_operator(spec):
    """Atom phase fluctuation on the product space (resonator x atom)."""
    phi, _ = qubit_mode_operators(spec)
    return tensor(identity(spec.dim_r), QOperator(phi))


def phi_r_operator(spec):
    a = np.diag(np.sqrt(np.arange(1, spec.dim_r)), 1)
    phi_r = resonator_phi_zpf(spec) * (a + a.T)
    return tensor(QOperator(phi_r), identity(spec.dim_q))


def phi_rq_operator(spec):
    """The two-mode monomial phi_r phi_q on the product space."""
    return phi_r_operator(spec) @ phi_q_operator(spec)


def _coupling_prefactors(spec, coeffs=None):
    coeffs = coeffs if coeffs is not None else spec.array_coeffs()
    l_s = coeffs.l_s
    beta_q = spec.l_r * l_s / (spec.l_q * (spec.l_r + l_s))
    beta_r = l_s / (spec.l_r + l_s)
    return coeffs, beta_q, beta_r


def build_hamiltonian(spec, include_linear=True, include_three_wave=True,
                      snail_coeffs=None, check_truncation=True):
    """Full circuit Hamiltonian as a QOperator in rad/s on the
    (dim_r x dim_q) product space, resonator factor first.

    ``snail_coeffs`` pins the array expansion (useful to vary the atom flux
    with the element coefficients frozen); the keyword flags switch off the
    linear and cubic coupling terms for decoupled-limit checks.
    """
    coeffs, beta_q, beta_r = _coupling_prefactors(spec, snail_coeffs)
    l_s = coeffs.l_s
    dim_r, dim_q = spec.dim_r, spec.dim_q

    h_q = fluxonium_hamiltonian_hz(spec)
    a = np.diag(np.sqrt(np.arange(1, dim_r)), 1)
    l_tot_res = spec.l_r + l_s
    f_r = 1.0 / (TWO_PI * math.sqrt(l_tot_res * spec.c_r))
    e_c_r = charging_energy_hz(spec.c_r)
    e_l_r = inductive_energy_hz(l_tot_res)
    _, phi_zpf_r = _mode_zpf(e_c_r, e_l_r)

    eye_r = np.eye(dim_r)
    eye_q = np.eye(dim_q)
    h = np.kron(eye_r, h_q) + np.kron(f_r * (a.T @ a), eye_q)

    phi_q, _ = qubit_mode_operators(spec)
    phi_r = phi_zpf_r * (a + a.T)

    if include_linear:
        j_hz = inductive_energy_hz(spec.l_q) * l_s / (spec.l_r + l_s)
        h = h + j_hz * np.kron(phi_r, phi_q)

    if include_three_wave:
        pref = spec.snail.ej * coeffs.c3
        q1 = beta_q * phi_q
        r1 = beta_r * phi_r
        q2, q3 = q1 @ q1, q1 @ q1 @ q1
        r2, r3 = r1 @ r1, r1 @ r1 @ r1
        h = h + pref * (np.kron(eye_r, q3) + 3.0 * np.kron(r1, q2)
                        + 3.0 * np.kron(r2, q1) + np.kron(r3, eye_q))

    op = QOperator(TWO_PI * 0.5 * (h + h.conj().T), (dim_r, dim_q))

    if check_truncation:
        _, vecs = eigendecompose(op, 1)
        ground = vecs[:, 0].reshape(dim_r, dim_q)
        top_r = int(math.floor(0.9 * dim_r))
        top_q = int(math.floor(0.9 * dim_q))
        leak = (np.sum(np.abs(ground[top_r:, :]) ** 2)
                + np.sum(np.abs(ground[:, top_q:]) ** 2))
        if leak > 1e-6:
            raise TruncationError(
                f"ground state leaks {leak:.2e} into the top 10% of the "
                f"basis (dim_r={dim_r}, dim_q={dim_q}); increase truncation")
    return op


# ---------------------------------------------------------------------------
# dressed spectrum, labeling, matrix elements


def _parse_label(label):
    """'g' -> ('g', None); 'e1' / ('e', 1) -> ('e', 1)."""
    if isinstance(label, str):
        s = label.strip().lower()
        if len(s) == 1:
            return s, None
        return s[0], int(s[1:])
    s, n = label
    return str(s).strip().lower(), int(n)


def _qubit_index(letter):
    if letter in _QUBIT_LETTERS:
        return _QUBIT_LETTERS.index(letter)
    raise LabelingError(f"unknown atom level letter {letter!r}")


class DressedSystem:
    """Joint eigensystem with maximum-overlap labels against the bare
    product basis (atom eigenstates x Fock states)."""

    def __init__(self, spec, include_three_wave=True):
        self.spec = spec
        h = build_hamiltonian(spec, include_three_wave=include_three_wave)
        n_lev = min(spec.dim_r * spec.dim_q, 40)
        self.energies_hz, self.vectors = [
            x for x in eigendecompose(h, n_lev)]
        self.energies_hz = self.energies_hz / TWO_PI
        _, self.qubit_vecs = fluxonium_levels(
            spec, k=min(spec.dim_q, 8))

    def dressed_index(self, qubit_level, n_res):
        """Dressed eigenstate matching bare |n_res> x |qubit_level>."""
        if not 0 <= n_res < self.spec.dim_r:
            raise LabelingError(
                f"photon index {n_res} outside the truncation "
                f"(dim_r={self.spec.dim_r})")
        if not 0 <= qubit_level < self.qubit_vecs.shape[1]:
            raise LabelingError(f"atom level {qubit_level} not resolved")
        bare = np.zeros(self.spec.dim_r * self.spec.dim_q, dtype=complex)
        col = self.qubit_vecs[:, qubit_level]
        start = n_res * self.spec.dim_q
        bare[start:start + self.spec.dim_q] = col
        overlaps = np.abs(self.vectors.conj().T @ bare) ** 2
        idx = int(np.argmax(overlaps))
        if overlaps[idx] < 0.5:
            raise LabelingError(
                f"no dressed state overlaps bare (level {qubit_level}, "
                f"n={n_res}) by >= 0.5 (best {overlaps[idx]:.3f})")
        return idx

    def dressed_vector(self, qubit_level, n_res):
        return self.vectors[:, self.dressed_index(qubit_level, n_res)]

    def transition_hz(self, lab_from, lab_to):
        (s0, n0), (s1, n1) = _parse_label(lab_from), _parse_label(lab_to)
        i = self.dressed_index(_qubit_index(s0), n0 or 0)
        j = self.dressed_index(_qubit_index(s1), n1 or 0)
        return self.energies_hz[j] - self.energies_hz[i]

    def product_vector(self, qubit_level, n_res):
        bare = np.zeros(self.spec.dim_r * self.spec.dim_q, dtype=complex)
        start = n_res * self.spec.dim_q
        bare[start:start + self.spec.dim_q] = self.qubit_vecs[:, qubit_level]
        return bare


def matrix_element(op, label_i, label_j, spec, basis="dressed"):
    """<i| op |j> between labeled states.

    Labels with a photon index ('g0', ('e', 1)) address the product space;
    ``basis='dressed'`` uses the joint eigenstates, ``basis='product'`` the
    atom eigenstates tensored with Fock states.  Bare single-letter labels
    ('g', 'f') address the atom mode alone and expect a dim_q operator.
    """
    s_i, n_i = _parse_label(label_i)
    s_j, n_j = _parse_label(label_j)
    if (n_i is None) != (n_j is None):
        raise LabelingError("labels must both or neither carry a photon index")

    if n_i is None:
        _, vecs = fluxonium_levels(spec, k=max(_qubit_index(s_i),
                                               _qubit_index(s_j)) + 1)
        vi = vecs[:, _qubit_index(s_i)]
        vj = vecs[:, _qubit_index(s_j)]
        mat = op.data if isinstance(op, QOperator) else np.asarray(op)
        if mat.shape[0] != spec.dim_q:
            raise ContractViolationError(
                "single-letter labels address the atom mode; operator must "
                f"be {spec.dim_q} x {spec.dim_q}")
        return complex(vi.conj() @ mat @ vj)

    ds = DressedSystem(spec)
    if basis == "dressed":
        vi = ds.dressed_vector(_qubit_index(s_i), n_i)
        vj = ds.dressed_vector(_qubit_index(s_j), n_j)
    elif basis == "product":
        vi = ds.product_vector(_qubit_index(s_i), n_i)
        vj = ds.product_vector(_qubit_index(s_j), n_j)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    mat = op.data if isinstance(op, QOperator) else np.asarray(op)
    return complex(vi.conj() @ mat @ vj)


def phi_q_mode_operator(spec):
    """Atom phase fluctuation on the atom mode alone (dim_q x dim_q)."""
    phi, _ = qubit_mode_operators(spec)
    return QOperator(phi)


# ---------------------------------------------------------------------------
# coupling strengths


def coupling_coefficients(spec, alpha_r=None):
    """Cubic-term drive channels and the bare two-mode coupling scale.

    coeff_gf   : prefactor of the phi_r phi_q^2 monomial, Hz
    coeff_g0e1 : prefactor of the phi_r^2 phi_q monomial, Hz
    g3_bare    : 6 phi_zpf_r |c3_tot| ej_s (l_s/l_q) l_r l_s^2/(l_r+l_s)^3, Hz
    """
    coeffs, beta_q, beta_r = _coupling_prefactors(spec)
    ej_s = spec.snail.ej
    coeff_gf = 3.0 * coeffs.c3 * ej_s * beta_q**2 * beta_r
    coeff_g0e1 = 3.0 * coeffs.c3 * ej_s * beta_q * beta_r**2
    phi_zpf_r = resonator_phi_zpf(spec)
    g3_bare = abs(2.0 * phi_zpf_r * coeff_g0e1)

    m_el = product_matrix_element_phi_rq(spec)
    g3_eff = None if alpha_r is None else g3_bare * abs(alpha_r) * m_el
    return CouplingReport(
        g3_bare=g3_bare,
        coeff_gf=coeff_gf,
        coeff_g0e1=coeff_g0e1,
        matrix_element_phi_r_phi_q=m_el,
        g3_eff=g3_eff,
    )


def product_matrix_element_phi_rq(spec):
    """|<g,0| phi_r phi_q |e,1>| in the atom-eigenstate x Fock basis.

    Factorizes as phi_zpf_r * |<g| phi_q |e>|; identical for the two-mode
    transitions in either direction, and flux-independent across the
    half-quantum sweet spots.
    """
    _, vecs = fluxonium_levels(spec, k=2)
    phi, _ = qubit_mode_operators(spec)
    el = abs(vecs[:, 0].conj() @ phi @ vecs[:, 1])
    return resonator_phi_zpf(spec) * el


def effective_g3(spec, alpha_r):
    """Drive strength of the two-mode transition for a resonator displaced to
    amplitude alpha_r: g3_bare * |alpha_r| * |<g,0|phi_r phi_q|e,1>| (Hz).
    The phase of alpha_r belongs to the drive and is carried separately."""
    report = coupling_coefficients(spec, alpha_r=alpha_r)
    return report.g3_eff


def g3_over_epsilon(spec, kappa_hz=0.0):
    """Rate ratio between driving the two-mode forbidden transition and
    directly driving the resonator, for equal external drive amplitude.

    The forbidden tone sits one atom splitting away from the resonator, so
    the virtual displacement it creates is suppressed by that detuning:
    ratio = g3_bare * m_el / sqrt(detuning^2 + (kappa/2)^2).  Amplitude
    cancels.
    """
    ds = DressedSystem(spec)
    f_e1 = ds.energies_hz[ds.dressed_index(1, 1)]
    f_g1 = ds.energies_hz[ds.dressed_index(0, 1)]
    detuning = abs(f_e1 - f_g1)
    report = coupling_coefficients(spec)
    denom = math.hypot(detuning, 0.5 * kappa_hz)
    return report.g3_bare * report.matrix_element_phi_r_phi_q / denom


# ---------------------------------------------------------------------------
# selection rules


def _is_sweet_spot(phi_ext_f, tol=1e-6):
    frac = phi_ext_f % 1.0
    return min(abs(frac - 0.5), frac, 1.0 - frac) < tol


def selection_rule_report(spec, n_states=6, threshold=1e-6):
    """Allowed/forbidden table for the lowest dressed states at a sweet spot.

    Uses the linear-coupling Hamiltonian (cubic term off): at half-quantum
    bias that Hamiltonian conserves total excitation parity, which is what
    defines 'forbidden'.  The cubic term is precisely the knob that breaks
    the rule, and its strength is reported by coupling_coefficients instead.

    Returns a list of dicts with keys i, j, label_i, label_j, phi_q, phi_rq,
    phi_q_allowed, phi_rq_allowed.
    """
    if not _is_sweet_spot(spec.phi_ext_f):
        raise ContractViolationError(
            f"selection rules are defined only at sweet spots (integer or "
            f"half-integer flux); got phi_ext_f={spec.phi_ext_f}")
    ds = DressedSystem(spec, include_three_wave=False)
    vecs = ds.vectors[:, :n_states]
    op_q = phi_q_operator(spec).data
    op_rq = phi_rq_operator(spec).data
    el_q = np.abs(vecs.conj().T @ op_q @ vecs)
    el_rq = np.abs(vecs.conj().T @ op_rq @ vecs)

    labels = {}
    for s in range(min(4, spec.dim_q)):
        for n in range(min(spec.dim_r, 3)):
            try:
                idx = ds.dressed_index(s, n)
            except LabelingError:
                continue
            if idx < n_states:
                labels[idx] = f"{_QUBIT_LETTERS[s]}{n}"

    max_q = el_q.max()
    max_rq = el_rq.max()
    rows = []
    for i in range(n_states):
        for j in range(i + 1, n_states):
            rows.append({
                "i": i,
                "j": j,
                "label_i": labels.get(i, f"#{i}"),
                "label_j": labels.get(j, f"#{j}"),
                "phi_q": el_q[i, j],
                "phi_rq": el_rq[i, j],
                "phi_q_allowed": bool(el_q[i, j] > threshold * max_q),
                "phi_rq_allowed": bool(el_rq[i, j] > threshold * max_rq),
            })
    return rows
