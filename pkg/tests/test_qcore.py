"""Operator algebra, eigensolves, steady states and master-equation
evolution against analytic and matrix-exponential oracles."""

import numpy as np
import numpy.testing as npt
import pytest
import scipy.linalg

from lambda_forge import qcore
from lambda_forge.errors import (ContractViolationError,
                                 DegenerateSteadyStateError,
                                 DimensionMismatchError,
                                 InvalidDimensionError, StiffnessError)
from lambda_forge.units import TWO_PI, from_angular


def test_annihilation_smallest():
    npt.assert_array_equal(qcore.annihilation(2).data,
                           [[0.0, 1.0], [0.0, 0.0]])


def test_annihilation_sqrt_rule():
    a = qcore.annihilation(3)
    assert a.data[1, 2] == pytest.approx(np.sqrt(2.0), abs=1e-15)


def test_annihilation_rejects_dim_1():
    with pytest.raises(InvalidDimensionError):
        qcore.annihilation(1)


def test_commutator_truncation_structure():
    # direct matrix-multiplication oracle: [a, a+] = I except the top corner
    dim = 10
    a = qcore.annihilation(dim).data
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(dim)
    expected[-1, -1] = -(dim - 1)
    npt.assert_allclose(comm, expected, atol=1e-12)


def test_tensor_identities():
    eye6 = qcore.tensor(qcore.identity(2), qcore.identity(3))
    npt.assert_array_equal(eye6.data, np.eye(6))
    assert eye6.dims == (2, 3)


def test_tensor_sigma_z_spectrum():
    op = qcore.tensor(qcore.sigma_z(), qcore.identity(2))
    vals = np.sort(np.linalg.eigvalsh(op.data))
    npt.assert_allclose(vals, [-1.0, -1.0, 1.0, 1.0], atol=1e-14)


def test_tensor_index_arithmetic():
    # (row a=0, b=1), (col a=1, b=0): kron entry = A[0,1] * B[1,0] = 1
    op = qcore.tensor(qcore.annihilation(2), qcore.creation(2))
    assert op.data[0 * 2 + 1, 1 * 2 + 0] == pytest.approx(1.0)


def test_eigendecompose_diagonal():
    vals, _ = qcore.eigendecompose(qcore.QOperator(np.diag([3.0, 1.0, 2.0])),
                                   2)
    npt.assert_allclose(vals, [1.0, 2.0], atol=1e-14)


def test_eigendecompose_oscillator_spacing():
    # resonator ladder: consecutive spacing equals the mode frequency
    f_r = 6.82e9
    dim = 12
    n = qcore.number(dim)
    h = qcore.QOperator(TWO_PI * f_r * (n.data + 0.5 * np.eye(dim)))
    vals, _ = qcore.eigendecompose(h, 5)
    npt.assert_allclose(from_angular(np.diff(vals)), f_r, rtol=1e-12)


def test_eigendecompose_residual_oracle():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = qcore.QOperator(m + m.conj().T)
    vals, vecs = qcore.eigendecompose(h, 8)
    for k in range(8):
        residual = h.data @ vecs[:, k] - vals[k] * vecs[:, k]
        assert np.linalg.norm(residual) < 1e-9
    # orthonormality
    npt.assert_allclose(vecs.conj().T @ vecs, np.eye(8), atol=1e-10)


def test_eigendecompose_rejects_non_hermitian():
    with pytest.raises(ContractViolationError):
        qcore.eigendecompose(qcore.annihilation(3), 2)


def test_expectation_normalization():
    rho = qcore.coherent_state(8, 0.3)
    assert qcore.expectation(qcore.identity(8), rho).real == pytest.approx(
        1.0, abs=1e-12)


def test_expectation_sigma_z_excited():
    rho = qcore.fock_state(2, 1)
    assert qcore.expectation(qcore.sigma_z(), rho).real == pytest.approx(1.0)


def test_expectation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        qcore.expectation(qcore.identity(3), qcore.fock_state(2, 0))


def test_coherent_state_occupation():
    # amplitude 0.59 -> <n> = |alpha|^2 = 0.3481, i.e. ~0.35
    alpha = 0.59
    rho = qcore.coherent_state(30, alpha)
    n = qcore.expectation(qcore.number(30), rho).real
    assert n == pytest.approx(alpha**2, abs=1e-8)
    assert n == pytest.approx(0.35, abs=2e-3)


def test_coherent_state_renormalized_after_truncation():
    rho = qcore.coherent_state(4, 1.2)   # visibly truncated
    assert np.trace(rho.rho).real == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# evolution


def test_decay_analytic():
    gamma = 3.0e6
    h = qcore.QOperator(np.zeros((2, 2)))
    times = np.linspace(0.0, 1.0 / gamma, 9)
    ev = qcore.lindblad_evolve(h, [(qcore.sigma_minus(), gamma)],
                               qcore.fock_state(2, 1), times)
    p_e = np.array([qcore.expectation(qcore.projector(2, 1), s).real
                    for s in ev.states])
    npt.assert_allclose(p_e, np.exp(-gamma * times), atol=1e-6)
    assert p_e[-1] == pytest.approx(0.36788, abs=1e-5)


def test_rabi_analytic():
    omega = TWO_PI * 4.0e6
    h = qcore.QOperator(0.5 * omega * qcore.sigma_x().data)
    times = np.linspace(0.0, 0.75e-6, 31)
    ev = qcore.lindblad_evolve(h, [], qcore.fock_state(2, 0), times)
    p_e = [qcore.expectation(qcore.projector(2, 1), s).real
           for s in ev.states]
    npt.assert_allclose(p_e, np.sin(0.5 * omega * times) ** 2, atol=1e-6)


def _random_lindblad(rng, dim=3):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = qcore.QOperator(TWO_PI * 1e6 * (m + m.conj().T))
    cs = []
    for _ in range(2):
        c = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        cs.append((qcore.QOperator(c), float(rng.uniform(0.1, 2.0)) * 1e6))
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    rho0 = qcore.QState(np.outer(v, v.conj()))
    return h, cs, rho0


def test_lindblad_matches_matrix_exponential():
    # independent oracle: exact propagation by expm of the generator
    rng = np.random.default_rng(11)
    for _ in range(4):
        h, cs, rho0 = _random_lindblad(rng)
        times = np.linspace(0.0, 2.0e-6, 10)
        gen = qcore.liouvillian(h, cs)
        ev = qcore.lindblad_evolve(h, cs, rho0, times)
        for t, state in zip(times, ev.states):
            exact = scipy.linalg.expm(gen * t) @ rho0.rho.reshape(-1)
            assert np.max(np.abs(state.rho.reshape(-1) - exact)) < 1e-7


def test_lindblad_invariants_trace_positivity_hermiticity():
    rng = np.random.default_rng(3)
    h, cs, rho0 = _random_lindblad(rng)
    times = np.linspace(0.0, 5.0e-6, 40)
    ev = qcore.lindblad_evolve(h, cs, rho0, times)
    for state in ev.states:
        assert abs(np.trace(state.rho) - 1.0) < 1e-8
        assert np.min(np.linalg.eigvalsh(state.rho)) > -1e-9
        scale = np.max(np.abs(state.rho))
        assert np.max(np.abs(state.rho - state.rho.conj().T)) < 1e-10 * scale


def test_lindblad_convergence_tolerance():
    # doubling the requested accuracy moves populations by < 1e-6
    rng = np.random.default_rng(5)
    h, cs, rho0 = _random_lindblad(rng)
    times = np.linspace(0.0, 2.0e-6, 7)
    pops = []
    for rtol in (1e-8, 5e-9):
        ev = qcore.lindblad_evolve(h, cs, rho0, times, rtol=rtol)
        pops.append(np.array([np.diag(s.rho).real for s in ev.states]))
    assert np.max(np.abs(pops[0] - pops[1])) < 1e-6


def test_lindblad_rejects_bad_times():
    h = qcore.QOperator(np.zeros((2, 2)))
    with pytest.raises(ContractViolationError):
        qcore.lindblad_evolve(h, [], qcore.fock_state(2, 0),
                              [0.0, 2.0e-6, 1.0e-6])


def test_stiffness_error_names_time():
    # force underflow with an insane rate and a tiny tolerance budget
    h = qcore.QOperator(np.zeros((2, 2)))
    with pytest.raises(StiffnessError) as err:
        qcore.lindblad_evolve(h, [(qcore.sigma_minus(), 1e30)],
                              qcore.fock_state(2, 1),
                              np.linspace(0.0, 1.0, 5))
    assert err.value.t >= 0.0


# ---------------------------------------------------------------------------
# steady states


def test_steady_state_dark_state():
    h = qcore.QOperator(np.zeros((2, 2)))
    rho = qcore.steady_state(h, [(qcore.sigma_minus(), 1e6)])
    npt.assert_allclose(rho.rho, np.diag([1.0, 0.0]), atol=1e-10)


def test_steady_state_driven_cavity_amplitude():
    # <a>_ss = eps / (i kappa/2 - delta_r)
    dim = 16
    eps, kappa, delta_r = 2.0e6, 1.5e6, 5.0e6
    a = qcore.annihilation(dim)
    x = a + a.dag()
    h = qcore.QOperator(TWO_PI * (delta_r * qcore.number(dim).data
                                  + eps * x.data))
    rho = qcore.steady_state(h, [(a, TWO_PI * kappa)])
    measured = qcore.expectation(a, rho)
    expected = eps / (1j * kappa / 2.0 - delta_r)
    assert abs(measured - expected) < 1e-6


def test_steady_state_thermal_two_level():
    gamma_down, gamma_up = 3.0e5, 1.2e5
    h = qcore.QOperator(np.zeros((2, 2)))
    rho = qcore.steady_state(h, [(qcore.sigma_minus(), gamma_down),
                                 (qcore.sigma_plus(), gamma_up)])
    p_g = rho.rho[0, 0].real
    assert p_g == pytest.approx(gamma_down / (gamma_down + gamma_up),
                                abs=1e-12)


def test_steady_state_requires_dissipation():
    h = qcore.QOperator(np.diag([0.0, 1.0]))
    with pytest.raises(DegenerateSteadyStateError):
        qcore.steady_state(h, [(qcore.sigma_minus(), 0.0)])


def test_steady_state_degenerate_null_space():
    # two decoupled decaying qubits: steady manifold is 2-D
    sm = qcore.sigma_minus()
    op = qcore.tensor(sm @ sm.dag() @ sm, qcore.identity(2))  # acts as sm x I
    h = qcore.QOperator(np.zeros((4, 4)), (2, 2))
    with pytest.raises(DegenerateSteadyStateError):
        qcore.steady_state(h, [(qcore.tensor(sm, qcore.identity(2)), 1e6)])
    # sanity: the helper above would have been fine with both decay channels
    rho = qcore.steady_state(h, [(qcore.tensor(sm, qcore.identity(2)), 1e6),
                                 (qcore.tensor(qcore.identity(2), sm), 1e6)])
    npt.assert_allclose(np.diag(rho.rho).real, [1.0, 0.0, 0.0, 0.0],
                        atol=1e-9)
    assert op.dims == (2, 2)


# ---------------------------------------------------------------------------
# state/type invariants


def test_qstate_rejects_bad_trace():
    with pytest.raises(ContractViolationError):
        qcore.QState(np.diag([0.7, 0.7]))


def test_qstate_rejects_negative():
    with pytest.raises(ContractViolationError):
        qcore.QState(np.diag([1.5, -0.5]))


def test_qoperator_hermitian_flag():
    assert qcore.sigma_z().hermitian
    assert not qcore.annihilation(4).hermitian


def test_operators_are_immutable():
    op = qcore.sigma_z()
    with pytest.raises(ValueError):
        op.data[0, 0] = 5.0


def test_trajectory_population_bounds():
    times = np.linspace(0.0, 1.0, 3)
    with pytest.raises(ContractViolationError):
        qcore.Trajectory(times, ["P_g"], np.array([[0.1], [1.2], [0.3]]))
    ok = qcore.Trajectory(times, ["P_g"], np.array([[0.1], [0.9], [0.3]]))
    assert ok.column("P_g")[1] == pytest.approx(0.9)
