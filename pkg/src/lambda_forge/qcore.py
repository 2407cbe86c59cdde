"""Operator algebra on truncated Fock spaces, dense eigensolves, Liouvillian
construction, steady states, and master-equation time evolution.

Conventions
-----------
* Tensor order is (mode A = resonator) x (mode B = qubit); a product basis
  index is ``n_a * dim_b + n_b``.
* Hamiltonians handed to the evolution routines are in angular frequency
  (rad/s); decay rates are 1/s; times are seconds.
* Density matrices are validated on construction: unit trace to 1e-9,
  Hermitian to 1e-12 (relative), smallest eigenvalue above -1e-9.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import backend
from .errors import (ContractViolationError, DegenerateSteadyStateError,
                     DimensionMismatchError, InvalidDimensionError,
                     StiffnessError)

_HERM_TOL = 1e-12

# dense Liouvillians scale as dim^4 in memory; anything bigger than this is
# a usage error, not a job for this integrator
_MAX_EVOLVE_DIM = 64


def _as_readonly(arr):
    arr = np.ascontiguousarray(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class QOperator:
    """Dense operator on a (dim_a x dim_b) product space; dim_b = 1 when the
    operator lives on a single mode."""

    data: np.ndarray
    dims: tuple = None
    hermitian: bool = field(init=False, default=False)

    def __post_init__(self):
        data = _as_readonly(self.data)
        object.__setattr__(self, "data", data)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise InvalidDimensionError(
                f"operator matrix must be square, got {data.shape}")
        dims = self.dims if self.dims is not None else (data.shape[0], 1)
        dims = (int(dims[0]), int(dims[1]))
        if dims[0] * dims[1] != data.shape[0]:
            raise DimensionMismatchError(
                f"dims {dims} inconsistent with matrix side {data.shape[0]}")
        object.__setattr__(self, "dims", dims)
        scale = np.max(np.abs(data))
        herm = bool(
            scale == 0.0
            or np.max(np.abs(data - data.conj().T)) < _HERM_TOL * scale)
        object.__setattr__(self, "hermitian", herm)

    @property
    def dim(self):
        return self.data.shape[0]

    def dag(self):
        return QOperator(self.data.conj().T, self.dims)

    def __matmul__(self, other):
        self._check(other)
        return QOperator(self.data @ other.data, self.dims)

    def __add__(self, other):
        self._check(other)
        return QOperator(self.data + other.data, self.dims)

    def __sub__(self, other):
        self._check(other)
        return QOperator(self.data - other.data, self.dims)

    def __mul__(self, scalar):
        return QOperator(self.data * complex(scalar), self.dims)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def _check(self, other):
        if not isinstance(other, QOperator):
            raise TypeError("expected a QOperator")
        if other.dims != self.dims:
            raise DimensionMismatchError(
                f"dims {self.dims} vs {other.dims}")


@dataclass(frozen=True)
class QState:
    """Density matrix with trace / Hermiticity / positivity invariants."""

    rho: np.ndarray
    dims: tuple = None

    def __post_init__(self):
        rho = _as_readonly(self.rho)
        object.__setattr__(self, "rho", rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidDimensionError("density matrix must be square")
        dims = self.dims if self.dims is not None else (rho.shape[0], 1)
        dims = (int(dims[0]), int(dims[1]))
        if dims[0] * dims[1] != rho.shape[0]:
            raise DimensionMismatchError(
                f"dims {dims} inconsistent with matrix side {rho.shape[0]}")
        object.__setattr__(self, "dims", dims)

        tr = np.trace(rho)
        if abs(tr - 1.0) > 1e-9:
            raise ContractViolationError(f"trace(rho) = {tr}, expected 1")
        scale = max(np.max(np.abs(rho)), 1e-300)
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12 * scale:
            raise ContractViolationError("density matrix not Hermitian")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-9:
            raise ContractViolationError(
                f"density matrix not positive "
                f"(min eig = {np.min(np.linalg.eigvalsh(rho)):.3e})")

    @property
    def dim(self):
        return self.rho.shape[0]


@dataclass(frozen=True)
class Trajectory:
    """Time series of real expectation values.

    Columns whose name starts with ``P_`` are populations and must stay in
    [-1e-6, 1 + 1e-6].
    """

    times: np.ndarray
    observables: list
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if values.shape[0] != times.size:
            raise DimensionMismatchError(
                f"{values.shape[0]} rows for {times.size} times")
        if values.ndim != 2 or values.shape[1] != len(self.observables):
            raise DimensionMismatchError("one column per observable required")
        if np.any(np.diff(times) < 0.0):
            raise ContractViolationError("times must be monotone ascending")
        for j, name in enumerate(self.observables):
            if name.startswith("P_"):
                col = values[:, j]
                if col.min() < -1e-6 or col.max() > 1.0 + 1e-6:
                    raise ContractViolationError(
                        f"population {name} outside [0, 1]: "
                        f"[{col.min():.3e}, {col.max():.3e}]")

    def column(self, name):
        return self.values[:, self.observables.index(name)]


# ---------------------------------------------------------------------------
# operator constructors


def annihilation(dim):
    """Ladder lowering operator: entries sqrt(k) at (k-1, k)."""
    if dim < 2:
        raise InvalidDimensionError(f"annihilation needs dim >= 2, got {dim}")
    return QOperator(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1))


def creation(dim):
    return annihilation(dim).dag()


def number(dim):
    if dim < 1:
        raise InvalidDimensionError("number needs dim >= 1")
    return QOperator(np.diag(np.arange(dim, dtype=float)))


def identity(dim):
    if dim < 1:
        raise InvalidDimensionError("identity needs dim >= 1")
    return QOperator(np.eye(dim))


def sigma_minus():
    """Qubit lowering |g><e| in the (g, e) basis."""
    return annihilation(2)


def sigma_plus():
    return creation(2)


def sigma_z():
    """|e> is the +1 eigenstate."""
    return QOperator(np.diag([-1.0, 1.0]))


def sigma_x():
    return QOperator(np.array([[0.0, 1.0], [1.0, 0.0]]))


def projector(dim, k):
    m = np.zeros((dim, dim))
    m[k, k] = 1.0
    return QOperator(m)


def tensor(a, b):
    """Kronecker product; resulting dims are (total dim of a, total dim of b)."""
    return QOperator(np.kron(a.data, b.data), (a.dim, b.dim))


def fock_state(dim, n, dims=None):
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"Fock level {n} outside [0, {dim})")
    rho = np.zeros((dim, dim))
    rho[n, n] = 1.0
    return QState(rho, dims)


def coherent_state(dim, alpha):
    """Truncated coherent state, built from the normalized exponential series
    and renormalized after truncation."""
    n = np.arange(dim)
    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, dim)))))
    amp = np.exp(n * np.log(complex(alpha)) - 0.5 * log_fact) \
        if alpha != 0 else np.eye(dim)[0].astype(complex)
    if alpha != 0:
        amp *= np.exp(-0.5 * abs(alpha) ** 2)
    ket = amp / np.linalg.norm(amp)
    return QState(np.outer(ket, ket.conj()))


def product_state(state_a, state_b):
    rho = np.kron(state_a.rho, state_b.rho)
    return QState(rho, (state_a.dim, state_b.dim))


# ---------------------------------------------------------------------------
# spectral tools


def eigendecompose(op, k):
    """Lowest ``k`` eigenpairs of a Hermitian operator, ascending."""
    if not op.hermitian:
        raise ContractViolationError("eigendecompose requires Hermitian input")
    if not 1 <= k <= op.dim:
        raise InvalidDimensionError(f"k={k} outside [1, {op.dim}]")
    vals, vecs = scipy.linalg.eigh(op.data, subset_by_index=(0, k - 1))
    return vals, vecs


def expectation(op, state):
    """trace(op @ rho); real up to numerical noise when op is Hermitian."""
    if isinstance(state, QState):
        rho = state.rho
    else:
        rho = np.asarray(state)
    if op.data.shape != rho.shape:
        raise DimensionMismatchError(
            f"operator {op.data.shape} vs state {rho.shape}")
    return complex(np.einsum("ij,ji->", op.data, rho))


# ---------------------------------------------------------------------------
# Liouville space

def _vec(rho):
    return np.ascontiguousarray(rho).reshape(-1)


def _unvec(v, dim):
    return v.reshape(dim, dim)


def liouvillian(h, collapse_ops):
    """Dense generator of d(vec rho)/dt for row-major vectorization.

    ``h`` is the Hamiltonian in rad/s; ``collapse_ops`` is a list of
    (QOperator, rate 1/s) pairs contributing
    rate * (L rho Ld - {Ld L, rho} / 2).
    """
    if not h.hermitian:
        raise ContractViolationError("Hamiltonian must be Hermitian")
    dim = h.dim
    eye = np.eye(dim)
    hm = h.data
    gen = -1j * (np.kron(hm, eye) - np.kron(eye, hm.T))
    for op, rate in collapse_ops:
        if rate < 0.0:
            raise ContractViolationError(f"negative collapse rate {rate}")
        if op.dim != dim:
            raise DimensionMismatchError("collapse operator dimension")
        if rate == 0.0:
            continue
        lm = op.data
        ldl = lm.conj().T @ lm
        gen += rate * (np.kron(lm, lm.conj())
                       - 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T)))
    return gen


def steady_state(h, collapse_ops):
    """Null-space steady state of the vectorized Liouvillian.

    Raises if no collapse rate is nonzero (steady state not unique) or if the
    null space is not one-dimensional.
    """
    if not any(rate > 0.0 for _, rate in collapse_ops):
        raise DegenerateSteadyStateError(
            "at least one nonzero collapse rate required")
    gen = liouvillian(h, collapse_ops)
    _, svals, vh = np.linalg.svd(gen)
    if svals[-1] > 1e-10 * svals[0]:
        raise DegenerateSteadyStateError(
            f"no null vector found (smallest singular value "
            f"{svals[-1]:.3e} vs scale {svals[0]:.3e})")
    if svals[-2] < 1e-10 * svals[0]:
        raise DegenerateSteadyStateError(
            "Liouvillian null space dimension > 1")
    rho = _unvec(vh[-1].conj(), h.dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    residual = np.linalg.norm(gen @ _vec(rho))
    if residual > 1e-10 * svals[0]:
        raise DegenerateSteadyStateError(
            f"steady-state residual too large: {residual:.3e}")
    return QState(rho, h.dims)


# ---------------------------------------------------------------------------
# time evolution


@dataclass(frozen=True)
class Evolution:
    """States sampled on the requested time grid, plus integrator counters."""

    times: np.ndarray
    states: list
    steps: int
    rejected: int
    backend: str

    def expect(self, observables):
        """Expectation-value Trajectory for a {name: QOperator} mapping."""
        names = list(observables)
        values = np.empty((len(self.states), len(names)))
        for i, st in enumerate(self.states):
            for j, name in enumerate(names):
                values[i, j] = expectation(observables[name], st).real
        return Trajectory(self.times, names, values)


def lindblad_evolve(h, collapse_ops, rho0, times, rtol=1e-8, atol=1e-10):
    """Integrate the master equation and return states at ``times``.

    d rho/dt = -i [H, rho] + sum_k rate_k (L_k rho L_k+ - {L_k+ L_k, rho}/2)

    with H in rad/s.  Uses the adaptive embedded Runge-Kutta 5(4) kernel
    selected in :mod:`lambda_forge.backend`; a step-size underflow raises
    :class:`StiffnessError` naming the time at which it occurred.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ContractViolationError("times must be a non-empty 1-D array")
    if np.any(np.diff(times) < 0.0):
        raise ContractViolationError("times must be monotone ascending")
    if h.dim > _MAX_EVOLVE_DIM:
        raise InvalidDimensionError(
            f"dense Liouvillian evolution capped at dim {_MAX_EVOLVE_DIM}, "
            f"got {h.dim}")
    if rho0.dim != h.dim:
        raise DimensionMismatchError("initial state dimension")

    gen = liouvillian(h, collapse_ops)
    y0 = _vec(rho0.rho.astype(np.complex128))
    ys, info = backend.dp45_evolve(gen, y0, times, rtol, atol,
                                   herm_dim=h.dim)
    if info["status"] != 0:
        raise StiffnessError(info["t_final"])

    # Hermiticity closure under evolution is enforced at 1e-10 here; the
    # symmetrized remainder then passes the stricter QState construction
    # checks (trace, Hermiticity, positivity) for every stored sample.
    states = []
    for row in ys:
        rho = _unvec(row, h.dim)
        drift = np.max(np.abs(rho - rho.conj().T))
        if drift > 1e-10 * max(np.max(np.abs(rho)), 1e-300):
            raise ContractViolationError(
                f"integrator broke Hermiticity (relative drift {drift:.2e})")
        states.append(QState(0.5 * (rho + rho.conj().T), h.dims))
    return Evolution(times=times, states=states, steps=info["steps"],
                     rejected=info["rejected"], backend=backend.backend_name())
