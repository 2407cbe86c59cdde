"""Compiled and pure-Python integrator kernels must be interchangeable."""

import numpy as np
import pytest

from lambda_forge import _dp45_py, backend, qcore
from lambda_forge.units import TWO_PI

cy_available = "cy" in backend.available_backends()


def _problem(dim=3, seed=2):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = qcore.QOperator(TWO_PI * 1e6 * (m + m.conj().T))
    c = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    gen = qcore.liouvillian(h, [(qcore.QOperator(c), 5e5)])
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    y0 = np.outer(v, v.conj()).reshape(-1)
    times = np.linspace(0.0, 3.0e-6, 11)
    return gen, y0, times


@pytest.mark.skipif(not cy_available, reason="compiled kernel not built")
def test_twins_agree():
    gen, y0, times = _problem()
    for herm in (0, 3):
        y_cy, info_cy = backend.dp45_evolve(gen, y0, times, 1e-8, 1e-10,
                                            herm_dim=herm)
        y_py, info_py = _dp45_py.dp45_evolve(gen, y0, times, 1e-8, 1e-10,
                                             herm_dim=herm)
        assert info_cy["status"] == info_py["status"] == 0
        # same tableau and controller: step counts match almost exactly
        assert abs(info_cy["steps"] - info_py["steps"]) <= 2
        assert np.max(np.abs(y_cy - y_py)) < 1e-9


def test_python_kernel_against_expm():
    import scipy.linalg

    gen, y0, times = _problem(seed=9)
    ys, info = _dp45_py.dp45_evolve(gen, y0, times, 1e-10, 1e-12)
    assert info["status"] == 0
    for t, row in zip(times, ys):
        exact = scipy.linalg.expm(gen * t) @ y0
        assert np.max(np.abs(row - exact)) < 1e-8


def test_hermitian_projection_mode():
    gen, y0, times = _problem(seed=4)
    ys, _ = _dp45_py.dp45_evolve(gen, y0, times, 1e-6, 1e-9, herm_dim=3)
    for row in ys:
        m = row.reshape(3, 3)
        assert np.max(np.abs(m - m.conj().T)) < 1e-14


def test_underflow_status():
    gen = np.array([[-1e30 + 0j]])
    y0 = np.array([1.0 + 0j])
    ys, info = _dp45_py.dp45_evolve(gen, y0, np.array([0.0, 1.0]), 1e-8,
                                    1e-10)
    assert info["status"] == 1


def test_env_override_selects_python(tmp_path):
    import subprocess
    import sys

    code = ("import lambda_forge as lf; "
            "print(lf.backend_name())")
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"PATH": "/usr/bin:/bin", "LAMBDA_FORGE_BACKEND": "py"},
        capture_output=True, text=True, cwd=str(tmp_path))
    assert out.stdout.strip() == "py"


@pytest.mark.skipif(not cy_available, reason="compiled kernel not built")
def test_compiled_faster_smoke():
    """Not a benchmark (see benchmarks/), just a sanity check that the
    compiled path is not pathologically slow on a representative problem."""
    import time

    from lambda_forge import raman

    gu, gd = raman.split_rates(1.0 / 5.7e-6, 0.6)
    p = raman.LambdaParams(gamma_up=gu, gamma_down=gd, dim_r=6)
    gen = qcore.liouvillian(raman.lambda_hamiltonian(p),
                            raman.collapse_channels(p))
    y0 = raman.thermal_initial_state(0.94, p.dim_r).rho.reshape(-1)
    times = np.linspace(0.0, 0.5e-6, 26)

    t0 = time.perf_counter()
    backend.dp45_evolve(gen, y0, times, 1e-8, 1e-10, herm_dim=12)
    t_cy = time.perf_counter() - t0
    t0 = time.perf_counter()
    _dp45_py.dp45_evolve(gen, y0, times, 1e-8, 1e-10, herm_dim=12)
    t_py = time.perf_counter() - t0
    assert t_cy < t_py * 1.5
