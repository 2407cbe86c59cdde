#!/usr/bin/env python3
"""Benchmark: compiled vs pure-Python integrator kernel.

Times both implementations of the adaptive Dormand-Prince stepper on
representative master-equation problems (the two-tone Raman evolution that
dominates chevron runtime, and a larger-truncation variant), then prints a
table with the speedup.  Run from the repo root:

    python benchmarks/bench_dp45.py [--repeat N] [--quick]
"""

import argparse
import time

import numpy as np

from lambda_forge import _dp45_py, backend, qcore, raman


def make_problem(dim_r, t_final, n_out):
    gamma_up, gamma_down = raman.split_rates(1.0 / 5.7e-6, 0.6)
    params = raman.LambdaParams(delta_r=150e6, chi=0.7e6, epsilon=50.8e6,
                                g3=3.0e6, kappa=16.8e6, gamma_up=gamma_up,
                                gamma_down=gamma_down, dim_r=dim_r)
    gen = qcore.liouvillian(raman.lambda_hamiltonian(params),
                            raman.collapse_channels(params))
    y0 = raman.thermal_initial_state(0.94, dim_r).rho.reshape(-1)
    times = np.linspace(0.0, t_final, n_out)
    return gen, y0.astype(complex), times


def make_cooling_problem(t_final, n_out):
    gamma_up, gamma_down = raman.split_rates(1.0 / 5.7e-6, 0.6)
    params = raman.LambdaParams(g3=0.87e6, kappa=16.8e6, gamma_up=gamma_up,
                                gamma_down=gamma_down, dim_r=5)
    ops = raman._lambda_operators(5)
    pair = ops["a"] @ ops["sp"]
    h = 2 * np.pi * (0.5 * params.chi * ops["n_sz"]
                     + params.g3 * (pair + pair.dag()))
    gen = qcore.liouvillian(h, raman.collapse_channels(params))
    y0 = raman.thermal_initial_state(0.6, 5).rho.reshape(-1)
    times = np.linspace(0.0, t_final, n_out)
    return gen, y0.astype(complex), times


def run_once(kernel, gen, y0, times):
    t0 = time.perf_counter()
    ys, info = kernel(gen, y0, times, 1e-8, 1e-10, 50_000_000,
                      int(round(np.sqrt(y0.size))))
    elapsed = time.perf_counter() - t0
    assert info["status"] == 0
    return elapsed, info["steps"], ys


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true",
                        help="smaller problems, single repeat")
    args = parser.parse_args()
    repeat = 1 if args.quick else args.repeat

    if "cy" not in backend.available_backends():
        print("compiled kernel not built; only timing the python twin")
        kernels = [("py", _dp45_py.dp45_evolve)]
    else:
        from lambda_forge import _dp45_cy
        kernels = [("cy", _dp45_cy.dp45_evolve),
                   ("py", _dp45_py.dp45_evolve)]

    cases = [
        ("resonant pumping, dim_r=5 (cooling)",
         make_cooling_problem(1e-6 if args.quick else 20e-6, 80)),
        ("two-tone Raman, dim_r=6 (chevron workhorse)",
         make_problem(6, 0.6e-6 if args.quick else 2.5e-6, 80)),
        ("two-tone Raman, dim_r=10 (truncation check)",
         make_problem(10, 0.3e-6 if args.quick else 1.0e-6, 40)),
    ]

    print(f"{'case':<46} {'kernel':<7} {'steps':>8} {'best time':>10}")
    print("-" * 76)
    speedups = []
    for label, (gen, y0, times) in cases:
        best = {}
        for name, kernel in kernels:
            results = [run_once(kernel, gen, y0, times)
                       for _ in range(repeat)]
            elapsed = min(r[0] for r in results)
            steps = results[0][1]
            best[name] = (elapsed, results[0][2])
            print(f"{label:<46} {name:<7} {steps:>8d} {elapsed:>9.3f} s")
        if len(best) == 2:
            agree = np.max(np.abs(best["cy"][1] - best["py"][1]))
            speedup = best["py"][0] / best["cy"][0]
            speedups.append(speedup)
            print(f"{'':<46} speedup {speedup:4.1f}x, "
                  f"max |difference| {agree:.2e}")
    if speedups:
        print(f"\ngeometric-mean speedup: "
              f"{np.exp(np.mean(np.log(speedups))):.1f}x")


if __name__ == "__main__":
    main()
