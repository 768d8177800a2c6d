"""Timing comparison of the numba and pure-numpy kernel backends.

Run: python benchmarks/bench_kernels.py
The numba rows disappear when the import-time backend is numpy
(QPOWER_KERNELS=numpy) or numba is unavailable.
"""

import time

import numpy as np

from qpower import kernels
from qpower.core import _gate_arrays
from qpower.qubo import random_instance

BENCH_QUBITS = 18  # 262144 basis states; big enough to matter


def timed(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_circuit_phase_table(n):
    inst = random_instance(min(n, 16), seed=0)
    from qpower.qubo import compile_circuit
    circuit = compile_circuit(inst)
    # re-target the gate arrays at an n-qubit register
    args = (n, *_gate_arrays(circuit))
    rows = [("circuit_phase_table/numpy",
             timed(kernels.circuit_phase_table_numpy, *args))]
    if kernels.circuit_phase_table_numba is not None:
        kernels.circuit_phase_table_numba(*args)  # compile once
        rows.append(("circuit_phase_table/numba",
                     timed(kernels.circuit_phase_table_numba, *args)))
    return rows


def bench_objective_table(n):
    inst = random_instance(min(n, 16), seed=1)
    qj, qk, qv = inst.quad_arrays()
    linear = np.zeros(n)
    linear[:inst.n] = inst.linear
    args = (n, linear, qj, qk, qv, False)
    rows = [("objective_table/numpy",
             timed(kernels.objective_table_numpy, *args))]
    if kernels.objective_table_numba is not None:
        kernels.objective_table_numba(*args)
        rows.append(("objective_table/numba",
                     timed(kernels.objective_table_numba, *args)))
    return rows


def bench_success_mass(n):
    rng = np.random.default_rng(2)
    decay = -rng.random(1 << n) * 0.02
    decay[123] = 0.0
    weights = np.full(1 << n, 2.0 ** -n)
    dom = np.array([123], dtype=np.int64)

    def sweep(fn):
        for k in range(1, 2002, 100):
            fn(decay, weights, dom, k)

    rows = [("success_mass x21/numpy",
             timed(sweep, kernels.success_mass_numpy))]
    if kernels.success_mass_numba is not None:
        sweep(kernels.success_mass_numba)
        rows.append(("success_mass x21/numba",
                     timed(sweep, kernels.success_mass_numba)))
    return rows


def bench_analytic_state(n):
    rng = np.random.default_rng(3)
    logr = np.log(rng.random(1 << n) * 0.5 + 0.4)
    theta = rng.uniform(-np.pi, np.pi, 1 << n)
    logm = np.full(1 << n, -n * np.log(2.0) / 2.0)
    phi0 = np.zeros(1 << n)
    args = (logr, theta, logm, phi0, 400)
    rows = [("analytic_state/numpy",
             timed(kernels.analytic_state_numpy, *args))]
    if kernels.analytic_state_numba is not None:
        kernels.analytic_state_numba(*args)
        rows.append(("analytic_state/numba",
                     timed(kernels.analytic_state_numba, *args)))
    return rows


def main():
    n = BENCH_QUBITS
    print(f"kernel benchmark at n={n} ({1 << n} basis states), "
          f"active backend: {kernels.active_backend()}")
    all_rows = []
    for bench in (bench_circuit_phase_table, bench_objective_table,
                  bench_success_mass, bench_analytic_state):
        all_rows.extend(bench(n))
    width = max(len(name) for name, _ in all_rows)
    base = {}
    for name, seconds in all_rows:
        kernel, backend = name.rsplit("/", 1)
        if backend == "numpy":
            base[kernel] = seconds
        speedup = (f"  ({base[kernel] / seconds:4.1f}x vs numpy)"
                   if backend == "numba" and base.get(kernel) else "")
        print(f"{name:<{width}}  {seconds * 1e3:9.2f} ms{speedup}")


if __name__ == "__main__":
    main()
