"""Shared test oracles, kept deliberately independent of the library's
vectorised kernels: they walk basis states one at a time with plain
Python bit arithmetic."""

from __future__ import annotations

import numpy as np
import pytest

from qpower.core import (ControlledPhase, DiagonalOperator, PhaseCircuit,
                         SinglePhase, StateVector, canonical_phase)


def diag_phases_bruteforce(circuit: PhaseCircuit) -> np.ndarray:
    """Gate-by-gate phase accumulation at every basis index."""
    out = np.zeros(1 << circuit.n)
    for x in range(1 << circuit.n):
        acc = 0.0
        for g in circuit.gates:
            if isinstance(g, SinglePhase):
                acc += g.phase1 if (x >> g.qubit) & 1 else g.phase0
            else:
                if (x >> g.control) & 1:
                    acc += g.phase11 if (x >> g.target) & 1 else g.phase10
        out[x] = acc
    return np.mod(out, 2.0 * np.pi)


def qubo_value_bruteforce(n, linear, quadratic, bits, spin=False) -> float:
    """Single-assignment objective evaluation from first principles."""
    total = 0.0
    for j in range(n):
        w = (1 - 2 * bits[j]) if spin else bits[j]
        total += linear[j] * w
    for j, k, val in quadratic:
        w = bits[j] * (1 - 2 * bits[k]) if spin else bits[j] * bits[k]
        total += val * w
    return total


def random_circuit(n: int, n_single: int, n_controlled: int,
                   seed: int) -> PhaseCircuit:
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(n_single):
        gates.append(SinglePhase(int(rng.integers(n)),
                                 float(rng.uniform(-np.pi, np.pi)),
                                 float(rng.uniform(-np.pi, np.pi))))
    for _ in range(n_controlled):
        c = int(rng.integers(n))
        t = int(rng.integers(n - 1))
        if t >= c:
            t += 1
        gates.append(ControlledPhase(c, t,
                                     float(rng.uniform(-np.pi, np.pi)),
                                     float(rng.uniform(-np.pi, np.pi))))
    rng.shuffle(gates)
    return PhaseCircuit(n, tuple(gates))


def random_state(n: int, seed: int) -> StateVector:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def ray_distance(a: StateVector, b: StateVector) -> float:
    """Max-abs amplitude difference after canonicalising both rays."""
    ca = canonical_phase(a).amps
    cb = canonical_phase(b).amps
    return float(np.max(np.abs(ca - cb)))


def degenerate_diagonal(n: int, m: int, seed: int, top: float = 1.4,
                        rest_hi: float = 1.0) -> tuple[DiagonalOperator, list]:
    """Diagonal with an m-fold exactly-tied maximal phase and everything
    else strictly below rest_hi < top."""
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.05, rest_hi, size=1 << n)
    dom = sorted(rng.choice(1 << n, size=m, replace=False).tolist())
    phases[dom] = top
    return DiagonalOperator(n, phases), dom


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def gapped_random_instance(n, seed, min_phase_gap=0.01):
    """Random QUBO whose top-two scaled phases differ by at least
    min_phase_gap (redraws deterministically until one qualifies)."""
    from qpower.qubo import (MAXIMIZE, make_scaling, objective_table,
                             random_instance)
    for attempt in range(200):
        inst = random_instance(n, seed=seed * 1000 + attempt)
        plan = make_scaling(inst)
        table = objective_table(inst)
        top2 = np.sort(table)[::-1][:2] if inst.sense == MAXIMIZE \
            else np.sort(table)[:2]
        if plan.scale * abs(top2[0] - top2[1]) >= min_phase_gap:
            return inst
    raise AssertionError("no gapped instance found")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
