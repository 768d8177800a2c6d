"""Quadratic binary objectives compiled into diagonal phase circuits.

An n-variable instance maps to an n-qubit circuit with one single-qubit
phase gate per variable, one controlled phase gate per quadratic term
and a uniform offset gate.  Objective values are scaled into eigenphases
in [0, pi/2] so that the basis state with the extremal objective carries
the dominant |eta - lambda|, and the power engine reads it out.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .core import (LIMITS, ControlledPhase, PhaseCircuit, SinglePhase,
                   bits_from_index, circuit_to_diagonal, equal_superposition)
from .engine import EngineConfig, iterate, recover_phase, success_probability
from .errors import CapacityError, ConstantObjectiveError
from .errors import DimensionMismatchError

MAXIMIZE = "max"
MINIMIZE = "min"

PHASE_SPAN = np.pi / 2.0


class GateConvention(enum.Enum):
    """The two admissible (alpha, beta) phase-gate parameter pairs."""

    BINARY01 = (0.0, 1.0)
    ISING_PM = (1.0, -1.0)

    @property
    def alpha(self) -> float:
        return self.value[0]

    @property
    def beta(self) -> float:
        return self.value[1]

    @property
    def spin(self) -> bool:
        """True when bit b enters the objective as (-1)**b."""
        return self is GateConvention.ISING_PM


def _check_sense(sense: str) -> str:
    if sense not in (MAXIMIZE, MINIMIZE):
        raise ValueError(f"sense must be {MAXIMIZE!r} or {MINIMIZE!r}, "
                         f"got {sense!r}")
    return sense


@dataclass(frozen=True)
class QuboInstance:
    """Objective sum(c_j x_j) + sum(q_jk x_j x_k) over binary variables."""

    n: int
    linear: tuple
    quadratic: tuple  # (j, k, value) triples with j < k, no duplicates
    sense: str = MAXIMIZE

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one variable, got n={self.n}")
        linear = tuple(float(c) for c in self.linear)
        if len(linear) != self.n:
            raise DimensionMismatchError(
                f"expected {self.n} linear coefficients, got {len(linear)}")
        quads = []
        seen = set()
        for j, k, val in self.quadratic:
            j, k = int(j), int(k)
            if not (0 <= j < k < self.n):
                raise ValueError(
                    f"quadratic pair ({j},{k}) must satisfy 0 <= j < k < n")
            if (j, k) in seen:
                raise ValueError(f"duplicate quadratic pair ({j},{k})")
            seen.add((j, k))
            quads.append((j, k, float(val)))
        _check_sense(self.sense)
        object.__setattr__(self, "linear", linear)
        object.__setattr__(self, "quadratic", tuple(quads))

    def quad_arrays(self):
        qj = np.array([t[0] for t in self.quadratic], dtype=np.int64)
        qk = np.array([t[1] for t in self.quadratic], dtype=np.int64)
        qv = np.array([t[2] for t in self.quadratic], dtype=np.float64)
        return qj, qk, qv


@dataclass(frozen=True)
class ScalingPlan:
    """Affine map from objective values to eigenphases in [0, pi/2]."""

    scale: float
    offset: float
    lower_bound: float
    upper_bound: float
    sense: str = MAXIMIZE


@dataclass(frozen=True)
class Solution:
    bitstring: tuple
    value: float
    iterations: int
    phi_recovered: float
    success_prob: float
    converged: bool
    dominant_bitstrings: tuple = ()


def evaluate(q: QuboInstance, bits,
             convention: GateConvention = GateConvention.BINARY01) -> float:
    """Objective value of one assignment.

    BINARY01 evaluates variables as bits in {0, 1}.  ISING_PM mirrors the
    spin gate pair: linear terms see s_j = (-1)**x_j and quadratic terms
    see x_j * s_k, which is how coupling instances built by
    ising_from_couplings encode products of spins.
    """
    bits = tuple(int(b) for b in bits)
    if len(bits) != q.n:
        raise DimensionMismatchError(
            f"expected {q.n} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("assignment entries must be 0 or 1")
    total = 0.0
    if convention.spin:
        for j, c in enumerate(q.linear):
            total += c * (1.0 - 2.0 * bits[j])
        for j, k, val in q.quadratic:
            total += val * bits[j] * (1.0 - 2.0 * bits[k])
    else:
        for j, c in enumerate(q.linear):
            total += c * bits[j]
        for j, k, val in q.quadratic:
            total += val * bits[j] * bits[k]
    return total


def objective_table(q: QuboInstance,
                    convention: GateConvention = GateConvention.BINARY01
                    ) -> np.ndarray:
    """Objective value at every basis index (little-endian bits)."""
    if q.n > LIMITS.max_qubo_enumeration:
        raise CapacityError(
            f"n={q.n} exceeds the enumeration cap of "
            f"{LIMITS.max_qubo_enumeration}")
    qj, qk, qv = q.quad_arrays()
    linear = np.asarray(q.linear, dtype=np.float64)
    return kernels.objective_table(q.n, linear, qj, qk, qv, convention.spin)


def term_bounds(q: QuboInstance,
                convention: GateConvention = GateConvention.BINARY01
                ) -> tuple[float, float]:
    """Coefficient-derived objective bounds (safe, not tight)."""
    lo = hi = 0.0
    if convention.spin:
        for c in q.linear:
            lo -= abs(c)
            hi += abs(c)
        for _, _, val in q.quadratic:
            lo -= abs(val)
            hi += abs(val)
    else:
        for c in q.linear:
            lo += min(0.0, c)
            hi += max(0.0, c)
        for _, _, val in q.quadratic:
            lo += min(0.0, val)
            hi += max(0.0, val)
    return lo, hi


def make_scaling(q: QuboInstance, sense: str | None = None,
                 convention: GateConvention = GateConvention.BINARY01
                 ) -> ScalingPlan:
    """Scale factor and uniform offset mapping objectives onto [0, pi/2].

    Maximise: phase = s*(H - lower_bound), so the maximiser is dominant.
    Minimise: phase = s*(upper_bound - H), so the minimiser is dominant.
    """
    sense = _check_sense(sense if sense is not None else q.sense)
    lo, hi = term_bounds(q, convention)
    spread = hi - lo
    if spread <= 0.0:
        raise ConstantObjectiveError(
            "objective bounds coincide; every assignment scores the same")
    scale = PHASE_SPAN / spread
    offset = -scale * lo if sense == MAXIMIZE else scale * hi
    return ScalingPlan(scale=scale, offset=offset, lower_bound=lo,
                       upper_bound=hi, sense=sense)


def compile_circuit(q: QuboInstance,
                    convention: GateConvention = GateConvention.BINARY01,
                    plan: ScalingPlan | None = None) -> PhaseCircuit:
    """Emit the phase circuit whose diagonal carries the scaled objective.

    One single-qubit gate per variable (ascending), one controlled gate
    per quadratic term (ascending pairs), then the uniform offset gate;
    zero coefficients still get their gate so the layout is structural.
    """
    if plan is None:
        plan = make_scaling(q, convention=convention)
    sgn = 1.0 if plan.sense == MAXIMIZE else -1.0
    a, b = convention.alpha, convention.beta
    gates: list = []
    for j, c in enumerate(q.linear):
        u = sgn * plan.scale * c
        gates.append(SinglePhase(j, a * u, b * u))
    for j, k, val in sorted(q.quadratic):
        u = sgn * plan.scale * val
        gates.append(ControlledPhase(j, k, a * u, b * u))
    gates.append(SinglePhase(0, plan.offset, plan.offset))
    return PhaseCircuit(q.n, tuple(gates))


def gate_count(n: int, m: int) -> int:
    """Objective gates of the compiled circuit: one per variable plus one
    per quadratic term ((n^2+n)/2 at full density); excludes the offset."""
    if m < 0 or m > n * (n - 1) // 2:
        raise ValueError(
            f"m={m} quadratic terms impossible for n={n} variables")
    return n + m


def brute_force_optimum(q: QuboInstance,
                        convention: GateConvention = GateConvention.BINARY01,
                        sense: str | None = None) -> tuple[tuple, float]:
    """Exact optimum by enumeration; ties break to the smallest index."""
    sense = _check_sense(sense if sense is not None else q.sense)
    table = objective_table(q, convention)
    best = int(np.argmax(table) if sense == MAXIMIZE else np.argmin(table))
    return bits_from_index(best, q.n), float(table[best])


def dominant_indices(phases: np.ndarray, eta: float = 1.0,
                     tol: float = 1e-12) -> np.ndarray:
    """Basis indices maximising |eta - e^{i phase}|, ties within tol."""
    r = np.abs(eta - np.exp(1j * phases))
    return np.flatnonzero(r >= r.max() - tol)


def _iteration_cap(phases: np.ndarray, n: int, eta: float) -> int:
    """50x the iteration estimate from the top two distinct distances."""
    r = np.abs(eta - np.exp(1j * phases))
    r_sorted = np.sort(r)[::-1]
    r1 = r_sorted[0]
    distinct = r_sorted[r_sorted < r1 - 1e-12]
    if distinct.size == 0 or distinct[0] <= 0.0:
        return 10_000
    est = n / np.log(r1 / distinct[0])
    return max(int(np.ceil(50.0 * est)), 50)


def solve(q: QuboInstance, cfg: EngineConfig | None = None,
          convention: GateConvention = GateConvention.BINARY01) -> Solution:
    """Compile, run the power engine from the uniform superposition, and
    read out the highest-probability basis state.

    Non-convergence within the iteration budget is reported through the
    converged flag, not an exception.  The budget defaults to 50x the
    eigengap-based iteration estimate.
    """
    if q.n > LIMITS.max_expand_qubits:
        raise CapacityError(
            f"n={q.n} exceeds the solve cap of {LIMITS.max_expand_qubits}")
    cfg = cfg or EngineConfig()
    plan = make_scaling(q, convention=convention)
    circuit = compile_circuit(q, convention, plan)
    diag = circuit_to_diagonal(circuit)
    dom = dominant_indices(diag.phases, cfg.eta)
    if cfg.max_iterate is None:
        cfg = replace(cfg,
                      max_iterate=_iteration_cap(diag.phases, q.n, cfg.eta))
    v0 = equal_superposition(q.n)
    summary, _trace = iterate(diag, v0, cfg, dominant_set=dom)

    probs = summary.v_final.probabilities()
    best = int(np.argmax(probs))
    bits = bits_from_index(best, q.n)
    alpha = summary.alpha_final
    phi = recover_phase(alpha) if alpha <= 2.0 + 1e-12 else float("nan")
    return Solution(
        bitstring=bits,
        value=evaluate(q, bits, convention),
        iterations=summary.iterations,
        phi_recovered=phi,
        success_prob=success_probability(summary.v_final, dom),
        converged=summary.converged,
        dominant_bitstrings=tuple(bits_from_index(int(i), q.n) for i in dom),
    )


def ising_from_couplings(couplings, n: int | None = None
                         ) -> tuple[QuboInstance, GateConvention]:
    """Spin-coupling Hamiltonian sum(J_ij s_i s_j) as an ISING_PM instance.

    Each J_ij s_i s_j is realised by the identity
    J*s_i*s_j = J*s_j - 2J*x_i*s_j, i.e. a linear coefficient J on spin j
    plus a quadratic coefficient -2J on the pair (i, j); evaluating the
    returned instance under ISING_PM reproduces the spin energies with
    s = (-1)**x.
    """
    seen = set()
    linear: dict[int, float] = {}
    quads: dict[tuple[int, int], float] = {}
    top = -1
    for i, j, val in couplings:
        i, j = int(i), int(j)
        if not 0 <= i < j:
            raise ValueError(f"coupling pair ({i},{j}) must satisfy 0 <= i < j")
        if (i, j) in seen:
            raise ValueError(f"duplicate coupling pair ({i},{j})")
        seen.add((i, j))
        top = max(top, j)
        linear[j] = linear.get(j, 0.0) + float(val)
        quads[(i, j)] = quads.get((i, j), 0.0) - 2.0 * float(val)
    if n is None:
        if top < 0:
            raise ValueError("empty coupling list needs an explicit n")
        n = top + 1
    elif top >= n:
        raise ValueError(f"coupling index {top} out of range for n={n}")
    inst = QuboInstance(
        n=n,
        linear=tuple(linear.get(j, 0.0) for j in range(n)),
        quadratic=tuple((j, k, v) for (j, k), v in sorted(quads.items())),
        sense=MINIMIZE,
    )
    return inst, GateConvention.ISING_PM


def random_instance(n: int, seed: int, density: float = 1.0,
                    sense: str = MAXIMIZE) -> QuboInstance:
    """Gaussian coefficients; each pair kept with probability `density`."""
    rng = np.random.default_rng(seed)
    linear = rng.normal(size=n)
    quads = []
    for j in range(n):
        for k in range(j + 1, n):
            if density >= 1.0 or rng.random() < density:
                quads.append((j, k, float(rng.normal())))
    return QuboInstance(n=n, linear=tuple(linear), quadratic=tuple(quads),
                        sense=sense)
