"""State vectors and the three operator representations.

A basis index x is read little-endian: bit j of x is the value of
qubit/variable j.  All values are immutable after construction (backing
arrays are frozen), so they are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DimensionMismatchError, UnitarityError
from . import kernels

UNITARITY_TOL = 1e-10


@dataclass
class Limits:
    """Desk-scale resource caps; mutate the module-level ``LIMITS`` to
    raise them."""

    max_state_qubits: int = 26
    max_dense_qubits: int = 10
    max_expand_qubits: int = 20  # circuit_to_diagonal brute-force cap
    max_qubo_enumeration: int = 24
    max_qap_enumeration: int = 8


LIMITS = Limits()


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_state_size(n: int) -> None:
    if n < 1:
        raise CapacityError(f"need at least one qubit, got n={n}")
    if n > LIMITS.max_state_qubits:
        raise CapacityError(
            f"n={n} exceeds the state cap of {LIMITS.max_state_qubits} qubits")


@dataclass(frozen=True)
class StateVector:
    """Normalised vector of 2**n complex amplitudes."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        _check_state_size(self.n)
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise DimensionMismatchError(
                f"expected {1 << self.n} amplitudes for n={self.n}, "
                f"got shape {amps.shape}")
        object.__setattr__(self, "amps", _freeze(amps))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        nrm = self.norm
        if nrm == 0.0:
            raise ValueError("cannot normalise the zero vector")
        return StateVector(self.n, self.amps / nrm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def equal_superposition(n: int) -> StateVector:
    """Uniform superposition: every basis state has probability 2**-n."""
    _check_state_size(n)
    amp = 2.0 ** (-n / 2.0)
    return StateVector(n, np.full(1 << n, amp, dtype=np.complex128))


def basis_state(n: int, index: int) -> StateVector:
    _check_state_size(n)
    if not 0 <= index < (1 << n):
        raise ValueError(f"basis index {index} out of range for n={n}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n, amps)


@dataclass(frozen=True)
class DiagonalOperator:
    """Diagonal unitary; entry x is exp(i * phases[x]).

    Phases are stored unreduced; callers reduce mod 2*pi only when
    comparing.
    """

    n: int
    phases: np.ndarray

    def __post_init__(self):
        _check_state_size(self.n)
        phases = np.ascontiguousarray(self.phases, dtype=np.float64)
        if phases.shape != (1 << self.n,):
            raise DimensionMismatchError(
                f"expected {1 << self.n} phases for n={self.n}, "
                f"got shape {phases.shape}")
        object.__setattr__(self, "phases", _freeze(phases))

    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.phases)


@dataclass(frozen=True)
class DenseOperator:
    """Explicit 2**n x 2**n unitary matrix (checked on construction)."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise CapacityError(f"need at least one qubit, got n={self.n}")
        if self.n > LIMITS.max_dense_qubits:
            raise CapacityError(
                f"n={self.n} exceeds the dense-matrix cap of "
                f"{LIMITS.max_dense_qubits} qubits")
        dim = 1 << self.n
        entries = np.ascontiguousarray(self.entries, dtype=np.complex128)
        if entries.shape != (dim, dim):
            raise DimensionMismatchError(
                f"expected a {dim}x{dim} matrix, got shape {entries.shape}")
        dev = np.max(np.abs(entries.conj().T @ entries - np.eye(dim)))
        if dev > UNITARITY_TOL:
            raise UnitarityError(
                f"matrix is not unitary: max |U^H U - I| = {dev:.3e}")
        object.__setattr__(self, "entries", _freeze(entries))


@dataclass(frozen=True)
class SinglePhase:
    """Diagonal one-qubit gate: phase0 on bit 0, phase1 on bit 1."""

    qubit: int
    phase0: float
    phase1: float


@dataclass(frozen=True)
class ControlledPhase:
    """Diagonal two-qubit gate: identity when the control bit is 0, else
    phase10/phase11 by the target bit."""

    control: int
    target: int
    phase10: float
    phase11: float


Gate = SinglePhase | ControlledPhase


@dataclass(frozen=True)
class PhaseCircuit:
    """Ordered list of diagonal phase gates on n qubits."""

    n: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        _check_state_size(self.n)
        gates = tuple(self.gates)
        for g in gates:
            if isinstance(g, SinglePhase):
                if not 0 <= g.qubit < self.n:
                    raise DimensionMismatchError(
                        f"gate qubit {g.qubit} out of range for n={self.n}")
            elif isinstance(g, ControlledPhase):
                if not (0 <= g.control < self.n and 0 <= g.target < self.n):
                    raise DimensionMismatchError(
                        f"gate qubits ({g.control},{g.target}) out of range "
                        f"for n={self.n}")
                if g.control == g.target:
                    raise DimensionMismatchError(
                        f"control and target coincide on qubit {g.control}")
            else:
                raise TypeError(f"unsupported gate type {type(g).__name__}")
        object.__setattr__(self, "gates", gates)


Operator = DiagonalOperator | DenseOperator | PhaseCircuit


def _gate_arrays(circuit: PhaseCircuit):
    singles = [g for g in circuit.gates if isinstance(g, SinglePhase)]
    ctrls = [g for g in circuit.gates if isinstance(g, ControlledPhase)]
    return (
        np.array([g.qubit for g in singles], dtype=np.int64),
        np.array([g.phase0 for g in singles], dtype=np.float64),
        np.array([g.phase1 for g in singles], dtype=np.float64),
        np.array([g.control for g in ctrls], dtype=np.int64),
        np.array([g.target for g in ctrls], dtype=np.int64),
        np.array([g.phase10 for g in ctrls], dtype=np.float64),
        np.array([g.phase11 for g in ctrls], dtype=np.float64),
    )


def circuit_to_diagonal(circuit: PhaseCircuit,
                        cap: int | None = None) -> DiagonalOperator:
    """Expand a phase circuit into its diagonal, reduced mod 2*pi."""
    limit = LIMITS.max_expand_qubits if cap is None else cap
    if circuit.n > limit:
        raise CapacityError(
            f"n={circuit.n} exceeds the circuit-expansion cap of {limit}")
    phases = kernels.circuit_phase_table(circuit.n, *_gate_arrays(circuit))
    return DiagonalOperator(circuit.n, np.mod(phases, 2.0 * np.pi))


def apply(op: Operator, v: StateVector) -> StateVector:
    """Apply an operator to a state; the result keeps unit norm."""
    if op.n != v.n:
        raise DimensionMismatchError(
            f"operator acts on {op.n} qubits, state has {v.n}")
    if isinstance(op, DiagonalOperator):
        return StateVector(v.n, np.exp(1j * op.phases) * v.amps)
    if isinstance(op, DenseOperator):
        return StateVector(v.n, op.entries @ v.amps)
    if isinstance(op, PhaseCircuit):
        idx = np.arange(1 << v.n, dtype=np.int64)
        amps = v.amps.copy()
        for g in op.gates:
            if isinstance(g, SinglePhase):
                bit = (idx >> g.qubit) & 1
                amps *= np.exp(1j * np.where(bit == 1, g.phase1, g.phase0))
            else:
                ctrl = (idx >> g.control) & 1
                tgt = (idx >> g.target) & 1
                ph = ctrl * np.where(tgt == 1, g.phase11, g.phase10)
                amps *= np.exp(1j * ph)
        return StateVector(v.n, amps)
    raise TypeError(f"unsupported operator type {type(op).__name__}")


def random_unitary(n: int, seed: int) -> DenseOperator:
    """Deterministic Haar-style unitary from a QR orthonormalisation."""
    if n < 1:
        raise CapacityError(f"need at least one qubit, got n={n}")
    if n > LIMITS.max_dense_qubits:
        raise CapacityError(
            f"n={n} exceeds the dense-matrix cap of "
            f"{LIMITS.max_dense_qubits} qubits")
    rng = np.random.default_rng(seed)
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return DenseOperator(n, q)


def bits_from_index(index: int, n: int) -> tuple:
    """Little-endian bit tuple of a basis index: entry j is bit j."""
    return tuple((index >> j) & 1 for j in range(n))


def index_from_bits(bits) -> int:
    return sum((int(b) & 1) << j for j, b in enumerate(bits))


def wrap_angle(x):
    """Reduce angles to (-pi, pi] for circular comparisons."""
    out = np.mod(np.asarray(x, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi
    out = np.where(out == -np.pi, np.pi, out)
    return out if out.ndim else float(out)


def canonical_phase(v: StateVector) -> StateVector:
    """Rotate the global phase so the largest-magnitude amplitude is real
    positive, giving a canonical representative of the ray."""
    mags = np.abs(v.amps)
    i = int(np.argmax(mags))
    if mags[i] == 0.0:
        return v
    rot = np.conj(v.amps[i]) / mags[i]
    return StateVector(v.n, v.amps * rot)
