"""Quadratic assignment instances and their reduction to n^2-variable
binary objectives with permutation-constraint penalties.

Variable x_{ik} (facility i at location k) maps to binary index i*n + k.
The three objective formulations (explicit sum, trace, Kronecker) agree
on permutation matrices and pin down each other's index conventions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import LIMITS
from .errors import (CapacityError, DimensionMismatchError,
                     PenaltyTooSmallError)
from .qubo import MINIMIZE, QuboInstance


@dataclass(frozen=True)
class QapInstance:
    """Flow (F), distance (D) and allocation-cost (B) matrices of order n."""

    n: int
    F: np.ndarray
    D: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need order >= 1, got n={self.n}")
        for name in ("F", "D", "B"):
            m = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if m.shape != (self.n, self.n):
                raise DimensionMismatchError(
                    f"{name} must be {self.n}x{self.n}, got {m.shape}")
            m.setflags(write=False)
            object.__setattr__(self, name, m)


def _as_assignment(X, n: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (n, n):
        raise DimensionMismatchError(
            f"assignment must be {n}x{n}, got {X.shape}")
    return X


def is_permutation(X) -> bool:
    """Feasibility: every row and every column sums to exactly one."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        return False
    if not np.all((X == 0) | (X == 1)):
        return False
    return bool(np.all(X.sum(axis=0) == 1) and np.all(X.sum(axis=1) == 1))


def objective_sum(inst: QapInstance, X) -> float:
    """Explicit double sum: f_ij d_kp x_ik x_jp plus b_ik x_ik."""
    X = _as_assignment(X, inst.n)
    quad = np.einsum("ij,kp,ik,jp->", inst.F, inst.D, X, X)
    return float(quad + np.sum(inst.B * X))


def objective_trace(inst: QapInstance, X) -> float:
    """Trace form trace(F X D^T X^T + B X^T); requires a permutation.

    The transpose on D makes the form agree with the explicit sum for
    asymmetric distance matrices; for symmetric D it is the usual
    trace(F X D X^T).
    """
    X = _as_assignment(X, inst.n)
    if not is_permutation(X):
        raise ValueError("trace objective is defined on permutation matrices")
    return float(np.trace(inst.F @ X @ inst.D.T @ X.T + inst.B @ X.T))


def objective_kron(inst: QapInstance, X) -> float:
    """Kronecker form vec(X)^T (D (x) F) vec(X) + vec(B)^T vec(X), with
    column-major vec; the (D, F) pairing is what matches the explicit sum."""
    X = _as_assignment(X, inst.n)
    v = X.flatten(order="F")
    return float(v @ np.kron(inst.D, inst.F) @ v
                 + inst.B.flatten(order="F") @ v)


def permutation_matrix(perm, n: int) -> np.ndarray:
    X = np.zeros((n, n))
    for i, k in enumerate(perm):
        X[i, k] = 1.0
    return X


def brute_force_qap(inst: QapInstance) -> tuple[tuple, float]:
    """Exact minimum over all permutations; ties break lexicographically."""
    if inst.n > LIMITS.max_qap_enumeration:
        raise CapacityError(
            f"n={inst.n} exceeds the permutation-enumeration cap of "
            f"{LIMITS.max_qap_enumeration}")
    best_perm = None
    best_val = np.inf
    for perm in itertools.permutations(range(inst.n)):
        sigma = np.array(perm)
        val = float(np.sum(inst.F * inst.D[np.ix_(sigma, sigma)])
                    + np.sum(inst.B[np.arange(inst.n), sigma]))
        if val < best_val:
            best_val = val
            best_perm = perm
    return best_perm, best_val


def decode_assignment(bits, n: int) -> tuple[np.ndarray, bool]:
    """Bitstring of length n^2 to a row-major assignment matrix plus a
    feasibility flag (infeasibility is data, not an error)."""
    bits = tuple(int(b) for b in bits)
    if len(bits) != n * n:
        raise DimensionMismatchError(
            f"expected {n * n} bits for order {n}, got {len(bits)}")
    X = np.array(bits, dtype=np.int64).reshape(n, n)
    return X, is_permutation(X)


@dataclass(frozen=True)
class QapQuboEncoding:
    """Reduction output: the binary instance plus the bookkeeping the
    instance itself cannot carry (the additive constraint constant)."""

    qubo: QuboInstance
    penalty: float
    constant: float
    objective_spread: float

    def reported_value(self, bits) -> float:
        """Penalised objective with the dropped constant re-added."""
        from .qubo import evaluate
        return evaluate(self.qubo, bits) + self.constant


def qap_objective_coefficients(inst: QapInstance):
    """Linear/quadratic coefficients of the order-n objective over the
    n^2 binary variables x_{ik} -> index i*n + k."""
    n = inst.n
    nn = n * n
    linear = np.zeros(nn)
    quad: dict[tuple[int, int], float] = {}
    for v1 in range(nn):
        i, k = divmod(v1, n)
        linear[v1] += inst.F[i, i] * inst.D[k, k] + inst.B[i, k]
        for v2 in range(v1 + 1, nn):
            j, p = divmod(v2, n)
            coeff = inst.F[i, j] * inst.D[k, p] + inst.F[j, i] * inst.D[p, k]
            if coeff != 0.0:
                quad[(v1, v2)] = quad.get((v1, v2), 0.0) + coeff
    return linear, quad


def qap_to_qubo(inst: QapInstance,
                penalty: float | None = None) -> QapQuboEncoding:
    """Reduce to an n^2-variable minimisation with squared-violation
    penalties on the row and column constraints.

    Each constraint family contributes P*(sum x - 1)^2 expanded into
    -P per variable, +2P per same-row (same-column) pair, and +P to the
    constant, which is carried in the encoding metadata.  The penalty
    must exceed the coefficient-derived objective spread so every
    infeasible assignment scores above every feasible one; the default is
    twice the spread plus one.
    """
    n = inst.n
    nn = n * n
    linear, quad = qap_objective_coefficients(inst)

    lo = float(np.sum(np.minimum(linear, 0.0))
               + sum(min(0.0, v) for v in quad.values()))
    hi = float(np.sum(np.maximum(linear, 0.0))
               + sum(max(0.0, v) for v in quad.values()))
    spread = hi - lo
    if penalty is None:
        penalty = 2.0 * spread + 1.0
    elif penalty <= spread:
        raise PenaltyTooSmallError(
            f"penalty {penalty} must exceed the objective spread {spread}")

    for i in range(n):
        row = [i * n + k for k in range(n)]
        col = [k * n + i for k in range(n)]
        for group in (row, col):
            for v in group:
                linear[v] -= penalty
            for a in range(n):
                for b in range(a + 1, n):
                    key = (group[a], group[b])
                    quad[key] = quad.get(key, 0.0) + 2.0 * penalty
    constant = 2.0 * n * penalty

    qubo = QuboInstance(
        n=nn,
        linear=tuple(linear),
        quadratic=tuple((j, k, v) for (j, k), v in sorted(quad.items())
                        if v != 0.0),
        sense=MINIMIZE,
    )
    return QapQuboEncoding(qubo=qubo, penalty=float(penalty),
                           constant=constant, objective_spread=spread)


def random_instance(n: int, seed: int) -> QapInstance:
    """Uniform [0,1) flow/distance/cost matrices (diagonals kept)."""
    rng = np.random.default_rng(seed)
    return QapInstance(n=n, F=rng.random((n, n)), D=rng.random((n, n)),
                       B=rng.random((n, n)))
