"""Classical shifted power iteration, the per-step oracle for the
measurement-driven engine.

One step maps v to (eta*I - U) v / alpha with alpha the norm of the
numerator; alpha converges to the dominant |eta - lambda| and v to the
corresponding eigenvector of U.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DiagonalOperator, Operator, StateVector, apply
from .errors import DegenerateIterateError

DEGENERATE_NORM = 1e-14
DEFAULT_TOL = 1e-10
DEFAULT_WINDOW = 3


@dataclass(frozen=True)
class ClassicalResult:
    v_final: StateVector
    alpha_final: float
    alpha_history: tuple
    iterations: int
    converged: bool


def shifted_step(op: Operator, v: StateVector,
                 eta: float = 1.0) -> tuple[StateVector, float]:
    """One power step: returns ((eta*I - U) v normalised, its norm)."""
    if eta < 0.0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    w = eta * v.amps - apply(op, v).amps
    alpha = float(np.linalg.norm(w))
    if alpha < DEGENERATE_NORM:
        raise DegenerateIterateError(
            f"(eta*I - U) v vanished (norm {alpha:.2e}); v lies in the "
            f"eigenspace of eigenvalue eta={eta}")
    return StateVector(v.n, w / alpha), alpha


def run(op: Operator, v0: StateVector, eta: float = 1.0,
        tol: float = DEFAULT_TOL, max_iterate: int | None = None,
        window: int = DEFAULT_WINDOW) -> ClassicalResult:
    """Iterate shifted_step until alpha stabilises.

    Convergence requires |alpha_k - alpha_{k-1}| < tol on `window`
    consecutive iterations, guarding against coincidental plateaus.  When
    ``max_iterate`` is omitted it defaults to 10x the iteration estimate,
    which needs known eigenvalues and is therefore only available for
    diagonal operators.
    """
    if max_iterate is None:
        max_iterate = default_max_iterate(op, eta)
    if max_iterate < 1:
        raise ValueError(f"max_iterate must be >= 1, got {max_iterate}")

    v = v0
    alphas: list[float] = []
    stable = 0
    converged = False
    for _ in range(max_iterate):
        v, alpha = shifted_step(op, v, eta)
        if alphas and abs(alpha - alphas[-1]) < tol:
            stable += 1
        else:
            stable = 0
        alphas.append(alpha)
        if stable >= window:
            converged = True
            break
    return ClassicalResult(
        v_final=v,
        alpha_final=alphas[-1],
        alpha_history=tuple(alphas),
        iterations=len(alphas),
        converged=converged,
    )


def default_max_iterate(op: Operator, eta: float = 1.0,
                        fallback: int = 1000) -> int:
    """10x the iteration estimate from the operator's top two
    eigenvalue distances; ``fallback`` when no unique gap exists."""
    if not isinstance(op, DiagonalOperator):
        raise ValueError(
            "max_iterate can only be derived for diagonal operators; "
            "pass it explicitly")
    r = np.abs(eta - op.eigenvalues())
    order = np.argsort(r)[::-1]
    r1 = r[order[0]]
    below = r[order[1:]]
    distinct = below[below < r1 - 1e-12]
    if distinct.size == 0 or distinct[0] <= 0.0:
        return fallback
    est = op.n / np.log(r1 / distinct[0])
    return max(int(np.ceil(10.0 * est)), 1)


def estimate_iterations(phi1: float, phi2: float, n: int,
                        eta: float = 1.0) -> float:
    """Iteration-count scale n / ln(|eta - e^{i phi1}| / |eta - e^{i phi2}|).

    An order-of-magnitude figure, not an exact count; for eta=1 the ratio
    reduces to sin(phi1/2)/sin(phi2/2).
    """
    r1 = abs(eta - np.exp(1j * phi1))
    r2 = abs(eta - np.exp(1j * phi2))
    if r2 <= 0.0:
        raise ValueError("phi2 coincides with the shift: |eta - lambda2| = 0")
    ratio = r1 / r2
    if ratio <= 1.0:
        raise ValueError(
            f"no unique dominant eigenvalue: |eta-lambda1|/|eta-lambda2| = "
            f"{ratio:.6g} <= 1")
    return float(n / np.log(ratio))
