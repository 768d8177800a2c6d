"""Measurement-driven shifted power iteration.

Each step interferes an ancilla with a controlled application of U so
that measuring the ancilla collapses the register onto (eta*I + U)v or
(eta*I - U)v.  Post-selecting the second branch reproduces the classical
shifted power sequence; sampling follows the Bernoulli branch statistics
instead.  The stopping rule compares the branch-probability statistic
every few iterations, and the converged branch norm yields the dominant
eigenphase via arccos(1 - alpha^2/2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .classical import ClassicalResult
from .core import DiagonalOperator, Operator, StateVector, apply
from .errors import DeadBranchError, DegenerateIterateError

DEAD_BRANCH_NORM = 1e-14
DEFAULT_MAX_ITERATE = 10_000

POST_SELECT = "postselect"
SAMPLE = "sample"


@dataclass(frozen=True)
class EngineConfig:
    eta: float = 1.0
    mode: str = POST_SELECT
    tol: float = 1e-6
    window: int = 3
    max_iterate: int | None = None
    seed: int | None = None
    tomography_stride: int = 5

    def __post_init__(self):
        if self.mode not in (POST_SELECT, SAMPLE):
            raise ValueError(f"mode must be {POST_SELECT!r} or {SAMPLE!r}, "
                             f"got {self.mode!r}")
        if self.eta < 0.0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.tol <= 0.0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.tomography_stride < 1:
            raise ValueError(f"tomography_stride must be >= 1, "
                             f"got {self.tomography_stride}")
        if self.max_iterate is not None and self.max_iterate < 1:
            raise ValueError(f"max_iterate must be >= 1, "
                             f"got {self.max_iterate}")


@dataclass(frozen=True)
class BranchOutcome:
    """Both post-measurement branches of one engine step.

    ``alpha`` is the unhalved norm ||(eta*I - U) v||, the statistic the
    eigenphase is recovered from.  A branch with norm below 1e-14 is
    reported with probability 0 and no state.
    """

    p0: float
    p1: float
    state0: StateVector | None
    state1: StateVector | None
    alpha: float


@dataclass(frozen=True)
class TraceRecord:
    k: int
    branch: int
    p1: float
    alpha: float
    phi_estimate: float
    success_prob: float | None = None


@dataclass
class PowerTrace:
    mode: str
    seed: int | None
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)


def hadamard_test_step(op: Operator, v: StateVector, eta: float = 1.0,
                       route: str = "circuit") -> BranchOutcome:
    """One ancilla-interference step.

    ``route="circuit"`` prepares the ancilla as cos(t)|0> + sin(t)|1>
    with cot(t) = eta, applies controlled-U and a Hadamard, and reads the
    branch amplitudes off the final state.  ``route="direct"`` forms
    (eta*I -+ U) v at the matrix level.  Both agree to 1e-12.
    """
    if eta < 0.0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    uv = apply(op, v).amps
    scale = 2.0 * (1.0 + eta * eta)
    if route == "circuit":
        theta = np.arctan2(1.0, eta)
        ct, st = np.cos(theta), np.sin(theta)
        u0 = (ct * v.amps + st * uv) / np.sqrt(2.0)
        u1 = (ct * v.amps - st * uv) / np.sqrt(2.0)
        raw0 = n0 = float(np.linalg.norm(u0))
        raw1 = n1 = float(np.linalg.norm(u1))
        alpha = np.sqrt(scale) * n1
    elif route == "direct":
        u0 = eta * v.amps + uv
        u1 = eta * v.amps - uv
        raw0 = float(np.linalg.norm(u0))
        raw1 = float(np.linalg.norm(u1))
        n0 = raw0 / np.sqrt(scale)  # sqrt of the branch probability
        n1 = raw1 / np.sqrt(scale)
        alpha = raw1
    else:
        raise ValueError(f"route must be 'circuit' or 'direct', got {route!r}")

    dead0 = n0 < DEAD_BRANCH_NORM
    dead1 = n1 < DEAD_BRANCH_NORM
    return BranchOutcome(
        p0=0.0 if dead0 else n0 * n0,
        p1=0.0 if dead1 else n1 * n1,
        state0=None if dead0 else StateVector(v.n, u0 / raw0),
        state1=None if dead1 else StateVector(v.n, u1 / raw1),
        alpha=0.0 if dead1 else float(alpha),
    )


def recover_phase(alpha: float) -> float:
    """Dominant eigenphase from the converged branch norm:
    arccos(1 - alpha^2/2), in [0, pi]."""
    if alpha < 0.0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if alpha > 2.0 + 1e-12:
        raise ValueError(f"alpha={alpha} exceeds 2; no eigenphase matches")
    a = min(alpha, 2.0)
    return float(np.arccos(1.0 - a * a / 2.0))


def _phi_estimate(alpha: float) -> float:
    if alpha > 2.0 + 1e-12:
        return float("nan")
    return recover_phase(alpha)


def success_probability(v: StateVector, dominant_set) -> float:
    """Probability mass of the iterate on the given basis indices."""
    idx = np.asarray(sorted(dominant_set), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("dominant_set must be nonempty")
    if idx.min() < 0 or idx.max() >= (1 << v.n):
        raise ValueError("dominant_set contains out-of-range basis indices")
    return float(np.sum(np.abs(v.amps[idx]) ** 2))


def tomography_converged(trace: PowerTrace, cfg: EngineConfig) -> bool:
    """True when the last `window` branch statistics, sampled every
    `tomography_stride` iterations, pairwise differ by less than tol."""
    if not trace.records:
        raise ValueError("trace is empty")
    samples = [r.p1 for r in trace.records
               if r.k % cfg.tomography_stride == 0]
    if len(samples) < cfg.window:
        return False
    tail = samples[-cfg.window:]
    return max(tail) - min(tail) < cfg.tol


def iterate(op: Operator, v0: StateVector, cfg: EngineConfig,
            dominant_set=None) -> tuple[ClassicalResult, PowerTrace]:
    """Run the engine from v0 until the tomography stopping rule fires or
    max_iterate is exhausted.

    Post-select mode always takes the (eta*I - U) branch and reproduces
    the classical sequence.  Sample mode draws the branch from the exact
    branch probabilities using the config seed; a sampled branch whose
    probability is numerically zero falls back to the other branch, and
    branch-0 trajectories keep iterating.  Exhausting max_iterate is
    reported as converged=False, not an error.
    """
    max_iterate = cfg.max_iterate or DEFAULT_MAX_ITERATE
    rng = np.random.default_rng(cfg.seed) if cfg.mode == SAMPLE else None
    dom = sorted(dominant_set) if dominant_set is not None else None

    trace = PowerTrace(mode=cfg.mode, seed=cfg.seed)
    v = v0
    alphas: list[float] = []
    samples: list[float] = []  # incremental copy of what tomography sees
    converged = False
    for k in range(1, max_iterate + 1):
        out = hadamard_test_step(op, v, cfg.eta)
        if cfg.mode == POST_SELECT:
            branch = 1
        else:
            branch = 1 if rng.random() < out.p1 else 0
            if (out.state1 if branch == 1 else out.state0) is None:
                branch = 1 - branch
        state = out.state1 if branch == 1 else out.state0
        if state is None:
            raise DeadBranchError(
                f"branch {branch} has zero probability at iteration {k}")
        v = state
        alphas.append(out.alpha)
        trace.records.append(TraceRecord(
            k=k,
            branch=branch,
            p1=out.p1,
            alpha=out.alpha,
            phi_estimate=_phi_estimate(out.alpha),
            success_prob=(success_probability(v, dom)
                          if dom is not None else None),
        ))
        if k % cfg.tomography_stride == 0:
            samples.append(out.p1)
            if len(samples) >= cfg.window:
                tail = samples[-cfg.window:]
                if max(tail) - min(tail) < cfg.tol:
                    converged = True
                    break

    summary = ClassicalResult(
        v_final=v,
        alpha_final=alphas[-1],
        alpha_history=tuple(alphas),
        iterations=len(alphas),
        converged=converged,
    )
    return summary, trace


def analytic_diagonal_iterate(op: DiagonalOperator, v0: StateVector, k: int,
                              eta: float = 1.0) -> StateVector:
    """Closed form for k post-selected steps of a diagonal operator.

    Component x of the unnormalised iterate is (eta - e^{i phi_x})^k
    v0_x; magnitudes and angles accumulate in log form and are rescaled
    by the maximal log magnitude, so k in the hundreds cannot underflow.
    """
    if op.n != v0.n:
        raise ValueError(f"operator acts on {op.n} qubits, state has {v0.n}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0:
        return v0
    w = eta - np.exp(1j * op.phases)
    r = np.abs(w)
    mags = np.abs(v0.amps)
    with np.errstate(divide="ignore"):
        logr = np.log(r)
        logm = np.log(mags)
    amps, top = kernels.analytic_state(logr, np.angle(w), logm,
                                       np.angle(v0.amps), k)
    if not np.isfinite(top):
        raise DegenerateIterateError(
            "every component of the k-step iterate vanished")
    nrm = np.linalg.norm(amps)
    return StateVector(op.n, amps / nrm)
