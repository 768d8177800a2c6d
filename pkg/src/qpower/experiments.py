"""Gapped-instance generators and the two iteration-count studies:
iterations versus qubit count at fixed eigengap, and iterations versus
eigengap at fixed qubit count.

Runs use the closed-form diagonal iterate, so the success probability
after k steps is available directly and the smallest k reaching the
target is found by bisection (the dominant-subspace mass is monotone in
k when the top phase is unique).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .classical import estimate_iterations
from .core import DiagonalOperator, LIMITS
from .errors import CapacityError

DEFAULT_PHASE_RANGE = (0.0, np.pi / 3.0)
DEFAULT_GAP = 0.01
DEFAULT_RUNS = 15
DEFAULT_TARGET = 0.5
FIG2_N_LIST = tuple(range(6, 17))
FIG3_N = 20
FIG3_N_LOW_MEMORY = 16
FIG3_GAPS = (0.005, 0.01, 0.02, 0.05, 0.1)
CAP_FACTOR = 50.0


@dataclass(frozen=True)
class GappedInstance:
    """Diagonal operator with a unique top phase exactly `gap` above the
    second-largest one."""

    op: DiagonalOperator
    dominant_index: int
    gap: float
    phase_range: tuple


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    gap: float
    run_index: int
    seed: int
    iterations: int
    converged: bool


@dataclass(frozen=True)
class ExperimentTable:
    experiment: str
    rows: tuple

    def group_means(self) -> list[dict]:
        """Per-(n, gap) mean iteration counts, sorted by group key."""
        groups: dict[tuple, list[ExperimentRow]] = {}
        for row in self.rows:
            groups.setdefault((row.n, row.gap), []).append(row)
        out = []
        for (n, gap), rows in sorted(groups.items()):
            out.append({
                "experiment": self.experiment,
                "n": n,
                "gap": gap,
                "runs": len(rows),
                "mean_iterations": float(np.mean([r.iterations
                                                  for r in rows])),
                "all_converged": all(r.converged for r in rows),
            })
        return out


def derive_seed(master: int, stream: str, *indices: int) -> int:
    """Named deterministic sub-stream seed from one master seed."""
    tag = zlib.crc32(stream.encode("utf-8"))
    ss = np.random.SeedSequence([int(master), tag, *map(int, indices)])
    return int(ss.generate_state(1)[0])


def gen_gapped_diagonal(n: int, gap: float, phase_range=DEFAULT_PHASE_RANGE,
                        seed: int = 0) -> GappedInstance:
    """Uniform random phases with the top-two spacing pinned to `gap`.

    The largest draw is kept (lifted to lo+gap if needed so the runner-up
    stays in range), the second-largest is set to max-gap, and anything
    between the two is clamped just below the runner-up.
    """
    lo, hi = float(phase_range[0]), float(phase_range[1])
    if n < 2:
        raise ValueError(f"need n >= 2 for a gapped spectrum, got {n}")
    if n > LIMITS.max_state_qubits:
        raise CapacityError(
            f"n={n} exceeds the state cap of {LIMITS.max_state_qubits}")
    if not 0.0 < gap < hi - lo:
        raise ValueError(
            f"gap {gap} infeasible for phase range [{lo}, {hi}]")
    rng = np.random.default_rng(seed)
    phases = rng.uniform(lo, hi, size=1 << n)
    i1 = int(np.argmax(phases))
    top = max(float(phases[i1]), lo + gap)
    phases[i1] = top
    second = top - gap
    masked = phases.copy()
    masked[i1] = -np.inf
    i2 = int(np.argmax(masked))
    phases[i2] = second
    intruders = phases > second
    intruders[i1] = False
    intruders[i2] = False
    if np.any(intruders):
        phases[intruders] = max(lo, second - 1e-6 * gap)
    return GappedInstance(op=DiagonalOperator(n, phases), dominant_index=i1,
                          gap=gap, phase_range=(lo, hi))


def _decay_profile(inst: GappedInstance, eta: float) -> np.ndarray:
    r = np.abs(eta - np.exp(1j * inst.op.phases))
    with np.errstate(divide="ignore"):
        logr = np.log(r)
    return 2.0 * (logr - logr[inst.dominant_index])


def success_after(inst: GappedInstance, k: int, eta: float = 1.0) -> float:
    """Dominant-state probability after k steps from the uniform start."""
    decay = _decay_profile(inst, eta)
    weights = np.full(decay.shape, 2.0 ** (-inst.op.n))
    dom = np.array([inst.dominant_index], dtype=np.int64)
    return kernels.success_mass(decay, weights, dom, k)


def iterations_to_success(inst: GappedInstance, target: float = DEFAULT_TARGET,
                          eta: float = 1.0,
                          cap: int | None = None) -> tuple[int, bool]:
    """Smallest k whose success probability reaches the target.

    The success curve is monotone increasing in k (unique top phase), so
    the smallest k is located by doubling plus bisection on the closed
    form rather than stepping one iteration at a time.
    """
    decay = _decay_profile(inst, eta)
    weights = np.full(decay.shape, 2.0 ** (-inst.op.n))
    dom = np.array([inst.dominant_index], dtype=np.int64)

    if cap is None:
        phi1 = float(inst.op.phases[inst.dominant_index])
        try:
            est = estimate_iterations(phi1, phi1 - inst.gap, inst.op.n, eta)
            cap = max(int(np.ceil(CAP_FACTOR * est)), 1)
        except ValueError:
            # runner-up sits on the shift itself (|eta - lambda2| = 0):
            # decay is immediate and no estimate exists
            cap = 1000

    def success(k: int) -> float:
        return kernels.success_mass(decay, weights, dom, k)

    if success(cap) < target:
        return cap, False
    lo_k, hi_k = 0, 1
    while success(hi_k) < target:
        lo_k, hi_k = hi_k, min(2 * hi_k, cap)
    while hi_k - lo_k > 1:
        mid = (lo_k + hi_k) // 2
        if success(mid) >= target:
            hi_k = mid
        else:
            lo_k = mid
    return hi_k, True


def _run_group(experiment: str, n: int, gap: float, runs: int, target: float,
               eta: float, phase_range, master_seed: int) -> list:
    rows = []
    for run_index in range(runs):
        seed = derive_seed(master_seed, "instance", n, run_index,
                           int(round(gap * 1e9)))
        inst = gen_gapped_diagonal(n, gap, phase_range, seed)
        iters, converged = iterations_to_success(inst, target, eta)
        rows.append(ExperimentRow(n=n, gap=gap, run_index=run_index,
                                  seed=seed, iterations=iters,
                                  converged=converged))
    return rows


def run_fig2(n_list=FIG2_N_LIST, gap: float = DEFAULT_GAP,
             runs: int = DEFAULT_RUNS, target: float = DEFAULT_TARGET,
             eta: float = 1.0, phase_range=DEFAULT_PHASE_RANGE,
             seed: int = 0) -> ExperimentTable:
    """Iterations to the target success versus qubit count, fixed gap."""
    rows: list = []
    for n in n_list:
        rows.extend(_run_group("fig2", n, gap, runs, target, eta,
                               phase_range, seed))
    return ExperimentTable(experiment="fig2", rows=tuple(rows))


def run_fig3(n: int = FIG3_N, gap_list=FIG3_GAPS, runs: int = DEFAULT_RUNS,
             target: float = DEFAULT_TARGET, eta: float = 1.0,
             phase_range=DEFAULT_PHASE_RANGE, seed: int = 0,
             low_memory: bool = False) -> ExperimentTable:
    """Iterations to the target success versus eigengap, fixed n."""
    if low_memory:
        n = min(n, FIG3_N_LOW_MEMORY)
    rows: list = []
    for gap in gap_list:
        rows.extend(_run_group("fig3", n, gap, runs, target, eta,
                               phase_range, seed))
    return ExperimentTable(experiment="fig3", rows=tuple(rows))


def linear_fit(xs, ys) -> tuple[float, float, float]:
    """Least-squares slope, intercept and R^2."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    a = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(a, ys, rcond=None)
    pred = a @ coef
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - np.mean(ys)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return float(coef[0]), float(coef[1]), r2
