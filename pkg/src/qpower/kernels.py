"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

Backend selection happens once at import time from the ``QPOWER_KERNELS``
environment variable: ``numba`` (require numba, fail loudly if missing),
``numpy`` (force the fallback), or ``auto`` (default: numba when
importable).  Both implementations of every kernel are importable
directly (``*_numpy`` / ``*_numba``) for tests and benchmarks; see
``benchmarks/bench_kernels.py`` for a timing comparison.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_VAR = "QPOWER_KERNELS"


def _resolve_backend() -> str:
    choice = os.environ.get(_ENV_VAR, "auto").strip().lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be one of auto|numba|numpy, got {choice!r}")
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return BACKEND


# ---------------------------------------------------------------------------
# numpy implementations


def circuit_phase_table_numpy(n, s_qubit, s_ph0, s_ph1, c_ctrl, c_tgt,
                              c_ph10, c_ph11):
    """Accumulated diagonal phase of a gate list at every basis index.

    Basis index bit j (little-endian) is the value of qubit j.  A single
    gate on qubit q contributes ph0/ph1 by bit q; a controlled gate
    contributes 0 unless the control bit is 1, then ph10/ph11 by the
    target bit.
    """
    idx = np.arange(1 << n, dtype=np.int64)
    phases = np.zeros(1 << n, dtype=np.float64)
    for g in range(len(s_qubit)):
        bit = (idx >> s_qubit[g]) & 1
        phases += np.where(bit == 1, s_ph1[g], s_ph0[g])
    for g in range(len(c_ctrl)):
        ctrl = (idx >> c_ctrl[g]) & 1
        tgt = (idx >> c_tgt[g]) & 1
        phases += ctrl * np.where(tgt == 1, c_ph11[g], c_ph10[g])
    return phases


def objective_table_numpy(n, linear, quad_j, quad_k, quad_v, spin):
    """Objective value at every basis index of an n-variable instance.

    ``spin=False``: sum c_j*x_j + sum q*x_j*x_k over bits x in {0,1}.
    ``spin=True``:  sum c_j*s_j + sum q*x_j*s_k with s = +1 for bit 0,
    -1 for bit 1 (the two-entry/four-entry phase-gate conventions).
    """
    idx = np.arange(1 << n, dtype=np.int64)
    vals = np.zeros(1 << n, dtype=np.float64)
    for j in range(n):
        bit = ((idx >> j) & 1).astype(np.float64)
        vals += linear[j] * ((1.0 - 2.0 * bit) if spin else bit)
    for t in range(len(quad_j)):
        bj = ((idx >> quad_j[t]) & 1).astype(np.float64)
        bk = ((idx >> quad_k[t]) & 1).astype(np.float64)
        vals += quad_v[t] * (bj * (1.0 - 2.0 * bk) if spin else bj * bk)
    return vals


def success_mass_numpy(decay, weights, dominant, k):
    """Dominant-subspace probability after k shifted-power steps.

    ``decay`` holds 2*(log r_x - log r_max) <= 0, ``weights`` the initial
    probabilities |v0_x|^2, ``dominant`` the basis indices of the maximal
    |eta - lambda| subspace.
    """
    w = weights * np.exp(float(k) * decay)
    den = float(np.sum(w))
    if den == 0.0:
        return 0.0
    return float(np.sum(w[dominant])) / den


def analytic_state_numpy(logr, theta, logm, phi0, k):
    """Unnormalised k-step iterate of a diagonal operator in log form.

    Component x is exp(k*logr_x + logm_x) * exp(i*(k*theta_x + phi0_x)),
    rescaled by the maximal log magnitude so large k cannot underflow.
    Returns the complex amplitude array (caller normalises) and the
    maximal log magnitude (-inf means the iterate vanished).
    """
    logmag = float(k) * logr + logm
    top = float(np.max(logmag))
    if not np.isfinite(top):
        return np.zeros(logr.shape, dtype=np.complex128), top
    ang = float(k) * theta + phi0
    amps = np.exp(logmag - top) * (np.cos(ang) + 1j * np.sin(ang))
    return amps, top


# ---------------------------------------------------------------------------
# numba implementations

if BACKEND == "numba":
    from numba import njit

    @njit(cache=True)
    def _circuit_phase_table_nb(n, s_qubit, s_ph0, s_ph1, c_ctrl, c_tgt,
                                c_ph10, c_ph11):
        size = 1 << n
        phases = np.zeros(size, dtype=np.float64)
        for x in range(size):
            acc = 0.0
            for g in range(s_qubit.shape[0]):
                if (x >> s_qubit[g]) & 1:
                    acc += s_ph1[g]
                else:
                    acc += s_ph0[g]
            for g in range(c_ctrl.shape[0]):
                if (x >> c_ctrl[g]) & 1:
                    if (x >> c_tgt[g]) & 1:
                        acc += c_ph11[g]
                    else:
                        acc += c_ph10[g]
            phases[x] = acc
        return phases

    @njit(cache=True)
    def _objective_table_nb(n, linear, quad_j, quad_k, quad_v, spin):
        size = 1 << n
        vals = np.zeros(size, dtype=np.float64)
        for x in range(size):
            acc = 0.0
            for j in range(n):
                bit = (x >> j) & 1
                if spin:
                    acc += linear[j] * (1.0 - 2.0 * bit)
                else:
                    acc += linear[j] * bit
            for t in range(quad_j.shape[0]):
                bj = (x >> quad_j[t]) & 1
                bk = (x >> quad_k[t]) & 1
                if spin:
                    acc += quad_v[t] * bj * (1.0 - 2.0 * bk)
                else:
                    acc += quad_v[t] * bj * bk
            vals[x] = acc
        return vals

    @njit(cache=True)
    def _success_mass_nb(decay, weights, dominant, k):
        den = 0.0
        for x in range(decay.shape[0]):
            den += weights[x] * np.exp(k * decay[x])
        if den == 0.0:
            return 0.0
        num = 0.0
        for i in range(dominant.shape[0]):
            x = dominant[i]
            num += weights[x] * np.exp(k * decay[x])
        return num / den

    @njit(cache=True)
    def _analytic_state_nb(logr, theta, logm, phi0, k):
        size = logr.shape[0]
        top = -np.inf
        for x in range(size):
            m = k * logr[x] + logm[x]
            if m > top:
                top = m
        amps = np.zeros(size, dtype=np.complex128)
        if not np.isfinite(top):
            return amps, top
        for x in range(size):
            m = k * logr[x] + logm[x] - top
            if m > -745.0:  # exp underflows to 0 below this anyway
                ang = k * theta[x] + phi0[x]
                amps[x] = np.exp(m) * complex(np.cos(ang), np.sin(ang))
        return amps, top

    def circuit_phase_table_numba(n, s_qubit, s_ph0, s_ph1, c_ctrl, c_tgt,
                                  c_ph10, c_ph11):
        return _circuit_phase_table_nb(n, s_qubit, s_ph0, s_ph1,
                                       c_ctrl, c_tgt, c_ph10, c_ph11)

    def objective_table_numba(n, linear, quad_j, quad_k, quad_v, spin):
        return _objective_table_nb(n, linear, quad_j, quad_k, quad_v, spin)

    def success_mass_numba(decay, weights, dominant, k):
        return float(_success_mass_nb(decay, weights, dominant, float(k)))

    def analytic_state_numba(logr, theta, logm, phi0, k):
        return _analytic_state_nb(logr, theta, logm, phi0, float(k))

    circuit_phase_table = circuit_phase_table_numba
    objective_table = objective_table_numba
    success_mass = success_mass_numba
    analytic_state = analytic_state_numba
else:
    circuit_phase_table_numba = None
    objective_table_numba = None
    success_mass_numba = None
    analytic_state_numba = None

    circuit_phase_table = circuit_phase_table_numpy
    objective_table = objective_table_numpy
    success_mass = success_mass_numpy
    analytic_state = analytic_state_numpy
