"""Measurement-driven shifted power iteration for unitary operators,
with QUBO/Ising/QAP phase-circuit compilation and solvers."""

__version__ = "0.1.0"

from .core import (ControlledPhase, DenseOperator, DiagonalOperator, LIMITS,
                   PhaseCircuit, SinglePhase, StateVector, apply,
                   canonical_phase, circuit_to_diagonal, equal_superposition,
                   random_unitary)
from .classical import ClassicalResult, estimate_iterations, run, shifted_step
from .engine import (BranchOutcome, EngineConfig, PowerTrace,
                     analytic_diagonal_iterate, hadamard_test_step, iterate,
                     recover_phase, success_probability,
                     tomography_converged)
from .qubo import (GateConvention, QuboInstance, ScalingPlan, Solution,
                   brute_force_optimum, compile_circuit, evaluate,
                   gate_count, ising_from_couplings, make_scaling, solve)
from .qap import (QapInstance, brute_force_qap, decode_assignment,
                  objective_kron, objective_sum, objective_trace,
                  qap_to_qubo)
from .experiments import gen_gapped_diagonal, run_fig2, run_fig3

__all__ = [
    "__version__",
    "ControlledPhase", "DenseOperator", "DiagonalOperator", "LIMITS",
    "PhaseCircuit", "SinglePhase", "StateVector", "apply", "canonical_phase",
    "circuit_to_diagonal", "equal_superposition", "random_unitary",
    "ClassicalResult", "estimate_iterations", "run", "shifted_step",
    "BranchOutcome", "EngineConfig", "PowerTrace",
    "analytic_diagonal_iterate", "hadamard_test_step", "iterate",
    "recover_phase", "success_probability", "tomography_converged",
    "GateConvention", "QuboInstance", "ScalingPlan", "Solution",
    "brute_force_optimum", "compile_circuit", "evaluate", "gate_count",
    "ising_from_couplings", "make_scaling", "solve",
    "QapInstance", "brute_force_qap", "decode_assignment", "objective_kron",
    "objective_sum", "objective_trace", "qap_to_qubo",
    "gen_gapped_diagonal", "run_fig2", "run_fig3",
]
