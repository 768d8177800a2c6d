import itertools

import numpy as np
import pytest

from qpower.core import (bits_from_index, circuit_to_diagonal,
                         SinglePhase, ControlledPhase, wrap_angle)
from qpower.engine import EngineConfig
from qpower.errors import ConstantObjectiveError
from qpower.qubo import (GateConvention, MAXIMIZE, MINIMIZE, QuboInstance,
                         ScalingPlan, brute_force_optimum, compile_circuit,
                         dominant_indices, evaluate, gate_count,
                         ising_from_couplings, make_scaling, objective_table,
                         random_instance, solve)

from conftest import (diag_phases_bruteforce, gapped_random_instance,
                      qubo_value_bruteforce)

EXAMPLE = QuboInstance(2, (1.0, -2.0), ((0, 1, 3.0),), sense=MAXIMIZE)


class TestEvaluate:
    def test_zero_assignment(self):
        assert evaluate(EXAMPLE, (0, 0)) == 0.0

    def test_enumeration_of_example(self):
        # 4-case enumeration: max at (1,1) -> 2, min at (0,1) -> -2
        values = {bits: evaluate(EXAMPLE, bits)
                  for bits in itertools.product((0, 1), repeat=2)}
        assert values[(1, 1)] == 2.0
        assert values[(0, 1)] == -2.0
        assert max(values.values()) == 2.0
        assert min(values.values()) == -2.0

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("conv", [GateConvention.BINARY01,
                                      GateConvention.ISING_PM])
    def test_matches_bruteforce_oracle(self, seed, conv):
        inst = random_instance(5, seed=seed)
        for x in range(1 << 5):
            bits = bits_from_index(x, 5)
            want = qubo_value_bruteforce(5, inst.linear, inst.quadratic,
                                         bits, spin=conv.spin)
            assert abs(evaluate(inst, bits, conv) - want) < 1e-12

    @pytest.mark.parametrize("conv", [GateConvention.BINARY01,
                                      GateConvention.ISING_PM])
    def test_table_matches_pointwise(self, conv):
        inst = random_instance(6, seed=77)
        table = objective_table(inst, conv)
        for x in (0, 1, 17, 40, 63):
            assert abs(table[x]
                       - evaluate(inst, bits_from_index(x, 6), conv)) < 1e-12


class TestMakeScaling:
    def test_example_bounds(self):
        plan = make_scaling(EXAMPLE)
        assert plan.lower_bound == -2.0
        assert plan.upper_bound == 4.0
        assert abs(plan.scale - np.pi / 12) < 1e-15

    def test_single_variable(self):
        inst = QuboInstance(1, (1.0,), ())
        plan = make_scaling(inst)
        assert (plan.lower_bound, plan.upper_bound) == (0.0, 1.0)
        assert abs(plan.scale - np.pi / 2) < 1e-15
        diag = circuit_to_diagonal(compile_circuit(inst, plan=plan))
        assert np.allclose(diag.phases, [0.0, np.pi / 2])

    def test_minimize_puts_span_on_minimiser(self):
        diag = circuit_to_diagonal(compile_circuit(
            QuboInstance(2, (1.0, -2.0), ((0, 1, 3.0),), sense=MINIMIZE)))
        # basis (0,1) is index 2; its objective -2 is the minimum
        assert abs(diag.phases[2] - np.pi / 2) < 1e-12

    def test_constant_objective_rejected(self):
        with pytest.raises(ConstantObjectiveError):
            make_scaling(QuboInstance(3, (0.0, 0.0, 0.0), ()))


class TestCompile:
    def test_example_scaled_phases(self):
        plan = make_scaling(EXAMPLE)
        diag = circuit_to_diagonal(compile_circuit(EXAMPLE, plan=plan))
        want = plan.scale * np.array([2.0, 3.0, 0.0, 4.0])
        assert np.max(np.abs(wrap_angle(diag.phases - want))) < 1e-12

    def test_gate_layout(self):
        circuit = compile_circuit(EXAMPLE)
        assert len(circuit.gates) == 2 + 1 + 1  # singles, pair, offset
        assert isinstance(circuit.gates[0], SinglePhase)
        assert isinstance(circuit.gates[2], ControlledPhase)
        offset = circuit.gates[-1]
        assert isinstance(offset, SinglePhase)
        assert offset.phase0 == offset.phase1

    def test_zero_coefficients_keep_structure(self):
        inst = QuboInstance(3, (0.0, 0.0, 1.0),
                            ((0, 1, 0.0), (1, 2, 0.0)))
        circuit = compile_circuit(inst)
        assert len(circuit.gates) == 3 + 2 + 1
        diag = circuit_to_diagonal(circuit)
        # only variable 2 carries phase; everything else contributes zero
        assert abs(diag.phases[0]) < 1e-15

    def test_binary01_zero_alpha_leaves_bit0_unphased(self):
        circuit = compile_circuit(EXAMPLE)
        g = circuit.gates[0]
        assert g.phase0 == 0.0

    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("conv", [GateConvention.BINARY01,
                                      GateConvention.ISING_PM])
    @pytest.mark.parametrize("sense", [MAXIMIZE, MINIMIZE])
    def test_soundness_random_instances(self, seed, conv, sense):
        n = 4 + seed % 5
        inst = random_instance(n, seed=seed, density=0.7, sense=sense)
        plan = make_scaling(inst, convention=conv)
        circuit = compile_circuit(inst, conv, plan)
        got = diag_phases_bruteforce(circuit)
        table = objective_table(inst, conv)
        if sense == MAXIMIZE:
            want = plan.scale * (table - plan.lower_bound)
        else:
            want = plan.scale * (plan.upper_bound - table)
        assert np.max(np.abs(wrap_angle(got - want))) < 1e-9
        # compiled spectrum sits inside [0, pi/2]
        wrapped = wrap_angle(got)
        assert np.all(wrapped > -1e-12)
        assert np.all(wrapped < np.pi / 2 + 1e-12)


class TestGateCount:
    def test_full_density_small(self):
        assert gate_count(4, 6) == 10  # (n^2+n)/2 at n=4

    def test_single_variable(self):
        assert gate_count(1, 0) == 1

    def test_full_density_ten(self):
        assert gate_count(10, 45) == 55

    def test_matches_compiled_circuit(self):
        inst = random_instance(5, seed=1, density=0.6)
        circuit = compile_circuit(inst)
        assert len(circuit.gates) == gate_count(5, len(inst.quadratic)) + 1

    def test_impossible_pair_count(self):
        with pytest.raises(ValueError):
            gate_count(3, 4)


class TestBruteForce:
    def test_example(self):
        assert brute_force_optimum(EXAMPLE) == ((1, 1), 2.0)

    def test_all_zero_tie_breaks_low(self):
        inst = QuboInstance(3, (0.0, 0.0, 0.0), ((0, 1, 0.0),))
        assert brute_force_optimum(inst) == ((0, 0, 0), 0.0)

    def test_separable_minimum(self):
        inst = QuboInstance(2, (-1.0, -1.0), (), sense=MINIMIZE)
        assert brute_force_optimum(inst) == ((1, 1), -2.0)


class TestSolve:
    def test_example_instance(self):
        sol = solve(EXAMPLE)
        assert sol.converged
        assert sol.bitstring == (1, 1)
        assert sol.value == 2.0
        assert sol.success_prob > 0.5

    def test_minimize_example(self):
        inst = QuboInstance(2, (1.0, -2.0), ((0, 1, 3.0),), sense=MINIMIZE)
        sol = solve(inst)
        assert sol.converged
        assert sol.bitstring == (0, 1)
        assert sol.value == -2.0

    def test_constant_objective_error(self):
        with pytest.raises(ConstantObjectiveError):
            solve(QuboInstance(2, (0.0, 0.0), ()))

    @pytest.mark.parametrize("seed", range(20))
    def test_agrees_with_bruteforce_when_converged(self, seed):
        inst = gapped_random_instance(4 + seed % 5, seed)
        sol = solve(inst)
        if sol.converged:
            best_bits, best_val = brute_force_optimum(inst)
            assert sol.bitstring == best_bits
            assert sol.value == best_val

    def test_sense_duality(self):
        inst = gapped_random_instance(6, seed=3)
        negated = QuboInstance(
            inst.n, tuple(-c for c in inst.linear),
            tuple((j, k, -v) for j, k, v in inst.quadratic), sense=MINIMIZE)
        a = solve(inst)
        b = solve(negated)
        assert a.converged and b.converged
        assert a.bitstring == b.bitstring

    def test_sampled_mode_seeded(self):
        inst = gapped_random_instance(4, seed=5)
        cfg = EngineConfig(mode="sample", seed=11)
        a = solve(inst, cfg)
        b = solve(inst, cfg)
        assert a == b


class TestScaleInvariance:
    @pytest.mark.parametrize("shrink", [0.5, 0.25, 0.1])
    def test_dominant_state_unchanged_under_smaller_scale(self, shrink):
        inst = gapped_random_instance(5, seed=9)
        plan = make_scaling(inst)
        small = ScalingPlan(scale=plan.scale * shrink,
                            offset=-plan.scale * shrink * plan.lower_bound,
                            lower_bound=plan.lower_bound,
                            upper_bound=plan.upper_bound, sense=plan.sense)
        d_full = circuit_to_diagonal(compile_circuit(inst, plan=plan))
        d_small = circuit_to_diagonal(compile_circuit(inst, plan=small))
        assert np.array_equal(dominant_indices(d_full.phases),
                              dominant_indices(d_small.phases))


class TestIsing:
    def test_single_coupling_energies(self):
        inst, conv = ising_from_couplings([(0, 1, 1.0)])
        assert conv is GateConvention.ISING_PM
        energies = [evaluate(inst, bits_from_index(x, 2), conv)
                    for x in range(4)]
        assert energies == [1.0, -1.0, -1.0, 1.0]

    def test_empty_couplings_constant_zero(self):
        inst, conv = ising_from_couplings([], n=3)
        table = objective_table(inst, conv)
        assert np.allclose(table, 0.0)

    def test_ferromagnetic_chain_ground_states(self):
        chain = [(i, i + 1, -1.0) for i in range(3)]
        inst, conv = ising_from_couplings(chain)
        table = objective_table(inst, conv)
        assert abs(table.min() - (-3.0)) < 1e-12
        ground = np.flatnonzero(np.abs(table - table.min()) < 1e-12)
        assert sorted(ground.tolist()) == [0, 15]  # all-up and all-down

    def test_duplicate_pair_rejected(self):
        with pytest.raises(ValueError):
            ising_from_couplings([(0, 1, 1.0), (0, 1, 0.5)])

    def test_ising_compile_soundness(self):
        inst, conv = ising_from_couplings(
            [(0, 1, -1.0), (1, 2, 0.7), (0, 3, 0.4), (2, 3, -0.2)])
        plan = make_scaling(inst, convention=conv)
        diag = circuit_to_diagonal(compile_circuit(inst, conv, plan))
        table = objective_table(inst, conv)
        want = plan.scale * (plan.upper_bound - table)  # minimise sense
        assert np.max(np.abs(wrap_angle(diag.phases - want))) < 1e-9

    def test_solve_chain_ground_state(self):
        inst, conv = ising_from_couplings([(i, i + 1, -1.0)
                                           for i in range(3)])
        sol = solve(inst, convention=conv)
        assert sol.converged
        # two-fold degenerate ground state: the readout reports the
        # lowest-index member and both live in the dominant set
        assert sol.bitstring in ((0, 0, 0, 0), (1, 1, 1, 1))
        assert len(sol.dominant_bitstrings) == 2
        assert sol.value == -3.0
        assert sol.success_prob > 0.5


class TestConventionEquivalence:
    @pytest.mark.parametrize("seed", range(5))
    def test_phase_ordering_matches_spin_reformulation(self, seed):
        inst = random_instance(4, seed=seed)
        # standard {0,1} -> {-1,+1} rewrite: x_j = (1 - s_j)/2
        n = inst.n
        h = [-c / 2.0 for c in inst.linear]
        linear = list(h)
        quads = {}
        for j, k, val in inst.quadratic:
            linear[j] -= val / 4.0
            linear[k] -= val / 4.0
            # coupling (val/4) s_j s_k via the spin-gate identity
            linear[k] += val / 4.0
            quads[(j, k)] = quads.get((j, k), 0.0) - 2.0 * (val / 4.0)
        spin_inst = QuboInstance(n, tuple(linear),
                                 tuple((j, k, v)
                                       for (j, k), v in sorted(quads.items())),
                                 sense=inst.sense)
        table_b = objective_table(inst, GateConvention.BINARY01)
        table_s = objective_table(spin_inst, GateConvention.ISING_PM)
        shift = table_b[0] - table_s[0]
        assert np.max(np.abs(table_b - table_s - shift)) < 1e-12

        d_b = circuit_to_diagonal(compile_circuit(
            inst, GateConvention.BINARY01))
        d_s = circuit_to_diagonal(compile_circuit(
            spin_inst, GateConvention.ISING_PM))
        assert np.array_equal(np.argsort(wrap_angle(d_b.phases)),
                              np.argsort(wrap_angle(d_s.phases)))
