"""Exact Cover encodings, adiabatic sweeps, and the grid decision problem."""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from clab.qcore import PhysicalConstants, StateVector
from clab.reduction import (
    AdiabaticSchedule,
    ExactCoverInstance,
    SpectralDecisionInstance,
    adiabatic_run,
    bitstring_satisfies,
    brute_force_exact_cover,
    build_begin_hamiltonian,
    build_cost_hamiltonian,
    decide_energy_threshold,
    ground_energy,
    interpolate,
    load_instance,
    most_probable_bitstring,
    recommended_steps,
    reduce_energy_decision,
    save_instance,
    success_sweep,
    uniform_superposition,
    verify_eigenpair,
)

UNSAT_N4 = ExactCoverInstance(n=4, clauses=((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)))


def harmonic_instance(grid_points=512, box_length=20.0, mass=1.0, omega=1.0, threshold=1.0):
    dx = box_length / (grid_points + 1)
    x = dx * np.arange(1, grid_points + 1)
    v = 0.5 * mass * omega**2 * (x - box_length / 2.0) ** 2
    return SpectralDecisionInstance(
        grid_points=grid_points, box_length=box_length, mass=mass, potential=v, threshold=threshold
    )


class TestExactCoverInstance:
    def test_validates_ranges_and_order(self):
        with pytest.raises(ValueError, match="1 <= i < j < k"):
            ExactCoverInstance(n=3, clauses=((1, 3, 2),))
        with pytest.raises(ValueError, match="1 <= i < j < k"):
            ExactCoverInstance(n=3, clauses=((1, 2, 4),))
        with pytest.raises(ValueError, match="duplicate"):
            ExactCoverInstance(n=4, clauses=((1, 2, 3), (1, 2, 3)))

    def test_json_roundtrip(self, tmp_path):
        inst = ExactCoverInstance(n=5, clauses=((1, 2, 3), (2, 4, 5)))
        path = save_instance(inst, tmp_path / "inst.json")
        assert load_instance(path) == inst

    def test_rejects_unknown_keys(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"n": 3, "clauses": [[1, 2, 3]], "comment": "hi"}))
        with pytest.raises(ValueError, match="unknown instance keys"):
            load_instance(path)


class TestBruteForce:
    def test_no_clauses_everything_satisfies(self):
        inst = ExactCoverInstance(n=2, clauses=())
        assert brute_force_exact_cover(inst) == ["00", "01", "10", "11"]

    def test_single_clause_n3(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        assert brute_force_exact_cover(inst) == ["001", "010", "100"]

    def test_unsatisfiable_instance(self):
        assert brute_force_exact_cover(UNSAT_N4) == []

    def test_rejects_oversized(self):
        with pytest.raises(ValueError, match="n <= 24"):
            brute_force_exact_cover(ExactCoverInstance(n=25, clauses=()))


class TestCostHamiltonian:
    def test_no_clauses_all_zero(self):
        hc = build_cost_hamiltonian(ExactCoverInstance(n=3, clauses=()))
        assert hc.energies.max() == 0

    def test_single_clause_counts(self):
        hc = build_cost_hamiltonian(ExactCoverInstance(n=3, clauses=((1, 2, 3),)))
        assert hc.energies[int("100", 2)] == 0
        assert hc.energies[int("111", 2)] == 1
        assert hc.energies[int("000", 2)] == 1

    @pytest.mark.parametrize(
        "path", ["instances/ec_n3_single.json", "instances/ec_n6_unique.json", "instances/ec_n8_unique.json"]
    )
    def test_ground_space_matches_brute_force(self, path):
        inst = load_instance(Path(__file__).resolve().parents[1] / path)
        hc = build_cost_hamiltonian(inst)
        satisfying = brute_force_exact_cover(inst)
        ground = hc.energies.min()
        assert ground == 0
        argmin = {format(z, f"0{inst.n}b") for z in np.nonzero(hc.energies == ground)[0]}
        assert argmin == set(satisfying)

    def test_unsatisfiable_has_positive_ground_energy(self):
        hc = build_cost_hamiltonian(UNSAT_N4)
        assert hc.energies.min() >= 1


class TestBeginHamiltonian:
    def test_no_clauses_zero_operator(self):
        h0 = build_begin_hamiltonian(ExactCoverInstance(n=2, clauses=()))
        assert np.abs(h0.matrix).max() == 0.0

    def test_membership_counts_and_ground_state(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        h0 = build_begin_hamiltonian(inst)
        np.testing.assert_array_equal(h0.d, [1, 1, 1])
        residual = h0.matrix @ uniform_superposition(3).amps
        assert np.abs(residual).max() <= 1e-12

    def test_hermitian(self):
        inst = ExactCoverInstance(n=4, clauses=((1, 2, 3), (2, 3, 4)))
        m = build_begin_hamiltonian(inst).matrix
        assert np.abs(m - m.T).max() <= 1e-12

    def test_max_eigenvalue_is_membership_sum(self):
        inst = ExactCoverInstance(n=4, clauses=((1, 2, 3), (2, 3, 4), (1, 2, 4)))
        h0 = build_begin_hamiltonian(inst)
        top = np.linalg.eigvalsh(h0.matrix)[-1]
        assert top == pytest.approx(h0.max_eigenvalue(), abs=1e-9)


class TestInterpolate:
    def setup_method(self):
        self.inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        self.h0 = build_begin_hamiltonian(self.inst)
        self.hc = build_cost_hamiltonian(self.inst)

    def test_endpoints_exact(self):
        start = interpolate(self.h0, self.hc, 0.0, 7.0).dense()
        end = interpolate(self.h0, self.hc, 7.0, 7.0).dense()
        assert np.array_equal(start, self.h0.matrix.astype(complex))
        assert np.array_equal(end, np.diag(self.hc.energies.astype(complex)))

    def test_midpoint_entrywise_mean(self):
        mid = interpolate(self.h0, self.hc, 3.5, 7.0).dense()
        expected = (self.h0.matrix + np.diag(self.hc.energies.astype(float))) / 2.0
        np.testing.assert_allclose(mid, expected, atol=1e-15)

    def test_rejects_time_outside_schedule(self):
        with pytest.raises(ValueError, match="outside"):
            interpolate(self.h0, self.hc, -0.1, 7.0)
        with pytest.raises(ValueError, match="outside"):
            interpolate(self.h0, self.hc, 7.1, 7.0)


class TestAdiabaticRun:
    def test_tiny_time_stays_uniform(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        result = adiabatic_run(inst, AdiabaticSchedule(total_time=1e-8, steps=1))
        assert result.success_probability == pytest.approx(3.0 / 8.0, abs=1e-6)

    def test_single_clause_sweep_reaches_target(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        rows = success_sweep(inst, [1, 2, 4, 8, 16, 32], target=0.9)
        assert rows[-1]["success_probability"] >= 0.9

    def test_success_grows_with_time(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        rows = success_sweep(inst, [0.25, 16.0])
        assert rows[-1]["success_probability"] >= rows[0]["success_probability"]

    def test_norm_drift_bounded(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        result = adiabatic_run(inst, AdiabaticSchedule(total_time=4.0, steps=recommended_steps(3.0, 4.0)))
        assert result.norm_drift <= 1e-6

    def test_warns_on_coarse_schedule(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        with pytest.warns(RuntimeWarning, match="recommended"):
            adiabatic_run(inst, AdiabaticSchedule(total_time=8.0, steps=3))

    def test_most_probable_bitstring_satisfies(self):
        inst = ExactCoverInstance(n=3, clauses=((1, 2, 3),))
        result = adiabatic_run(inst, AdiabaticSchedule(total_time=16.0, steps=recommended_steps(3.0, 16.0)))
        bits = most_probable_bitstring(result.state, 3)
        assert bitstring_satisfies(inst, bits)

    def test_schedule_validation(self):
        with pytest.raises(ValueError, match="total_time"):
            AdiabaticSchedule(total_time=0.0, steps=10)
        with pytest.raises(ValueError, match="steps"):
            AdiabaticSchedule(total_time=1.0, steps=0)


class TestGridHamiltonian:
    def test_free_particle_matrix_structure(self):
        inst = SpectralDecisionInstance(
            grid_points=5, box_length=6.0, mass=2.0, potential=np.zeros(5), threshold=0.0
        )
        h, threshold = reduce_energy_decision(inst)
        t = 1.0 / (2.0 * 2.0 * 1.0**2)
        expected = 2.0 * t * np.eye(5) - t * np.eye(5, k=1) - t * np.eye(5, k=-1)
        np.testing.assert_allclose(h.matrix, expected, atol=1e-15)
        assert threshold == 0.0

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        inst = SpectralDecisionInstance(
            grid_points=64, box_length=5.0, mass=1.0, potential=rng.uniform(0, 3, 64), threshold=1.0
        )
        h, _ = reduce_energy_decision(inst)
        assert np.abs(h.matrix - h.matrix.T).max() <= 1e-12

    def test_grid_refinement_converges(self):
        coarse = ground_energy(reduce_energy_decision(harmonic_instance(grid_points=256))[0])
        fine = ground_energy(reduce_energy_decision(harmonic_instance(grid_points=512))[0])
        assert abs(fine - coarse) / abs(fine) < 0.01

    def test_harmonic_ground_energy(self):
        e0 = ground_energy(reduce_energy_decision(harmonic_instance())[0])
        assert abs(e0 - 0.5) / 0.5 < 0.01

    def test_box_ground_energy(self):
        length = 3.0
        inst = SpectralDecisionInstance(
            grid_points=1024, box_length=length, mass=1.0, potential=np.zeros(1024), threshold=0.0
        )
        e0 = ground_energy(reduce_energy_decision(inst)[0])
        exact = math.pi**2 / (2.0 * length**2)
        assert abs(e0 - exact) / exact < 0.01

    def test_constant_shift_identity(self):
        base = harmonic_instance(grid_points=200)
        shifted = SpectralDecisionInstance(
            grid_points=200,
            box_length=base.box_length,
            mass=base.mass,
            potential=base.potential + 4.25,
            threshold=base.threshold,
        )
        e_base = ground_energy(reduce_energy_decision(base)[0])
        e_shift = ground_energy(reduce_energy_decision(shifted)[0])
        assert abs((e_shift - e_base) - 4.25) <= 1e-9

    def test_second_order_error_scaling(self):
        # Halving dx divides the discretization error by ~4.
        exact = 0.5
        e1 = ground_energy(reduce_energy_decision(harmonic_instance(grid_points=255))[0])
        e2 = ground_energy(reduce_energy_decision(harmonic_instance(grid_points=511))[0])
        ratio = abs(e2 - exact) / abs(e1 - exact)
        assert 0.2 <= ratio <= 0.3

    def test_dense_and_inverse_agree(self):
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=300))
        dense = ground_energy(h, method="dense")
        inverse = ground_energy(h, method="inverse")
        assert abs(dense - inverse) <= 1e-8 * max(1.0, abs(dense))

    def test_unknown_method_rejected(self):
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=16))
        with pytest.raises(ValueError, match="method"):
            ground_energy(h, method="magic")

    def test_variational_bound(self):
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=128))
        e0 = ground_energy(h)
        rng = np.random.default_rng(7)
        for _ in range(100):
            phi = rng.standard_normal(128)
            phi /= np.linalg.norm(phi)
            assert e0 <= phi @ (h.matrix @ phi) + 1e-9

    def test_hbar_scaling(self):
        c = PhysicalConstants(hbar=3.0)
        inst = harmonic_instance(grid_points=600, box_length=40.0)
        e0 = ground_energy(reduce_energy_decision(inst, c)[0])
        # hbar omega / 2 with omega = 1
        assert abs(e0 - 1.5) / 1.5 < 0.01


class TestDecision:
    def test_harmonic_yes_and_no(self):
        yes = harmonic_instance(threshold=1.0)
        no = harmonic_instance(threshold=0.25)
        assert decide_energy_threshold(yes) is True
        assert decide_energy_threshold(no) is False

    def test_tie_resolves_to_yes(self):
        inst = harmonic_instance(grid_points=128)
        e0 = ground_energy(reduce_energy_decision(inst)[0])
        tie = harmonic_instance(grid_points=128, threshold=e0)
        assert decide_energy_threshold(tie) is True


class TestVerifyEigenpair:
    def test_accepts_solver_pairs(self):
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=128))
        w, v = np.linalg.eigh(h.matrix)
        for idx in (0, 1, 64, 127):
            assert verify_eigenpair(h, v[:, idx], w[idx], tol=1e-8)

    def test_rejects_perturbed_energy(self):
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=128))
        w, v = np.linalg.eigh(h.matrix)
        tol = 1e-8
        norm = np.abs(w).max()
        assert not verify_eigenpair(h, v[:, 0], w[0] + 10.0 * tol * norm, tol=tol)

    def test_rejects_random_vector(self):
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=128))
        e0 = ground_energy(h)
        rng = np.random.default_rng(3)
        phi = rng.standard_normal(128)
        phi /= np.linalg.norm(phi)
        assert not verify_eigenpair(h, phi, e0, tol=1e-8)

    def test_soundness_margin(self):
        # Anything with residual beyond 2 tol must be rejected.
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=64))
        w, v = np.linalg.eigh(h.matrix)
        tol = 1e-8
        vec = v[:, 0].copy()
        vec[0] += 1e-5
        vec /= np.linalg.norm(vec)
        residual = np.linalg.norm(h.matrix @ vec - w[0] * vec)
        assert residual > 2 * tol
        assert not verify_eigenpair(h, vec, w[0], tol=tol)

    def test_requires_normalized_vector(self):
        h, _ = reduce_energy_decision(harmonic_instance(grid_points=16))
        with pytest.raises(ValueError, match="normalized"):
            verify_eigenpair(h, np.ones(16), 0.5, tol=1e-8)

    def test_accepts_state_vector_and_operator_types(self):
        diag = np.array([1.0, 2.0, 5.0])
        from clab.qcore import HermitianOperator

        h = HermitianOperator.from_diagonal(diag)
        psi = StateVector([0.0, 1.0, 0.0])
        assert verify_eigenpair(h, psi, 2.0, tol=1e-12)
        assert not verify_eigenpair(h, psi, 2.1, tol=1e-12)
