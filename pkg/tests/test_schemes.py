from dataclasses import replace

import numpy as np
import pytest

from conftest import perturbed_state, projected_state, regular_polygon
from oracles import dense_step_system, gauss_solve

from willmore_flow.errors import (
	ConfigurationError,
	DimensionError,
	PicardDivergenceError,
	SingularMatrixError,
	SolvabilityError,
)
from willmore_flow.fem.core import PeriodicNodalField
from willmore_flow.geometry.curve import ClosedCurve, mesh_ratio
from willmore_flow.harness.experiments import run_experiment
from willmore_flow.initial_data.projection import bgn_project
from willmore_flow.schemes import base_scheme
from willmore_flow.schemes.assembly import assemble, sqrt_jacobian
from willmore_flow.schemes.base_scheme import VARIANTS, SchemeConfig, SchemeState, split_solution
from willmore_flow.schemes.length_preserving_scheme import LengthPreservingScheme
from willmore_flow.schemes.linear_scheme import AltLinearScheme, LinearScheme
from willmore_flow.schemes.nonlinear_scheme import NonlinearAltScheme, NonlinearScheme
from willmore_flow.schemes.router import (
	SchemeRouter,
	solve_decoupled,
	step_alt_linear,
	step_length_preserving,
	step_linear,
	step_nonlinear,
	step_nonlinear_alt,
)

STEPPERS = {
	"linear": step_linear,
	"alt_linear": step_alt_linear,
	"nonlinear": step_nonlinear,
	"nonlinear_alt": step_nonlinear_alt,
	"length_preserving": step_length_preserving,
}


def advance(state, cfg, steps):
	router = SchemeRouter(cfg)
	results = []
	for _ in range(steps):
		result = router.step(state)
		results.append(result)
		state = result.next_state(state, cfg.dt)
	return state, results


class TestConfig:

	@pytest.mark.parametrize("changes", [
		{"variant": "explicit"},
		{"dt": 0.0},
		{"lam": -1.0},
		{"picard_tol": 0.0},
		{"picard_max": 0},
	])
	def test_invalid_values(self, changes):
		with pytest.raises(ConfigurationError):
			replace(SchemeConfig(lam=0.0, dt=1e-3), **changes).validate()

	def test_state_sizes_must_agree(self):
		curve = regular_polygon(8)
		with pytest.raises(DimensionError):
			SchemeState(curve, curve, PeriodicNodalField(np.ones(8)), PeriodicNodalField(np.ones(7)))

	def test_initial_state(self):
		curve = regular_polygon(8)
		state = SchemeState.initial(curve, PeriodicNodalField(-np.ones(8)))
		assert state.X_prev is curve
		assert state.bgn_curvature is state.curvature
		assert state.initial_length == pytest.approx(curve.length)

	def test_split_solution(self):
		unknowns = split_solution(np.arange(21.0), 4)
		np.testing.assert_array_equal(unknowns.X[:, 0], [8, 9, 10, 11])
		np.testing.assert_array_equal(unknowns.bgn_curvature, [16, 17, 18, 19])
		assert unknowns.multiplier == 20.0


class TestRouter:

	@pytest.mark.parametrize("variant, scheme_class", [
		("linear", LinearScheme),
		("alt_linear", AltLinearScheme),
		("nonlinear", NonlinearScheme),
		("nonlinear_alt", NonlinearAltScheme),
		("length_preserving", LengthPreservingScheme),
	])
	def test_selects_scheme(self, variant, scheme_class):
		router = SchemeRouter(SchemeConfig(lam=0.0, dt=1e-3, variant=variant))
		assert type(router.scheme) is scheme_class
		assert router.scheme.variant == variant

	def test_every_variant_is_routed(self):
		assert set(STEPPERS) == set(VARIANTS)


class TestAssembly:

	def test_sqrt_jacobian_is_one_at_first_step(self, ellipse_state):
		np.testing.assert_array_equal(sqrt_jacobian(ellipse_state.X_cur, ellipse_state.X_prev).values, 1.0)

	def test_sqrt_jacobian_is_edge_ratio(self):
		state = perturbed_state(8)
		expected = np.sqrt(state.X_prev.lengths / state.X_cur.lengths)
		np.testing.assert_allclose(sqrt_jacobian(state.X_cur, state.X_prev).values, expected, rtol=1e-14)

	def test_sqrt_jacobian_size_mismatch(self):
		with pytest.raises(DimensionError):
			sqrt_jacobian(regular_polygon(8), regular_polygon(9))

	@pytest.mark.parametrize("J", [4, 8, 12])
	@pytest.mark.parametrize("variant", VARIANTS)
	def test_matches_dense_assembly(self, J, variant):
		state = perturbed_state(J, seed=J)
		cfg = SchemeConfig(lam=0.7, dt=0.05, variant=variant)
		system = assemble(state, cfg)
		A, b = dense_step_system(state, cfg)
		assert system.n == len(b)
		np.testing.assert_allclose(system.dense(), A, rtol=0, atol=1e-13 * max(1.0, np.abs(A).max()))
		np.testing.assert_allclose(system.rhs, b, rtol=0, atol=1e-13 * max(1.0, np.abs(b).max()))

	@pytest.mark.parametrize("variant", ["nonlinear", "nonlinear_alt"])
	def test_matches_dense_assembly_with_picard_iterate(self, variant):
		state = perturbed_state(8, seed=5)
		frozen = 1.03 * state.X_cur.vertices + np.array([0.01, -0.02])
		cfg = SchemeConfig(lam=0.2, dt=0.05, variant=variant)
		system = assemble(state, cfg, frozen=frozen)
		A, b = dense_step_system(state, cfg, frozen=frozen)
		np.testing.assert_allclose(system.dense(), A, rtol=0, atol=1e-13 * max(1.0, np.abs(A).max()))
		np.testing.assert_allclose(system.rhs, b, rtol=0, atol=1e-13 * max(1.0, np.abs(b).max()))

	def test_solution_matches_dense_elimination(self):
		state = perturbed_state(12, seed=1)
		cfg = SchemeConfig(lam=0.5, dt=0.01)
		result = step_linear(state, cfg)
		A, b = dense_step_system(state, cfg)
		expected = split_solution(gauss_solve(A, b), 12)
		np.testing.assert_allclose(result.X_new.vertices, expected.X, atol=1e-11)
		np.testing.assert_allclose(result.curvature.values, expected.curvature, atol=1e-11)
		np.testing.assert_allclose(result.V.values, expected.V, atol=1e-11)


class TestStability:

	@pytest.mark.parametrize("variant", ["linear", "alt_linear", "length_preserving"])
	@pytest.mark.parametrize("dt", [1e-4, 1e-3, 0.04, 0.5])
	def test_energy_inequality(self, variant, dt):
		self.check_inequality(SchemeConfig(lam=0.5, dt=dt, variant=variant))

	@pytest.mark.parametrize("variant", ["nonlinear", "nonlinear_alt"])
	@pytest.mark.parametrize("dt, picard_tol", [(1e-4, 1e-12), (1e-3, 1e-12), (0.04, 1e-10), (0.5, 1e-10)])
	def test_energy_inequality_picard(self, variant, dt, picard_tol):
		self.check_inequality(SchemeConfig(lam=0.5, dt=dt, variant=variant, picard_tol=picard_tol))

	def check_inequality(self, cfg):
		state = projected_state("ellipse", 32)
		_, results = advance(state, cfg, 4)
		E0 = results[0].diagnostics.E_before
		for result in results:
			d = result.diagnostics
			assert d.dissipation >= 0.0
			assert d.stability_residual <= 1e-10 * abs(E0)

	def test_energy_decreases_on_linear_run(self, ellipse_state):
		_, results = advance(ellipse_state, SchemeConfig(lam=0.0, dt=1e-3), 10)
		energies = [r.diagnostics.E_after for r in results]
		assert all(b <= a for a, b in zip(energies, energies[1:]))


class TestSymmetry:

	@pytest.mark.parametrize("variant", VARIANTS)
	def test_regular_polygon_stays_regular(self, variant):
		state = projected_state("circle", 16)
		cfg = SchemeConfig(lam=0.0, dt=0.1, variant=variant)
		state, results = advance(state, cfg, 2)
		radii = np.hypot(*state.X_cur.vertices.T)
		np.testing.assert_allclose(radii, radii.mean(), rtol=1e-10)
		assert mesh_ratio(state.X_cur) == pytest.approx(1.0, abs=1e-10)
		assert results[0].diagnostics.stability_residual <= 1e-12 * abs(results[0].diagnostics.E_before)

	@pytest.mark.parametrize("variant", VARIANTS)
	def test_translation_and_rotation_equivariance(self, variant):
		state = perturbed_state(12, seed=2)
		angle, shift = 0.9, np.array([2.0, -3.0])
		moved = replace(
			state,
			X_cur=state.X_cur.rotated(angle).translated(shift),
			X_prev=state.X_prev.rotated(angle).translated(shift)
		)
		cfg = SchemeConfig(lam=0.3, dt=1e-2, variant=variant, picard_tol=1e-12)
		base, result = STEPPERS[variant](state, cfg), STEPPERS[variant](moved, cfg)

		expected = base.X_new.rotated(angle).translated(shift).vertices
		np.testing.assert_allclose(result.X_new.vertices, expected, atol=1e-10)
		np.testing.assert_allclose(result.curvature.values, base.curvature.values, atol=1e-10)
		np.testing.assert_allclose(result.bgn_curvature.values, base.bgn_curvature.values, atol=1e-10)
		np.testing.assert_allclose(result.V.values, base.V.values, atol=1e-10)


class TestSteadyState:

	def test_fixed_point_is_equidistributed(self):
		# lam = 0.5 circles of radius 1 are stationary
		state = projected_state("circle_seed", 16)
		router = SchemeRouter(SchemeConfig(lam=0.5, dt=0.5))
		for _ in range(1000):
			result = router.step(state)
			moved = float(np.max(np.abs(result.X_new.vertices - state.X_cur.vertices)))
			state = result.next_state(state, 0.5)
			if moved < 1e-11:
				break

		assert moved < 1e-11
		np.testing.assert_allclose(result.V.values, 0.0, atol=1e-9)
		lengths = state.X_cur.lengths
		# adjacent edges of a convex polygon are never parallel
		assert (lengths.max() - lengths.min()) / lengths.mean() < 1e-8
		assert mesh_ratio(state.X_cur) == pytest.approx(1.0, abs=1e-8)


class TestLinearVariants:

	def test_expanding_circle_radius(self):
		state = projected_state("circle", 64)
		dt = 1e-3
		state, _ = advance(state, SchemeConfig(lam=0.0, dt=dt), 10)
		radius = np.hypot(*state.X_cur.vertices.T).mean()
		assert radius == pytest.approx((1.0 + 2.0 * 10 * dt) ** 0.25, abs=1e-3)

	def test_alt_linear_equals_linear_on_projected_data(self, ellipse_state):
		cfg = SchemeConfig(lam=0.5, dt=1e-3)
		linear = step_linear(ellipse_state, cfg)
		alt = step_alt_linear(ellipse_state, cfg)
		np.testing.assert_allclose(alt.X_new.vertices, linear.X_new.vertices, atol=1e-12)
		np.testing.assert_allclose(alt.curvature.values, linear.curvature.values, atol=1e-12)

	@pytest.mark.parametrize("variant", ["linear", "alt_linear"])
	def test_decoupled_solve_equals_coupled(self, variant):
		state = perturbed_state(12, seed=4)
		cfg = SchemeConfig(lam=0.0, dt=1e-2, variant=variant)
		coupled = STEPPERS[variant](state, cfg)
		decoupled = solve_decoupled(state, cfg)
		np.testing.assert_allclose(decoupled.X_new.vertices, coupled.X_new.vertices, atol=1e-10)
		np.testing.assert_allclose(decoupled.curvature.values, coupled.curvature.values, atol=1e-10)
		np.testing.assert_allclose(decoupled.bgn_curvature.values, coupled.bgn_curvature.values, atol=1e-10)

	def test_decoupled_solve_needs_zero_lambda(self):
		with pytest.raises(ConfigurationError):
			solve_decoupled(perturbed_state(8), SchemeConfig(lam=0.5, dt=1e-2))

	def test_decoupled_solve_rejects_picard_variants(self):
		with pytest.raises(ConfigurationError):
			solve_decoupled(perturbed_state(8), SchemeConfig(lam=0.0, dt=1e-2, variant="nonlinear"))

	def test_singular_step_reports_assumptions(self, monkeypatch, ellipse_state):
		def singular(A, b):
			raise SingularMatrixError("Factor is exactly singular")

		monkeypatch.setattr(base_scheme, "solve", singular)
		with pytest.raises(SolvabilityError, match=r"\(A1\) holds, \(A2\) holds"):
			step_linear(ellipse_state, SchemeConfig(lam=0.0, dt=1e-3))

	def test_assumption_warning(self, caplog):
		folded = ClosedCurve(np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 0.0]]))
		state = SchemeState.initial(folded, PeriodicNodalField(np.zeros(4)))
		scheme = LinearScheme(SchemeConfig(lam=0.0, dt=1e-3))
		with caplog.at_level("WARNING", logger="willmore_flow"):
			report = scheme.check(state)
		assert not report.ok
		assert "solvability assumptions violated" in caplog.text


class TestNonlinearVariants:

	@pytest.mark.parametrize("name, overrides", [
		("example1_nonlinear", {"T": 0.6}),
		("example2_nonlinear", {"T": 0.1}),
	])
	def test_picard_iteration_count_settles(self, name, overrides):
		record = run_experiment(name, {**overrides, "snapshot_times": ()})
		# rows[m] holds step m, row 0 is the initial level
		counts = record.column("picard_iters")[11:].astype(int)
		assert len(counts) > 0
		assert counts.max() <= 7
		assert counts.max() - counts.min() <= 1

	def test_picard_iteration_count_is_constant_on_expanding_circle(self):
		record = run_experiment("example1_nonlinear", {"T": 0.6, "snapshot_times": ()})
		assert len(set(record.column("picard_iters")[11:].astype(int))) == 1

	def test_loose_tolerance_equals_one_linear_solve(self, ellipse_state):
		cfg = SchemeConfig(lam=0.0, dt=1e-3, variant="nonlinear", picard_tol=1e3)
		result = step_nonlinear(ellipse_state, cfg)
		system = assemble(ellipse_state, cfg)
		unknowns = NonlinearScheme(cfg).solve_system(system, ellipse_state)
		assert result.diagnostics.picard_iters == 1
		np.testing.assert_array_equal(result.X_new.vertices, unknowns.X)

	def test_divergence_is_reported(self, ellipse_state):
		cfg = SchemeConfig(lam=0.0, dt=0.5, variant="nonlinear", picard_tol=1e-300, picard_max=2)
		with pytest.raises(PicardDivergenceError) as info:
			step_nonlinear(ellipse_state, cfg)
		assert info.value.iterations == 2
		assert info.value.increment > 0.0


class TestLengthPreserving:

	def test_circle_is_stationary(self):
		J, r = 64, 1.5
		data = bgn_project(regular_polygon(J, radius=r))
		state = SchemeState.initial(data.X0, data.curvature, data.bgn_curvature)
		result = step_length_preserving(state, SchemeConfig(lam=0.0, dt=1e-2))
		d = result.diagnostics
		np.testing.assert_allclose(result.V.values, 0.0, atol=1e-10)
		assert d.lambda_mult == pytest.approx(0.5 / (r * np.cos(np.pi / J)) ** 2, rel=5e-3)
		assert d.lambda_mult == pytest.approx(1.0 / (2.0 * r ** 2), rel=5e-3)
		assert abs(d.dL) < 1e-12

	def test_length_is_nearly_constant(self):
		state = projected_state("lemniscate", 64)
		_, results = advance(state, SchemeConfig(lam=0.0, dt=1e-3, variant="length_preserving"), 10)
		assert max(abs(r.diagnostics.dL) for r in results) < 1e-3

	def test_zero_curvature_is_rejected(self):
		curve = regular_polygon(8)
		state = SchemeState.initial(curve, PeriodicNodalField(np.zeros(8)))
		with pytest.raises(SolvabilityError, match="vanishes"):
			step_length_preserving(state, SchemeConfig(lam=0.0, dt=1e-3))
