import numpy as np
import pytest

from oracles import brute_exact, brute_lumped, brute_stiffness

from willmore_flow.errors import ConfigurationError, DegenerateCurveError, DimensionError, UnsupportedDegreeError
from willmore_flow.fem.core import (
	QUAD_POINTS,
	QUAD_WEIGHTS,
	ElementField,
	PeriodicNodalField,
	ReferenceMesh,
	exact_inner,
	lumped_inner,
	lumped_local,
	mass_local,
	scatter_matrix,
	skew_local,
	stiffness_inner,
)
from willmore_flow.linalg.sparse import to_compressed


def global_matrix(mesh, local):
	return to_compressed(mesh.J, *scatter_matrix(mesh, local)).toarray()


class TestReferenceMesh:

	def test_nodes_and_spacing(self):
		mesh = ReferenceMesh(8)
		assert mesh.h == pytest.approx(0.125)
		np.testing.assert_allclose(mesh.nodes, np.arange(8) / 8)
		np.testing.assert_array_equal(mesh.element_nodes[-1], [7, 0])

	@pytest.mark.parametrize("J", [0, 2, 2.5])
	def test_rejects_small_or_fractional(self, J):
		with pytest.raises(ConfigurationError):
			ReferenceMesh(J)


class TestInnerProducts:

	def test_lumped_matches_term_by_term_sum(self, rng):
		u, v, w = rng.standard_normal(8), rng.standard_normal(8), rng.uniform(0.5, 2.0, 8)
		result = lumped_inner(PeriodicNodalField(u), PeriodicNodalField(v), ElementField(w))
		assert result == pytest.approx(brute_lumped(u, v, w), abs=1e-14)

	def test_lumped_vector_fields_use_dot_product(self, rng):
		u, v, w = rng.standard_normal((8, 2)), rng.standard_normal((8, 2)), rng.uniform(0.5, 2.0, 8)
		expected = brute_lumped(u[:, 0], v[:, 0], w) + brute_lumped(u[:, 1], v[:, 1], w)
		result = lumped_inner(PeriodicNodalField(u), PeriodicNodalField(v), ElementField(w))
		assert result == pytest.approx(expected, abs=1e-14)

	def test_lumped_of_one_is_length(self):
		lengths = np.array([1.0, 2.0, 0.5, 1.5])
		one = PeriodicNodalField(np.ones(4))
		assert lumped_inner(one, one, ElementField(lengths * 4)) == pytest.approx(5.0)

	def test_exact_matches_high_order_quadrature(self, rng):
		u, v, w = rng.standard_normal(6), rng.standard_normal(6), rng.uniform(0.5, 2.0, 6)
		result = exact_inner(PeriodicNodalField(u), PeriodicNodalField(v), ElementField(w))
		assert result == pytest.approx(brute_exact(u, v, w), abs=1e-13)

	def test_exact_rejects_degree_above_five(self):
		u = PeriodicNodalField(np.ones(4))
		with pytest.raises(UnsupportedDegreeError):
			exact_inner(u, u, ElementField(np.ones(4)), degree=6)

	def test_exact_rejects_integrand_above_declared_degree(self):
		u = PeriodicNodalField(np.ones(4))
		with pytest.raises(UnsupportedDegreeError):
			exact_inner(u, u, ElementField(np.ones(4)), degree=1)

	def test_mismatched_meshes(self):
		with pytest.raises(DimensionError):
			lumped_inner(PeriodicNodalField(np.ones(4)), PeriodicNodalField(np.ones(5)), ElementField(np.ones(4)))

	def test_stiffness_of_sawtooth(self):
		u = PeriodicNodalField(np.arange(4) / 4)
		# slopes 1 on three elements and 1 - J on the wrap element
		expected = 0.25 * (3 * 1.0 + (1 - 4) ** 2)
		assert stiffness_inner(u, u, ElementField(np.ones(4))) == pytest.approx(expected)
		assert expected == pytest.approx(3.0)

	def test_stiffness_matches_element_sum(self, rng):
		u, v, winv = rng.standard_normal(8), rng.standard_normal(8), rng.uniform(0.5, 2.0, 8)
		result = stiffness_inner(PeriodicNodalField(u), PeriodicNodalField(v), ElementField(winv))
		assert result == pytest.approx(brute_stiffness(u, v, winv), abs=1e-14)

	def test_stiffness_rejects_nonpositive_weight(self):
		u = PeriodicNodalField(np.ones(4))
		with pytest.raises(DegenerateCurveError):
			stiffness_inner(u, u, ElementField(np.array([1.0, 0.0, 1.0, 1.0])))


class TestKernels:

	def test_mass_row_sums_equal_lumped_diagonal(self, rng):
		mesh = ReferenceMesh(7)
		w = rng.uniform(0.5, 2.0, 7)
		mass = global_matrix(mesh, mass_local(mesh, w))
		lumped = global_matrix(mesh, lumped_local(mesh, w))
		np.testing.assert_allclose(mass.sum(axis=1), np.diag(lumped), atol=1e-15)
		assert np.count_nonzero(lumped - np.diag(np.diag(lumped))) == 0

	def test_mass_with_coefficient_matches_exact_inner(self, rng):
		mesh = ReferenceMesh(6)
		w = rng.uniform(0.5, 2.0, 6)
		c, u, v = rng.standard_normal(6), rng.standard_normal(6), rng.standard_normal(6)
		coefficient = PeriodicNodalField(c).at_quadrature() ** 2
		mass = global_matrix(mesh, mass_local(mesh, w, coefficient))
		cu = PeriodicNodalField(c).at_quadrature() ** 2 * PeriodicNodalField(u).at_quadrature()
		expected = mesh.h * np.sum(cu * PeriodicNodalField(v).at_quadrature() @ np.diag([5, 8, 5]) / 18.0 * w[:, None])
		assert v @ mass @ u == pytest.approx(expected, abs=1e-13)

	def test_skew_matrix_is_antisymmetric(self, rng):
		mesh = ReferenceMesh(9)
		beta = rng.standard_normal((9, 3))
		C = global_matrix(mesh, skew_local(mesh, beta))
		np.testing.assert_allclose(C, -C.T, atol=1e-15)


def random_nodal(rng, J):
	return PeriodicNodalField(rng.standard_normal(J))


class TestInnerProductProperties:

	@pytest.mark.parametrize("k", range(6))
	def test_gauss_rule_integrates_monomials(self, k):
		assert np.sum(QUAD_WEIGHTS * QUAD_POINTS ** k) == pytest.approx(1.0 / (k + 1), abs=1e-14)

	@pytest.mark.parametrize("J", [3, 8])
	def test_hat_function_norm(self, J):
		for k in range(J):
			hat = PeriodicNodalField(np.eye(J)[k])
			assert exact_inner(hat, hat, ElementField(np.ones(J))) == pytest.approx(2.0 / (3.0 * J), abs=1e-15)

	def test_lumped_equals_exact_for_element_constants(self, rng):
		u, v = ElementField(rng.standard_normal(7)), ElementField(rng.standard_normal(7))
		w = ElementField(rng.uniform(0.5, 2.0, 7))
		assert lumped_inner(u, v, w) == pytest.approx(exact_inner(u, v, w), abs=1e-14)

	@pytest.mark.parametrize("inner", [lumped_inner, exact_inner, stiffness_inner])
	def test_symmetric_and_bilinear(self, rng, inner):
		J = 9
		u, u2, v = random_nodal(rng, J), random_nodal(rng, J), random_nodal(rng, J)
		w = ElementField(rng.uniform(0.5, 2.0, J))
		a, b = 1.7, -0.6
		combined = PeriodicNodalField(a * u.values + b * u2.values)

		assert inner(u, v, w) == pytest.approx(inner(v, u, w), rel=1e-12, abs=1e-13)
		assert inner(combined, v, w) == pytest.approx(a * inner(u, v, w) + b * inner(u2, v, w), rel=1e-12, abs=1e-13)
		assert inner(v, combined, w) == pytest.approx(a * inner(v, u, w) + b * inner(v, u2, w), rel=1e-12, abs=1e-13)
