"""
FEM Core

Periodic piecewise-linear finite elements on the reference circle I = R/Z.

Key Features:
	- Uniform periodic mesh: J nodes, J elements, element e joins nodes e and e+1 (mod J)
	- Nodal (P1) and element-wise constant fields, scalar or 2-vector valued
	- Three scalar inner products: mass-lumped, exact (3-point Gauss) and stiffness
	- Vectorized element kernels returning (J, 2, 2) local matrices or (J, 2) local
	  vectors, plus scatter helpers producing COO triplets for the step systems

Quadrature:
	3-point Gauss-Legendre per element, exact through polynomial degree 5.
	The richest integrand in the schemes is quartic (three P1 factors times a
	hat function), so one rule serves every unlumped product.

Lumping:
	(u, v)^h = h/2 * sum_e w_e [(u.v)(right end of e) + (u.v)(left end of e)],
	one-sided limits taken from the element's own data.

Use Cases:
	- geometry/ computes energies and vertex normals with these products
	- schemes/assembly.py builds every block of the step matrices from the kernels
	- initial_data/projection.py assembles the zero-normal-velocity projection
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from willmore_flow.errors import (
	ConfigurationError,
	DegenerateCurveError,
	DimensionError,
	UnsupportedDegreeError,
)

MAX_EXACT_DEGREE = 5

_gauss_x, _gauss_w = np.polynomial.legendre.leggauss(3)
QUAD_POINTS = 0.5 * (_gauss_x + 1.0)  # mapped to [0, 1]
QUAD_WEIGHTS = 0.5 * _gauss_w
SHAPE = np.stack([1.0 - QUAD_POINTS, QUAD_POINTS], axis=1)  # (Q, 2): left/right hat values
SHAPE_SLOPE = np.array([-1.0, 1.0])  # hat derivatives times h


@lru_cache(maxsize=64)
def element_nodes(J: int) -> np.ndarray:
	"""(J, 2) array: global node indices (left, right) of every element."""
	left = np.arange(J)
	nodes = np.stack([left, (left + 1) % J], axis=1)
	nodes.setflags(write=False)
	return nodes


@dataclass(frozen=True)
class ReferenceMesh:
	"""
	Uniform partition of I = R/Z.

	Attributes:
		J: Number of nodes (= number of elements), at least 3
	"""
	J: int

	def __post_init__(self):
		if int(self.J) != self.J or self.J < 3:
			raise ConfigurationError(f"Reference mesh needs J >= 3 nodes, got {self.J}")

	@property
	def h(self) -> float:
		return 1.0 / self.J

	@cached_property
	def nodes(self) -> np.ndarray:
		"""Node parameters rho_j = j*h, j = 0..J-1 (rho_J is identified with rho_0)."""
		return np.arange(self.J) * self.h

	@property
	def element_nodes(self) -> np.ndarray:
		return element_nodes(self.J)


@dataclass(frozen=True, eq=False)
class PeriodicNodalField:
	"""
	Continuous piecewise-linear field given by its nodal values.

	Attributes:
		values: (J,) scalars or (J, 2) vectors, value at node j
	"""
	values: np.ndarray

	degree = 1

	@property
	def J(self) -> int:
		return len(self.values)

	def endpoints(self) -> np.ndarray:
		"""(J, 2[, d]) values at the left and right end of every element."""
		return np.asarray(self.values)[element_nodes(self.J)]

	def at_quadrature(self) -> np.ndarray:
		"""(J, Q[, d]) values at the Gauss points of every element."""
		ends = self.endpoints()
		if ends.ndim == 2:
			return ends @ SHAPE.T
		return np.einsum("ead,qa->eqd", ends, SHAPE)


@dataclass(frozen=True, eq=False)
class ElementField:
	"""
	Element-wise constant field (edge lengths, |X_rho|, tangents, normals, ...).

	Attributes:
		values: (J,) scalars or (J, 2) vectors, value on element e
	"""
	values: np.ndarray

	degree = 0

	@property
	def J(self) -> int:
		return len(self.values)

	def endpoints(self) -> np.ndarray:
		vals = np.asarray(self.values)
		return np.repeat(vals[:, None, ...], 2, axis=1)

	def at_quadrature(self) -> np.ndarray:
		vals = np.asarray(self.values)
		return np.repeat(vals[:, None, ...], len(QUAD_WEIGHTS), axis=1)


PiecewiseField = Union[PeriodicNodalField, ElementField]


def _check_same_mesh(*fields: PiecewiseField) -> int:
	sizes = {f.J for f in fields}
	if len(sizes) != 1:
		raise DimensionError(f"Fields live on different meshes: sizes {sorted(sizes)}")
	return sizes.pop()


def _pointwise_product(a: np.ndarray, b: np.ndarray, base_ndim: int) -> np.ndarray:
	"""Product u*v for scalars, dot product u.v for 2-vector fields."""
	if a.ndim > base_ndim or b.ndim > base_ndim:
		return np.sum(a * b, axis=-1)
	return a * b


def lumped_inner(u: PiecewiseField, v: PiecewiseField, w: ElementField) -> float:
	"""
	Mass-lumped inner product (u, v w)^h.

	Args:
		u, v: Nodal or element fields (scalar or 2-vector, dot product for vectors)
		w: Element weight, e.g. |X_rho| = element length / h

	Returns:
		h/2 * sum_e w_e [(u.v)(left end) + (u.v)(right end)]

	Raises:
		DimensionError: Fields on different meshes
	"""
	J = _check_same_mesh(u, v, w)
	uv = _pointwise_product(u.endpoints(), v.endpoints(), base_ndim=2)
	return float(0.5 / J * np.sum(np.asarray(w.values)[:, None] * uv))


def exact_inner(
	u: PiecewiseField,
	v: PiecewiseField,
	w: ElementField,
	degree: int = MAX_EXACT_DEGREE
) -> float:
	"""
	Integral of u.v.w over I with 3-point Gauss-Legendre per element.

	Args:
		u, v: Nodal or element fields
		w: Element weight
		degree: Declared polynomial degree of u.v per element (at most 5)

	Returns:
		Exact integral for integrands up to degree 5

	Raises:
		UnsupportedDegreeError: degree > 5, or fields whose product exceeds the declared degree
		DimensionError: Fields on different meshes
	"""
	if degree > MAX_EXACT_DEGREE:
		raise UnsupportedDegreeError(
			f"3-point Gauss is exact through degree {MAX_EXACT_DEGREE}, requested {degree}"
		)
	if u.degree + v.degree > degree:
		raise UnsupportedDegreeError(
			f"Integrand degree {u.degree + v.degree} exceeds declared degree {degree}"
		)

	J = _check_same_mesh(u, v, w)
	uv = _pointwise_product(u.at_quadrature(), v.at_quadrature(), base_ndim=2)
	per_element = uv @ QUAD_WEIGHTS
	return float(np.sum(per_element * np.asarray(w.values)) / J)


def stiffness_inner(u: PeriodicNodalField, v: PeriodicNodalField, winv: ElementField) -> float:
	"""
	Exact integral of u_rho v_rho winv (all element-wise constant).

	Args:
		u, v: Nodal fields
		winv: Positive element weight (holds 1/|X_rho|)

	Returns:
		sum_e (u_{e+1} - u_e)(v_{e+1} - v_e) winv_e / h

	Raises:
		DegenerateCurveError: Nonpositive weight on some element
	"""
	J = _check_same_mesh(u, v, winv)
	winv_values = np.asarray(winv.values)
	if np.any(winv_values <= 0.0):
		bad = int(np.argmin(winv_values))
		raise DegenerateCurveError(f"Nonpositive inverse weight on element {bad}")

	du = np.diff(u.endpoints(), axis=1)[:, 0]
	dv = np.diff(v.endpoints(), axis=1)[:, 0]
	return float(np.sum(_pointwise_product(du, dv, base_ndim=1) * winv_values) * J)


# ---------------------------------------------------------------------------
# Element kernels. Local index a is the test function, b the trial function.
# ---------------------------------------------------------------------------


def mass_local(
	mesh: ReferenceMesh,
	weight: np.ndarray,
	coefficient: Optional[np.ndarray] = None
) -> np.ndarray:
	"""
	Local matrices of (c phi_b, phi_a w), exact.

	Args:
		weight: (J,) element weight
		coefficient: (J, Q) values of a nodal/polynomial coefficient at Gauss points
	"""
	density = np.broadcast_to(np.asarray(weight)[:, None], (mesh.J, len(QUAD_WEIGHTS)))
	if coefficient is not None:
		density = density * coefficient
	return mesh.h * np.einsum("q,eq,qa,qb->eab", QUAD_WEIGHTS, density, SHAPE, SHAPE)


def lumped_local(
	mesh: ReferenceMesh,
	weight: np.ndarray,
	coefficient: Optional[np.ndarray] = None
) -> np.ndarray:
	"""
	Local (diagonal) matrices of (c phi_b, phi_a w)^h.

	Args:
		weight: (J,) element weight
		coefficient: (J,) element constant or (J, 2) endpoint values
	"""
	scale = 0.5 * mesh.h * np.asarray(weight)
	if coefficient is None:
		diag = np.repeat(scale[:, None], 2, axis=1)
	else:
		coefficient = np.asarray(coefficient)
		if coefficient.ndim == 1:
			coefficient = coefficient[:, None]
		diag = scale[:, None] * coefficient * np.ones((1, 2))

	local = np.zeros((mesh.J, 2, 2))
	local[:, 0, 0] = diag[:, 0]
	local[:, 1, 1] = diag[:, 1]
	return local


def stiffness_local(mesh: ReferenceMesh, winv: np.ndarray) -> np.ndarray:
	"""Local matrices of (phi_b_rho, phi_a_rho winv)."""
	winv = np.asarray(winv)
	if np.any(winv <= 0.0):
		raise DegenerateCurveError(f"Nonpositive inverse weight on element {int(np.argmin(winv))}")
	return (winv / mesh.h)[:, None, None] * np.outer(SHAPE_SLOPE, SHAPE_SLOPE)[None, :, :]


def skew_local(mesh: ReferenceMesh, beta: np.ndarray) -> np.ndarray:
	"""
	Local matrices of (beta, phi_b_rho phi_a - phi_b phi_a_rho), no |X_rho| weight.

	Args:
		beta: (J, Q) coefficient at Gauss points (tangential vertex velocity)
	"""
	# h from the element measure cancels 1/h from the hat derivative
	left = np.einsum("q,eq,qa->ea", QUAD_WEIGHTS, beta, SHAPE)
	return left[:, :, None] * SHAPE_SLOPE[None, None, :] - SHAPE_SLOPE[None, :, None] * left[:, None, :]


def load_local(mesh: ReferenceMesh, values: np.ndarray, weight: np.ndarray) -> np.ndarray:
	"""(J, 2) local vectors of (f, phi_a w), exact; values (J, Q) at Gauss points."""
	return mesh.h * np.einsum("q,eq,e,qa->ea", QUAD_WEIGHTS, values, np.asarray(weight), SHAPE)


def lumped_load_local(mesh: ReferenceMesh, endpoints: np.ndarray, weight: np.ndarray) -> np.ndarray:
	"""(J, 2) local vectors of (f, phi_a w)^h; endpoints (J, 2) one-sided values."""
	return 0.5 * mesh.h * np.asarray(weight)[:, None] * endpoints


def scatter_matrix(
	mesh: ReferenceMesh,
	local: np.ndarray,
	row_offset: int = 0,
	col_offset: int = 0
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
	"""
	COO triplets of the global matrix assembled from (J, 2, 2) local matrices.

	Duplicates are left in place; they are summed on compression.
	"""
	en = mesh.element_nodes
	rows = np.broadcast_to(en[:, :, None] + row_offset, local.shape)
	cols = np.broadcast_to(en[:, None, :] + col_offset, local.shape)
	return rows.ravel(), cols.ravel(), np.asarray(local).ravel()


def scatter_vector(mesh: ReferenceMesh, local: np.ndarray) -> np.ndarray:
	"""(J,) global vector assembled from (J, 2) local vectors."""
	return np.bincount(mesh.element_nodes.ravel(), weights=np.asarray(local).ravel(), minlength=mesh.J)
