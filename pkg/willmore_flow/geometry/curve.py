"""
Closed Polygonal Curves

Discrete differential geometry of the polygon Gamma^m = X^m(I).

Key Features:
	- ClosedCurve: J vertices with periodic indexing, nondegenerate edges enforced
	- frame(): element tangents, outward normals (for counterclockwise curves), lengths, |X_rho|
	- vertex_normal(): length-weighted average of the two adjacent edge normals
	- check_assumptions(): runtime checks of the unique-solvability assumptions (A1)/(A2)
	- mesh_ratio(): longest over shortest edge

Conventions:
	Element e joins vertex e to vertex e+1 (mod J); its edge vector is
	a_e = X_{e+1} - X_e. Perp is (a, b)^perp = (-b, a) and the normal is
	nu = -tau^perp, so a counterclockwise circle of radius r has outward
	normals and curvature -1/r.

Use Cases:
	- schemes/ reads tangents, normals and weights of X^m every step
	- initial_data/projection.py builds the zero-normal-velocity projection from frame()
	- harness/ records mesh ratios and lengths
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from willmore_flow.errors import DegenerateCurveError
from willmore_flow.fem.core import ElementField, ReferenceMesh

DEGENERACY_TOL = 1e-12  # relative to the curve diameter


def perp(vectors: np.ndarray) -> np.ndarray:
	"""(a, b) -> (-b, a) along the last axis."""
	return np.stack([-vectors[..., 1], vectors[..., 0]], axis=-1)


@dataclass(frozen=True, eq=False)
class ClosedCurve:
	"""
	Closed polygon with periodic vertex indexing.

	Attributes:
		vertices: (J, 2) vertex positions X(rho_j)

	Raises:
		DegenerateCurveError: fewer than 3 vertices or a zero-length edge
	"""
	vertices: np.ndarray

	def __post_init__(self):
		vertices = np.array(self.vertices, dtype=float)
		if vertices.ndim != 2 or vertices.shape[1] != 2:
			raise DegenerateCurveError(f"Vertices must have shape (J, 2), got {vertices.shape}")
		if len(vertices) < 3:
			raise DegenerateCurveError(f"A closed curve needs at least 3 vertices, got {len(vertices)}")

		vertices.setflags(write=False)
		object.__setattr__(self, "vertices", vertices)

		lengths = self.lengths
		if np.any(lengths <= 0.0):
			bad = int(np.argmin(lengths))
			raise DegenerateCurveError(
				f"Edge {bad} (vertices {bad} -> {(bad + 1) % self.J}) has zero length"
			)

	@property
	def J(self) -> int:
		return len(self.vertices)

	@property
	def mesh(self) -> ReferenceMesh:
		return ReferenceMesh(self.J)

	@cached_property
	def edges(self) -> np.ndarray:
		"""(J, 2) edge vectors a_e = X_{e+1} - X_e."""
		return np.roll(self.vertices, -1, axis=0) - self.vertices

	@cached_property
	def lengths(self) -> np.ndarray:
		return np.hypot(self.edges[:, 0], self.edges[:, 1])

	@property
	def length(self) -> float:
		return float(np.sum(self.lengths))

	@property
	def diameter(self) -> float:
		"""Largest extent of the bounding box (cheap proxy for the true diameter)."""
		return float(np.max(np.ptp(self.vertices, axis=0)))

	@property
	def centroid(self) -> np.ndarray:
		return self.vertices.mean(axis=0)

	def translated(self, shift) -> "ClosedCurve":
		return ClosedCurve(self.vertices + np.asarray(shift, dtype=float))

	def rotated(self, angle: float) -> "ClosedCurve":
		c, s = np.cos(angle), np.sin(angle)
		return ClosedCurve(self.vertices @ np.array([[c, s], [-s, c]]))

	def scaled(self, factor: float) -> "ClosedCurve":
		return ClosedCurve(self.vertices * factor)

	def reversed(self) -> "ClosedCurve":
		return ClosedCurve(self.vertices[::-1])


@dataclass(frozen=True, eq=False)
class CurveFrame:
	"""
	Element-wise geometric quantities of a polygon.

	Attributes:
		lengths: |a_e| per element
		tangents: unit tangents tau_e, shape (J, 2)
		normals: unit normals nu_e = -tau_e^perp, shape (J, 2)
		weight: |X_rho| = |a_e| / h per element
	"""
	lengths: ElementField
	tangents: ElementField
	normals: ElementField
	weight: ElementField

	@property
	def inverse_weight(self) -> ElementField:
		return ElementField(1.0 / self.weight.values)


def frame(curve: ClosedCurve) -> CurveFrame:
	"""
	Compute tangents, normals, edge lengths and |X_rho| of a polygon.

	Args:
		curve: Nondegenerate closed curve

	Returns:
		CurveFrame with outward normals for counterclockwise curves
	"""
	lengths = curve.lengths
	tangents = curve.edges / lengths[:, None]
	normals = -perp(tangents)
	return CurveFrame(
		lengths=ElementField(lengths),
		tangents=ElementField(tangents),
		normals=ElementField(normals),
		weight=ElementField(lengths * curve.J)
	)


def vertex_normal(curve: ClosedCurve) -> np.ndarray:
	"""
	Vertex normals omega_j.

	omega_j = (|a_{j-1}| nu_{j-1} + |a_j| nu_j) / (|a_{j-1}| + |a_j|), which is the
	nodal field satisfying (omega, xi |X_rho|)^h = (nu, xi |X_rho|) for all nodal xi.

	Args:
		curve: Nondegenerate closed curve

	Returns:
		(J, 2) array, |omega_j| <= 1
	"""
	lengths = curve.lengths
	weighted = frame(curve).normals.values * lengths[:, None]
	incoming = np.roll(weighted, 1, axis=0)  # element j-1 ends at vertex j
	denominator = lengths + np.roll(lengths, 1)
	return (incoming + weighted) / denominator[:, None]


@dataclass(frozen=True)
class AssumptionReport:
	"""
	Result of the unique-solvability checks.

	Attributes:
		a1_ok: lam > 0 or no vertex normal vanishes
		a2_ok: vertex normals span R^2
		min_omega: smallest |omega_j|
		min_singular: smaller singular value of the (J, 2) matrix of vertex normals
		tolerance: threshold used for both checks
	"""
	a1_ok: bool
	a2_ok: bool
	min_omega: float
	min_singular: float
	tolerance: float

	@property
	def ok(self) -> bool:
		return self.a1_ok and self.a2_ok

	def as_dict(self) -> dict:
		return {
			"a1_ok": self.a1_ok,
			"a2_ok": self.a2_ok,
			"min_omega": self.min_omega,
			"min_singular": self.min_singular,
			"tolerance": self.tolerance
		}


def check_assumptions(curve: ClosedCurve, lam: float) -> AssumptionReport:
	"""
	Check (A1) and (A2) on a curve.

	(A1): lam > 0 or omega_j != 0 for all j.
	(A2): dim span{omega_j} = 2, tested through the singular values of the
	stacked vertex normals (square roots of the 2x2 Gram matrix eigenvalues).

	Args:
		curve: Closed curve
		lam: Length penalty

	Returns:
		AssumptionReport (diagnostic only, never raises)
	"""
	omega = vertex_normal(curve)
	tol = DEGENERACY_TOL * max(curve.diameter, np.finfo(float).tiny)

	norms = np.hypot(omega[:, 0], omega[:, 1])
	min_omega = float(np.min(norms))

	singular = np.linalg.svd(omega, compute_uv=False)
	min_singular = float(singular[-1])

	return AssumptionReport(
		a1_ok=bool(lam > 0.0 or min_omega > tol),
		a2_ok=bool(min_singular > tol),
		min_omega=min_omega,
		min_singular=min_singular,
		tolerance=tol
	)


def mesh_ratio(curve: ClosedCurve) -> float:
	"""max_e |a_e| / min_e |a_e| (1 means equidistributed)."""
	lengths = curve.lengths
	return float(np.max(lengths) / np.min(lengths))
