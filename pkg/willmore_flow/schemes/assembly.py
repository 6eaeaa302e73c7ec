"""
Step System Assembly

Shared row builder for every stepper variant.

Rows (one block of J per test function family), columns [V | kappa | X_x | X_y | kappa_bgn]:

	(a) M_w V - A kappa + 1/2 M_c kappa - lam M_w kappa_bgn                   = 0
	(b) 1/dt M_w kappa + A V - 1/2 M_c V - 1/2 C kappa [+ 1/(2 dt) M_g kappa]  = rhs_b
	(c) 1/dt (N_x X_x + N_y X_y) - M_w V                                       = 1/dt (N_x X^m_x + N_y X^m_y)
	(d) N_x kappa_bgn + A X_x = 0,  N_y kappa_bgn + A X_y = 0

with
	M_w  exact mass matrix, weight w = |X^m_rho|
	A    stiffness matrix, weight 1/w
	M_c  exact mass matrix with coefficient c = (kappa^m)^2, or (kappa_bgn^m)^2 for the alt variants
	N_*  lumped mass matrices with coefficient nu^m_* and weight w
	C    skew convection matrix, (beta, phi_b_rho phi_a - phi_b phi_a_rho), beta = tau^m . (X^m - X^{m-1}) / dt
	M_g  exact mass matrix of g = (X^l_rho - X^m_rho) . X^l_rho / |X^m_rho| (Picard variants only)

Linear variants: rhs_b = 1/dt (kappa^m sqrt(J^m), phi w), exact.
Picard variants: rhs_b = 1/dt M_w kappa^m, and X^{m+1,l} replaces X^m - X^{m-1} inside beta.
Length-preserving: the lam term of (a) becomes -mu b with b = (kappa_bgn^m, phi w)^h, and the
bordered row b . V = 0 closes the (5J+1)-dimensional system for the multiplier mu.
"""

from typing import List, Optional, Tuple

import numpy as np

from willmore_flow.errors import DimensionError
from willmore_flow.fem.core import (
	ElementField,
	PeriodicNodalField,
	load_local,
	lumped_load_local,
	lumped_local,
	mass_local,
	scatter_matrix,
	scatter_vector,
	skew_local,
	stiffness_local,
)
from willmore_flow.geometry.curve import ClosedCurve, frame
from willmore_flow.schemes.base_scheme import (
	BGN_BLOCK,
	KAPPA_BLOCK,
	V_BLOCK,
	XX_BLOCK,
	XY_BLOCK,
	SchemeConfig,
	SchemeState,
	SparseSystem,
)

PICARD_VARIANTS = ("nonlinear", "nonlinear_alt")
ALT_VARIANTS = ("alt_linear", "nonlinear_alt")

# row blocks of the two position equations (d)
DX_ROW, DY_ROW = 3, 4
C_ROW = 2


def sqrt_jacobian(X_cur: ClosedCurve, X_prev: ClosedCurve) -> ElementField:
	"""
	Element-wise sqrt(|X^{m-1}_rho| / |X^m_rho|).

	Raises:
		DimensionError: Curves with different vertex counts
	"""
	if X_cur.J != X_prev.J:
		raise DimensionError(f"Curves have {X_cur.J} and {X_prev.J} vertices")
	return ElementField(np.sqrt(X_prev.lengths / X_cur.lengths))


def _tangential_speed(displacement: np.ndarray, tangents: np.ndarray, dt: float) -> np.ndarray:
	"""(J, Q) values of tau^m . displacement / dt at the Gauss points."""
	at_quad = PeriodicNodalField(displacement / dt).at_quadrature()
	return np.einsum("eqd,ed->eq", at_quad, tangents)


def _stretching(frozen: np.ndarray, X_cur: ClosedCurve) -> np.ndarray:
	"""Element constant (X^l_rho - X^m_rho) . X^l_rho / |X^m_rho|."""
	edges = np.roll(frozen, -1, axis=0) - frozen
	change = edges - X_cur.edges
	return X_cur.J * np.sum(change * edges, axis=1) / X_cur.lengths


def assemble(state: SchemeState, cfg: SchemeConfig, frozen: Optional[np.ndarray] = None) -> SparseSystem:
	"""
	Assemble the step system of cfg.variant at state.

	Args:
		state: Level-m state
		cfg: Scheme configuration (variant selects the rows)
		frozen: (J, 2) Picard iterate X^{m+1,l}; defaults to X^m for Picard variants

	Returns:
		SparseSystem in COO format
	"""
	J = state.J
	mesh = state.X_cur.mesh
	dt, lam, variant = cfg.dt, cfg.lam, cfg.variant
	picard = variant in PICARD_VARIANTS
	bordered = variant == "length_preserving"

	# Geometry of the current polygon
	geo = frame(state.X_cur)
	w = geo.weight.values
	tangents = geo.tangents.values
	normals = geo.normals.values

	# Squared curvature coefficient, explicit in time
	source = state.bgn_curvature if variant in ALT_VARIANTS else state.curvature
	coefficient = source.at_quadrature() ** 2

	M_w = mass_local(mesh, w)
	A = stiffness_local(mesh, geo.inverse_weight.values)
	M_c = mass_local(mesh, w, coefficient)
	N_x = lumped_local(mesh, w, normals[:, 0])
	N_y = lumped_local(mesh, w, normals[:, 1])

	# Tangential transport term from the latest displacement
	if picard:
		iterate = state.X_cur.vertices if frozen is None else np.asarray(frozen, dtype=float)
		displacement = iterate - state.X_cur.vertices
	else:
		displacement = state.X_cur.vertices - state.X_prev.vertices
	C = skew_local(mesh, _tangential_speed(displacement, tangents, dt))

	kappa_row = M_w / dt - 0.5 * C
	# Picard variants evaluate the stretching at the frozen iterate
	if picard:
		kappa_row = kappa_row + mass_local(mesh, _stretching(iterate, state.X_cur)) / (2.0 * dt)

	blocks: List[Tuple[int, int, np.ndarray]] = [
		# (a)
		(V_BLOCK, V_BLOCK, M_w),
		(V_BLOCK, KAPPA_BLOCK, -A + 0.5 * M_c),
		# (b)
		(KAPPA_BLOCK, KAPPA_BLOCK, kappa_row),
		(KAPPA_BLOCK, V_BLOCK, A - 0.5 * M_c),
		# (c)
		(C_ROW, XX_BLOCK, N_x / dt),
		(C_ROW, XY_BLOCK, N_y / dt),
		(C_ROW, V_BLOCK, -M_w),
		# (d)
		(DX_ROW, BGN_BLOCK, N_x),
		(DX_ROW, XX_BLOCK, A),
		(DY_ROW, BGN_BLOCK, N_y),
		(DY_ROW, XY_BLOCK, A),
	]
	# Length penalty (replaced by the multiplier when bordered)
	if lam != 0.0 and not bordered:
		blocks.append((V_BLOCK, BGN_BLOCK, -lam * M_w))

	triplets = [scatter_matrix(mesh, local, r * J, c * J) for r, c, local in blocks]

	n = 5 * J + (1 if bordered else 0)
	rhs = np.zeros(n)

	if picard:
		rhs_b = load_local(mesh, state.curvature.at_quadrature(), w) / dt
	else:
		root = sqrt_jacobian(state.X_cur, state.X_prev).values
		rhs_b = load_local(mesh, state.curvature.at_quadrature() * root[:, None], w) / dt
	rhs[KAPPA_BLOCK * J:(KAPPA_BLOCK + 1) * J] = scatter_vector(mesh, rhs_b)

	ends = PeriodicNodalField(state.X_cur.vertices).endpoints()  # (J, 2, 2)
	normal_position = np.einsum("ed,ead->ea", normals, ends)
	rhs[C_ROW * J:(C_ROW + 1) * J] = scatter_vector(mesh, lumped_load_local(mesh, normal_position, w)) / dt

	# Multiplier column and constraint row
	if bordered:
		border = scatter_vector(mesh, lumped_load_local(mesh, state.bgn_curvature.endpoints(), w))
		index = np.arange(J)
		corner = np.full(J, 5 * J)
		triplets.append((index + V_BLOCK * J, corner, -border))
		triplets.append((corner, index + V_BLOCK * J, border))

	rows, cols, vals = (np.concatenate(parts) for parts in zip(*triplets))
	return SparseSystem(n=n, rows=rows, cols=cols, vals=vals, rhs=rhs, meta={"variant": variant, "multiplier": bordered})
