"""
Initial Data Projection

Consistent discrete initial data (X^0, kappa^0) from a sampled polygon Y^0.

One linear 3J x 3J solve for (dY, kappa) with unknown blocks [dY_x | dY_y | kappa]:

	(nu . dY, xi |Y_rho|)^h = 0                                         for all xi
	(kappa nu, eta |Y_rho|)^h + (dY_rho, eta_rho / |Y_rho|) = -(Y_rho, eta_rho / |Y_rho|)   for all eta

so the vertices move tangentially (in the lumped sense) and kappa satisfies the
discrete curvature identity on X^0 = Y^0 + dY. Then kappa^0 = kappa (both curvatures).
"""

from dataclasses import dataclass

import numpy as np

from willmore_flow.errors import SingularMatrixError, SolvabilityError
from willmore_flow.fem.core import (
	PeriodicNodalField,
	lumped_local,
	scatter_matrix,
	stiffness_local,
)
from willmore_flow.geometry.curve import ClosedCurve, check_assumptions, frame
from willmore_flow.linalg.sparse import solve, to_compressed
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class InitialData:
	"""
	Attributes:
		X0: Projected initial curve
		curvature: kappa^0 (evolved curvature variable)
		bgn_curvature: kappa^0 of the curvature identity (equal to curvature)
		displacement: (J, 2) tangential correction dY = X0 - Y0
	"""
	X0: ClosedCurve
	curvature: PeriodicNodalField
	bgn_curvature: PeriodicNodalField
	displacement: np.ndarray


def bgn_project(Y0: ClosedCurve) -> InitialData:
	"""
	Project a sampled polygon onto consistent initial data.

	Args:
		Y0: Nondegenerate closed curve whose vertex normals span R^2

	Returns:
		InitialData with X0 = Y0 + dY and kappa^0 = kappa

	Raises:
		SolvabilityError: Singular system, i.e. assumption (A2) fails for Y0
	"""
	J = Y0.J
	mesh = Y0.mesh
	geo = frame(Y0)
	weight = geo.weight.values
	normals = geo.normals.values

	stiff = stiffness_local(mesh, geo.inverse_weight.values)
	lumped_x = lumped_local(mesh, weight, normals[:, 0])
	lumped_y = lumped_local(mesh, weight, normals[:, 1])

	# (block row, block col, local matrices)
	blocks = [
		(0, 0, stiff), (0, 2, lumped_x),
		(1, 1, stiff), (1, 2, lumped_y),
		(2, 0, lumped_x), (2, 1, lumped_y),
	]
	triplets = [scatter_matrix(mesh, local, r * J, c * J) for r, c, local in blocks]
	rows, cols, vals = (np.concatenate(parts) for parts in zip(*triplets))
	A = to_compressed(3 * J, rows, cols, vals)

	K = to_compressed(J, *scatter_matrix(mesh, stiff))
	rhs = np.concatenate([-(K @ Y0.vertices[:, 0]), -(K @ Y0.vertices[:, 1]), np.zeros(J)])

	try:
		solution = solve(A, rhs)
	except SingularMatrixError as e:
		report = check_assumptions(Y0, lam=0.0)
		raise SolvabilityError(
			f"Initial projection system is singular: assumption (A2) "
			f"{'holds' if report.a2_ok else 'fails'} (min singular value {report.min_singular:.3e}); {e}"
		) from e

	displacement = np.stack([solution[:J], solution[J:2 * J]], axis=1)
	kappa = PeriodicNodalField(solution[2 * J:])
	X0 = ClosedCurve(Y0.vertices + displacement)

	logger.debug(f"Initial projection: J = {J}, max |dY| = {np.max(np.abs(displacement)):.3e}")

	return InitialData(X0=X0, curvature=kappa, bgn_curvature=kappa, displacement=displacement)
