"""
Sparse Direct Solver

Coordinate-to-compressed conversion and LU solves for the step systems.

Key Features:
	- to_compressed(): COO triplets -> CSC with duplicates summed and indices sorted
	- Factorization: SuperLU factors (row pivoting, fill-reducing column ordering), reusable
	- solve(): factor + solve with a residual check and one step of iterative refinement

Singularity:
	SuperLU aborts on exactly singular matrices; tiny pivots (below 1e-300 * max|A|)
	are detected on the U diagonal after factorization. Both raise SingularMatrixError.

Example:
	A = to_compressed(n, rows, cols, vals)
	x = solve(A, rhs)
"""

from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from willmore_flow.errors import DimensionError, SingularMatrixError
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)

PIVOT_TOL = 1e-300
RESIDUAL_TOL = 1e-10


def to_compressed(n: int, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray) -> sparse.csc_matrix:
	"""
	Build an n x n column-compressed matrix from coordinate triplets.

	Args:
		n: Dimension
		rows, cols, vals: Triplets (duplicates are summed)

	Returns:
		scipy.sparse.csc_matrix with canonical format (sorted, deduplicated)
	"""
	A = sparse.coo_matrix(
		(np.asarray(vals, dtype=float), (np.asarray(rows), np.asarray(cols))),
		shape=(n, n)
	).tocsc()
	A.sum_duplicates()  # also sorts indices
	return A


def relative_residual(A, x: np.ndarray, b: np.ndarray) -> float:
	"""||Ax - b||_inf / max(||b||_inf, ||A||_inf ||x||_inf)."""
	r = A @ x - b
	norm_A = float(abs(A).sum(axis=1).max()) if A.nnz else 0.0
	scale = max(float(np.max(np.abs(b), initial=0.0)), norm_A * float(np.max(np.abs(x), initial=0.0)))
	if scale == 0.0:
		return 0.0
	return float(np.max(np.abs(r), initial=0.0)) / scale


class Factorization:
	"""
	LU factors of one square sparse matrix.

	Immutable after construction; solve() may be called from several threads.

	Raises:
		DimensionError: Non-square matrix
		SingularMatrixError: Exactly or numerically singular matrix
	"""

	def __init__(self, A):
		A = sparse.csc_matrix(A)
		if A.shape[0] != A.shape[1]:
			raise DimensionError(f"Matrix must be square, got shape {A.shape}")
		self.A = A
		self.n = A.shape[0]

		try:
			self._lu = splu(A)
		except RuntimeError as e:
			raise SingularMatrixError(f"Sparse LU failed: {e}") from e

		pivot = self._small_pivot()
		if pivot is not None:
			raise SingularMatrixError(f"Pivot for unknown {pivot} vanishes", pivot=pivot)

	def _small_pivot(self) -> Optional[int]:
		scale = float(np.max(np.abs(self.A.data), initial=0.0))
		diagonal = np.abs(self._lu.U.diagonal())
		small = np.flatnonzero(diagonal <= PIVOT_TOL * scale)
		if not len(small):
			return None
		# column j of U belongs to the original unknown i with perm_c[i] == j
		return int(np.argsort(self._lu.perm_c)[small[0]])

	def solve(self, b: np.ndarray) -> np.ndarray:
		b = np.asarray(b, dtype=float)
		if b.shape != (self.n,):
			raise DimensionError(f"Right-hand side has shape {b.shape}, expected ({self.n},)")
		return self._lu.solve(b)


def solve(A, b: np.ndarray) -> np.ndarray:
	"""
	Solve A x = b with sparse LU and one refinement step when needed.

	Args:
		A: Square sparse (or dense) matrix
		b: Right-hand side

	Returns:
		x with relative residual <= 1e-10 for reasonably conditioned A

	Raises:
		DimensionError: Shape mismatch
		SingularMatrixError: Singular matrix (carries the pivot index when known)
	"""
	factors = Factorization(A)
	x = factors.solve(b)

	residual = relative_residual(factors.A, x, b)
	if residual > RESIDUAL_TOL:
		x = x + factors.solve(b - factors.A @ x)
		refined = relative_residual(factors.A, x, b)
		logger.debug(f"Refinement: residual {residual:.3e} -> {refined:.3e}")
		if refined > RESIDUAL_TOL:
			logger.warning(f"Linear solve residual {refined:.3e} above {RESIDUAL_TOL:g} (n = {factors.n})")

	return x
