"""
Error Types

Exception hierarchy shared by every layer of the package.

Library modules raise these; only api/cli.py turns them into exit codes and
the machine-readable error block of summary.json.

Hierarchy:
	WillmoreError
	├── DimensionError          fields living on different meshes
	├── UnsupportedDegreeError  quadrature asked for more than it integrates exactly
	├── DegenerateCurveError    zero-length edge / nonpositive element weight
	├── SingularMatrixError     sparse LU hit a zero pivot
	├── SolvabilityError        step system singular, assumptions (A1)/(A2) violated
	├── PicardDivergenceError   fixed-point iteration did not reach the tolerance
	├── ConfigurationError      invalid run or scheme configuration
	└── MisuseError             operation applied to data it does not describe
"""

from typing import Optional


class WillmoreError(Exception):
	"""Base exception for willmore_flow errors"""
	pass


class DimensionError(WillmoreError):
	"""Fields defined on meshes of different size"""
	pass


class UnsupportedDegreeError(WillmoreError):
	"""Polynomial degree beyond the exactness of the quadrature rule"""
	pass


class DegenerateCurveError(WillmoreError):
	"""Zero-length edge or nonpositive element weight"""
	pass


class SingularMatrixError(WillmoreError):
	"""
	Structural or numerical singularity during LU factorization.

	Attributes:
		pivot: Index of the failing pivot (None if SuperLU aborted before reporting it)
	"""

	def __init__(self, message: str, pivot: Optional[int] = None):
		super().__init__(message)
		self.pivot = pivot


class SolvabilityError(WillmoreError):
	"""Step system could not be solved (assumption (A1) or (A2) violated)"""
	pass


class PicardDivergenceError(WillmoreError):
	"""
	Picard iteration exhausted its budget.

	Attributes:
		increment: Last nodal increment max-norm
		iterations: Number of linear solves performed
	"""

	def __init__(self, message: str, increment: float, iterations: int):
		super().__init__(message)
		self.increment = increment
		self.iterations = iterations


class ConfigurationError(WillmoreError):
	"""Invalid configuration value or unknown name"""
	pass


class MisuseError(WillmoreError):
	"""Operation applied to a run it does not describe"""
	pass
