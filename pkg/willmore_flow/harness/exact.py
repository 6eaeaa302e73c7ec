"""
Exact Solutions

Expanding circle for lam = 0: r(t) = (1 + 2t)^(1/4), kappa(t) = -(1 + 2t)^(-1/4),
centred at the origin. The only closed-form solution used for error measurement.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExactExpandingCircle:
	"""
	Attributes:
		r0: Initial radius (1 for the convergence experiment)
	"""
	r0: float = 1.0

	def radius(self, t) -> np.ndarray:
		"""r(t) with r^4 = r0^4 + 2t."""
		return (self.r0 ** 4 + 2.0 * np.asarray(t, dtype=float)) ** 0.25

	def curvature(self, t) -> np.ndarray:
		return -1.0 / self.radius(t)

	def radial_error(self, radii, t: float) -> float:
		"""Largest distance to the exact circle of points at the given distances from the origin."""
		return float(np.max(np.abs(np.asarray(radii, dtype=float) - self.radius(t))))

	def curvature_error(self, values, t: float) -> float:
		return float(np.max(np.abs(np.asarray(values, dtype=float) - self.curvature(t))))
