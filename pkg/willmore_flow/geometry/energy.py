"""
Discrete Energies

Willmore energy plus length penalty of a polygon carrying a nodal curvature.

Two energies are reported:
	- E_linear: bending weighted by the previous mesh |X^{m-1}_rho|, plus lam |Gamma^m|
	  (the quantity the linear schemes dissipate)
	- E_bar: bending weighted by the current mesh |X^m_rho|, plus lam |Gamma^m|
	  (the quantity the nonlinear schemes dissipate)

The length-preserving scheme uses the bending part of E_linear only.
"""

from dataclasses import dataclass

import numpy as np

from willmore_flow.fem.core import ElementField, PeriodicNodalField


@dataclass(frozen=True)
class EnergyReport:
	"""
	Attributes:
		bending: 1/2 (kappa^2, |X^m_rho|)
		bending_prev: 1/2 (kappa^2, |X^{m-1}_rho|)
		length: |Gamma^m| = sum_e cur_weight_e h
		E_linear: bending_prev + lam * length
		E_bar: bending + lam * length
		lam: Length penalty
	"""
	bending: float
	bending_prev: float
	length: float
	E_linear: float
	E_bar: float
	lam: float

	def as_dict(self) -> dict:
		return {
			"bending": self.bending,
			"bending_prev": self.bending_prev,
			"length": self.length,
			"E_linear": self.E_linear,
			"E_bar": self.E_bar,
			"lam": self.lam
		}


def bending_energy(curvature: PeriodicNodalField, weight: ElementField) -> float:
	"""
	1/2 (kappa^2, weight), exact.

	kappa^2 is quadratic on each element, so Simpson's rule is exact:
	integral = (l/3)(a^2 + ab + b^2) with a, b the end values and l = weight * h.
	"""
	ends = curvature.endpoints()
	a, b = ends[:, 0], ends[:, 1]
	measure = np.asarray(weight.values) / curvature.J
	return float(0.5 * np.sum(measure / 3.0 * (a * a + a * b + b * b)))


def energies(
	curvature: PeriodicNodalField,
	prev_weight: ElementField,
	cur_weight: ElementField,
	lam: float
) -> EnergyReport:
	"""
	Evaluate both discrete energies.

	Args:
		curvature: Nodal curvature kappa
		prev_weight: |X^{m-1}_rho| per element
		cur_weight: |X^m_rho| per element
		lam: Length penalty (>= 0)

	Returns:
		EnergyReport
	"""
	bending = bending_energy(curvature, cur_weight)
	bending_prev = bending_energy(curvature, prev_weight)
	length = float(np.sum(cur_weight.values) / cur_weight.J)

	return EnergyReport(
		bending=bending,
		bending_prev=bending_prev,
		length=length,
		E_linear=bending_prev + lam * length,
		E_bar=bending + lam * length,
		lam=lam
	)
