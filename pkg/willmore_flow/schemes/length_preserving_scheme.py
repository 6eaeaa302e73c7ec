"""
Length-Preserving Scheme

Linear stepper for Willmore flow with a Lagrange multiplier keeping d|Gamma|/dt = 0.

The bordered (5J+1)-dimensional system replaces the lam term of row (a) by
-mu (kappa_bgn^m, phi |X^m_rho|)^h and adds the constraint (V, kappa_bgn^m |X^m_rho|)^h = 0.
It dissipates the bending energy 1/2 (kappa^2, |X^{m-1}_rho|).
"""

import numpy as np

from willmore_flow.errors import SolvabilityError
from willmore_flow.schemes.assembly import assemble
from willmore_flow.schemes.base_scheme import BaseScheme, SchemeState, StepResult
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)


class LengthPreservingScheme(BaseScheme):
	"""Bordered linear stepper with multiplier lambda^{m+1}."""

	variant = "length_preserving"

	def step(self, state: SchemeState) -> StepResult:
		if not np.any(state.bgn_curvature.values):
			raise SolvabilityError(
				f"length_preserving step {state.m}: curvature kappa^m vanishes, the constraint row is empty"
			)

		self.check(state)
		system = assemble(state, self.cfg)
		unknowns = self.solve_system(system, state)
		result = self.finish(state, unknowns)

		d = result.diagnostics
		logger.debug(f"length_preserving step {state.m + 1}: multiplier {d.lambda_mult:.6g}, dL {d.dL:.3e}")
		return result
