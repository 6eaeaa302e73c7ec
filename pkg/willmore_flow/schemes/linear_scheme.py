"""
Linear Schemes

One linear 5J x 5J solve per step.

	- LinearScheme: squared-curvature coefficients from the evolved curvature kappa^m
	- AltLinearScheme: the same rows with the coefficients taken from kappa_bgn^m

Both dissipate E_linear (bending weighted by the previous mesh, plus lam |Gamma|)
for every time step size.
"""

from willmore_flow.schemes.assembly import assemble
from willmore_flow.schemes.base_scheme import BaseScheme, SchemeState, StepResult
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)


class LinearScheme(BaseScheme):
	"""Linear stepper with sqrt-Jacobian weighted old curvature."""

	variant = "linear"

	def step(self, state: SchemeState) -> StepResult:
		self.check(state)
		system = assemble(state, self.cfg)
		unknowns = self.solve_system(system, state)
		result = self.finish(state, unknowns)
		logger.debug(f"{self.variant} step {state.m + 1}: residual {result.diagnostics.stability_residual:.3e}")
		return result


class AltLinearScheme(LinearScheme):
	"""Linear stepper with (kappa_bgn^m)^2 in both squared-curvature coefficients."""

	variant = "alt_linear"
