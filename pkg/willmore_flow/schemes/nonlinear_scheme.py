"""
Nonlinear Schemes

Weakly nonlinear steppers solved by Picard iteration.

Each iterate l+1 solves the linear system with the convection and stretching terms
frozen at X^{m+1,l}, starting from X^{m+1,0} = X^m and kappa^{m+1,0} = kappa^m. The loop
stops when the largest nodal change of X and kappa drops to picard_tol.

	- NonlinearScheme: coefficients (kappa^m)^2
	- NonlinearAltScheme: coefficients (kappa_bgn^m)^2

Both dissipate E_bar (single time level weights).
"""

import numpy as np

from willmore_flow.errors import PicardDivergenceError
from willmore_flow.schemes.assembly import assemble
from willmore_flow.schemes.base_scheme import BaseScheme, SchemeState, StepResult
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)


class NonlinearScheme(BaseScheme):
	"""Picard-iterated nonlinear stepper."""

	variant = "nonlinear"

	def step(self, state: SchemeState) -> StepResult:
		self.check(state)
		cfg = self.cfg

		# Start from the current level
		X_iter = state.X_cur.vertices
		kappa_iter = state.curvature.values
		increment = np.inf

		for iteration in range(1, cfg.picard_max + 1):
			system = assemble(state, cfg, frozen=X_iter)
			unknowns = self.solve_system(system, state)

			# Absolute nodal increment in position and curvature
			increment = max(
				float(np.max(np.hypot(*(unknowns.X - X_iter).T))),
				float(np.max(np.abs(unknowns.curvature - kappa_iter)))
			)
			X_iter, kappa_iter = unknowns.X, unknowns.curvature

			if increment <= cfg.picard_tol:
				logger.debug(f"{self.variant} step {state.m + 1}: {iteration} Picard iterations")
				return self.finish(state, unknowns, picard_iters=iteration)

		raise PicardDivergenceError(
			f"Picard iteration did not reach {cfg.picard_tol:g} in {cfg.picard_max} iterations "
			f"at step {state.m + 1} (last increment {increment:.3e})",
			increment=increment,
			iterations=cfg.picard_max
		)


class NonlinearAltScheme(NonlinearScheme):
	"""Picard-iterated nonlinear stepper with (kappa_bgn^m)^2 coefficients."""

	variant = "nonlinear_alt"
