"""
Scheme Router

Selects the stepper for a variant name and exposes one function per variant.

Responsibilities:
	- Map SchemeConfig.variant to a BaseScheme implementation (lazy imports)
	- step_linear / step_nonlinear / step_alt_linear / step_length_preserving /
	  step_nonlinear_alt: state in, StepResult out
	- solve_decoupled(): sequential solve of the two subsystems when lam = 0

Example:
	router = SchemeRouter(SchemeConfig(lam=0.0, dt=1e-3, variant="nonlinear"))
	result = router.step(state)
	state = result.next_state(state, router.cfg.dt)
"""

from dataclasses import replace

import numpy as np
from scipy import sparse

from willmore_flow.errors import ConfigurationError
from willmore_flow.linalg.sparse import solve
from willmore_flow.schemes.assembly import assemble
from willmore_flow.schemes.base_scheme import (
	BaseScheme,
	SchemeConfig,
	SchemeState,
	StepResult,
	split_solution,
)


class SchemeRouter:
	"""
	Stepper selection by variant name.

	Supported variants:
		- linear: LinearScheme
		- alt_linear: AltLinearScheme
		- nonlinear: NonlinearScheme (Picard)
		- nonlinear_alt: NonlinearAltScheme (Picard)
		- length_preserving: LengthPreservingScheme
	"""

	def __init__(self, cfg: SchemeConfig):
		cfg.validate()
		self.cfg = cfg
		self.scheme: BaseScheme = self._initialize_scheme()

	def _initialize_scheme(self) -> BaseScheme:
		variant = self.cfg.variant

		if variant == "linear":
			from willmore_flow.schemes.linear_scheme import LinearScheme
			return LinearScheme(self.cfg)
		elif variant == "alt_linear":
			from willmore_flow.schemes.linear_scheme import AltLinearScheme
			return AltLinearScheme(self.cfg)
		elif variant == "nonlinear":
			from willmore_flow.schemes.nonlinear_scheme import NonlinearScheme
			return NonlinearScheme(self.cfg)
		elif variant == "nonlinear_alt":
			from willmore_flow.schemes.nonlinear_scheme import NonlinearAltScheme
			return NonlinearAltScheme(self.cfg)
		elif variant == "length_preserving":
			from willmore_flow.schemes.length_preserving_scheme import LengthPreservingScheme
			return LengthPreservingScheme(self.cfg)

		raise ConfigurationError(f"Unsupported scheme variant: {variant}")

	def step(self, state: SchemeState) -> StepResult:
		return self.scheme.step(state)


def _step(state: SchemeState, cfg: SchemeConfig, variant: str) -> StepResult:
	return SchemeRouter(replace(cfg, variant=variant)).step(state)


def step_linear(state: SchemeState, cfg: SchemeConfig) -> StepResult:
	return _step(state, cfg, "linear")


def step_alt_linear(state: SchemeState, cfg: SchemeConfig) -> StepResult:
	return _step(state, cfg, "alt_linear")


def step_nonlinear(state: SchemeState, cfg: SchemeConfig) -> StepResult:
	return _step(state, cfg, "nonlinear")


def step_nonlinear_alt(state: SchemeState, cfg: SchemeConfig) -> StepResult:
	return _step(state, cfg, "nonlinear_alt")


def step_length_preserving(state: SchemeState, cfg: SchemeConfig) -> StepResult:
	return _step(state, cfg, "length_preserving")


def solve_decoupled(state: SchemeState, cfg: SchemeConfig) -> StepResult:
	"""
	Linear step for lam = 0 as two sequential solves.

	Rows (a)/(b) involve only (V, kappa); rows (c)/(d) then give (X, kappa_bgn)
	with V known.

	Args:
		state: Level-m state
		cfg: linear or alt_linear configuration with lam = 0

	Returns:
		StepResult equal to the coupled solve up to round-off

	Raises:
		ConfigurationError: lam != 0 or a variant without the block structure
	"""
	if cfg.lam != 0.0:
		raise ConfigurationError(f"Decoupled solve needs lam = 0, got {cfg.lam}")
	if cfg.variant not in ("linear", "alt_linear"):
		raise ConfigurationError(f"Decoupled solve supports linear and alt_linear, got {cfg.variant}")

	router = SchemeRouter(cfg)
	router.scheme.check(state)

	J = state.J
	system = assemble(state, cfg)
	A = sparse.csr_matrix(system.matrix())
	head, tail = slice(0, 2 * J), slice(2 * J, 5 * J)

	first = solve(A[head, head].tocsc(), system.rhs[head])
	second = solve(A[tail, tail].tocsc(), system.rhs[tail] - A[tail, head] @ first)

	unknowns = split_solution(np.concatenate([first, second]), J)
	return router.scheme.finish(state, unknowns)
