"""
Base Scheme

Abstract base class and shared data structures for all time steppers.

Every stepper advances (V, kappa, X, kappa_bgn) from level m to m+1 by assembling
and solving one (or, for Picard, a few) sparse linear systems. Unknown blocks are
ordered by field, not interleaved by node:

	[ V | kappa | X_x | X_y | kappa_bgn | (multiplier) ]

Responsibilities:
	- Define SchemeConfig, SchemeState, StepDiagnostics, StepResult, SparseSystem
	- Validate configuration values
	- Turn singular factorizations into SolvabilityError naming (A1)/(A2)
	- Warn (never fail) when (A1)/(A2) checks fail on a solvable system
	- Compute the stability residual of a completed step
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from willmore_flow.errors import ConfigurationError, DimensionError, SingularMatrixError, SolvabilityError
from willmore_flow.fem.core import PeriodicNodalField, exact_inner
from willmore_flow.geometry.curve import ClosedCurve, check_assumptions, frame
from willmore_flow.geometry.energy import EnergyReport, energies
from willmore_flow.linalg.sparse import solve, to_compressed
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)

VARIANTS = ("linear", "nonlinear", "alt_linear", "length_preserving", "nonlinear_alt")

# block offsets in units of J
V_BLOCK, KAPPA_BLOCK, XX_BLOCK, XY_BLOCK, BGN_BLOCK = range(5)


@dataclass
class SchemeConfig:
	"""
	Stepper configuration.

	Attributes:
		lam: Length penalty (>= 0); unused by length_preserving
		dt: Time step (> 0)
		variant: One of VARIANTS
		picard_tol: Nodal increment tolerance of the Picard loop
		picard_max: Maximum number of Picard solves per step
	"""
	lam: float
	dt: float
	variant: str = "linear"
	picard_tol: float = 1e-10
	picard_max: int = 100

	def validate(self):
		"""
		Raises:
			ConfigurationError: Any value out of range
		"""
		if self.variant not in VARIANTS:
			raise ConfigurationError(f"Unknown scheme variant '{self.variant}' (known: {', '.join(VARIANTS)})")
		if not np.isfinite(self.lam) or self.lam < 0:
			raise ConfigurationError(f"lambda must be >= 0, got {self.lam}")
		if not np.isfinite(self.dt) or self.dt <= 0:
			raise ConfigurationError(f"dt must be > 0, got {self.dt}")
		if not self.picard_tol > 0:
			raise ConfigurationError(f"picard_tol must be > 0, got {self.picard_tol}")
		if self.picard_max < 1:
			raise ConfigurationError(f"picard_max must be >= 1, got {self.picard_max}")


@dataclass(frozen=True, eq=False)
class SchemeState:
	"""
	Everything a stepper needs at level m.

	Attributes:
		X_cur: X^m
		X_prev: X^{m-1} (equal to X^0 at m = 0)
		curvature: kappa^m, the evolved curvature variable
		bgn_curvature: kappa^m of the curvature identity
		t: Time t_m
		m: Step index
		initial_length: |Gamma^0| (for the relative length change)
	"""
	X_cur: ClosedCurve
	X_prev: ClosedCurve
	curvature: PeriodicNodalField
	bgn_curvature: PeriodicNodalField
	t: float = 0.0
	m: int = 0
	initial_length: Optional[float] = None

	def __post_init__(self):
		J = self.X_cur.J
		sizes = (self.X_prev.J, self.curvature.J, self.bgn_curvature.J)
		if any(size != J for size in sizes):
			raise DimensionError(f"State fields disagree on J: {J} vs {sizes}")
		if self.initial_length is None:
			object.__setattr__(self, "initial_length", self.X_cur.length)

	@property
	def J(self) -> int:
		return self.X_cur.J

	@classmethod
	def initial(cls, X0: ClosedCurve, curvature: PeriodicNodalField, bgn_curvature: PeriodicNodalField = None) -> "SchemeState":
		"""Level 0: X^{-1} = X^0, so the Jacobian is 1."""
		return cls(
			X_cur=X0,
			X_prev=X0,
			curvature=curvature,
			bgn_curvature=bgn_curvature if bgn_curvature is not None else curvature
		)


@dataclass
class StepDiagnostics:
	"""
	Attributes:
		E_before: Variant energy at level m
		E_after: Variant energy at level m+1
		Ebar_after: Single-level energy of level m+1 (all variants, for reporting)
		dissipation: dt * (V, V |X^m_rho|)
		stability_residual: E_after + dissipation - E_before (<= 0 up to round-off)
		picard_iters: Linear solves performed (1 for linear variants)
		lambda_mult: Multiplier lambda^{m+1} (length_preserving only)
		dL: (|Gamma^{m+1}| - |Gamma^0|) / |Gamma^0| (length_preserving only)
		energy: Full energy report of level m+1
	"""
	E_before: float
	E_after: float
	Ebar_after: float
	dissipation: float
	stability_residual: float
	picard_iters: int = 1
	lambda_mult: Optional[float] = None
	dL: Optional[float] = None
	energy: Optional[EnergyReport] = None


@dataclass(frozen=True, eq=False)
class StepResult:
	"""
	Unknowns at level m+1 plus diagnostics.

	Attributes:
		V: Normal velocity V^{m+1}
		curvature: kappa^{m+1}
		bgn_curvature: kappa_bgn^{m+1}
		X_new: X^{m+1}
		diagnostics: StepDiagnostics
	"""
	V: PeriodicNodalField
	curvature: PeriodicNodalField
	bgn_curvature: PeriodicNodalField
	X_new: ClosedCurve
	diagnostics: StepDiagnostics

	def next_state(self, state: SchemeState, dt: float) -> SchemeState:
		return replace(
			state,
			X_cur=self.X_new,
			X_prev=state.X_cur,
			curvature=self.curvature,
			bgn_curvature=self.bgn_curvature,
			t=state.t + dt,
			m=state.m + 1
		)


@dataclass
class SparseSystem:
	"""
	One assembled step system in coordinate format.

	Attributes:
		n: Dimension (5J, or 5J + 1 with a multiplier)
		rows, cols, vals: COO triplets (duplicates allowed)
		rhs: Right-hand side
	"""
	n: int
	rows: np.ndarray
	cols: np.ndarray
	vals: np.ndarray
	rhs: np.ndarray
	meta: Dict = field(default_factory=dict)

	def matrix(self):
		return to_compressed(self.n, self.rows, self.cols, self.vals)

	def dense(self) -> np.ndarray:
		return self.matrix().toarray()


@dataclass(frozen=True, eq=False)
class Unknowns:
	V: np.ndarray
	curvature: np.ndarray
	X: np.ndarray
	bgn_curvature: np.ndarray
	multiplier: Optional[float] = None


def split_solution(solution: np.ndarray, J: int) -> Unknowns:
	"""Cut a solution vector into its field blocks."""
	blocks = [solution[k * J:(k + 1) * J] for k in range(5)]
	return Unknowns(
		V=blocks[V_BLOCK],
		curvature=blocks[KAPPA_BLOCK],
		X=np.stack([blocks[XX_BLOCK], blocks[XY_BLOCK]], axis=1),
		bgn_curvature=blocks[BGN_BLOCK],
		multiplier=float(solution[5 * J]) if len(solution) > 5 * J else None
	)


class BaseScheme(ABC):
	"""
	Abstract base class for time steppers.

	Subclasses implement step(); the shared helpers cover the solve, the
	assumption checks and the energy bookkeeping.
	"""

	variant: str = ""

	def __init__(self, cfg: SchemeConfig):
		cfg.validate()
		self.cfg = cfg

	@abstractmethod
	def step(self, state: SchemeState) -> StepResult:
		"""
		Advance one time step.

		Args:
			state: Level-m state

		Returns:
			StepResult at level m+1

		Raises:
			SolvabilityError: Singular step system
			DegenerateCurveError: A curve lost an edge
		"""
		pass

	def check(self, state: SchemeState):
		"""Log a warning when (A1)/(A2) fail on X^m."""
		report = check_assumptions(state.X_cur, self.cfg.lam)
		if not report.ok:
			logger.warning(
				f"Step {state.m}: solvability assumptions violated "
				f"(A1 {'ok' if report.a1_ok else 'fails'}, A2 {'ok' if report.a2_ok else 'fails'}, "
				f"min |omega| = {report.min_omega:.3e}, min singular value = {report.min_singular:.3e})"
			)
		return report

	def solve_system(self, system: SparseSystem, state: SchemeState) -> Unknowns:
		"""
		Solve an assembled system.

		Raises:
			SolvabilityError: Factorization failed; the message reports (A1)/(A2)
		"""
		try:
			solution = solve(system.matrix(), system.rhs)
		except SingularMatrixError as e:
			report = check_assumptions(state.X_cur, self.cfg.lam)
			raise SolvabilityError(
				f"{self.variant} step {state.m} is singular: "
				f"(A1) {'holds' if report.a1_ok else 'fails'}, (A2) {'holds' if report.a2_ok else 'fails'}"
				f"{' (bgn curvature vanishes)' if system.meta.get('multiplier') else ''}: {e}"
			) from e
		return split_solution(solution, state.J)

	def finish(
		self,
		state: SchemeState,
		unknowns: Unknowns,
		picard_iters: int = 1
	) -> StepResult:
		"""Build the StepResult and its stability diagnostics."""
		X_new = ClosedCurve(unknowns.X)
		V = PeriodicNodalField(unknowns.V)
		curvature = PeriodicNodalField(unknowns.curvature)

		weight_prev = frame(state.X_prev).weight
		weight_cur = frame(state.X_cur).weight
		weight_new = frame(X_new).weight

		before = energies(state.curvature, weight_prev, weight_cur, self.cfg.lam)
		after = energies(curvature, weight_cur, weight_new, self.cfg.lam)
		E_before, E_after = self.energy_pair(before, after)

		dissipation = self.cfg.dt * exact_inner(V, V, weight_cur)
		lambda_mult = unknowns.multiplier
		dL = None
		if self.variant == "length_preserving":
			dL = (after.length - state.initial_length) / state.initial_length

		diagnostics = StepDiagnostics(
			E_before=E_before,
			E_after=E_after,
			Ebar_after=after.E_bar,
			dissipation=dissipation,
			stability_residual=E_after + dissipation - E_before,
			picard_iters=picard_iters,
			lambda_mult=lambda_mult,
			dL=dL,
			energy=after
		)
		return StepResult(
			V=V,
			curvature=curvature,
			bgn_curvature=PeriodicNodalField(unknowns.bgn_curvature),
			X_new=X_new,
			diagnostics=diagnostics
		)

	def energy_pair(self, before: EnergyReport, after: EnergyReport) -> Tuple[float, float]:
		"""(E^m, E^{m+1}) of the energy this variant dissipates."""
		return variant_energy(self.variant, before), variant_energy(self.variant, after)


def variant_energy(variant: str, report: EnergyReport) -> float:
	"""Energy a variant dissipates, read from a report."""
	if variant in ("nonlinear", "nonlinear_alt"):
		return report.E_bar
	if variant == "length_preserving":
		return report.bending_prev
	return report.E_linear
