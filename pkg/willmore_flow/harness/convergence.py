"""
Convergence Study

Errors against the expanding circle and experimental orders of convergence (EOC).

Key Features:
	- error_norms(): max-in-time vertex errors for position, curvature and bgn curvature
	- ladder(): (h0 / 2^k, dt0 / 4^k) refinement levels, h0 = 1/32, dt0 = 0.04
	- convergence_study(): one expanding-circle run per level, optionally in a process pool
	- REFERENCE_ERRORS and verdict(): comparison with published error tables

Example:
	rows = convergence_study("linear", ladder(3))
	print(verdict("linear", rows)["status"])
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from willmore_flow.errors import ConfigurationError, MisuseError
from willmore_flow.harness.exact import ExactExpandingCircle
from willmore_flow.harness.experiments import run_experiment
from willmore_flow.harness.record import RunRecord
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)

H0 = 1.0 / 32
DT0 = 0.04
T_FINAL = 1.0

ERROR_RTOL = 0.03
EOC_WINDOW = (1.9, 2.1)

CIRCLE_SEEDS = ("circle_seed", "circle")

REFERENCE_ERRORS: Dict[str, Dict[str, Tuple[float, ...]]] = {
	"linear": {
		"errX": (8.30e-3, 2.04e-3, 5.10e-4, 1.27e-4, 3.18e-5),
		"err_kappa": (1.38e-2, 3.66e-3, 9.27e-4, 2.33e-4, 5.82e-5),
		"err_kappa_bgn": (4.42e-2, 1.11e-2, 2.80e-3, 7.01e-4, 1.75e-4),
	},
	"nonlinear": {
		"errX": (4.38e-3, 1.09e-3, 2.73e-4, 6.82e-5, 1.71e-5),
		"err_kappa": (4.92e-3, 1.22e-3, 3.07e-4, 7.67e-5, 1.92e-5),
		"err_kappa_bgn": (4.41e-2, 1.10e-2, 2.80e-3, 7.01e-4, 1.75e-4),
	},
}

ERROR_COLUMNS = ("errX", "err_kappa", "err_kappa_bgn")


@dataclass
class ConvergenceRow:
	"""
	One refinement level.

	EOC fields are None on the first level.
	"""
	h: float
	dt: float
	errX: float
	eocX: Optional[float]
	err_kappa: float
	eoc_kappa: Optional[float]
	err_kappa_bgn: float
	eoc_kappa_bgn: Optional[float]

	def as_dict(self) -> dict:
		return asdict(self)


def error_norms(run: RunRecord, exact: ExactExpandingCircle) -> Tuple[float, float, float]:
	"""
	Max-in-time, max-over-vertices errors.

	errX uses the distance to the exact circle, | |X(rho_j)| - r(t_m) |, which is
	attained at the smallest or largest vertex radius of each level.

	Args:
		run: Record of an expanding-circle run
		exact: Exact solution

	Returns:
		(errX, err_kappa, err_kappa_bgn)

	Raises:
		MisuseError: Record from another initial curve, or without data
	"""
	if run.seed not in CIRCLE_SEEDS:
		raise MisuseError(f"Error norms need an expanding-circle run, got seed '{run.seed}'")
	if not run.extremes:
		raise MisuseError("Run record holds no levels")

	errX = err_kappa = err_bgn = 0.0
	for level in run.extremes:
		# nodal extremes bound the max over vertices
		errX = max(errX, exact.radial_error((level.radius_min, level.radius_max), level.t))
		err_kappa = max(err_kappa, exact.curvature_error((level.curvature_min, level.curvature_max), level.t))
		err_bgn = max(err_bgn, exact.curvature_error((level.bgn_curvature_min, level.bgn_curvature_max), level.t))
	return errX, err_kappa, err_bgn


def ladder(levels: int, h0: float = H0, dt0: float = DT0) -> List[Tuple[float, float]]:
	"""[(h0 / 2^k, dt0 / 4^k) for k < levels]."""
	if levels < 1:
		raise ConfigurationError(f"Need at least one level, got {levels}")
	return [(h0 / 2 ** k, dt0 / 4 ** k) for k in range(levels)]


def eoc(coarse: float, fine: float) -> Optional[float]:
	if coarse <= 0.0 or fine <= 0.0:
		return None
	return math.log(coarse / fine) / math.log(2.0)


def _run_level(args) -> Tuple[float, float, float]:
	variant, h, dt = args
	J = int(round(1.0 / h))
	record = run_experiment("example1", {"variant": variant, "J": J, "dt": dt, "T": T_FINAL, "snapshot_times": ()})
	return error_norms(record, ExactExpandingCircle())


def tabulate(levels: Sequence[Tuple[float, float]], errors: Sequence[Tuple[float, float, float]]) -> List[ConvergenceRow]:
	"""Attach EOCs to per-level errors."""
	rows: List[ConvergenceRow] = []
	previous = None
	for (h, dt), (errX, err_kappa, err_bgn) in zip(levels, errors):
		rows.append(ConvergenceRow(
			h=h, dt=dt,
			errX=errX, eocX=eoc(previous[0], errX) if previous else None,
			err_kappa=err_kappa, eoc_kappa=eoc(previous[1], err_kappa) if previous else None,
			err_kappa_bgn=err_bgn, eoc_kappa_bgn=eoc(previous[2], err_bgn) if previous else None
		))
		previous = (errX, err_kappa, err_bgn)
	return rows


def convergence_study(
	variant: str,
	levels: Sequence[Tuple[float, float]],
	workers: int = 1
) -> List[ConvergenceRow]:
	"""
	Run the expanding circle on every level and tabulate errors and EOCs.

	Args:
		variant: Scheme variant
		levels: (h, dt) pairs, h halved from one level to the next
		workers: Process count; levels are independent

	Returns:
		One ConvergenceRow per level
	"""
	jobs = [(variant, h, dt) for h, dt in levels]
	logger.info(f"Convergence study: {variant}, {len(jobs)} level(s), {workers} worker(s)")

	if workers > 1 and len(jobs) > 1:
		with ProcessPoolExecutor(max_workers=workers) as pool:
			errors = list(pool.map(_run_level, jobs))
	else:
		errors = [_run_level(job) for job in jobs]

	return tabulate(levels, errors)


def verdict(variant: str, rows: Sequence[ConvergenceRow]) -> dict:
	"""
	Compare a study with the reference tables.

	Errors must lie within 3% of the reference (where one exists) and every EOC
	from the second level on within [1.9, 2.1].

	Returns:
		{"status": "pass" | "fail" | "insufficient levels", "failures": [...]}
	"""
	if len(rows) < 2:
		return {"status": "insufficient levels", "failures": []}

	failures = []
	reference = REFERENCE_ERRORS.get(variant)
	if reference is not None:
		for k, row in enumerate(rows[:len(reference["errX"])]):
			for column in ERROR_COLUMNS:
				value, expected = getattr(row, column), reference[column][k]
				if abs(value - expected) > ERROR_RTOL * expected:
					failures.append(f"level {k + 1} {column} = {value:.3e}, expected {expected:.2e}")

	low, high = EOC_WINDOW
	for k, row in enumerate(rows[1:], start=2):
		for column in ("eocX", "eoc_kappa", "eoc_kappa_bgn"):
			value = getattr(row, column)
			if value is None or not low <= value <= high:
				failures.append(f"level {k} {column} = {value} outside [{low}, {high}]")

	return {"status": "fail" if failures else "pass", "failures": failures}
