"""
Run Record

Per-step diagnostics and snapshots of one simulation.

Key Features:
	- TimeseriesRow per level m (row 0 is the initial state)
	- Snapshots of X^m at requested times, vertex order preserved
	- Nodal extremes of |X|, kappa and kappa_bgn per level: exactly the statistics the
	  expanding-circle error norms need, so no trajectory is kept in memory
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from willmore_flow.geometry.curve import AssumptionReport, ClosedCurve

TIMESERIES_COLUMNS = (
	"m", "t", "E", "Ebar", "length", "mesh_ratio", "dissipation",
	"stability_residual", "picard_iters", "lambda_mult", "dL"
)


@dataclass
class TimeseriesRow:
	"""One line of timeseries.csv (None = not applicable to the variant)."""
	m: int
	t: float
	E: float
	Ebar: float
	length: float
	mesh_ratio: float
	dissipation: float
	stability_residual: float
	picard_iters: int
	lambda_mult: Optional[float] = None
	dL: Optional[float] = None

	def values(self) -> tuple:
		return tuple(getattr(self, name) for name in TIMESERIES_COLUMNS)


@dataclass
class NodalExtremes:
	"""min / max over vertices at one time level."""
	t: float
	radius_min: float
	radius_max: float
	curvature_min: float
	curvature_max: float
	bgn_curvature_min: float
	bgn_curvature_max: float


@dataclass
class RunRecord:
	"""
	Everything a run produced.

	Attributes:
		name: Experiment name
		seed: Initial parameterization key
		variant, J, dt, T, lam: Run settings
		rows: Time series, row m for level m
		snapshots: time -> (J, 2) vertices
		extremes: Nodal extremes, one per level
		assumptions: Assumption check of the initial curve
		E0: Initial variant energy (scale of the stability slack)
		final_curve: Last computed curve
		runtime_seconds: Wall-clock duration of the time loop
	"""
	name: str = ""
	seed: str = ""
	variant: str = ""
	J: int = 0
	dt: float = 0.0
	T: float = 0.0
	lam: float = 0.0
	rows: List[TimeseriesRow] = field(default_factory=list)
	snapshots: Dict[float, np.ndarray] = field(default_factory=dict)
	extremes: List[NodalExtremes] = field(default_factory=list)
	assumptions: Optional[AssumptionReport] = None
	E0: float = 0.0
	final_curve: Optional[ClosedCurve] = None
	runtime_seconds: float = 0.0

	def observe(self, t: float, vertices: np.ndarray, curvature: np.ndarray, bgn_curvature: np.ndarray):
		"""Store the nodal extremes of one level."""
		radius = np.hypot(vertices[:, 0], vertices[:, 1])
		self.extremes.append(NodalExtremes(
			t=float(t),
			radius_min=float(radius.min()),
			radius_max=float(radius.max()),
			curvature_min=float(np.min(curvature)),
			curvature_max=float(np.max(curvature)),
			bgn_curvature_min=float(np.min(bgn_curvature)),
			bgn_curvature_max=float(np.max(bgn_curvature))
		))

	@property
	def steps(self) -> int:
		return max(len(self.rows) - 1, 0)

	@property
	def max_stability_residual(self) -> float:
		return max((row.stability_residual for row in self.rows), default=0.0)

	@property
	def max_abs_dL(self) -> Optional[float]:
		values = [abs(row.dL) for row in self.rows if row.dL is not None]
		return max(values) if values else None

	def column(self, name: str) -> np.ndarray:
		"""One time-series column as a float array (None -> nan)."""
		return np.array([np.nan if v is None else v for v in (getattr(r, name) for r in self.rows)], dtype=float)

	def summary(self) -> dict:
		final = self.rows[-1] if self.rows else None
		return {
			"name": self.name,
			"seed": self.seed,
			"variant": self.variant,
			"J": self.J,
			"dt": self.dt,
			"T": self.T,
			"lambda": self.lam,
			"total_steps": self.steps,
			"final": asdict(final) if final else None,
			"max_stability_residual": self.max_stability_residual,
			"max_abs_dL": self.max_abs_dL,
			"assumptions": self.assumptions.as_dict() if self.assumptions else None,
			"runtime_seconds": self.runtime_seconds
		}
