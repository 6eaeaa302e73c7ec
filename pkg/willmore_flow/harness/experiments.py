"""
Experiments

Named experiment presets and the time loop that runs them.

Key Features:
	- EXPERIMENTS: presets with seed curve, J, dt, T, lam, scheme and snapshot times
	- simulate(): initial projection, M = round(T / dt) steps, diagnostics per step
	- run_experiment(): preset + overrides -> RunRecord

Presets:
	example1, example1_nonlinear    expanding circle, nonuniform nodes (convergence runs)
	example2, example2_nonlinear    8 x 1 tube, lam = 0
	example2_lambda05 / _lambda2    tube with lam = 0.5 / 2 (steady circles of radius 1 / 0.5)
	example3, example3_uniform      6 x 1 ellipse, nonuniform / uniform initial vertices
	example3_small_dt               ellipse, lam = 0.5, dt = 1e-5
	example4, example4_linear       ellipse, lam = 0.5, alt_linear / linear
	example5, example5_lambda04     2:1 lemniscate, lam = 0 / 0.4
	example6                        lemniscate, length-preserving flow

Example:
	record = run_experiment("example2", {"T": 1.0})
"""

import time
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional, Sequence, Tuple

from willmore_flow.errors import ConfigurationError
from willmore_flow.geometry.curve import ClosedCurve, check_assumptions, frame, mesh_ratio
from willmore_flow.geometry.energy import energies
from willmore_flow.harness.record import RunRecord, TimeseriesRow
from willmore_flow.initial_data.parameterizations import interpolate, load_vertices_csv
from willmore_flow.initial_data.projection import bgn_project
from willmore_flow.schemes.base_scheme import SchemeConfig, SchemeState, variant_energy
from willmore_flow.schemes.router import SchemeRouter
from willmore_flow.utils.logger import get_logger

logger = get_logger(__name__)

STABILITY_SLACK = 1e-10  # relative to E^0


@dataclass(frozen=True)
class ExperimentPreset:
	name: str
	seed: str
	variant: str
	J: int
	dt: float
	T: float
	lam: float = 0.0
	snapshot_times: Tuple[float, ...] = ()
	picard_tol: float = 1e-10
	picard_max: int = 100
	vertices_file: Optional[str] = None
	description: str = ""


TUBE_TIMES = (0, 1, 2, 3, 5, 10, 20, 50)
TUBE_LAMBDA05_TIMES = (0, 0.2, 0.4, 1, 2, 3, 4, 10)
TUBE_LAMBDA2_TIMES = (0, 0.2, 0.4, 0.6, 0.8, 1, 2, 10)
ELLIPSE_TIMES = (0, 0.2, 0.4, 1, 2, 5, 10, 20)
LEMNISCATE_TIMES = (0, 0.2, 0.4, 1, 2, 3, 5, 10)
LENGTH_PRESERVING_TIMES = (0, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1)

EXPERIMENTS: Dict[str, ExperimentPreset] = {
	p.name: p for p in (
		ExperimentPreset("example1", "circle_seed", "linear", 32, 0.04, 1.0, 0.0, (0, 1), description="expanding circle"),
		ExperimentPreset("example1_nonlinear", "circle_seed", "nonlinear", 32, 0.04, 1.0, 0.0, (0, 1), description="expanding circle, Picard scheme"),
		ExperimentPreset("example2", "tube", "linear", 128, 1e-3, 50.0, 0.0, TUBE_TIMES, description="tube, lam = 0"),
		ExperimentPreset("example2_nonlinear", "tube", "nonlinear", 128, 1e-3, 50.0, 0.0, TUBE_TIMES, description="tube, lam = 0, Picard scheme"),
		ExperimentPreset("example2_lambda05", "tube", "linear", 256, 1e-4, 10.0, 0.5, TUBE_LAMBDA05_TIMES, description="tube, lam = 0.5"),
		ExperimentPreset("example2_lambda2", "tube", "linear", 256, 1e-4, 10.0, 2.0, TUBE_LAMBDA2_TIMES, description="tube, lam = 2"),
		ExperimentPreset("example3", "ellipse", "linear", 256, 1e-3, 20.0, 0.0, ELLIPSE_TIMES, description="ellipse, nonuniform vertices"),
		ExperimentPreset("example3_uniform", "ellipse_uniform", "linear", 256, 1e-3, 20.0, 0.0, ELLIPSE_TIMES, description="ellipse, uniform vertices"),
		ExperimentPreset("example3_small_dt", "ellipse", "linear", 256, 1e-5, 1.0, 0.5, (0, 1), description="ellipse, lam = 0.5, small dt"),
		ExperimentPreset("example4", "ellipse", "alt_linear", 256, 1e-3, 10.0, 0.5, TUBE_LAMBDA05_TIMES, description="ellipse, lam = 0.5, alternative linear scheme"),
		ExperimentPreset("example4_linear", "ellipse", "linear", 256, 1e-3, 10.0, 0.5, TUBE_LAMBDA05_TIMES, description="ellipse, lam = 0.5, linear scheme"),
		ExperimentPreset("example5", "lemniscate", "linear", 256, 1e-3, 10.0, 0.0, LEMNISCATE_TIMES, description="lemniscate, lam = 0"),
		ExperimentPreset("example5_lambda04", "lemniscate", "linear", 256, 1e-3, 10.0, 0.4, LEMNISCATE_TIMES, description="lemniscate, lam = 0.4"),
		ExperimentPreset("example6", "lemniscate", "length_preserving", 256, 1e-3, 1.0, 0.0, LENGTH_PRESERVING_TIMES, description="lemniscate, length-preserving flow"),
	)
}

OVERRIDABLE = ("seed", "variant", "J", "dt", "T", "lam", "snapshot_times", "picard_tol", "picard_max", "vertices_file")


def get_preset(name: str) -> ExperimentPreset:
	"""
	Raises:
		ConfigurationError: Unknown experiment name
	"""
	try:
		return EXPERIMENTS[name]
	except KeyError:
		raise ConfigurationError(f"Unknown experiment '{name}' (known: {', '.join(EXPERIMENTS)})") from None


def apply_overrides(preset: ExperimentPreset, overrides: Optional[Dict[str, Any]]) -> ExperimentPreset:
	"""
	Raises:
		ConfigurationError: Unknown override key
	"""
	overrides = dict(overrides or {})
	if "scheme" in overrides:
		overrides["variant"] = overrides.pop("scheme")
	if "lambda" in overrides:
		overrides["lam"] = overrides.pop("lambda")

	unknown = set(overrides) - set(OVERRIDABLE)
	if unknown:
		raise ConfigurationError(f"Unknown experiment setting(s): {', '.join(sorted(unknown))}")
	if "snapshot_times" in overrides:
		overrides["snapshot_times"] = tuple(float(t) for t in overrides["snapshot_times"])
	return replace(preset, **overrides)


def initial_curve(seed: str, J: int, vertices_file: Optional[str] = None) -> ClosedCurve:
	"""Sampled (unprojected) initial polygon Y^0."""
	if seed == "vertices":
		if not vertices_file:
			raise ConfigurationError("seed 'vertices' needs vertices_file")
		return load_vertices_csv(vertices_file, J)
	return interpolate(seed, J)


def _snapshot_steps(times: Sequence[float], dt: float, M: int) -> Dict[int, float]:
	steps = {}
	for t in times:
		m = int(round(float(t) / dt))
		if 0 <= m <= M:
			steps[m] = float(t)
	return steps


def simulate(
	Y0: ClosedCurve,
	cfg: SchemeConfig,
	T: float,
	snapshot_times: Sequence[float] = (),
	record: Optional[RunRecord] = None
) -> RunRecord:
	"""
	Project Y0 and advance M = round(T / dt) steps.

	Args:
		Y0: Sampled initial polygon
		cfg: Scheme configuration
		T: Final time (>= dt)
		snapshot_times: Times at which X^m is stored
		record: Record to fill (kept by the caller when a step fails)

	Returns:
		RunRecord with rows for m = 0..M

	Raises:
		ConfigurationError: T < dt or invalid scheme settings
		WillmoreError: Propagated stepper failures (record holds the completed steps)
	"""
	cfg.validate()
	M = int(round(T / cfg.dt))
	if M < 1:
		raise ConfigurationError(f"T = {T} must be at least dt = {cfg.dt}")

	record = record if record is not None else RunRecord()
	record.variant, record.J, record.dt, record.T, record.lam = cfg.variant, Y0.J, cfg.dt, T, cfg.lam

	# Consistent initial data
	data = bgn_project(Y0)
	state = SchemeState.initial(data.X0, data.curvature, data.bgn_curvature)
	router = SchemeRouter(cfg)
	record.assumptions = check_assumptions(data.X0, cfg.lam)

	# Level 0 uses the initial mesh on both sides
	w0 = frame(data.X0).weight
	report = energies(data.curvature, w0, w0, cfg.lam)
	record.E0 = variant_energy(cfg.variant, report)
	record.rows.append(TimeseriesRow(
		m=0, t=0.0, E=record.E0, Ebar=report.E_bar, length=report.length,
		mesh_ratio=mesh_ratio(data.X0), dissipation=0.0, stability_residual=0.0, picard_iters=0,
		dL=0.0 if cfg.variant == "length_preserving" else None
	))
	record.observe(0.0, data.X0.vertices, data.curvature.values, data.bgn_curvature.values)

	snapshots = _snapshot_steps(snapshot_times, cfg.dt, M)
	if 0 in snapshots:
		record.snapshots[snapshots[0]] = data.X0.vertices.copy()
	record.final_curve = data.X0

	slack = STABILITY_SLACK * abs(record.E0)
	logger.info(f"Run '{record.name or cfg.variant}': J = {Y0.J}, dt = {cfg.dt:g}, T = {T:g}, {M} steps")
	started = time.perf_counter()

	try:
		for _ in range(M):
			result = router.step(state)
			state = result.next_state(state, cfg.dt)
			d = result.diagnostics
			t = state.m * cfg.dt

			record.rows.append(TimeseriesRow(
				m=state.m, t=t, E=d.E_after, Ebar=d.Ebar_after, length=d.energy.length,
				mesh_ratio=mesh_ratio(result.X_new), dissipation=d.dissipation,
				stability_residual=d.stability_residual, picard_iters=d.picard_iters,
				lambda_mult=d.lambda_mult, dL=d.dL
			))
			record.observe(t, result.X_new.vertices, result.curvature.values, result.bgn_curvature.values)
			record.final_curve = result.X_new

			# Record the breach, keep the step
			if d.stability_residual > slack:
				logger.warning(f"Step {state.m}: stability residual {d.stability_residual:.3e} exceeds slack {slack:.3e}")
			if state.m in snapshots:
				record.snapshots[snapshots[state.m]] = result.X_new.vertices.copy()
	finally:
		record.runtime_seconds = time.perf_counter() - started

	logger.info(f"Run finished: {record.steps} steps in {record.runtime_seconds:.2f} s, max residual {record.max_stability_residual:.3e}")
	return record


def run_experiment(
	name: str,
	overrides: Optional[Dict[str, Any]] = None,
	record: Optional[RunRecord] = None
) -> RunRecord:
	"""
	Run a named experiment.

	Args:
		name: Key of EXPERIMENTS
		overrides: Settings replacing preset values (seed, variant/scheme, J, dt, T,
			lam/lambda, snapshot_times, picard_tol, picard_max, vertices_file)
		record: Record to fill in place

	Returns:
		RunRecord

	Raises:
		ConfigurationError: Unknown name or setting
	"""
	return run_preset(apply_overrides(get_preset(name), overrides), record=record)


def run_preset(preset: ExperimentPreset, record: Optional[RunRecord] = None) -> RunRecord:
	"""Run a fully specified preset (named or custom)."""
	cfg = SchemeConfig(
		lam=float(preset.lam),
		dt=float(preset.dt),
		variant=preset.variant,
		picard_tol=float(preset.picard_tol),
		picard_max=int(preset.picard_max)
	)
	cfg.validate()

	record = record if record is not None else RunRecord()
	record.name, record.seed = preset.name, preset.seed

	Y0 = initial_curve(preset.seed, int(preset.J), preset.vertices_file)
	return simulate(Y0, cfg, float(preset.T), preset.snapshot_times, record=record)


def preset_as_dict(name: str) -> dict:
	return asdict(get_preset(name))
