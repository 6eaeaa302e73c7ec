"""
Run Settings

Validated run configuration read from flat key = value files.

Key Features:
	- RunConfig: pydantic model with range checks (J >= 3, dt > 0, T >= dt, lam >= 0)
	- load_run_config(): file values (python-dotenv parser) + "key=value" overrides on top,
	  named experiment presets supplying the defaults
	- resolve_output_dir(): relative output_dir placed under WILLMORE_OUTPUT_ROOT (.env honoured)

Config file example:
	# tube with length penalty
	experiment = example2_lambda05
	T = 1
	snapshot_times = [0, 0.5, 1]
	output_dir = runs/tube
	emit_svg = true
"""

import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from dotenv import dotenv_values, find_dotenv, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from willmore_flow.errors import ConfigurationError
from willmore_flow.harness.experiments import EXPERIMENTS, ExperimentPreset, preset_as_dict
from willmore_flow.initial_data.parameterizations import PARAMETERIZATIONS
from willmore_flow.schemes.base_scheme import VARIANTS

OUTPUT_ROOT_ENV = "WILLMORE_OUTPUT_ROOT"

KEY_ALIASES = {"lambda": "lam", "variant": "scheme", "emit-svg": "emit_svg"}


class RunConfig(BaseModel):
	"""
	One run, named or custom.

	Attributes:
		experiment: Preset name (None for a fully custom run)
		seed: Initial parameterization key, or "vertices" with vertices_file
		scheme: Stepper variant
		J, dt, T, lam: Discretization and length penalty
		picard_tol, picard_max: Picard loop settings (nonlinear variants)
		snapshot_times: Times at which curves are written
		output_dir: Artifact directory (relative paths go under the output root)
		emit_svg: Also write energy.svg and curves.svg
		vertices_file: CSV polygon for seed "vertices"
	"""
	model_config = ConfigDict(extra="forbid")

	experiment: Optional[str] = None
	seed: str
	scheme: str
	J: int = Field(ge=3)
	dt: float = Field(gt=0)
	T: float = Field(gt=0)
	lam: float = Field(default=0.0, ge=0)
	picard_tol: float = Field(default=1e-10, gt=0)
	picard_max: int = Field(default=100, ge=1)
	snapshot_times: List[float] = Field(default_factory=list)
	output_dir: str = ""
	emit_svg: bool = False
	vertices_file: Optional[str] = None

	@field_validator("snapshot_times", mode="before")
	@classmethod
	def parse_times(cls, value: Any):
		if isinstance(value, str):
			text = value.strip().strip("[]").strip()
			return [float(v) for v in text.replace(";", ",").split(",") if v.strip()] if text else []
		return value

	@field_validator("scheme")
	@classmethod
	def known_scheme(cls, value: str) -> str:
		if value not in VARIANTS:
			raise ValueError(f"unknown scheme '{value}' (known: {', '.join(VARIANTS)})")
		return value

	@field_validator("seed")
	@classmethod
	def known_seed(cls, value: str) -> str:
		if value != "vertices" and value not in PARAMETERIZATIONS:
			raise ValueError(f"unknown seed '{value}' (known: {', '.join(PARAMETERIZATIONS)}, vertices)")
		return value

	@model_validator(mode="after")
	def consistent(self) -> "RunConfig":
		if self.T < self.dt:
			raise ValueError(f"T = {self.T} must be >= dt = {self.dt}")
		if self.seed == "vertices" and not self.vertices_file:
			raise ValueError("seed 'vertices' needs vertices_file")
		if not self.output_dir:
			self.output_dir = f"runs/{self.experiment or 'custom'}"
		return self

	def to_preset(self) -> ExperimentPreset:
		return ExperimentPreset(
			name=self.experiment or "custom",
			seed=self.seed,
			variant=self.scheme,
			J=self.J,
			dt=self.dt,
			T=self.T,
			lam=self.lam,
			snapshot_times=tuple(self.snapshot_times),
			picard_tol=self.picard_tol,
			picard_max=self.picard_max,
			vertices_file=self.vertices_file
		)


def parse_overrides(items: Optional[Iterable[str]]) -> Dict[str, str]:
	"""
	["key=value", ...] -> {key: value}.

	Raises:
		ConfigurationError: Item without '='
	"""
	overrides = {}
	for item in items or ():
		key, sep, value = item.partition("=")
		if not sep or not key.strip():
			raise ConfigurationError(f"Override '{item}' is not of the form key=value")
		overrides[key.strip()] = value.strip()
	return overrides


def _normalize(values: Dict[str, Any]) -> Dict[str, Any]:
	return {KEY_ALIASES.get(k.strip(), k.strip()): v for k, v in values.items() if v is not None}


def _preset_defaults(name: str) -> Dict[str, Any]:
	if name not in EXPERIMENTS:
		raise ConfigurationError(f"Unknown experiment '{name}' (known: {', '.join(EXPERIMENTS)})")
	preset = preset_as_dict(name)
	preset["scheme"] = preset.pop("variant")
	preset["experiment"] = preset.pop("name")
	preset.pop("description")
	return {k: v for k, v in preset.items() if v is not None}


def load_run_config(
	path: Optional[Union[str, Path]] = None,
	overrides: Optional[Union[Dict[str, Any], Iterable[str]]] = None
) -> RunConfig:
	"""
	Read and validate a run configuration.

	Precedence: preset defaults < file values < overrides.

	Args:
		path: key = value config file (optional when overrides name everything)
		overrides: Dict or ["key=value", ...]

	Returns:
		RunConfig

	Raises:
		ConfigurationError: Missing file, unknown experiment or invalid values
	"""
	values: Dict[str, Any] = {}
	if path is not None:
		if not Path(path).is_file():
			raise ConfigurationError(f"Config file not found: {path}")
		values.update(_normalize(dotenv_values(path)))

	if overrides is not None and not isinstance(overrides, dict):
		overrides = parse_overrides(overrides)
	values.update(_normalize(overrides or {}))

	data: Dict[str, Any] = {}
	if values.get("experiment"):
		data.update(_preset_defaults(values["experiment"]))
	data.update(values)

	try:
		return RunConfig.model_validate(data)
	except ValidationError as e:
		problems = "; ".join(
			f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
		)
		raise ConfigurationError(f"Invalid run configuration: {problems}") from e


def output_root() -> Optional[Path]:
	"""WILLMORE_OUTPUT_ROOT, read after loading a .env file if present."""
	load_dotenv(find_dotenv(usecwd=True), override=False)
	root = os.environ.get(OUTPUT_ROOT_ENV)
	return Path(root) if root else None


def resolve_output_dir(output_dir: Union[str, Path]) -> Path:
	path = Path(output_dir)
	root = output_root()
	if root is not None and not path.is_absolute():
		return root / path
	return path


def raw_output_dir(
	path: Optional[Union[str, Path]] = None,
	overrides: Optional[Iterable[str]] = None
) -> Optional[Path]:
	"""
	Best-effort output directory of a configuration that failed validation.

	Returns None when no output_dir can be read.
	"""
	values: Dict[str, Any] = {}
	try:
		if path is not None and Path(path).is_file():
			values.update(_normalize(dotenv_values(path)))
		values.update(_normalize(parse_overrides(overrides)))
	except ConfigurationError:
		return None
	if not values.get("output_dir"):
		return None
	return resolve_output_dir(values["output_dir"])
