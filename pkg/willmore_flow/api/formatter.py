"""
Artifact Formatter - Writes run and convergence results to disk

Key Features:
- timeseries.csv with one row per time level, 17 significant digits
- snapshots/curve_<t>.csv with x,y per vertex (vertex order preserved, J rows)
- summary.json with final energies, mesh ratio, assumption report and errors
- convergence.csv mirroring the published error tables (errors and EOCs)
- Optional energy.svg / curves.svg overlays (matplotlib, Agg backend)

Use Cases:
- Called by api/cli.py after (or while failing) a run
- Output is deterministic for a fixed configuration on one platform

Example:
  writer = ArtifactWriter(Path("runs/tube"))
  writer.write_timeseries(record)
  writer.write_summary({"status": "ok", **record.summary()})
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from willmore_flow.harness.record import TIMESERIES_COLUMNS, RunRecord  # noqa: E402

CONVERGENCE_COLUMNS = ("h", "dt", "errX", "eocX", "err_kappa", "eoc_kappa", "err_kappa_bgn", "eoc_kappa_bgn")


def format_number(value: Any) -> str:
	"""Full-precision decimal; empty for None."""
	if value is None:
		return ""
	if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
		return str(int(value))
	return format(float(value), ".17g")


def snapshot_name(t: float) -> str:
	return f"curve_{format(float(t), 'g')}.csv"


def _json_default(value: Any):
	if isinstance(value, np.generic):
		return value.item()
	if isinstance(value, np.ndarray):
		return value.tolist()
	raise TypeError(f"Not JSON serializable: {type(value).__name__}")


class ArtifactWriter:
	"""
	Writes artifacts into one run directory.

	Responsibilities:
	- Create the directory tree on demand
	- Keep every writer independent (a failed run still gets its partial files)
	"""

	def __init__(self, output_dir: Path):
		self.output_dir = Path(output_dir)

	def _path(self, name: str) -> Path:
		self.output_dir.mkdir(parents=True, exist_ok=True)
		return self.output_dir / name

	def _write_rows(self, path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]):
		with open(path, "w", newline="") as handle:
			writer = csv.writer(handle, lineterminator="\n")
			writer.writerow(header)
			for row in rows:
				writer.writerow([format_number(v) for v in row])

	def write_timeseries(self, record: RunRecord) -> Path:
		path = self._path("timeseries.csv")
		self._write_rows(path, TIMESERIES_COLUMNS, (row.values() for row in record.rows))
		return path

	def write_snapshots(self, record: RunRecord) -> Path:
		directory = self._path("snapshots")
		directory.mkdir(exist_ok=True)
		for t, vertices in sorted(record.snapshots.items()):
			self._write_rows(directory / snapshot_name(t), ("x", "y"), vertices.tolist())
		return directory

	def write_summary(self, payload: Dict[str, Any]) -> Path:
		path = self._path("summary.json")
		with open(path, "w") as handle:
			json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
			handle.write("\n")
		return path

	def write_convergence(self, rows: Sequence[Any]) -> Path:
		path = self._path("convergence.csv")
		self._write_rows(path, CONVERGENCE_COLUMNS, ([getattr(r, c) for c in CONVERGENCE_COLUMNS] for r in rows))
		return path

	def write_energy_plot(self, record: RunRecord) -> Optional[Path]:
		if len(record.rows) < 2:
			return None
		t = record.column("t")
		fig, (ax_energy, ax_ratio) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
		ax_energy.plot(t, record.column("E"), label="E")
		ax_energy.set_ylabel("energy")
		ax_energy.legend()
		ax_ratio.plot(t, record.column("mesh_ratio"), color="tab:red")
		ax_ratio.set_ylabel("mesh ratio")
		ax_ratio.set_xlabel("t")
		fig.tight_layout()
		return self._save(fig, "energy.svg")

	def write_curves_plot(self, record: RunRecord) -> Optional[Path]:
		if not record.snapshots:
			return None
		fig, ax = plt.subplots(figsize=(6, 6))
		for t, vertices in sorted(record.snapshots.items()):
			closed = np.vstack([vertices, vertices[:1]])
			ax.plot(closed[:, 0], closed[:, 1], linewidth=1.0, label=f"t = {t:g}")
		ax.set_aspect("equal")
		ax.legend(fontsize="small")
		return self._save(fig, "curves.svg")

	def _save(self, fig, name: str) -> Path:
		path = self._path(name)
		fig.savefig(path, format="svg", metadata={"Date": None})
		plt.close(fig)
		return path
