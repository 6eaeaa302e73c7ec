"""
Command Line Interface

Entry point of the willmore-flow console script.

Commands:
	run --config FILE [--set key=value ...]     one experiment, artifacts in output_dir
	converge --scheme NAME --levels K           expanding-circle ladder, convergence.csv + verdict
	presets                                     list the named experiments

Exit codes:
	0  success (converge: verdict "pass" or "insufficient levels")
	1  run failed (partial timeseries and an error block in summary.json) or verdict "fail"
	2  invalid configuration (nothing but an error summary is written)

Example:
	willmore-flow run --config tube.cfg --set T=5 --set emit_svg=true
"""

import argparse
import sys
from typing import List, Optional

from willmore_flow import __version__
from willmore_flow.api.formatter import ArtifactWriter
from willmore_flow.api.settings import load_run_config, raw_output_dir, resolve_output_dir
from willmore_flow.errors import ConfigurationError, WillmoreError
from willmore_flow.harness.convergence import convergence_study, ladder, verdict
from willmore_flow.harness.experiments import EXPERIMENTS, run_preset
from willmore_flow.harness.record import RunRecord
from willmore_flow.utils.logger import configure, get_logger, log_error

logger = get_logger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

CONVERGE_SCHEMES = ("linear", "nonlinear", "alt_linear", "nonlinear_alt")


def error_payload(error: Exception) -> dict:
	return {"status": "error", "error": {"type": type(error).__name__, "message": str(error)}}


def cmd_run(args: argparse.Namespace) -> int:
	"""
	Run one configured experiment and write its artifacts.

	Returns:
		Exit code
	"""
	try:
		config = load_run_config(args.config, args.set)
	except ConfigurationError as e:
		log_error(str(e), "Configuration")
		output_dir = raw_output_dir(args.config, args.set)
		if output_dir is not None:
			ArtifactWriter(output_dir).write_summary(error_payload(e))
		return EXIT_CONFIG

	writer = ArtifactWriter(resolve_output_dir(config.output_dir))
	record = RunRecord()
	try:
		run_preset(config.to_preset(), record=record)
	except WillmoreError as e:
		log_error(f"{type(e).__name__}: {e}", "Run")
		if isinstance(e, ConfigurationError) and not record.rows:
			writer.write_summary({**error_payload(e), "config": config.model_dump()})
			return EXIT_CONFIG
		writer.write_timeseries(record)
		writer.write_snapshots(record)
		writer.write_summary({**error_payload(e), "config": config.model_dump(), **record.summary()})
		return EXIT_FAILED

	writer.write_timeseries(record)
	writer.write_snapshots(record)
	if config.emit_svg:
		writer.write_energy_plot(record)
		writer.write_curves_plot(record)
	path = writer.write_summary({"status": "ok", "config": config.model_dump(), **record.summary()})

	logger.info(f"Artifacts written to {path.parent}")
	return EXIT_OK


def cmd_converge(args: argparse.Namespace) -> int:
	"""
	Run the convergence ladder and write convergence.csv plus a verdict.

	Returns:
		Exit code
	"""
	try:
		levels = ladder(args.levels)
	except ConfigurationError as e:
		log_error(str(e), "Configuration")
		return EXIT_CONFIG

	writer = ArtifactWriter(resolve_output_dir(args.output_dir or f"runs/converge_{args.scheme}"))
	try:
		rows = convergence_study(args.scheme, levels, workers=args.workers)
	except WillmoreError as e:
		log_error(f"{type(e).__name__}: {e}", "Convergence")
		writer.write_summary(error_payload(e))
		return EXIT_FAILED

	writer.write_convergence(rows)
	result = verdict(args.scheme, rows)
	writer.write_summary({
		"status": "ok",
		"scheme": args.scheme,
		"levels": len(rows),
		"verdict": result["status"],
		"failures": result["failures"],
		"rows": [row.as_dict() for row in rows]
	})

	logger.info(f"Convergence verdict for {args.scheme}: {result['status']}")
	for failure in result["failures"]:
		logger.warning(failure)
	return EXIT_FAILED if result["status"] == "fail" else EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
	for name, preset in EXPERIMENTS.items():
		print(f"{name:20s} {preset.variant:18s} J={preset.J:<5d} dt={preset.dt:<8g} T={preset.T:<6g} lambda={preset.lam:g}  {preset.description}")
	return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(prog="willmore-flow", description="Willmore flow of closed planar curves")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
	sub = parser.add_subparsers(dest="command", required=True)

	run = sub.add_parser("run", help="run one experiment")
	run.add_argument("--config", help="key = value config file")
	run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config value")
	run.set_defaults(handler=cmd_run)

	converge = sub.add_parser("converge", help="expanding-circle convergence ladder")
	converge.add_argument("--scheme", choices=CONVERGE_SCHEMES, default="linear")
	converge.add_argument("--levels", type=int, default=3)
	converge.add_argument("--workers", type=int, default=1, help="processes for independent levels")
	converge.add_argument("--output-dir", default=None)
	converge.set_defaults(handler=cmd_converge)

	presets = sub.add_parser("presets", help="list named experiments")
	presets.set_defaults(handler=cmd_presets)

	return parser


def main(argv: Optional[List[str]] = None) -> int:
	args = build_parser().parse_args(argv)
	configure(verbose=args.verbose)
	return args.handler(args)


if __name__ == "__main__":
	sys.exit(main())
