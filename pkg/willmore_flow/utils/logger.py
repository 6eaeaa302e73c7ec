"""
Logger - Package logging helpers

Key Features:
- get_logger(): namespaced stdlib loggers under "willmore_flow"
- log_error(): error record with a title, for failures that are re-raised or reported
- configure(): one-call handler setup used by the CLI (--verbose → DEBUG)

Use Cases:
- Steppers log assumption-check warnings and Picard progress
- Harness logs run start/finish and stability slack breaches
- CLI configures output format once per process

Example:
  logger = get_logger(__name__)
  logger.info(f"Run finished: {steps} steps")
"""

import logging
from typing import Optional

ROOT_NAME = "willmore_flow"
LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


def get_logger(name: Optional[str] = None) -> logging.Logger:
	"""
	Get a logger inside the package namespace.

	Args:
		name: Module name (e.g., __name__); None returns the package root logger

	Returns:
		logging.Logger
	"""
	if not name or name == ROOT_NAME:
		return logging.getLogger(ROOT_NAME)
	if not name.startswith(ROOT_NAME + "."):
		name = f"{ROOT_NAME}.{name}"
	return logging.getLogger(name)


def log_error(message: str, title: str = "willmore_flow"):
	"""
	Log an error with a title prefix.

	Args:
		message: Error details
		title: Component reporting the error (e.g., "Harness")
	"""
	get_logger().error(f"{title}: {message}")


def configure(verbose: bool = False):
	"""
	Attach a stream handler to the package root logger (idempotent).

	Args:
		verbose: DEBUG when True, INFO otherwise
	"""
	root = get_logger()
	root.setLevel(logging.DEBUG if verbose else logging.INFO)

	if not root.handlers:
		handler = logging.StreamHandler()
		handler.setFormatter(logging.Formatter(LOG_FORMAT))
		root.addHandler(handler)
