"""
Initial Parameterizations

Named closed maps rho in I -> R^2 used as initial curves, and their nodal interpolation.

Key Features:
	- Registry of named seeds selectable by string key (run configs, presets)
	- Vectorized evaluation: every map takes an array of parameters and returns (n, 2)
	- interpolate(): vertex j = x(j/J), degeneracy checked by ClosedCurve
	- load_vertices_csv(): user-supplied polygons, one "x,y" pair per line, closed implicitly

Supported seeds:
	- circle_seed: unit circle with nonuniform nodes, g(rho) = 2 pi rho + 0.1 sin(2 pi rho)
	- circle: unit circle, uniform nodes
	- tube: 8 x 1 stadium (caps of radius 0.5, straights of length 7), arc-length parameterized
	- ellipse: (3 cos 2 pi rho, 0.5 sin 2 pi rho), very nonuniform vertex spacing
	- ellipse_uniform: the same ellipse parameterized proportionally to arc length
	- lemniscate: 2:1 lemniscate with amplitude 1 on [1/4, 3/4] and 2 elsewhere (J multiple of 4)

Example:
	curve = interpolate(get_parameterization("tube"), 128)
"""

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

from willmore_flow.errors import ConfigurationError
from willmore_flow.geometry.curve import ClosedCurve

TWO_PI = 2.0 * np.pi

TUBE_HALF_STRAIGHT = 3.5
TUBE_RADIUS = 0.5
ARC_TABLE_SIZE = 1 << 14


@dataclass(frozen=True)
class Parameterization:
	"""
	Named closed curve map.

	Attributes:
		name: Registry key
		evaluate: Vectorized map (n,) parameters -> (n, 2) points, 1-periodic
		description: One-line description
		multiple_of: J must be a multiple of this (1 = no constraint)
	"""
	name: str
	evaluate: Callable[[np.ndarray], np.ndarray]
	description: str = ""
	multiple_of: int = 1

	def __call__(self, rho) -> np.ndarray:
		return self.evaluate(np.atleast_1d(np.asarray(rho, dtype=float)))


def _circle_seed(rho: np.ndarray) -> np.ndarray:
	g = TWO_PI * rho + 0.1 * np.sin(TWO_PI * rho)
	return np.stack([np.cos(g), np.sin(g)], axis=1)


def _circle(rho: np.ndarray) -> np.ndarray:
	return np.stack([np.cos(TWO_PI * rho), np.sin(TWO_PI * rho)], axis=1)


def _tube(rho: np.ndarray) -> np.ndarray:
	"""
	Counterclockwise stadium starting at the bottom midpoint (0, -0.5).

	Pieces in order: half bottom straight, right cap, top straight, left cap,
	other half of the bottom straight.
	"""
	a, r = TUBE_HALF_STRAIGHT, TUBE_RADIUS
	cap = np.pi * r
	breaks = np.cumsum([a, cap, 2 * a, cap, a])
	s = np.mod(rho, 1.0) * breaks[-1]

	x = np.empty_like(s)
	y = np.empty_like(s)

	piece = np.searchsorted(breaks, s, side="right")
	piece = np.minimum(piece, 4)

	bottom_right = piece == 0
	x[bottom_right] = s[bottom_right]
	y[bottom_right] = -r

	right_cap = piece == 1
	angle = -0.5 * np.pi + (s[right_cap] - breaks[0]) / r
	x[right_cap] = a + r * np.cos(angle)
	y[right_cap] = r * np.sin(angle)

	top = piece == 2
	x[top] = a - (s[top] - breaks[1])
	y[top] = r

	left_cap = piece == 3
	angle = 0.5 * np.pi + (s[left_cap] - breaks[2]) / r
	x[left_cap] = -a + r * np.cos(angle)
	y[left_cap] = r * np.sin(angle)

	bottom_left = piece == 4
	x[bottom_left] = -a + (s[bottom_left] - breaks[3])
	y[bottom_left] = -r

	return np.stack([x, y], axis=1)


def _ellipse(rho: np.ndarray) -> np.ndarray:
	return np.stack([3.0 * np.cos(TWO_PI * rho), 0.5 * np.sin(TWO_PI * rho)], axis=1)


@lru_cache(maxsize=1)
def _ellipse_arc_table():
	"""Normalized arc length s(rho) of the ellipse on a fine grid."""
	grid = np.linspace(0.0, 1.0, ARC_TABLE_SIZE + 1)
	speed = TWO_PI * np.hypot(3.0 * np.sin(TWO_PI * grid), 0.5 * np.cos(TWO_PI * grid))
	arc = cumulative_trapezoid(speed, grid, initial=0.0)
	return arc / arc[-1], grid


def _ellipse_uniform(rho: np.ndarray) -> np.ndarray:
	arc, grid = _ellipse_arc_table()
	frac = np.mod(rho, 1.0)
	return _ellipse(np.interp(frac, arc, grid))


def _lemniscate(rho: np.ndarray) -> np.ndarray:
	frac = np.mod(rho, 1.0)
	amplitude = np.where((frac >= 0.25) & (frac <= 0.75), 1.0, 2.0)
	c = np.cos(TWO_PI * rho)
	s = np.sin(TWO_PI * rho)
	denominator = 1.0 + s * s
	return np.stack([amplitude * c / denominator, amplitude * c * s / denominator], axis=1)


PARAMETERIZATIONS: Dict[str, Parameterization] = {
	p.name: p for p in (
		Parameterization("circle_seed", _circle_seed, "unit circle, nonuniform nodes"),
		Parameterization("circle", _circle, "unit circle, uniform nodes"),
		Parameterization("tube", _tube, "8 x 1 stadium, arc-length parameterized"),
		Parameterization("ellipse", _ellipse, "6 x 1 ellipse, nonuniform nodes"),
		Parameterization("ellipse_uniform", _ellipse_uniform, "6 x 1 ellipse, uniform nodes"),
		Parameterization("lemniscate", _lemniscate, "2:1 asymmetric lemniscate", multiple_of=4),
	)
}


def get_parameterization(name: str) -> Parameterization:
	"""
	Look up a named seed.

	Raises:
		ConfigurationError: Unknown name
	"""
	try:
		return PARAMETERIZATIONS[name]
	except KeyError:
		known = ", ".join(sorted(PARAMETERIZATIONS))
		raise ConfigurationError(f"Unknown parameterization '{name}' (known: {known})") from None


def interpolate(param: Union[Parameterization, str], J: int) -> ClosedCurve:
	"""
	Nodal interpolation: vertex j = param(j / J).

	Args:
		param: Parameterization or its registry name
		J: Number of vertices (>= 3)

	Returns:
		ClosedCurve

	Raises:
		ConfigurationError: J < 3 or J incompatible with the seed
		DegenerateCurveError: Coincident adjacent samples
	"""
	if isinstance(param, str):
		param = get_parameterization(param)
	if J < 3:
		raise ConfigurationError(f"Need J >= 3 vertices, got {J}")
	if J % param.multiple_of:
		raise ConfigurationError(f"Seed '{param.name}' requires J to be a multiple of {param.multiple_of}, got {J}")

	rho = np.arange(J) / J
	return ClosedCurve(param(rho))


def load_vertices_csv(path: Union[str, Path], J: Optional[int] = None) -> ClosedCurve:
	"""
	Read a polygon from CSV, one "x,y" pair per line ('#' comments allowed).

	A trailing vertex equal to the first is dropped (the curve is closed implicitly).

	Args:
		path: CSV file
		J: Expected vertex count, checked when given

	Raises:
		ConfigurationError: Unreadable file, malformed rows or vertex count mismatch
		DegenerateCurveError: Coincident adjacent vertices
	"""
	try:
		vertices = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
	except (OSError, ValueError) as e:
		raise ConfigurationError(f"Cannot read vertices from {path}: {e}") from e

	if vertices.shape[1] != 2:
		raise ConfigurationError(f"Expected 2 columns (x,y) in {path}, got {vertices.shape[1]}")
	if len(vertices) > 3 and np.array_equal(vertices[0], vertices[-1]):
		vertices = vertices[:-1]
	if J is not None and len(vertices) != J:
		raise ConfigurationError(f"{path} holds {len(vertices)} vertices, config says J = {J}")

	return ClosedCurve(vertices)
