import numpy as np
import pytest

from willmore_flow.fem.core import PeriodicNodalField
from willmore_flow.geometry.curve import ClosedCurve
from willmore_flow.initial_data.parameterizations import interpolate
from willmore_flow.initial_data.projection import bgn_project
from willmore_flow.schemes.base_scheme import SchemeState


def regular_polygon(J: int, radius: float = 1.0) -> ClosedCurve:
	angles = 2.0 * np.pi * np.arange(J) / J
	return ClosedCurve(radius * np.stack([np.cos(angles), np.sin(angles)], axis=1))


def perturbed_state(J: int, seed: int = 0) -> SchemeState:
	"""Nonuniform state with X^m != X^{m-1} and kappa^m != kappa_bgn^m."""
	rng = np.random.default_rng(seed)
	angles = 2.0 * np.pi * np.arange(J) / J + 0.1 * np.sin(2.0 * np.pi * np.arange(J) / J)
	base = np.stack([1.5 * np.cos(angles), np.sin(angles)], axis=1)
	X_prev = base + 0.01 * rng.standard_normal((J, 2))
	X_cur = 1.02 * base + 0.01 * rng.standard_normal((J, 2))
	curvature = -1.0 + 0.2 * rng.standard_normal(J)
	bgn_curvature = -1.0 + 0.2 * rng.standard_normal(J)
	return SchemeState(
		X_cur=ClosedCurve(X_cur),
		X_prev=ClosedCurve(X_prev),
		curvature=PeriodicNodalField(curvature),
		bgn_curvature=PeriodicNodalField(bgn_curvature),
		t=0.1,
		m=3
	)


def projected_state(seed: str, J: int) -> SchemeState:
	data = bgn_project(interpolate(seed, J))
	return SchemeState.initial(data.X0, data.curvature, data.bgn_curvature)


@pytest.fixture
def rng():
	return np.random.default_rng(20240611)


@pytest.fixture
def ellipse_state():
	return projected_state("ellipse", 32)


@pytest.fixture
def circle_state():
	return projected_state("circle", 64)
