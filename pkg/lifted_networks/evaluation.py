"""
Evaluation
Regression metrics, uniform error on a finite grid and the metrics line format
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.metrics import mean_absolute_error, mean_absolute_percentage_error, mean_squared_error

from .exceptions import DomainError, InvalidInputError
from .geometry.manifold import poincare_dist_batch, spd_dist_batch

logger = logging.getLogger(__name__)

METRIC_FIELDS = ("mae", "mse", "mape")


@dataclass(frozen=True)
class Metrics:
	mae: float
	mse: float
	mape: float

	def as_dict(self):
		return asdict(self)


def metrics(y, yhat):
	"""MAE, MSE and MAPE (in percent) of predictions yhat against targets y"""
	y = np.asarray(y, dtype=float).reshape(-1)
	yhat = np.asarray(yhat, dtype=float).reshape(-1)
	if y.shape != yhat.shape or y.size == 0:
		raise InvalidInputError(f"metrics need equal non-empty lengths, got {y.shape} and {yhat.shape}")
	if np.any(y == 0):
		raise DomainError("MAPE is undefined for zero targets", value=0.0)
	return Metrics(
		mae=float(mean_absolute_error(y, yhat)),
		mse=float(mean_squared_error(y, yhat)),
		mape=float(100.0 * mean_absolute_percentage_error(y, yhat)),
	)


def metrics_line(model, split, m):
	"""One machine-readable record: model,split,mae,mse,mape"""
	return f"{model},{split},{m.mae:.6f},{m.mse:.6f},{m.mape:.6f}"


def parse_metrics_line(line):
	model, split, *values = line.strip().split(",")
	return model, split, Metrics(*(float(v) for v in values))


# ----------------------------------------------------------------------------
# Uniform error on a grid
# ----------------------------------------------------------------------------


def euclidean_distance(A, B):
	return np.linalg.norm(np.asarray(A, dtype=float) - np.asarray(B, dtype=float), axis=1)


def spd_distance(A, B):
	"""d₊ row-wise between flattened d×d SPD matrices"""
	A = np.asarray(A, dtype=float)
	B = np.asarray(B, dtype=float)
	d = int(round(np.sqrt(A.shape[1])))
	if d * d != A.shape[1]:
		raise InvalidInputError(f"rows of length {A.shape[1]} are not flattened square matrices")
	return spd_dist_batch(A.reshape(-1, d, d), B.reshape(-1, d, d))


def poincare_distance(c):
	def distance(A, B):
		for points in (A, B):
			if np.any(c * np.sum(np.asarray(points) ** 2, axis=1) >= 1.0):
				raise DomainError(f"points lie outside the ball of curvature {c}")
		return poincare_dist_batch(A, B, c)

	return distance


def get_metric(name):
	"""Registered metrics: 'euclidean', 'spd', 'poincare' or 'poincare:<c>'"""
	if callable(name):
		return name
	kind, _, parameter = str(name).partition(":")
	if kind == "euclidean":
		return euclidean_distance
	if kind == "spd":
		return spd_distance
	if kind == "poincare":
		return poincare_distance(float(parameter) if parameter else 1.0)
	raise InvalidInputError(f"Unknown metric '{name}', expected euclidean, spd or poincare[:c]")


def sup_error_on_grid(f, g, grid, dist="euclidean"):
	"""max over the grid of dist(f(x), g(x))"""
	grid = np.asarray(grid, dtype=float)
	if grid.ndim == 1:
		grid = grid[:, None]
	if grid.shape[0] == 0:
		raise InvalidInputError("sup_error_on_grid needs a non-empty grid")
	fx = np.asarray(f(grid), dtype=float).reshape(grid.shape[0], -1)
	gx = np.asarray(g(grid), dtype=float).reshape(grid.shape[0], -1)
	if fx.shape != gx.shape:
		raise InvalidInputError(f"functions disagree on codomain shape: {fx.shape} vs {gx.shape}")
	try:
		errors = get_metric(dist)(fx, gx)
	except DomainError as e:
		raise InvalidInputError(f"values do not lie in the codomain of metric '{dist}': {e}")
	return float(np.max(errors))
