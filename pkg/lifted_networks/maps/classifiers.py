"""
Soft / Hard Classifier Construction
Concrete soft classifiers ŝ for open label sets, and the ideal classifier ĥ

Each label set X_i is an open disk or an open box in R^n. The soft score is
a clipped function of the signed distance to the boundary of X_i (positive
inside), so ŝ_i⁻¹((α, 1]) = X_i exactly and hard_threshold(α)∘ŝ = ĥ.
Label sets may overlap (multi-label).
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError, InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Disk:
	"""Open ball {x : ‖x − center‖ < radius}"""

	center: tuple
	radius: float

	def __post_init__(self):
		if not self.radius > 0:
			raise InvalidParameterError(f"disk radius must be positive, got {self.radius}")

	@property
	def dim(self):
		return len(self.center)

	def signed_distance(self, X):
		return self.radius - np.linalg.norm(X - np.asarray(self.center, dtype=float), axis=1)


@dataclass(frozen=True)
class Box:
	"""Open box ∏ (low_k, high_k)"""

	low: tuple
	high: tuple

	def __post_init__(self):
		if len(self.low) != len(self.high) or not np.all(np.asarray(self.low) < np.asarray(self.high)):
			raise InvalidParameterError(f"box needs low < high componentwise, got {self.low}, {self.high}")

	@property
	def dim(self):
		return len(self.low)

	def signed_distance(self, X):
		low = np.asarray(self.low, dtype=float)
		high = np.asarray(self.high, dtype=float)
		inside_gap = np.minimum(X - low, high - X).min(axis=1)
		outside_gap = np.linalg.norm(np.maximum(np.maximum(low - X, X - high), 0.0), axis=1)
		return np.where(inside_gap > 0, inside_gap, -outside_gap)


def _check_regions(regions, X):
	X = np.asarray(X, dtype=float)
	if X.ndim == 1:
		X = X[None, :]
	for region in regions:
		if region.dim != X.shape[1]:
			raise InvalidInputError(f"label set of dimension {region.dim} applied to points of dimension {X.shape[1]}")
	return X


def ideal_classifier(regions):
	"""ĥ(x)_i = 1 iff x ∈ X_i"""

	def h(X):
		X = _check_regions(regions, X)
		return np.stack([(region.signed_distance(X) > 0).astype(int) for region in regions], axis=1)

	return h


def soft_classifier(regions, alpha=0.5, margin=0.1):
	"""
	ŝ_i = α + (1 − α)·min(1, sd/margin) inside X_i and α·max(0, 1 + sd/margin) outside

	sd is the signed distance to the boundary of X_i, so ŝ_i = α exactly on
	the boundary, above α inside and below it outside.
	"""
	if not 0.0 < alpha < 1.0:
		raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
	if not margin > 0:
		raise InvalidParameterError(f"margin must be positive, got {margin}")

	def s(X):
		X = _check_regions(regions, X)
		columns = []
		for region in regions:
			sd = region.signed_distance(X)
			inside = alpha + (1.0 - alpha) * np.minimum(1.0, sd / margin)
			outside = alpha * np.maximum(0.0, 1.0 + sd / margin)
			columns.append(np.where(sd > 0, inside, outside))
		return np.stack(columns, axis=1)

	return s


def margin_mask(regions, X, band):
	"""True for points farther than band from every label-set boundary"""
	X = _check_regions(regions, X)
	keep = np.ones(X.shape[0], dtype=bool)
	for region in regions:
		keep &= np.abs(region.signed_distance(X)) > band
	return keep


def grid_points(low, high, steps):
	"""Regular steps×steps grid over the square [low, high]², row-major"""
	axis = np.linspace(low, high, steps)
	xx, yy = np.meshgrid(axis, axis, indexing="ij")
	return np.column_stack([xx.ravel(), yy.ravel()])
