"""
Classification Demo
Two overlapping open disks in R²: fit logistic-readout networks to the soft classifier ŝ
and compare the thresholded predictions with the ideal classifier ĥ on a grid
"""

import logging

import numpy as np

from ..config import default_config
from ..exceptions import NumericalFailureError, TrainingDivergedError
from ..maps.classifiers import Disk, grid_points, ideal_classifier, margin_mask, soft_classifier
from ..maps.feature_maps import hard_threshold, identity_feature, logistic_readout
from ..models.lifted_model import lift
from ..models.network import Network
from ..models.training import TrainConfig, train
from .geometry_demos import DemoResult, non_increasing

logger = logging.getLogger(__name__)


class ClassificationDemo:
	name = "classify-demo"

	def __init__(self, config=None):
		self.config = config or self._default_config()

	def _default_config(self):
		return default_config(self.name)

	def regions(self):
		offset = self.config["disk_offset"]
		radius = self.config["disk_radius"]
		return [Disk((-offset, 0.0), radius), Disk((offset, 0.0), radius)]

	def evaluate(self, model, regions, grid):
		"""Soft sup error and hard agreement on grid points outside the margin band"""
		cfg = self.config
		keep = margin_mask(regions, grid, cfg["band"])
		soft = soft_classifier(regions, cfg["alpha"], cfg["soft_margin"])(grid)
		predicted = model.predict(grid)
		hard = hard_threshold(cfg["alpha"])(predicted)
		ideal = ideal_classifier(regions)(grid)
		return {
			"soft_sup_error": float(np.max(np.abs(predicted - soft)[keep])) if keep.any() else 0.0,
			"hard_agreement": float(np.mean(np.all(hard == ideal, axis=1)[keep])) if keep.any() else 1.0,
		}

	def run(self, regions=None):
		cfg = self.config
		regions = regions or self.regions()
		s_hat = soft_classifier(regions, cfg["alpha"], cfg["soft_margin"])
		h_hat = ideal_classifier(regions)
		box = cfg["box"]
		grid = grid_points(-box, box, cfg["grid_steps"])

		result = DemoResult(self.name)
		# ĥ = threshold ∘ ŝ must hold exactly, band or not
		result.checks["decomposition_exact"] = bool(
			np.array_equal(hard_threshold(cfg["alpha"])(s_hat(grid)), h_hat(grid))
		)

		data_seq, fit_seq = np.random.SeedSequence(cfg["seed"]).spawn(2)
		X = np.random.default_rng(data_seq).uniform(-box, box, size=(cfg["n_train"], 2))
		Y = s_hat(X)
		n_labels = len(regions)

		widths = list(cfg["widths"])
		errors = []
		for width, stream in zip(widths, fit_seq.spawn(len(widths))):
			label = f"{self.name}/width={width}"
			rng = np.random.default_rng(stream)
			core = Network.feedforward(2, [width], n_labels, cfg["core_activation"], rng)
			model = lift(identity_feature(2), core, logistic_readout(n_labels), name=label)
			train_cfg = TrainConfig.from_config({**cfg, "train_seed": int(rng.integers(2**31))})
			try:
				train(model, (X, Y), train_cfg)
				scores = self.evaluate(model, regions, grid)
				result.models[label] = model
			except (TrainingDivergedError, NumericalFailureError) as e:
				logger.error(f"{label} failed: {e}")
				scores = {"soft_sup_error": float("nan"), "hard_agreement": 0.0}
			errors.append(scores["soft_sup_error"])
			result.rows.append({"width": width, **scores})
			logger.info(
				f"{label}: soft sup error {scores['soft_sup_error']:.4f}, "
				f"hard agreement {scores['hard_agreement']:.4f}"
			)

		best = result.rows[-1]
		result.checks["monotone_non_increasing"] = bool(np.all(np.isfinite(errors))) and non_increasing(errors)
		result.checks["hard_agreement"] = best["hard_agreement"] >= cfg["agreement_threshold"]
		result.checks["soft_error"] = best["soft_sup_error"] <= cfg["soft_error_threshold"]
		return result
