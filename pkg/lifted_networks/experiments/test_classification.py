# Copyright (c) 2026, sanika and Contributors
# See license.txt

import unittest

import numpy as np

from ..config import default_config
from ..maps.classifiers import Disk, grid_points, soft_classifier
from .classification import ClassificationDemo


class SoftOracle:
	def __init__(self, regions, alpha, margin):
		self.predict = soft_classifier(regions, alpha, margin)


class TestClassificationDemo(unittest.TestCase):
	def setUp(self):
		config = default_config("classify-demo", quick=True)
		config.update({"widths": (4, 8), "n_train": 100, "grid_steps": 15, "train_epochs": 2})
		self.demo = ClassificationDemo(config)

	def test_regions_overlap(self):
		left, right = self.demo.regions()
		gap = np.linalg.norm(np.subtract(left.center, right.center))
		self.assertLess(gap, left.radius + right.radius)

	def test_evaluate_soft_oracle(self):
		cfg = self.demo.config
		regions = self.demo.regions()
		grid = grid_points(-cfg["box"], cfg["box"], 25)
		scores = self.demo.evaluate(SoftOracle(regions, cfg["alpha"], cfg["soft_margin"]), regions, grid)
		self.assertEqual(scores, {"soft_sup_error": 0.0, "hard_agreement": 1.0})

	def test_run(self):
		result = self.demo.run()
		self.assertTrue(result.checks["decomposition_exact"])
		self.assertEqual(set(result.checks), {"decomposition_exact", "monotone_non_increasing", "hard_agreement", "soft_error"})
		self.assertEqual([row["width"] for row in result.rows], [4, 8])
		for row in result.rows:
			self.assertGreaterEqual(row["hard_agreement"], 0.0)
			self.assertLessEqual(row["hard_agreement"], 1.0)
		self.assertEqual(len(result.models), 2)

	def test_custom_regions(self):
		regions = [Disk((0.0, 0.0), 0.5), Disk((0.3, 0.0), 0.5), Disk((0.0, 0.3), 0.5)]
		result = self.demo.run(regions)
		self.assertTrue(result.checks["decomposition_exact"])
		self.assertEqual(next(iter(result.models.values())).out_dim, 3)
