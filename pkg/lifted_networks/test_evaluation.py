# Copyright (c) 2026, sanika and Contributors
# See license.txt

import unittest

import numpy as np

from .evaluation import Metrics, get_metric, metrics, metrics_line, parse_metrics_line, sup_error_on_grid
from .exceptions import DomainError, InvalidInputError


class TestMetrics(unittest.TestCase):
	def test_hand_values(self):
		m = metrics([1.0, 1.0], [2.0, 0.0])
		self.assertEqual((m.mae, m.mse), (1.0, 1.0))
		self.assertAlmostEqual(m.mape, 100.0)

	def test_perfect_prediction(self):
		y = np.array([0.5, 2.0, 3.5])
		self.assertEqual(metrics(y, y), Metrics(0.0, 0.0, 0.0))

	def test_zero_target(self):
		with self.assertRaises(DomainError):
			metrics([0.0, 1.0], [0.0, 1.0])

	def test_shape_mismatch(self):
		with self.assertRaises(InvalidInputError):
			metrics([1.0, 2.0], [1.0])
		with self.assertRaises(InvalidInputError):
			metrics([], [])

	def test_metrics_line(self):
		line = metrics_line("good", "test", Metrics(0.25, 0.125, 12.5))
		self.assertEqual(line, "good,test,0.250000,0.125000,12.500000")
		self.assertEqual(parse_metrics_line(line), ("good", "test", Metrics(0.25, 0.125, 12.5)))


class TestSupError(unittest.TestCase):
	def test_constant_offset(self):
		eps, n = 0.01, 4
		grid = np.random.default_rng(0).standard_normal((30, n))
		error = sup_error_on_grid(lambda X: X, lambda X: X + eps, grid)
		self.assertAlmostEqual(error, eps * np.sqrt(n))

	def test_one_dimensional_grid(self):
		grid = np.linspace(0.0, 1.0, 11)
		self.assertAlmostEqual(sup_error_on_grid(lambda X: X**2, lambda X: X, grid), 0.25)

	def test_pseudometric(self):
		grid = np.linspace(-1.0, 1.0, 21)
		f, g, h = np.sin, np.tanh, lambda X: 0.5 * X
		self.assertEqual(sup_error_on_grid(f, f, grid), 0.0)
		self.assertEqual(sup_error_on_grid(f, g, grid), sup_error_on_grid(g, f, grid))
		self.assertLessEqual(
			sup_error_on_grid(f, h, grid), sup_error_on_grid(f, g, grid) + sup_error_on_grid(g, h, grid) + 1e-15
		)

	def test_spd_metric(self):
		grid = np.zeros((1, 1))
		identity = lambda X: np.eye(2).reshape(1, 4)
		scaled = lambda X: np.diag([np.e, 1.0]).reshape(1, 4)
		self.assertAlmostEqual(sup_error_on_grid(identity, scaled, grid, dist="spd"), 1.0)

	def test_poincare_metric(self):
		grid = np.zeros((1, 1))
		origin = lambda X: np.zeros((1, 2))
		point = lambda X: np.array([[0.5, 0.0]])
		self.assertAlmostEqual(sup_error_on_grid(origin, point, grid, dist="poincare"), 2.0 * np.arctanh(0.5))
		with self.assertRaises(InvalidInputError):
			sup_error_on_grid(origin, lambda X: np.array([[2.0, 0.0]]), grid, dist="poincare:1")

	def test_bad_arguments(self):
		with self.assertRaises(InvalidInputError):
			sup_error_on_grid(np.sin, np.sin, np.zeros((0, 1)))
		with self.assertRaises(InvalidInputError):
			sup_error_on_grid(np.sin, lambda X: np.hstack([X, X]), np.ones((3, 1)))
		with self.assertRaises(InvalidInputError):
			get_metric("manhattan")
