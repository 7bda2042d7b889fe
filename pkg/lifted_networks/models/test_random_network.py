# Copyright (c) 2026, sanika and Contributors
# See license.txt

import unittest

import numpy as np

from ..exceptions import InvalidParameterError, RankFailureError, RejectedActivationError
from ..maps.feature_maps import check_injectivity, logistic_readout, uniform_box_sampler
from .lifted_model import lift
from .network import Network
from .random_network import (
	RandomAffineSpec,
	build_random_feature,
	build_random_stack,
	rank_acceptance_rate,
	sample_random_affine,
)


class TestSampling(unittest.TestCase):
	def test_bernoulli_support(self):
		A, b = sample_random_affine(RandomAffineSpec(4, 6, "bernoulli_pm1", seed=0))
		self.assertEqual(A.shape, (6, 4))
		self.assertTrue(set(np.unique(A)) <= {-1.0, 1.0})
		self.assertTrue(set(np.unique(b)) <= {-1.0, 1.0})

	def test_gaussian_moments(self):
		A, _ = sample_random_affine(RandomAffineSpec(100, 1000, "standard_gaussian", seed=1))
		self.assertLess(abs(A.mean()), 3 * 10**-2.5)
		self.assertLess(abs(A.var() - 1.0), 0.05)

	def test_deterministic(self):
		spec = RandomAffineSpec(3, 3, "standard_gaussian", seed=5)
		np.testing.assert_array_equal(sample_random_affine(spec)[0], sample_random_affine(spec)[0])

	def test_spec_validation(self):
		with self.assertRaises(InvalidParameterError):
			RandomAffineSpec(3, 2)
		with self.assertRaises(InvalidParameterError):
			RandomAffineSpec(2, 2, "uniform")


class TestRandomStack(unittest.TestCase):
	def test_hadamard_matrix_accepted(self):
		def sampler(spec, rng):
			return np.array([[1.0, 1.0], [1.0, -1.0]]), np.zeros(2)

		stack = build_random_stack(1, 2, sampler=sampler)
		self.assertEqual(stack.retries, 0)
		np.testing.assert_array_equal(stack.matrices[0], [[1.0, 1.0], [1.0, -1.0]])

	def test_rank_one_matrix_resampled(self):
		draws = iter([np.ones((2, 2)), np.eye(2)])

		def sampler(spec, rng):
			return next(draws), np.zeros(2)

		stack = build_random_stack(1, 2, sampler=sampler)
		self.assertEqual(stack.retries, 1)
		np.testing.assert_array_equal(stack.matrices[0], np.eye(2))

	def test_retries_exhausted(self):
		with self.assertRaises(RankFailureError) as ctx:
			build_random_stack(1, 2, max_retries=3, sampler=lambda spec, rng: (np.ones((2, 2)), np.zeros(2)))
		self.assertLess(ctx.exception.smallest_singular_value, 1e-10)

	def test_widths(self):
		stack = build_random_stack(2, [3, 4, 6], rng=np.random.default_rng(0))
		self.assertEqual([A.shape for A in stack.matrices], [(4, 3), (6, 4)])
		with self.assertRaises(InvalidParameterError):
			build_random_stack(2, [3, 4])
		with self.assertRaises(InvalidParameterError):
			build_random_stack(2, [4, 3, 5])
		with self.assertRaises(InvalidParameterError):
			build_random_stack(0, 3)

	def test_relu_rejected(self):
		with self.assertRaises(RejectedActivationError):
			build_random_stack(1, 3, sigma="relu")

	def test_default_activations(self):
		self.assertEqual(build_random_stack(1, 2, dist="bernoulli_pm1").activation, "prelu:0.25")
		self.assertEqual(build_random_stack(1, 2, dist="standard_gaussian").activation, "sigmoid")


class TestRandomFeature(unittest.TestCase):
	def test_injective_and_frozen(self):
		for dist in ("bernoulli_pm1", "standard_gaussian"):
			phi = build_random_feature(2, 4, dist=dist, rng=np.random.default_rng(1))
			self.assertEqual(phi.kind, "random")
			self.assertTrue(phi.claims_injective)
			self.assertEqual(phi.stack.parameter_count(), 0)
			report = check_injectivity(phi, uniform_box_sampler(4), 1000, seed=2)
			self.assertEqual(report.violations, 0)

	def test_only_head_is_trainable(self):
		phi = build_random_feature(2, 5, rng=np.random.default_rng(3))
		core = Network.feedforward(5, [7], 1, "relu", np.random.default_rng(4))
		model = lift(phi, core, logistic_readout(1))
		self.assertEqual(model.trainable_parameter_count(), 5 * 7 + 7 + 7 + 1)

	def test_same_seed_same_feature(self):
		a = build_random_feature(2, 3, rng=np.random.default_rng(9))
		b = build_random_feature(2, 3, rng=np.random.default_rng(9))
		X = np.random.default_rng(0).standard_normal((4, 3))
		np.testing.assert_array_equal(a(X), b(X))


class TestAcceptanceRate(unittest.TestCase):
	def test_gaussian_always_full_rank(self):
		self.assertEqual(rank_acceptance_rate("standard_gaussian", 5, 10000, seed=0), 1.0)

	def test_bernoulli_two_by_two(self):
		self.assertAlmostEqual(rank_acceptance_rate("bernoulli_pm1", 2, 10000, seed=0), 0.5, delta=0.02)

	def test_validation(self):
		with self.assertRaises(InvalidParameterError):
			rank_acceptance_rate("bernoulli_pm1", 2, 0)
