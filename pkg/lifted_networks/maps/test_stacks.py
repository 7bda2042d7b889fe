# Copyright (c) 2026, sanika and Contributors
# See license.txt

import unittest

import numpy as np

from ..exceptions import InvalidParameterError, RejectedActivationError
from ..models.network import LayerStack
from .feature_maps import check_injectivity, uniform_box_sampler
from .stacks import LayerStackParams, exp_stack, injective_stack, invertible_readout


class TestLayerStackParams(unittest.TestCase):
	def test_default_biases(self):
		params = LayerStackParams([np.zeros((3, 3)), np.zeros((3, 3))])
		self.assertEqual((params.depth, params.width), (2, 3))
		np.testing.assert_array_equal(params.biases[1], np.zeros(3))

	def test_shape_checks(self):
		with self.assertRaises(InvalidParameterError):
			LayerStackParams([])
		with self.assertRaises(InvalidParameterError):
			LayerStackParams([np.zeros((2, 2)), np.zeros((3, 3))])
		with self.assertRaises(InvalidParameterError):
			LayerStackParams([np.zeros((2, 2))], biases=[np.zeros(3)])


class TestInjectiveStack(unittest.TestCase):
	def test_identity_parts(self):
		phi = injective_stack(LayerStackParams([np.zeros((2, 2))], activation="gprelu:1:1"))
		x = np.array([[0.3, -1.7], [2.0, 0.0]])
		np.testing.assert_allclose(phi(x), x, atol=1e-15)

	def test_diagonal_generator(self):
		A = np.diag([np.log(2.0), 0.0])
		phi = injective_stack(LayerStackParams([A], activation="gprelu:0.5:2"))
		np.testing.assert_allclose(phi(np.array([1.0, 1.0])), [4.0, 2.0], atol=1e-12)

	def test_round_trip(self):
		params = LayerStackParams.random(4, 3, "gprelu:0.25:1.5", rng=np.random.default_rng(0))
		phi = injective_stack(params)
		self.assertTrue(phi.claims_injective and phi.invertible)
		X = np.random.default_rng(1).uniform(-5.0, 5.0, size=(1000, 4))
		np.testing.assert_allclose(phi.inverse(phi(X)), X, atol=1e-8)

	def test_injectivity_sample(self):
		phi = injective_stack(LayerStackParams.random(3, 2, "prelu:0.25", rng=np.random.default_rng(2)))
		report = check_injectivity(phi, uniform_box_sampler(3), 1000, seed=3)
		self.assertEqual(report.violations, 0)

	def test_relu_rejected(self):
		with self.assertRaises(RejectedActivationError):
			injective_stack(LayerStackParams.identity(2, 1, "relu"))

	def test_frozen_snapshot(self):
		params = LayerStackParams.identity(2, 1)
		phi = injective_stack(params)
		params.generators[0][0, 0] = 5.0
		np.testing.assert_allclose(phi(np.array([1.0, 1.0])), [1.5, 1.5])


class TestExpStack(unittest.TestCase):
	def test_trainable_stack(self):
		stack = exp_stack(LayerStackParams.identity(3, 2))
		self.assertIsInstance(stack, LayerStack)
		self.assertTrue(stack.injective and stack.invertible)
		self.assertEqual(stack.parameter_count(), 2 * (9 + 3))

	def test_frozen_stack_has_no_parameters(self):
		self.assertEqual(exp_stack(LayerStackParams.identity(3, 2), trainable=False).parameter_count(), 0)


class TestInvertibleReadout(unittest.TestCase):
	def test_section(self):
		rho = invertible_readout(LayerStackParams.random(3, 2, rng=np.random.default_rng(4)))
		Y = np.random.default_rng(5).standard_normal((50, 3)) * 4.0
		np.testing.assert_allclose(rho(rho.section(Y)), Y, atol=1e-10)

	def test_vjp(self):
		rng = np.random.default_rng(6)
		# entrywise positive exp(A) and zero biases keep positive inputs off the kink
		generators = [0.3 * rng.uniform(0.0, 1.0, size=(2, 2)) for _ in range(2)]
		rho = invertible_readout(LayerStackParams(generators))
		Z = rng.uniform(0.1, 1.0, size=(4, 2))
		G = rng.standard_normal((4, 2))
		step = 1e-6
		numeric = np.zeros_like(Z)
		for idx in np.ndindex(Z.shape):
			E = np.zeros_like(Z)
			E[idx] = step
			numeric[idx] = (np.sum(G * rho(Z + E)) - np.sum(G * rho(Z - E))) / (2 * step)
		np.testing.assert_allclose(rho.vjp(Z, G), numeric, atol=1e-7)

	def test_needs_surjective_activation(self):
		with self.assertRaises(RejectedActivationError):
			invertible_readout(LayerStackParams.identity(2, 1, "sigmoid"))
