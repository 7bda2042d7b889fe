# Copyright (c) 2026, sanika and Contributors
# See license.txt

import unittest

import numpy as np

from ..exceptions import DomainError, InvalidParameterError, RejectedActivationError
from .activations import GPReLU, ReLU, get_activation, gprelu, logistic, logit, require_injective


class TestGPReLU(unittest.TestCase):
	def test_unit_slopes_are_identity(self):
		x = np.linspace(-3.0, 3.0, 13)
		np.testing.assert_array_equal(gprelu(1, 1)(x), x)

	def test_branches(self):
		sigma = gprelu(0.5, 2)
		self.assertEqual(float(sigma(-4.0)), -2.0)
		self.assertEqual(float(sigma(3.0)), 6.0)
		np.testing.assert_array_equal(sigma.derivative([-1.0, 0.0, 1.0]), [0.5, 2.0, 2.0])

	def test_inverse(self):
		sigma = gprelu(0.25, 1.5)
		x = np.random.default_rng(0).uniform(-10.0, 10.0, 1000)
		np.testing.assert_allclose(sigma.inverse(sigma(x)), x, rtol=1e-15)

	def test_rejects_non_positive_slopes(self):
		with self.assertRaises(InvalidParameterError):
			gprelu(0.0, 1.0)
		with self.assertRaises(InvalidParameterError):
			gprelu(1.0, -1.0)

	def test_invertible_flag(self):
		self.assertTrue(gprelu(0.25, 1.5).invertible)
		self.assertFalse(ReLU().invertible)
		self.assertFalse(get_activation("sigmoid").invertible)


class TestLogistic(unittest.TestCase):
	def test_midpoint(self):
		np.testing.assert_array_equal(logistic(np.zeros(3)), [0.5, 0.5, 0.5])

	def test_round_trip(self):
		x = np.linspace(-30.0, 15.0, 91)
		np.testing.assert_allclose(logit(logistic(x)), x, atol=1e-9)
		# near 30 the gap 1 − logistic(x) is ~1e-13, so float resolution bounds the error
		x = np.linspace(15.0, 30.0, 31)
		np.testing.assert_allclose(logit(logistic(x)), x, atol=1e-2)

	def test_saturation_without_overflow(self):
		with np.errstate(over="raise"):
			self.assertEqual(float(logistic(-700.0)), float(np.exp(-700.0)) / (1.0 + float(np.exp(-700.0))))
			self.assertEqual(float(logistic(700.0)), 1.0)
		self.assertLess(float(logistic(-700.0)), 1e-300)

	def test_logit_domain(self):
		for p in (0.0, 1.0, 1.5):
			with self.assertRaises(DomainError):
				logit(p)


class TestRegistry(unittest.TestCase):
	def test_descriptors(self):
		self.assertIsNone(get_activation(None))
		self.assertEqual(get_activation("identity").descriptor, "identity")
		self.assertEqual(get_activation("prelu").alpha, 0.25)
		self.assertEqual(get_activation("leaky_relu").alpha, 0.01)
		self.assertEqual(get_activation("leaky_relu:0.2").alpha, 0.2)
		sigma = get_activation("gprelu:0.25:1.5")
		self.assertIsInstance(sigma, GPReLU)
		self.assertEqual((sigma.alpha, sigma.beta), (0.25, 1.5))
		self.assertEqual(get_activation(sigma.descriptor).beta, 1.5)

	def test_pass_through(self):
		sigma = gprelu(0.5, 2.0)
		self.assertIs(get_activation(sigma), sigma)

	def test_unknown_and_malformed(self):
		with self.assertRaises(InvalidParameterError):
			get_activation("swish")
		with self.assertRaises(InvalidParameterError):
			get_activation("gprelu:a:b")
		with self.assertRaises(InvalidParameterError):
			get_activation("prelu:0.1:0.2")

	def test_tanh_inverse_domain(self):
		with self.assertRaises(DomainError):
			get_activation("tanh").inverse(1.0)


class TestRequireInjective(unittest.TestCase):
	def test_relu_rejected(self):
		with self.assertRaises(RejectedActivationError) as ctx:
			require_injective("relu")
		self.assertIn("not injective", str(ctx.exception))

	def test_monotone_accepted(self):
		for descriptor in ("identity", "sigmoid", "tanh", "prelu", "gprelu:0.25:1.5"):
			self.assertTrue(require_injective(descriptor).strictly_increasing)
