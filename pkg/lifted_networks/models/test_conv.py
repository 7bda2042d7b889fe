# Copyright (c) 2026, sanika and Contributors
# See license.txt

import unittest

import numpy as np

from ..exceptions import InvalidInputError, InvalidParameterError
from .conv import ConvFilter, conv1d_apply, conv_relu_layer


class TestConv(unittest.TestCase):
	def test_hand_convolution(self):
		np.testing.assert_array_equal(conv1d_apply(ConvFilter(1, (1.0, 1.0)), [1.0, 2.0, 3.0]), [1.0, 3.0, 5.0, 3.0])

	def test_delta_filter_pads(self):
		w = ConvFilter.delta(2)
		self.assertEqual(w.taps, (1.0, 0.0, 0.0))
		np.testing.assert_array_equal(conv1d_apply(w, [4.0, 5.0]), [4.0, 5.0, 0.0, 0.0])

	def test_output_length(self):
		out = conv1d_apply(ConvFilter(3, (1.0, -1.0, 0.5, 2.0)), np.ones(6))
		self.assertEqual(out.shape, (6 + 3,))

	def test_relu_layer(self):
		out = conv_relu_layer(ConvFilter(1, (1.0, -1.0)), [1.0, 3.0, 2.0], 0.5)
		np.testing.assert_array_equal(out, [0.5, 1.5, 0.0, 0.0])

	def test_validation(self):
		with self.assertRaises(InvalidParameterError):
			ConvFilter(0, (1.0,))
		with self.assertRaises(InvalidParameterError):
			ConvFilter(1, (1.0, 2.0, 3.0))
		with self.assertRaises(InvalidParameterError):
			ConvFilter(2, (np.inf,))
		with self.assertRaises(InvalidInputError):
			conv1d_apply(ConvFilter.delta(), [])

	def test_width_bounds(self):
		ConvFilter.delta(2).check_width(4)
		with self.assertRaises(InvalidParameterError):
			ConvFilter.delta(5).check_width(4)
		with self.assertRaises(InvalidParameterError):
			ConvFilter(1, (1.0,)).check_width(4)
