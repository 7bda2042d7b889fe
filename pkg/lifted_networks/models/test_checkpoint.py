# Copyright (c) 2026, sanika and Contributors
# See license.txt

import hashlib
import os
import struct
import tempfile
import unittest

import numpy as np

from ..exceptions import InvalidInputError
from ..maps.feature_maps import identity_feature, identity_readout, logistic_readout, skip_feature, spd_log_feature
from ..maps.stacks import LayerStackParams, exp_stack, injective_stack
from .checkpoint import MAGIC, load_checkpoint, save_checkpoint
from .lifted_model import lift
from .network import Network
from .random_network import build_random_feature


class TestCheckpoint(unittest.TestCase):
	def setUp(self):
		self.tmp = tempfile.TemporaryDirectory()
		self.path = os.path.join(self.tmp.name, "model.lnck")
		self.rng = np.random.default_rng(0)
		self.X = self.rng.standard_normal((6, 4))

	def tearDown(self):
		self.tmp.cleanup()

	def round_trip(self, model, **kwargs):
		save_checkpoint(self.path, model, seed=42, config_digest=hashlib.sha256(b"cfg").hexdigest())
		checkpoint = load_checkpoint(self.path)
		return checkpoint, checkpoint.to_model(**kwargs)

	def test_header(self):
		model = lift(identity_feature(4), Network.feedforward(4, [3], 1, "relu", self.rng), identity_readout(1), name="vanilla")
		checkpoint, restored = self.round_trip(model)
		self.assertEqual(checkpoint.seed, 42)
		self.assertEqual(checkpoint.config_digest, hashlib.sha256(b"cfg").hexdigest())
		self.assertEqual((checkpoint.name, checkpoint.phi_tag, checkpoint.rho_tag), ("vanilla", "identity", "identity"))
		np.testing.assert_array_equal(restored(self.X), model(self.X))
		with open(self.path, "rb") as f:
			data = f.read()
		self.assertEqual(data[:4], MAGIC)
		self.assertEqual(struct.unpack_from("<HQ", data, 4), (1, 42))

	def test_trainable_exp_stacks(self):
		phi = exp_stack(LayerStackParams.random(4, 2, rng=self.rng), name="phi")
		rho = exp_stack(LayerStackParams.random(1, 1, rng=self.rng), name="rho")
		model = lift(phi, Network.feedforward(4, [5], 1, "relu", self.rng), rho, name="good")
		_, restored = self.round_trip(model)
		self.assertTrue(restored.phi_trainable)
		self.assertEqual(restored.phi.layers[0].kind, "exp")
		np.testing.assert_array_equal(restored(self.X), model(self.X))

	def test_random_skip_feature(self):
		phi = skip_feature(build_random_feature(2, 4, rng=self.rng), 4)
		model = lift(phi, Network.feedforward(8, [5], 1, "relu", self.rng), logistic_readout(1), name="rand")
		checkpoint, restored = self.round_trip(model)
		self.assertEqual(checkpoint.phi_tag, "skip")
		self.assertFalse(restored.phi_trainable)
		np.testing.assert_array_equal(restored(self.X), model(self.X))

	def test_frozen_injective_stack(self):
		phi = injective_stack(LayerStackParams.random(4, 2, rng=self.rng))
		model = lift(phi, Network.feedforward(4, [3], 1, "tanh", self.rng), identity_readout(1))
		_, restored = self.round_trip(model)
		self.assertEqual(restored.trainable_parameter_count(), model.trainable_parameter_count())
		np.testing.assert_array_equal(restored(self.X), model(self.X))

	def test_geometric_maps_must_be_passed(self):
		phi = spd_log_feature(np.eye(2))
		model = lift(phi, Network.feedforward(3, [3], 1, "tanh", self.rng), identity_readout(1))
		save_checkpoint(self.path, model)
		checkpoint = load_checkpoint(self.path)
		self.assertEqual(checkpoint.config_digest, "")
		with self.assertRaises(InvalidInputError):
			checkpoint.to_model()
		restored = checkpoint.to_model(phi=phi)
		X = np.array([[2.0, 0.5, 0.5, 1.0]])
		np.testing.assert_array_equal(restored(X), model(X))

	def test_corrupt_files(self):
		model = lift(identity_feature(4), Network.feedforward(4, [3], 1, "relu", self.rng), identity_readout(1))
		save_checkpoint(self.path, model)
		with open(self.path, "rb") as f:
			data = f.read()
		for broken in (b"XXXX" + data[4:], data[:-3], data + b"\x00"):
			with open(self.path, "wb") as f:
				f.write(broken)
			with self.assertRaises(InvalidInputError):
				load_checkpoint(self.path)

	def test_bad_digest(self):
		model = lift(identity_feature(4), Network.feedforward(4, [3], 1), identity_readout(1))
		with self.assertRaises(InvalidInputError):
			save_checkpoint(self.path, model, config_digest="abcd")
