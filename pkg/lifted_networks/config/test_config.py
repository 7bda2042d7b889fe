# Copyright (c) 2026, sanika and Contributors
# See license.txt

import os
import tempfile
import unittest

from ..exceptions import ConfigError
from . import EXPERIMENTS, config_hash, default_config, format_config, load_config, parse_config, write_config


class TestConfig(unittest.TestCase):
	def test_defaults(self):
		self.assertEqual(EXPERIMENTS, ("table1", "spd-demo", "hyperbolic-demo", "classify-demo", "proptest"))
		config = default_config("table1")
		self.assertEqual(config["experiment"], "table1")
		self.assertEqual(config["variants"], ("vanilla", "good", "bad", "rand"))
		self.assertEqual(default_config("proptest", quick=True)["scale"], "quick")
		with self.assertRaises(ConfigError):
			default_config("table2")

	def test_parse_coerces_to_default_types(self):
		text = """
		# comment
		seed = 7
		test_fraction = 0.25   # trailing comment
		include_categorical = no
		variants = good, rand
		train_optimizer = sgd
		"""
		config = parse_config(text, "table1")
		self.assertEqual(config["seed"], 7)
		self.assertEqual(config["test_fraction"], 0.25)
		self.assertFalse(config["include_categorical"])
		self.assertEqual(config["variants"], ("good", "rand"))
		self.assertEqual(config["train_optimizer"], "sgd")

	def test_parse_errors(self):
		for text in ("seed 7", "no_such_key = 1", "seed = seven", "include_categorical = maybe", "experiment = spd-demo"):
			with self.assertRaises(ConfigError):
				parse_config(text, "table1")

	def test_tuple_of_floats(self):
		config = parse_config("curvatures = 2, 0.5", "hyperbolic-demo")
		self.assertEqual(config["curvatures"], (2.0, 0.5))

	def test_format_round_trip_and_hash(self):
		config = default_config("spd-demo")
		text = format_config(config)
		self.assertEqual(parse_config(text, "spd-demo"), config)
		self.assertEqual(config_hash(config), config_hash(dict(reversed(list(config.items())))))
		changed = dict(config, seed=1)
		self.assertNotEqual(config_hash(config), config_hash(changed))

	def test_load_with_file_and_overrides(self):
		with tempfile.TemporaryDirectory() as tmp:
			path = write_config(dict(default_config("classify-demo"), alpha=0.25), os.path.join(tmp, "sub", "c.txt"))
			config = load_config("classify-demo", path, overrides={"seed": 3, "out": None})
			self.assertEqual((config["alpha"], config["seed"]), (0.25, 3))
			self.assertEqual(config["out"], "runs/classify_demo")
			with self.assertRaises(ConfigError):
				load_config("classify-demo", overrides={"bogus": 1})
