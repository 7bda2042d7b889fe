# Copyright (c) 2026, sanika and Contributors
# See license.txt

import io
import os
import tempfile
import unittest
from contextlib import redirect_stdout
from unittest import mock

from .cli import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK, build_parser, main, resolve_config
from .proptest import CheckResult


class TestCli(unittest.TestCase):
	def setUp(self):
		self.tmp = tempfile.TemporaryDirectory()
		self.out = os.path.join(self.tmp.name, "run")

	def tearDown(self):
		self.tmp.cleanup()

	def run_main(self, argv):
		buffer = io.StringIO()
		with redirect_stdout(buffer):
			code = main(argv)
		return code, buffer.getvalue()

	def test_resolve_config_precedence(self):
		path = os.path.join(self.tmp.name, "run.cfg")
		with open(path, "w") as f:
			f.write("seed = 5\nalpha = 0.3\n")
		args = build_parser().parse_args(["classify-demo", "--config", path, "--seed", "9", "--quick"])
		config = resolve_config(args)
		self.assertEqual((config["seed"], config["alpha"], config["n_train"]), (9, 0.3, 300))

	def test_config_errors_exit_2(self):
		bad = os.path.join(self.tmp.name, "bad.cfg")
		with open(bad, "w") as f:
			f.write("no_such_key = 1\n")
		for argv in (
			["proptest", "--seed", "-1", "--out", self.out],
			["proptest", "--config", bad, "--out", self.out],
			["proptest", "--config", os.path.join(self.tmp.name, "missing.cfg")],
			["table1", "--out", self.out],
			["table1", "--data", os.path.join(self.tmp.name, "missing.csv"), "--out", self.out],
		):
			self.assertEqual(self.run_main(argv)[0], EXIT_CONFIG, argv)

	def test_exit_codes_follow_checks(self):
		passing = [CheckResult("linalg.ok", True, 0.0, 1e-9)]
		failing = passing + [CheckResult("net.broken", False, 1.0, 1e-4)]
		with mock.patch("lifted_networks.api.run_battery", return_value=passing):
			code, text = self.run_main(["proptest", "--quick", "--out", self.out])
		self.assertEqual(code, EXIT_OK)
		self.assertIn("Property battery", text)
		self.assertIn(f"artifacts: {self.out}", text)
		with mock.patch("lifted_networks.api.run_battery", return_value=failing):
			code, _ = self.run_main(["proptest", "--quick", "--out", self.out])
		self.assertEqual(code, EXIT_CHECK_FAILED)
