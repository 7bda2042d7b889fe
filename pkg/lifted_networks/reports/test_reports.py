# Copyright (c) 2026, sanika and Contributors
# See license.txt

import os
import tempfile
import unittest

from ..evaluation import Metrics, metrics_line
from . import render
from .table1_report.table1_report import FAILED
from .table1_report.table1_report import execute as table1_report
from .universality_report.universality_report import execute as universality_report

RECORDS = [
	("vanilla", "train", Metrics(0.41, 0.33, 23.4567)),
	("vanilla", "test", Metrics(0.45, 0.38, 25.0)),
	("rand", "train", None),
	("rand", "test", None),
]


class TestTable1Report(unittest.TestCase):
	def test_layout(self):
		columns, data = table1_report({"records": RECORDS})
		self.assertEqual([c["fieldname"] for c in columns], ["split", "metric", "vanilla", "rand"])
		self.assertEqual([(row["split"], row["metric"]) for row in data][:3], [("Train", "MAE"), ("Train", "MSE"), ("Train", "MAPE")])
		self.assertEqual(len(data), 6)
		self.assertEqual(data[2]["vanilla"], 23.457)
		self.assertTrue(all(row["rand"] == FAILED for row in data))

	def test_from_metrics_file(self):
		with tempfile.TemporaryDirectory() as tmp:
			path = os.path.join(tmp, "metrics.csv")
			with open(path, "w") as f:
				f.write("model,split,mae,mse,mape\n")
				f.write("\n".join(metrics_line(*record) for record in RECORDS[:2]) + "\n")
			_, data = table1_report({"metrics_path": path})
		self.assertEqual(data[3], {"split": "Test", "metric": "MAE", "vanilla": 0.45})

	def test_empty(self):
		columns, data = table1_report()
		self.assertEqual(len(columns), 2)
		self.assertTrue(all(len(row) == 2 for row in data))


class TestUniversalityReport(unittest.TestCase):
	def test_optional_columns(self):
		rows = [{"c": 1.0, "width": 4, "sup_error": 0.1234567}, {"c": 0.1, "width": 8, "sup_error": 0.05}]
		columns, data = universality_report({"experiment": "hyperbolic-demo", "rows": rows})
		self.assertEqual([c["fieldname"] for c in columns], ["experiment", "c", "width", "sup_error"])
		self.assertEqual(data[0], {"experiment": "hyperbolic-demo", "c": 1.0, "width": 4, "sup_error": 0.123457})

	def test_render(self):
		columns, data = universality_report({"experiment": "classify-demo", "rows": [{"width": 4, "soft_sup_error": 0.5, "hard_agreement": 0.9}]})
		text = render(columns, data)
		self.assertIn("Soft Sup Error", text)
		self.assertIn("classify-demo", text)
