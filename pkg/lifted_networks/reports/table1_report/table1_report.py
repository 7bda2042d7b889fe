from ...evaluation import METRIC_FIELDS, parse_metrics_line

FAILED = "failed"


def execute(filters=None):
	"""
	Table 1 - train and test MAE / MSE / MAPE, one column per model variant

	filters:
		records: list of (model, split, Metrics or None) tuples
		metrics_path: metrics CSV written by the table1 command (used when records is absent)
	"""
	if not filters:
		filters = {}

	records = filters.get("records")
	if records is None and filters.get("metrics_path"):
		with open(filters["metrics_path"], encoding="utf-8") as f:
			records = [parse_metrics_line(line) for line in f if line.strip() and not line.startswith("model,")]
	records = records or []

	models = []
	for model, _, _ in records:
		if model not in models:
			models.append(model)

	columns = [
		{"label": "Split", "fieldname": "split", "fieldtype": "Data", "width": 80},
		{"label": "Metric", "fieldname": "metric", "fieldtype": "Data", "width": 80},
	] + [{"label": model.capitalize(), "fieldname": model, "fieldtype": "Float", "width": 100} for model in models]

	lookup = {(model, split): m for model, split, m in records}
	data = []
	for split in ("train", "test"):
		for metric in METRIC_FIELDS:
			row = {"split": split.capitalize(), "metric": metric.upper()}
			for model in models:
				m = lookup.get((model, split))
				row[model] = round(getattr(m, metric), 3) if m is not None else FAILED
			data.append(row)

	return columns, data
