def execute(filters=None):
	"""
	Universality Report - uniform error per width for the demo experiments

	filters:
		experiment: experiment name shown in every row
		rows: list of dicts from a demo run (width, sup_error / soft_sup_error, optional c, target, hard_agreement)
	"""
	if not filters:
		filters = {}

	rows = filters.get("rows") or []
	columns = [
		{"label": "Experiment", "fieldname": "experiment", "fieldtype": "Data", "width": 140},
	]
	optional = [
		("c", "Curvature", "Float"),
		("dim", "Dim", "Int"),
		("target", "Target", "Data"),
		("width", "Width", "Int"),
		("sup_error", "Sup Error", "Float"),
		("soft_sup_error", "Soft Sup Error", "Float"),
		("hard_agreement", "Hard Agreement", "Percent"),
	]
	for fieldname, label, fieldtype in optional:
		if any(fieldname in row for row in rows):
			columns.append({"label": label, "fieldname": fieldname, "fieldtype": fieldtype, "width": 110})

	data = []
	for row in rows:
		entry = {"experiment": filters.get("experiment", "")}
		for column in columns[1:]:
			value = row.get(column["fieldname"])
			entry[column["fieldname"]] = round(value, 6) if isinstance(value, float) else value
		data.append(entry)

	return columns, data
