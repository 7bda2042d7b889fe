import pandas as pd


def render(columns, data):
	"""Plain-text table of a report's (columns, data) using the column labels as headers"""
	frame = pd.DataFrame(data, columns=[c["fieldname"] for c in columns])
	frame.columns = [c["label"] for c in columns]
	return frame.to_string(index=False)
