from piano_pairs.evaluation.aggregation import DEFAULT_GROUP_BY, aggregate, filter_records
from piano_pairs.evaluation.outcomes import OUTCOMES, SYMBOLS, load_records


def execute(filters=None):
	"""
	Execute Outcome Summary Report

	Args:
		filters: Report filters: `records` (list of OutcomeRecord) or `records_path` (JSONL), optional
			`group_by` and any of strategy/gap/genre/original_level to restrict the population

	Returns:
		Tuple of (columns, data)
	"""
	filters = dict(filters or {})
	group_by = tuple(filters.pop("group_by", None) or DEFAULT_GROUP_BY)

	columns = [{"label": name.replace("_", " ").title(), "fieldname": name, "fieldtype": "Data"} for name in group_by]
	columns.extend(
		{"label": SYMBOLS[outcome], "fieldname": outcome, "fieldtype": "Percent", "precision": 1} for outcome in OUTCOMES
	)
	columns.append({"label": "Distance", "fieldname": "distance", "fieldtype": "Float", "precision": 3})
	columns.append({"label": "Count", "fieldname": "count", "fieldtype": "Int"})

	records = filters.pop("records", None)
	if records is None:
		records = load_records(filters.pop("records_path"))
	records = filter_records(records, filters)
	data = aggregate(records, group_by) if records else []

	return columns, data
