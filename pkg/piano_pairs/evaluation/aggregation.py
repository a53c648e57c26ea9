from collections import Counter
from typing import Any, Dict, List, Optional, Sequence

from piano_pairs.evaluation.outcomes import OUTCOMES, OutcomeRecord
from piano_pairs.exceptions import PreconditionError

GROUP_FIELDS = ("strategy", "gap", "genre", "original_level")
DEFAULT_GROUP_BY = ("strategy", "gap")


def filter_records(records: Sequence[OutcomeRecord], filters: Optional[Dict[str, Any]] = None) -> List[OutcomeRecord]:
	"""
	Keep records whose group fields equal every given filter value
	"""
	conditions = {key: value for key, value in (filters or {}).items() if key in GROUP_FIELDS and value is not None}
	return [r for r in records if all(getattr(r, key) == value for key, value in conditions.items())]


def aggregate(records: Sequence[OutcomeRecord], group_by: Sequence[str] = DEFAULT_GROUP_BY) -> List[Dict[str, Any]]:
	"""
	Outcome percentages and mean distance per group

	Args:
		records: Outcome records
		group_by: Any of strategy, gap, genre, original_level

	Returns:
		One row per nonempty group, sorted by group key, with the group fields, `count`, the
		unrounded percentage of each outcome and the mean `distance`
	"""
	unknown = [name for name in group_by if name not in GROUP_FIELDS]
	if unknown:
		raise PreconditionError(f"Cannot group by {unknown}; choose from {GROUP_FIELDS}")
	if not records:
		raise PreconditionError("aggregate needs at least one record")

	groups: Dict[tuple, List[OutcomeRecord]] = {}
	for record in records:
		groups.setdefault(tuple(getattr(record, name) for name in group_by), []).append(record)

	rows = []
	for key in sorted(groups):
		members = groups[key]
		counts = Counter(record.outcome for record in members)
		row: Dict[str, Any] = dict(zip(group_by, key))
		row["count"] = len(members)
		for outcome in OUTCOMES:
			row[outcome] = 100.0 * counts[outcome] / len(members)
		row["distance"] = sum(sorted(record.distance for record in members)) / len(members)
		rows.append(row)
	return rows
