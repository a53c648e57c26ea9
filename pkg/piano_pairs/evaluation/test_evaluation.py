import tempfile
import unittest
from pathlib import Path

from piano_pairs.evaluation.aggregation import aggregate, filter_records
from piano_pairs.evaluation.outcomes import (
	EASIER,
	HARDER,
	SIMILAR,
	OutcomeRecord,
	classify_outcome,
	load_records,
	write_records,
)
from piano_pairs.evaluation.rendering import render_report
from piano_pairs.evaluation.report.outcome_summary.outcome_summary import execute
from piano_pairs.exceptions import PreconditionError


def _records():
	filtered = [(5, 3, 0.2), (5, 4, 0.3), (5, 5, 0.4), (5, 6, 0.5)]
	random = [(4, 2, 0.1), (4, 4, 0.2), (4, 4, 0.3)]
	records = []
	for strategy, rows in (("filtered", filtered), ("random", random)):
		for index, (original, predicted, distance) in enumerate(rows):
			records.append(
				OutcomeRecord(
					piece_id=f"piece_{index}",
					variation_id=f"piece_{index}#v000",
					original_level=original,
					predicted_level=predicted,
					distance=distance,
					genre="pop" if index % 2 else "rock",
					strategy=strategy,
					gap=1,
				)
			)
	return records


class TestOutcomes(unittest.TestCase):
	def test_classification(self):
		self.assertEqual(classify_outcome(5, 3), EASIER)
		self.assertEqual(classify_outcome(5, 5), SIMILAR)
		self.assertEqual(classify_outcome(5, 9), HARDER)
		with self.assertRaises(PreconditionError):
			classify_outcome(0, 3)

	def test_records_round_trip(self):
		with tempfile.TemporaryDirectory() as directory:
			path = Path(directory) / "outcomes.jsonl"
			write_records(_records(), path)
			self.assertEqual(load_records(path), _records())


class TestReport(unittest.TestCase):
	def test_aggregate_percentages(self):
		rows = aggregate(_records())
		self.assertEqual(
			[(row["strategy"], row["gap"], row["count"]) for row in rows], [("filtered", 1, 4), ("random", 1, 3)]
		)
		for row in rows:
			self.assertAlmostEqual(row[EASIER] + row[SIMILAR] + row[HARDER], 100.0)
		self.assertAlmostEqual(rows[0]["distance"], 0.35)

	def test_golden_csv(self):
		expected = (
			"strategy,gap,↓,∼,↑,distance\n"
			"filtered,1,50.0,25.0,25.0,0.350\n"
			"random,1,33.3,66.7,0.0,0.200\n"
		)
		self.assertEqual(render_report(aggregate(_records()), "csv"), expected)

	def test_golden_markdown(self):
		expected = (
			"| strategy | gap | ↓ | ∼ | ↑ | distance |\n"
			"|---|---|---|---|---|---|\n"
			"| filtered | 1 | 50.0% | 25.0% | 25.0% | .350 |\n"
			"| random | 1 | 33.3% | 66.7% | 0.0% | .200 |\n"
		)
		self.assertEqual(render_report(aggregate(_records()), "markdown"), expected)

	def test_grouping_and_filters(self):
		rows = aggregate(filter_records(_records(), {"strategy": "filtered"}), ("genre",))
		self.assertEqual([(row["genre"], row["count"]) for row in rows], [("pop", 2), ("rock", 2)])
		with self.assertRaises(PreconditionError):
			aggregate(_records(), ("composer",))
		with self.assertRaises(PreconditionError):
			aggregate([])
		with self.assertRaises(PreconditionError):
			render_report([], "html")

	def test_outcome_summary_report(self):
		"""
		Report columns follow the grouping; an empty selection gives no rows
		"""
		columns, data = execute({"records": _records(), "group_by": ["strategy"], "strategy": "random"})
		self.assertEqual(
			[column["fieldname"] for column in columns], ["strategy", EASIER, SIMILAR, HARDER, "distance", "count"]
		)
		self.assertEqual(len(data), 1)
		self.assertEqual(data[0]["count"], 3)
		_, empty = execute({"records": _records(), "genre": "jazz"})
		self.assertEqual(empty, [])
