import csv
import io
from typing import Any, Dict, Sequence

from piano_pairs.evaluation.aggregation import DEFAULT_GROUP_BY
from piano_pairs.evaluation.outcomes import OUTCOMES, SYMBOLS
from piano_pairs.exceptions import PreconditionError

FORMATS = ("csv", "markdown")


def _distance(value: float, markdown: bool) -> str:
	text = f"{value:.3f}"
	if markdown and text.startswith("0."):
		return text[1:]
	return text


def render_report(
	rows: Sequence[Dict[str, Any]], format: str = "csv", group_by: Sequence[str] = DEFAULT_GROUP_BY
) -> str:
	"""
	Render aggregated rows as a table: group columns, ↓, ∼, ↑, distance

	Percentages get one decimal, distances three. Markdown writes percentages with a % sign and
	distances without the leading zero.
	"""
	if format not in FORMATS:
		raise PreconditionError(f"Unknown report format {format!r}; choose from {FORMATS}")
	header = [*group_by, *(SYMBOLS[outcome] for outcome in OUTCOMES), "distance"]
	markdown = format == "markdown"
	body = []
	for row in rows:
		percentages = [f"{row[outcome]:.1f}" + ("%" if markdown else "") for outcome in OUTCOMES]
		body.append([*(str(row[name]) for name in group_by), *percentages, _distance(row["distance"], markdown)])

	if markdown:
		lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
		lines.extend("| " + " | ".join(cells) + " |" for cells in body)
		return "\n".join(lines) + "\n"

	buffer = io.StringIO()
	writer = csv.writer(buffer, lineterminator="\n")
	writer.writerow(header)
	writer.writerows(body)
	return buffer.getvalue()
