from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, List, Union

from piano_pairs.config import LEVELS
from piano_pairs.exceptions import PreconditionError
from piano_pairs.utils import iter_jsonl, write_jsonl

EASIER = "easier"
SIMILAR = "similar"
HARDER = "harder"
OUTCOMES = (EASIER, SIMILAR, HARDER)
SYMBOLS = {EASIER: "↓", SIMILAR: "∼", HARDER: "↑"}


def classify_outcome(original_level: int, predicted_level: int) -> str:
	"""
	easier when the predicted level is below the original, similar when equal, harder when above
	"""
	for level in (original_level, predicted_level):
		if level not in LEVELS:
			raise PreconditionError(f"Level {level} outside {LEVELS[0]}-{LEVELS[-1]}")
	if predicted_level < original_level:
		return EASIER
	if predicted_level == original_level:
		return SIMILAR
	return HARDER


@dataclass(frozen=True)
class OutcomeRecord:
	piece_id: str
	variation_id: str
	original_level: int
	predicted_level: int
	distance: float
	genre: str = ""
	strategy: str = ""
	gap: int = 0

	@property
	def outcome(self) -> str:
		return classify_outcome(self.original_level, self.predicted_level)

	def as_dict(self) -> dict:
		return {**asdict(self), "outcome": self.outcome}

	@classmethod
	def from_dict(cls, data: dict) -> "OutcomeRecord":
		return cls(
			piece_id=data["piece_id"],
			variation_id=data["variation_id"],
			original_level=int(data["original_level"]),
			predicted_level=int(data["predicted_level"]),
			distance=float(data["distance"]),
			genre=data.get("genre", ""),
			strategy=data.get("strategy", ""),
			gap=int(data.get("gap", 0)),
		)


def write_records(records: Iterable[OutcomeRecord], path: Union[str, Path]) -> int:
	return write_jsonl((record.as_dict() for record in records), path)


def load_records(path: Union[str, Path]) -> List[OutcomeRecord]:
	return [OutcomeRecord.from_dict(data) for data in iter_jsonl(path)]
