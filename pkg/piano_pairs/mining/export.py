from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

from piano_pairs.lmx.vocabulary import TokenSequence, Vocabulary
from piano_pairs.mining.pairs import VariationPair
from piano_pairs.utils import iter_jsonl, write_jsonl


@dataclass(frozen=True)
class PairRecord:
	piece: str
	hard_id: str
	easy_id: str
	hard: TokenSequence
	easy: TokenSequence
	hard_level: int
	easy_level: int
	gap: int
	sim: Optional[float]

	@classmethod
	def from_pair(cls, pair: VariationPair) -> "PairRecord":
		return cls(
			piece=pair.piece_id,
			hard_id=pair.harder.variation_id,
			easy_id=pair.easier.variation_id,
			hard=TokenSequence(pair.harder.sequence.tokens, pair.harder.variation_id),
			easy=TokenSequence(pair.easier.sequence.tokens, pair.easier.variation_id),
			hard_level=pair.harder.label,
			easy_level=pair.easier.label,
			gap=pair.gap,
			sim=float(pair.similarity) if pair.similarity is not None else None,
		)


def export_pairs(pairs: Sequence[VariationPair], path: Union[str, Path], vocabulary: Vocabulary) -> int:
	"""
	Write pairs as JSONL ordered by (piece id, harder id, easier id)

	Returns:
		Number of pairs written; an empty input writes an empty file
	"""
	records = sorted((PairRecord.from_pair(pair) for pair in pairs), key=lambda r: (r.piece, r.hard_id, r.easy_id))
	return write_jsonl(
		(
			{
				"piece": record.piece,
				"hard_id": record.hard_id,
				"easy_id": record.easy_id,
				"hard": vocabulary.encode(record.hard),
				"easy": vocabulary.encode(record.easy),
				"hard_level": record.hard_level,
				"easy_level": record.easy_level,
				"gap": record.gap,
				"sim": record.sim,
			}
			for record in records
		),
		path,
	)


def import_pairs(path: Union[str, Path], vocabulary: Vocabulary) -> List[PairRecord]:
	return [
		PairRecord(
			piece=data["piece"],
			hard_id=data["hard_id"],
			easy_id=data["easy_id"],
			hard=vocabulary.decode(data["hard"], data["hard_id"]),
			easy=vocabulary.decode(data["easy"], data["easy_id"]),
			hard_level=int(data["hard_level"]),
			easy_level=int(data["easy_level"]),
			gap=int(data["gap"]),
			sim=float(data["sim"]) if data.get("sim") is not None else None,
		)
		for data in iter_jsonl(path)
	]
