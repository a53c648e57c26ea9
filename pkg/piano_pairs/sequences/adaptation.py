from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from piano_pairs.config import MAX_ADAPTATION_LENGTH
from piano_pairs.exceptions import OversizedPairError, PreconditionError
from piano_pairs.lmx.codec import MEASURE
from piano_pairs.lmx.vocabulary import EOS, SEP, Vocabulary, level_token
from piano_pairs.logging import log_skip
from piano_pairs.mining.export import PairRecord
from piano_pairs.mining.pairs import VariationPair


@dataclass(frozen=True)
class AdaptationSample:
	tokens: Tuple[str, ...]
	mask: Tuple[int, ...]
	hard_level: int
	easy_level: int
	piece_id: str = ""
	hard_id: str = ""
	easy_id: str = ""
	dropped_measures: int = 0

	@property
	def loss_positions(self) -> int:
		return self.mask.count(0)

	@property
	def easy_start(self) -> int:
		return self.mask.index(0)

	def to_record(self, vocabulary: Vocabulary) -> Dict:
		return {
			"kind": "adaptation",
			"piece": self.piece_id,
			"hard_id": self.hard_id,
			"easy_id": self.easy_id,
			"hard_level": self.hard_level,
			"easy_level": self.easy_level,
			"ids": vocabulary.encode(self.tokens),
			"mask": list(self.mask),
			"dropped_measures": self.dropped_measures,
		}

	@classmethod
	def from_record(cls, record: Dict, vocabulary: Vocabulary) -> "AdaptationSample":
		return cls(
			tokens=vocabulary.decode(record["ids"]).tokens,
			mask=tuple(record["mask"]),
			hard_level=record["hard_level"],
			easy_level=record["easy_level"],
			piece_id=record.get("piece", ""),
			hard_id=record.get("hard_id", ""),
			easy_id=record.get("easy_id", ""),
			dropped_measures=record.get("dropped_measures", 0),
		)


def _as_record(pair: Union[VariationPair, PairRecord]) -> PairRecord:
	return PairRecord.from_pair(pair) if isinstance(pair, VariationPair) else pair


def _split_measures(tokens: Sequence[str]) -> List[List[str]]:
	measures: List[List[str]] = []
	for token in tokens:
		if token == MEASURE or not measures:
			measures.append([])
		measures[-1].append(token)
	return measures


def adaptation_prompt(hard: Sequence[str], hard_level: Optional[int], easy_level: Optional[int]) -> List[str]:
	"""
	Tokens up to and including the target level: everything the model is conditioned on
	"""
	if hard_level is None:
		return [*hard, SEP]
	return [level_token(hard_level), *hard, SEP, level_token(easy_level)]


def build_adaptation(
	pair: Union[VariationPair, PairRecord],
	max_len: int = MAX_ADAPTATION_LENGTH,
	level_tokens: bool = True,
) -> AdaptationSample:
	"""
	Build a hard -> easy training sequence

	Layout is [level(hard), hard..., [SEP], level(easy), easy..., EOS], or [hard..., [SEP], easy..., EOS]
	without level tokens. The mask covers everything up to the target level (or [SEP]) inclusive.

	Args:
		pair: Mined pair or imported pair record
		max_len: Length bound; trailing hard measures are dropped first, the easy segment is never cut
		level_tokens: Include the input and target level tokens

	Raises:
		PreconditionError: gap below 1
		OversizedPairError: the pair does not fit even with the hard segment reduced to one measure
	"""
	record = _as_record(pair)
	if record.hard_level - record.easy_level < 1:
		raise PreconditionError(
			f"Pair {record.hard_id} -> {record.easy_id} has gap {record.hard_level - record.easy_level}"
		)
	easy = list(record.easy.tokens)
	measures = _split_measures(record.hard.tokens)
	specials = 4 if level_tokens else 2
	fixed = len(easy) + specials
	dropped = 0
	while measures and fixed + sum(len(m) for m in measures) > max_len:
		measures.pop()
		dropped += 1
	if not measures:
		raise OversizedPairError(
			f"Pair {record.hard_id} -> {record.easy_id} needs {fixed + len(record.hard)} tokens, max_len {max_len}"
		)
	hard = [token for measure in measures for token in measure]
	prompt = adaptation_prompt(
		hard, record.hard_level if level_tokens else None, record.easy_level if level_tokens else None
	)
	tokens = (*prompt, *easy, EOS)
	mask = (1,) * len(prompt) + (0,) * (len(easy) + 1)
	return AdaptationSample(
		tokens=tokens,
		mask=mask,
		hard_level=record.hard_level,
		easy_level=record.easy_level,
		piece_id=record.piece,
		hard_id=record.hard_id,
		easy_id=record.easy_id,
		dropped_measures=dropped,
	)


def build_adaptation_batch(
	pairs: Sequence[Union[VariationPair, PairRecord]],
	max_len: int = MAX_ADAPTATION_LENGTH,
	level_tokens: bool = True,
) -> Tuple[List[AdaptationSample], List[Dict]]:
	"""
	Build samples for a batch, skipping pairs that cannot fit

	Returns:
		Tuple of (samples in input order, skip report entries with action/reason)
	"""
	samples = []
	skipped = []
	for pair in pairs:
		record = _as_record(pair)
		try:
			samples.append(build_adaptation(record, max_len, level_tokens))
		except OversizedPairError as e:
			log_skip("sequences", record.hard_id, "oversized pair", easy=record.easy_id)
			skipped.append(
				{
					"action": "skip",
					"reason": str(e),
					"piece": record.piece,
					"hard_id": record.hard_id,
					"easy_id": record.easy_id,
				}
			)
	return samples, skipped
