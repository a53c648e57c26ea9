from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from piano_pairs.config import MAX_ADAPTATION_LENGTH
from piano_pairs.exceptions import PreconditionError
from piano_pairs.lmx.vocabulary import BOS, EOS, TokenSequence, Vocabulary


@dataclass(frozen=True)
class UnconditionalSample:
	"""
	[BOS] + body + [EOS] for pretraining on plain LMX; every target after BOS is scored
	"""

	tokens: Tuple[str, ...]
	mask: Tuple[int, ...]
	source_id: Optional[str] = None

	def __len__(self) -> int:
		return len(self.tokens)

	def to_record(self, vocabulary: Vocabulary) -> Dict:
		return {
			"kind": "unconditional",
			"id": self.source_id,
			"ids": vocabulary.encode(self.tokens),
			"mask": list(self.mask),
		}

	@classmethod
	def from_record(cls, record: Dict, vocabulary: Vocabulary) -> "UnconditionalSample":
		return cls(
			tokens=vocabulary.decode(record["ids"]).tokens,
			mask=tuple(record["mask"]),
			source_id=record.get("id"),
		)


def build_unconditional(body: TokenSequence, max_len: int = MAX_ADAPTATION_LENGTH) -> UnconditionalSample:
	"""
	Wrap a score's tokens for unconditional pretraining

	Raises:
		PreconditionError: empty body, or the wrapped sequence exceeds max_len
	"""
	if len(body) == 0:
		raise PreconditionError("Cannot build a sample from an empty body")
	tokens = [token for token in body.tokens if token not in (BOS, EOS)]
	tokens = [BOS, *tokens, EOS]
	if len(tokens) > max_len:
		raise PreconditionError(f"Unconditional sequence of {len(tokens)} tokens exceeds max_len {max_len}")
	return UnconditionalSample(tuple(tokens), (1,) + (0,) * (len(tokens) - 1), body.source_id)
