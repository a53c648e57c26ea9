import numbers
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from piano_pairs.config import LEVELS, VOCABULARY_LIMIT
from piano_pairs.exceptions import (
	DecodeError,
	PreconditionError,
	UnencodableElementError,
	VocabularyOverflowError,
)

PAD = "<pad>"
BOS = "<bos>"
EOS = "<eos>"
SEP = "[SEP]"
HARMONY = "<harmony>"
SPECIALS = (PAD, BOS, EOS, SEP, HARMONY, *(f"level:{level}" for level in LEVELS))


def level_token(level: int) -> str:
	return f"level:{level}"


@dataclass(frozen=True)
class TokenSequence:
	tokens: Tuple[str, ...]
	source_id: Optional[str] = None

	def __post_init__(self):
		object.__setattr__(self, "tokens", tuple(self.tokens))
		for token in self.tokens:
			if not token or any(ch.isspace() for ch in token):
				raise PreconditionError(f"Invalid token {token!r}")

	def __len__(self) -> int:
		return len(self.tokens)

	def __iter__(self):
		return iter(self.tokens)

	def __getitem__(self, index):
		return self.tokens[index]

	def text(self) -> str:
		return " ".join(self.tokens)


class Vocabulary:
	"""
	Frozen bijection between token strings and ids; specials occupy the lowest ids
	"""

	def __init__(self, tokens: Sequence[str]):
		if tuple(tokens[: len(SPECIALS)]) != SPECIALS:
			raise PreconditionError("Vocabulary must start with the reserved special tokens")
		if len(set(tokens)) != len(tokens):
			raise PreconditionError("Vocabulary contains duplicate tokens")
		self._tokens: Tuple[str, ...] = tuple(tokens)
		self._ids: Dict[str, int] = {token: index for index, token in enumerate(self._tokens)}

	def __len__(self) -> int:
		return len(self._tokens)

	def __contains__(self, token: str) -> bool:
		return token in self._ids

	def __eq__(self, other) -> bool:
		return isinstance(other, Vocabulary) and self._tokens == other._tokens

	@property
	def tokens(self) -> Tuple[str, ...]:
		return self._tokens

	@property
	def pad_id(self) -> int:
		return self._ids[PAD]

	@property
	def bos_id(self) -> int:
		return self._ids[BOS]

	@property
	def eos_id(self) -> int:
		return self._ids[EOS]

	@property
	def sep_id(self) -> int:
		return self._ids[SEP]

	@property
	def harmony_id(self) -> int:
		return self._ids[HARMONY]

	def level_id(self, level: int) -> int:
		return self._ids[level_token(level)]

	def id_of(self, token: str) -> int:
		try:
			return self._ids[token]
		except KeyError:
			raise UnencodableElementError([token])

	def token_of(self, token_id: int) -> str:
		return self._tokens[token_id]

	def encode(self, sequence: Union[TokenSequence, Iterable[str]]) -> List[int]:
		unknown = [token for token in sequence if token not in self._ids]
		if unknown:
			raise UnencodableElementError(sorted(set(unknown)))
		return [self._ids[token] for token in sequence]

	def decode(self, ids: Iterable[int], source_id: Optional[str] = None) -> TokenSequence:
		tokens = []
		for index, token_id in enumerate(ids):
			if not isinstance(token_id, numbers.Integral) or not 0 <= token_id < len(self._tokens):
				raise DecodeError(f"Illegal token id {token_id!r}", index)
			tokens.append(self._tokens[int(token_id)])
		return TokenSequence(tuple(tokens), source_id)

	def save(self, path: Union[str, Path]) -> Path:
		path = Path(path)
		path.parent.mkdir(parents=True, exist_ok=True)
		path.write_text("\n".join(self._tokens) + "\n", encoding="utf-8")
		return path

	@classmethod
	def load(cls, path: Union[str, Path]) -> "Vocabulary":
		lines = Path(path).read_text(encoding="utf-8").splitlines()
		return cls([line for line in lines if line])


def build_vocabulary(corpus: Iterable[TokenSequence], limit: int = VOCABULARY_LIMIT) -> Vocabulary:
	"""
	Build a vocabulary covering every token of a corpus plus the specials

	Args:
		corpus: Token sequences
		limit: Maximum vocabulary size

	Returns:
		Vocabulary with specials first, then corpus tokens in sorted order

	Raises:
		VocabularyOverflowError: inventory larger than `limit`; lists the least frequent overflowing tokens
	"""
	counts: Counter = Counter()
	seen_any = False
	for sequence in corpus:
		seen_any = True
		counts.update(token for token in sequence if token not in SPECIALS)
	if not seen_any:
		raise PreconditionError("Cannot build a vocabulary from an empty corpus")
	capacity = limit - len(SPECIALS)
	if len(counts) > capacity:
		by_frequency = sorted(counts, key=lambda token: (-counts[token], token))
		raise VocabularyOverflowError(by_frequency[capacity:], limit)
	return Vocabulary([*SPECIALS, *sorted(counts)])
