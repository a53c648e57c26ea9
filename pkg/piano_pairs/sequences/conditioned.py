from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from piano_pairs.analysis.profile import PitchClassProfile
from piano_pairs.analysis.skyline import SkylineSequence
from piano_pairs.config import MAX_ADAPTATION_LENGTH
from piano_pairs.exceptions import PreconditionError
from piano_pairs.lmx.vocabulary import BOS, EOS, HARMONY, TokenSequence, Vocabulary
from piano_pairs.logging import log_warning


@dataclass(frozen=True, eq=False)
class ConditionedSample:
	"""
	[BOS, skyline..., HARMONY] + body. The 12-value harmony vector is bound to the HARMONY position.
	"""

	prefix: Tuple[str, ...]
	body: Tuple[str, ...]
	mask: Tuple[int, ...]
	harmony: np.ndarray
	source_id: Optional[str] = None

	@property
	def tokens(self) -> Tuple[str, ...]:
		return self.prefix + self.body

	@property
	def harmony_position(self) -> int:
		return len(self.prefix) - 1

	def __len__(self) -> int:
		return len(self.prefix) + len(self.body)

	def to_record(self, vocabulary: Vocabulary) -> Dict:
		return {
			"kind": "conditioned",
			"id": self.source_id,
			"ids": vocabulary.encode(self.tokens),
			"mask": list(self.mask),
			"harmony": self.harmony.tolist(),
			"harmony_position": self.harmony_position,
		}

	@classmethod
	def from_record(cls, record: Dict, vocabulary: Vocabulary) -> "ConditionedSample":
		tokens = vocabulary.decode(record["ids"]).tokens
		split = int(record["harmony_position"]) + 1
		return cls(
			prefix=tuple(tokens[:split]),
			body=tuple(tokens[split:]),
			mask=tuple(record["mask"]),
			harmony=np.asarray(record["harmony"], dtype=np.float64),
			source_id=record.get("id"),
		)


def conditioning_prefix(skyline: SkylineSequence, max_skyline: Optional[int] = None) -> List[str]:
	tokens = list(skyline.tokens().tokens)
	if max_skyline is not None and len(tokens) > max_skyline:
		log_warning(
			"sequences", skyline.source_id, "skyline truncated", length=len(tokens), kept=max_skyline
		)
		tokens = tokens[:max_skyline]
	return [BOS, *tokens, HARMONY]


def build_conditioned(
	skyline: SkylineSequence,
	profile: PitchClassProfile,
	body: TokenSequence,
	max_len: int = MAX_ADAPTATION_LENGTH,
) -> ConditionedSample:
	"""
	Prepend the melody/harmony conditioning prefix to a score's tokens

	Args:
		skyline: Melody skyline of the score
		profile: Pitch-class profile (possibly perturbed) travelling as the harmony sidecar
		body: LMX tokens of the score; the end token is appended when missing
		max_len: Length bound of prefix + body; the skyline is truncated to max_len // 2

	Returns:
		ConditionedSample whose mask is 1 exactly on the prefix
	"""
	if len(body) == 0:
		raise PreconditionError("Cannot condition an empty body")
	prefix = conditioning_prefix(skyline, max_len // 2)
	tokens = list(body.tokens)
	if tokens[-1] != EOS:
		tokens.append(EOS)
	if len(prefix) + len(tokens) > max_len:
		raise PreconditionError(
			f"Conditioned sequence of {len(prefix) + len(tokens)} tokens exceeds max_len {max_len}"
		)
	mask = (1,) * len(prefix) + (0,) * len(tokens)
	return ConditionedSample(tuple(prefix), tuple(tokens), mask, profile.as_array(), body.source_id)
