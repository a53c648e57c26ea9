from dataclasses import dataclass
from typing import List, Optional, Sequence

from piano_pairs.config import MIN_GAP
from piano_pairs.difficulty.gnb import DifficultyPosterior
from piano_pairs.exceptions import MissingAnnotationError, PreconditionError
from piano_pairs.lmx.vocabulary import TokenSequence
from piano_pairs.similarity.embedding import StyleEmbedding, cosine_similarity


@dataclass(frozen=True, eq=False)
class Variation:
	piece_id: str
	variation_id: str
	sequence: TokenSequence
	posterior: Optional[DifficultyPosterior] = None
	embedding: Optional[StyleEmbedding] = None
	genre: str = ""

	@property
	def label(self) -> int:
		if self.posterior is None:
			raise MissingAnnotationError(f"Variation {self.variation_id} has no difficulty posterior")
		return self.posterior.label


@dataclass(frozen=True, eq=False)
class VariationPair:
	harder: Variation
	easier: Variation
	gap: int
	similarity: Optional[float] = None

	@property
	def piece_id(self) -> str:
		return self.harder.piece_id

	@property
	def level_pair(self):
		return (self.harder.label, self.easier.label)

	@property
	def distance(self) -> Optional[float]:
		return None if self.similarity is None else 1.0 - self.similarity


def enumerate_pairs(variations: Sequence[Variation], min_gap: int = MIN_GAP) -> List[VariationPair]:
	"""
	Every difficulty-ordered pair of one piece's variations

	Args:
		variations: Labelled variations of a single piece
		min_gap: Smallest accepted label difference

	Returns:
		Pairs oriented harder -> easier, ordered by (harder index, easier index); similarity filled in when
		both variations carry an embedding
	"""
	if min_gap < 1:
		raise PreconditionError(f"min_gap must be at least 1, got {min_gap}")
	pieces = {variation.piece_id for variation in variations}
	if len(pieces) > 1:
		raise PreconditionError(f"enumerate_pairs expects one piece, got {sorted(pieces)}")
	labels = [variation.label for variation in variations]
	pairs = []
	for i, harder in enumerate(variations):
		for j, easier in enumerate(variations):
			gap = labels[i] - labels[j]
			if gap < min_gap:
				continue
			similarity = None
			if harder.embedding is not None and easier.embedding is not None:
				similarity = cosine_similarity(harder.embedding, easier.embedding)
			pairs.append(VariationPair(harder, easier, gap, similarity))
	return pairs
