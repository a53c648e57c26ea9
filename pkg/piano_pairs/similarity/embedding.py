from dataclasses import dataclass
from typing import Optional, Protocol, runtime_checkable

import numpy as np

from piano_pairs.exceptions import EmbeddingMismatchError, NonFiniteFeatureError, ZeroNormError
from piano_pairs.lmx.vocabulary import TokenSequence
from piano_pairs.score.model import Score


@dataclass(frozen=True, eq=False)
class StyleEmbedding:
	vector: np.ndarray
	provider: str

	def __post_init__(self):
		vector = np.asarray(self.vector, dtype=np.float64).reshape(-1)
		if not np.all(np.isfinite(vector)):
			raise NonFiniteFeatureError(f"Embedding from {self.provider} has non-finite entries")
		if not np.any(vector):
			raise ZeroNormError(f"Embedding from {self.provider} is all zero")
		object.__setattr__(self, "vector", vector)

	@property
	def dimension(self) -> int:
		return self.vector.shape[0]


@runtime_checkable
class EmbeddingProvider(Protocol):
	"""
	Deterministic style embedder. The input modality is up to the provider.
	"""

	name: str
	dimension: int

	def embed(self, sequence: TokenSequence, score: Optional[Score] = None) -> StyleEmbedding: ...


def cosine_similarity(a: StyleEmbedding, b: StyleEmbedding) -> float:
	"""
	Cosine of the angle between two embeddings of the same provider

	Raises:
		EmbeddingMismatchError: different provider or dimension
		ZeroNormError: a zero vector
	"""
	if a.provider != b.provider or a.dimension != b.dimension:
		raise EmbeddingMismatchError(
			f"Cannot compare {a.provider}[{a.dimension}] with {b.provider}[{b.dimension}]"
		)
	norm_a, norm_b = np.linalg.norm(a.vector), np.linalg.norm(b.vector)
	if norm_a == 0 or norm_b == 0:
		raise ZeroNormError("Cosine similarity of a zero vector is undefined")
	value = float(np.dot(a.vector, b.vector) / (norm_a * norm_b))
	return float(np.clip(value, -1.0, 1.0))


def cosine_distance(a: StyleEmbedding, b: StyleEmbedding) -> float:
	return 1.0 - cosine_similarity(a, b)
