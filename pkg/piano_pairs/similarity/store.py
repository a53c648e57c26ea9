import math
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from piano_pairs.exceptions import EmbeddingFileError, PianoPairsError
from piano_pairs.lmx.vocabulary import TokenSequence
from piano_pairs.score.model import Score
from piano_pairs.similarity.embedding import StyleEmbedding
from piano_pairs.utils import iter_jsonl, write_jsonl

PRECOMPUTED_PROVIDER = "precomputed"


def save_embeddings(embeddings: Iterable[Tuple[str, StyleEmbedding]], path: Union[str, Path]) -> int:
	"""
	Write embeddings as JSONL records `{"id", "dim", "v"}`
	"""
	return write_jsonl(
		({"id": source_id, "dim": e.dimension, "v": e.vector.tolist()} for source_id, e in embeddings), path
	)


def load_precomputed(path: Union[str, Path], provider: str = PRECOMPUTED_PROVIDER) -> Dict[str, StyleEmbedding]:
	"""
	Load externally computed embeddings keyed by source id

	Raises:
		EmbeddingFileError: malformed record, duplicate id or inconsistent dimension
	"""
	embeddings: Dict[str, StyleEmbedding] = {}
	dimension = None
	for line_number, record in enumerate(iter_jsonl(path), start=1):
		try:
			source_id, declared, values = record["id"], int(record["dim"]), record["v"]
		except (KeyError, TypeError, ValueError):
			raise EmbeddingFileError(f"{path}:{line_number}: record needs id, dim and v")
		if source_id in embeddings:
			raise EmbeddingFileError(f"{path}:{line_number}: duplicate id {source_id!r}")
		if len(values) != declared:
			raise EmbeddingFileError(f"{path}:{line_number}: dim {declared} but {len(values)} values")
		if dimension is None:
			dimension = declared
		elif declared != dimension:
			raise EmbeddingFileError(f"{path}:{line_number}: dimension {declared} differs from {dimension}")
		if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in values):
			raise EmbeddingFileError(f"{path}:{line_number}: non-numeric or non-finite value")
		try:
			embeddings[source_id] = StyleEmbedding(np.asarray(values, dtype=np.float64), provider)
		except PianoPairsError as e:
			raise EmbeddingFileError(f"{path}:{line_number}: {e}")
	return embeddings


class PrecomputedProvider:
	"""
	Provider backed by an embedding file; looks sequences up by source id
	"""

	def __init__(self, embeddings: Dict[str, StyleEmbedding], name: str = PRECOMPUTED_PROVIDER):
		self.embeddings = embeddings
		self.name = name
		self.dimension = next(iter(embeddings.values())).dimension if embeddings else 0

	@classmethod
	def from_file(cls, path: Union[str, Path]) -> "PrecomputedProvider":
		return cls(load_precomputed(path))

	def get(self, source_id: str) -> Optional[StyleEmbedding]:
		return self.embeddings.get(source_id)

	def embed(self, sequence: TokenSequence, score: Optional[Score] = None) -> StyleEmbedding:
		embedding = self.embeddings.get(sequence.source_id or "")
		if embedding is None:
			raise EmbeddingFileError(f"No precomputed embedding for {sequence.source_id!r}")
		return embedding
