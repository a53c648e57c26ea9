"""
Desk-scale stand-in for a pretrained symbolic-music embedder: harmony, token bigrams and texture.
"""

import zlib
from typing import Dict, Optional

import numpy as np

from piano_pairs.analysis.features import FEATURE_NAMES, extract_features
from piano_pairs.analysis.profile import pitch_class_profile
from piano_pairs.exceptions import DegenerateProfileError, PreconditionError, ZeroNormError
from piano_pairs.lmx.codec import delinearize
from piano_pairs.lmx.vocabulary import TokenSequence
from piano_pairs.score.model import Score
from piano_pairs.similarity.embedding import StyleEmbedding

PROVIDER_NAME = "baseline-v1"
PROFILE_DIM = 12
BIGRAM_BUCKETS = 40
STATS_DIM = len(FEATURE_NAMES)
DIMENSION = PROFILE_DIM + BIGRAM_BUCKETS + STATS_DIM


def _bucket(first: str, second: str) -> int:
	return zlib.crc32(f"{first}\x1f{second}".encode()) % BIGRAM_BUCKETS


def components(sequence: TokenSequence, score: Optional[Score] = None) -> Dict[str, np.ndarray]:
	"""
	Unnormalized sub-vectors: "profile" (12), "bigrams" (40), "stats" (12)
	"""
	if len(sequence) == 0:
		raise PreconditionError("Cannot embed an empty token sequence")
	if score is None:
		score = delinearize(sequence)
	try:
		profile = pitch_class_profile(score).as_array()
	except DegenerateProfileError:
		profile = np.zeros(PROFILE_DIM)

	bigrams = np.zeros(BIGRAM_BUCKETS)
	for first, second in zip(sequence.tokens, sequence.tokens[1:]):
		bigrams[_bucket(first, second)] += 1
	if bigrams.sum() > 0:
		bigrams /= bigrams.sum()

	# squash to [0, 1) so that no single statistic dominates the norm
	stats = extract_features(score).as_array()
	stats = stats / (1.0 + np.abs(stats))
	return {"profile": profile, "bigrams": bigrams, "stats": stats}


def baseline_embed(sequence: TokenSequence, score: Optional[Score] = None) -> StyleEmbedding:
	"""
	Deterministic unit-norm 64-dimensional style embedding

	Args:
		sequence: LMX tokens of the score
		score: Parsed score; decoded from the tokens when omitted

	Returns:
		StyleEmbedding tagged with the baseline provider name
	"""
	parts = components(sequence, score)
	vector = np.concatenate([parts["profile"], parts["bigrams"], parts["stats"]])
	norm = np.linalg.norm(vector)
	if norm == 0:
		raise ZeroNormError(f"Nothing to embed in {sequence.source_id or 'sequence'}")
	return StyleEmbedding(vector / norm, PROVIDER_NAME)


class BaselineProvider:
	name = PROVIDER_NAME
	dimension = DIMENSION

	def embed(self, sequence: TokenSequence, score: Optional[Score] = None) -> StyleEmbedding:
		return baseline_embed(sequence, score)
