from typing import List, Sequence

import numpy as np
from scipy.stats import rankdata

from piano_pairs.analysis.features import FEATURE_NAMES
from piano_pairs.config import LEVELS

# +1: grows with difficulty, -1: shrinks with difficulty
DIFFICULTY_DIRECTION = {
	"right_note_density": 1,
	"left_note_density": 1,
	"right_pitch_range": 1,
	"left_pitch_range": 1,
	"right_mean_interval": 1,
	"left_mean_interval": 1,
	"right_chord_rate": 1,
	"left_chord_rate": 1,
	"distinct_pitch_classes": 1,
	"max_polyphony": 1,
	"mean_inter_onset": -1,
	"max_chord_span": 1,
}


def difficulty_score(features: Sequence) -> np.ndarray:
	"""
	Composite of z-scored features signed by their difficulty direction
	"""
	matrix = np.vstack([np.asarray(getattr(f, "values", f), dtype=np.float64) for f in features])
	std = matrix.std(axis=0)
	z = np.divide(matrix - matrix.mean(axis=0), std, out=np.zeros_like(matrix), where=std > 0)
	directions = np.asarray([DIFFICULTY_DIRECTION[name] for name in FEATURE_NAMES], dtype=np.float64)
	return z @ directions / len(directions)


def synthetic_levels(features: Sequence) -> List[int]:
	"""
	Map composite-score quantiles to levels 1-9, for corpora without expert annotations
	"""
	if len(features) == 0:
		return []
	ranks = rankdata(difficulty_score(features), method="ordinal") - 1
	levels = np.floor(ranks * len(LEVELS) / len(features)).astype(int)
	return [LEVELS[int(level)] for level in levels]
