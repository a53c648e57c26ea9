"""
Proxy difficulty features. Staff 1 is read as the right hand, staff 2 as the left hand.

Tie chains count as one note; grace notes are ignored.
"""

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

import numpy as np

from piano_pairs.exceptions import EmptyScoreError, NonFiniteFeatureError, PreconditionError
from piano_pairs.score.model import Score
from piano_pairs.score.timeline import SoundingNote, sounding_notes, timeline

FEATURE_NAMES = (
	"right_note_density",
	"left_note_density",
	"right_pitch_range",
	"left_pitch_range",
	"right_mean_interval",
	"left_mean_interval",
	"right_chord_rate",
	"left_chord_rate",
	"distinct_pitch_classes",
	"max_polyphony",
	"mean_inter_onset",
	"max_chord_span",
)
HANDS = (1, 2)


@dataclass(frozen=True)
class FeatureVector:
	values: Tuple[float, ...]

	def __post_init__(self):
		if len(self.values) != len(FEATURE_NAMES):
			raise PreconditionError(f"Expected {len(FEATURE_NAMES)} features, got {len(self.values)}")
		if not all(math.isfinite(value) for value in self.values):
			raise NonFiniteFeatureError(f"Non-finite feature value in {self.values}")

	def __getitem__(self, name: str) -> float:
		return self.values[FEATURE_NAMES.index(name)]

	def as_array(self) -> np.ndarray:
		return np.asarray(self.values, dtype=np.float64)

	def as_dict(self) -> Dict[str, float]:
		return dict(zip(FEATURE_NAMES, self.values))


def _onset_groups(notes: List[SoundingNote]) -> List[List[int]]:
	groups: Dict[Fraction, List[int]] = defaultdict(list)
	for note in notes:
		groups[note.start].append(note.pitch.midi_number)
	return [sorted(groups[onset]) for onset in sorted(groups)]


def _mean_interval(groups: List[List[int]]) -> float:
	tops = [group[-1] for group in groups]
	if len(tops) < 2:
		return 0.0
	return float(np.mean(np.abs(np.diff(tops))))


def extract_features(score: Score) -> FeatureVector:
	"""
	Compute the 12 proxy difficulty features in FEATURE_NAMES order

	Args:
		score: Validated score

	Returns:
		FeatureVector

	Raises:
		EmptyScoreError: the score has no duration
	"""
	total = score.total_duration
	if not score.measures or total <= 0:
		raise EmptyScoreError(f"Cannot extract features from empty score {score.metadata.source_id}")

	notes = sounding_notes(score)
	by_hand = {hand: [note for note in notes if note.staff == hand] for hand in HANDS}
	groups = {hand: _onset_groups(by_hand[hand]) for hand in HANDS}

	density = [len(by_hand[hand]) / float(total) for hand in HANDS]
	pitch_range = []
	for hand in HANDS:
		midis = [note.pitch.midi_number for note in by_hand[hand]]
		pitch_range.append(float(max(midis) - min(midis)) if midis else 0.0)
	interval = [_mean_interval(groups[hand]) for hand in HANDS]
	chord_rate = [
		sum(1 for group in groups[hand] if len(group) >= 2) / len(groups[hand]) if groups[hand] else 0.0
		for hand in HANDS
	]

	distinct = float(len({note.pitch.pitch_class for note in notes}))
	polyphony = float(max((len(segment.pitches) for segment in timeline(score)), default=0))
	onsets = sorted({note.start for note in notes})
	mean_ioi = float(np.mean(np.diff([float(onset) for onset in onsets]))) if len(onsets) > 1 else 0.0
	span = float(max((group[-1] - group[0] for hand in HANDS for group in groups[hand]), default=0))

	return FeatureVector((*density, *pitch_range, *interval, *chord_rate, distinct, polyphony, mean_ioi, span))
