from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from piano_pairs.exceptions import EmptySkylineError
from piano_pairs.lmx.codec import REST, pitch_token
from piano_pairs.lmx.vocabulary import TokenSequence
from piano_pairs.score.model import Pitch, Score
from piano_pairs.score.timeline import timeline


@dataclass(frozen=True)
class SkylineSequence:
	"""
	Highest sounding pitch over time; `None` marks a rest entry
	"""

	entries: Tuple[Tuple[Optional[Pitch], Fraction], ...]
	source_id: Optional[str] = None

	def __len__(self) -> int:
		return len(self.entries)

	@property
	def pitches(self) -> List[Optional[Pitch]]:
		return [pitch for pitch, _ in self.entries]

	def tokens(self) -> TokenSequence:
		return TokenSequence(
			tuple(REST if pitch is None else pitch_token(pitch) for pitch, _ in self.entries),
			self.source_id,
		)


def _same(a: Optional[Pitch], b: Optional[Pitch]) -> bool:
	if a is None or b is None:
		return a is b
	return a.midi_number == b.midi_number


def melody_skyline(score: Score) -> SkylineSequence:
	"""
	Take the highest pitch of every timeline segment, keeping silent segments as rests

	Args:
		score: Validated score

	Returns:
		SkylineSequence with equal neighbouring entries merged

	Raises:
		EmptySkylineError: the score has no sounding note
	"""
	entries: List[List] = []
	for segment in timeline(score):
		top = max(segment.pitches, key=lambda pitch: pitch.midi_number) if segment.pitches else None
		if entries and _same(entries[-1][0], top):
			entries[-1][1] += segment.duration
		else:
			entries.append([top, segment.duration])
	if all(pitch is None for pitch, _ in entries):
		raise EmptySkylineError(f"No sounding note in {score.metadata.source_id or 'score'}")
	entries = tuple((pitch, duration) for pitch, duration in entries)
	return SkylineSequence(entries, score.metadata.source_id or None)
