from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from piano_pairs.score.model import Pitch, Score


@dataclass(frozen=True)
class SoundingNote:
	start: Fraction
	end: Fraction
	pitch: Pitch
	staff: int


@dataclass(frozen=True)
class Segment:
	start: Fraction
	end: Fraction
	pitches: Tuple[Pitch, ...]

	@property
	def duration(self) -> Fraction:
		return self.end - self.start


def sounding_notes(score: Score) -> List[SoundingNote]:
	"""
	Pitched notes as sounding intervals; a tie chain becomes one interval, grace notes are left out
	"""
	notes = sorted(score.notes, key=lambda e: (e.onset, e.pitch.midi_number, e.staff))
	intervals: List[List] = []
	open_ties: Dict[Tuple[int, int], int] = {}
	for note in notes:
		key = (note.pitch.midi_number, note.staff)
		index = open_ties.pop(key, None)
		if note.tie_stop and index is not None and intervals[index][1] == note.onset:
			intervals[index][1] = note.offset
		else:
			intervals.append([note.onset, note.offset, note.pitch, note.staff])
			index = len(intervals) - 1
		if note.tie_start:
			open_ties[key] = index
	return [SoundingNote(start, end, pitch, staff) for start, end, pitch, staff in intervals]


def timeline(score: Score) -> List[Segment]:
	"""
	Split the score into segments whose boundaries are exactly the note onsets and offsets

	Args:
		score: Validated score

	Returns:
		Ordered segments covering [0, total_duration), each with every pitch sounding in it
	"""
	total = score.total_duration
	if not score.measures or total <= 0:
		return []
	notes = sounding_notes(score)
	boundaries = {Fraction(0), total}
	starts: Dict[Fraction, List[SoundingNote]] = {}
	ends: Dict[Fraction, List[SoundingNote]] = {}
	for note in notes:
		start, end = max(note.start, Fraction(0)), min(note.end, total)
		if end <= start:
			continue
		boundaries.update((start, end))
		starts.setdefault(start, []).append(note)
		ends.setdefault(end, []).append(note)

	active: Counter = Counter()
	spelled: Dict[int, Pitch] = {}
	segments = []
	ordered = sorted(boundaries)
	for start, end in zip(ordered, ordered[1:]):
		for note in ends.get(start, ()):
			active[note.pitch.midi_number] -= 1
		for note in starts.get(start, ()):
			active[note.pitch.midi_number] += 1
			spelled.setdefault(note.pitch.midi_number, note.pitch)
		pitches = tuple(spelled[midi] for midi in sorted(m for m, count in active.items() if count > 0))
		segments.append(Segment(start, end, pitches))
	return segments
