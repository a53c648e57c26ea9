from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

STEP_SEMITONES = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}
SHARP_SPELLING = (
	("C", 0), ("C", 1), ("D", 0), ("D", 1), ("E", 0), ("F", 0),
	("F", 1), ("G", 0), ("G", 1), ("A", 0), ("A", 1), ("B", 0),
)  # fmt: skip


@dataclass(frozen=True, order=True)
class Pitch:
	"""
	Spelled pitch; midi_number, pitch_class and octave are derived from the spelling
	"""

	step: str
	alter: int
	octave: int

	@property
	def midi_number(self) -> int:
		return (self.octave + 1) * 12 + STEP_SEMITONES[self.step] + self.alter

	@property
	def pitch_class(self) -> int:
		return self.midi_number % 12

	@classmethod
	def from_midi(cls, midi_number: int) -> "Pitch":
		step, alter = SHARP_SPELLING[midi_number % 12]
		return cls(step, alter, midi_number // 12 - 1)


@dataclass(frozen=True)
class NoteEvent:
	"""
	One notated note or rest. Time values are in quarter notes, absolute from the start of the piece.

	Grace notes carry their notated duration but do not advance time.
	"""

	onset: Fraction
	duration: Fraction
	pitch: Optional[Pitch]
	voice: int = 1
	staff: int = 1
	chord: bool = False
	tie_start: bool = False
	tie_stop: bool = False
	grace: bool = False
	articulations: Tuple[str, ...] = ()
	dynamics: Optional[str] = None

	@property
	def is_rest(self) -> bool:
		return self.pitch is None

	@property
	def offset(self) -> Fraction:
		return self.onset + self.duration

	def signature(self) -> tuple:
		return (
			self.onset,
			self.pitch.midi_number if self.pitch else -1,
			self.duration,
			self.voice,
			self.staff,
			self.grace,
		)


@dataclass(frozen=True)
class Measure:
	number: str
	start: Fraction
	duration: Fraction
	events: Tuple[NoteEvent, ...] = ()
	time: Optional[Tuple[int, int]] = None
	key: Optional[int] = None
	clefs: Tuple[Tuple[int, str, int], ...] = ()

	@property
	def end(self) -> Fraction:
		return self.start + self.duration


@dataclass(frozen=True)
class ScoreMetadata:
	title: str = ""
	genre: str = ""
	source_id: str = ""


@dataclass(frozen=True)
class Score:
	measures: Tuple[Measure, ...]
	metadata: ScoreMetadata = field(default_factory=ScoreMetadata)
	staves: int = 2
	validated: bool = False

	@property
	def events(self) -> List[NoteEvent]:
		return [event for measure in self.measures for event in measure.events]

	@property
	def notes(self) -> List[NoteEvent]:
		"""Pitched, non-grace notes."""
		return [event for event in self.events if event.pitch is not None and not event.grace]

	@property
	def total_duration(self) -> Fraction:
		return self.measures[-1].end if self.measures else Fraction(0)

	def event_multiset(self) -> List[tuple]:
		return sorted(event.signature() for event in self.events)


def musically_equal(a: Score, b: Score) -> bool:
	"""
	Semantic equality: identical multisets of (onset, pitch, duration, voice, staff, grace)
	"""
	return a.event_multiset() == b.event_multiset()


def time_signature_length(time: Optional[Tuple[int, int]]) -> Fraction:
	beats, beat_type = time or (4, 4)
	return Fraction(beats * 4, beat_type)
