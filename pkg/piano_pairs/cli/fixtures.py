"""
Seeded synthetic corpus: a melody on staff 1 over an accompaniment on staff 2, with a
difficulty knob steering rhythm density, leaps, chords and accompaniment pattern.
"""

from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from piano_pairs.exceptions import PreconditionError
from piano_pairs.score.model import Measure, NoteEvent, Pitch, Score, ScoreMetadata
from piano_pairs.score.writer import write_file

GENRES = ("pop", "rock", "k-pop", "latin", "film", "classical")
CLEFS = ((1, "G", 2), (2, "F", 4))
MEASURE_LENGTH = Fraction(4)

F = Fraction
# rhythm cells that fill one beat-aligned span; the later ones appear with higher difficulty
RHYTHM_CELLS = (
	(F(4),),
	(F(2),),
	(F(1),),
	(F(1, 2), F(1, 2)),
	(F(3, 2), F(1, 2)),
	(F(3, 4), F(1, 4)),
	(F(1, 4), F(1, 4), F(1, 4), F(1, 4)),
	(F(1, 3), F(1, 3), F(1, 3)),
)
# I, IV, V, vi in C major as (root, third, fifth) in the bass octave
PROGRESSION = ((48, 52, 55), (53, 57, 60), (43, 47, 50), (45, 48, 52))
MAJOR_SCALE = (0, 2, 4, 5, 7, 9, 11)


def _snap_to_scale(midi: int) -> int:
	while midi % 12 not in MAJOR_SCALE:
		midi += 1
	return midi


def _melody_rhythm(rng: np.random.Generator, difficulty: float) -> List[Fraction]:
	allowed = RHYTHM_CELLS[: 3 + int(round(difficulty * (len(RHYTHM_CELLS) - 3)))]
	durations: List[Fraction] = []
	remaining = MEASURE_LENGTH
	while remaining > 0:
		fitting = [cell for cell in allowed if sum(cell) <= remaining]
		cell = fitting[int(rng.integers(len(fitting)))]
		durations.extend(cell)
		remaining -= sum(cell)
	return durations


def _melody(
	rng: np.random.Generator, difficulty: float, start: Fraction, previous: Optional[int], tie: bool
) -> Tuple[List[NoteEvent], Optional[int]]:
	events = []
	pitch = previous if previous is not None else 72
	max_leap = 2 + int(difficulty * 10)
	onset = start
	for index, duration in enumerate(_melody_rhythm(rng, difficulty)):
		tie_stop = tie and index == 0
		if not tie_stop:
			pitch = _snap_to_scale(int(np.clip(pitch + rng.integers(-max_leap, max_leap + 1), 62, 88)))
		if index > 0 and rng.random() < 0.08:
			events.append(NoteEvent(onset, duration, None, voice=1, staff=1))
			onset += duration
			continue
		if rng.random() < 0.05 and not tie_stop:
			events.append(NoteEvent(onset, F(1, 2), Pitch.from_midi(pitch + 2), voice=1, staff=1, grace=True))
		articulations = ("staccato",) if duration <= F(1, 2) and rng.random() < 0.3 else ()
		dynamics = str(rng.choice(("p", "mf", "f"))) if index == 0 and rng.random() < 0.3 else None
		events.append(
			NoteEvent(
				onset,
				duration,
				Pitch.from_midi(pitch),
				voice=1,
				staff=1,
				tie_stop=tie_stop,
				articulations=articulations,
				dynamics=dynamics,
			)
		)
		if duration >= 1 and rng.random() < 0.5 * difficulty:
			events.append(NoteEvent(onset, duration, Pitch.from_midi(pitch - 4), voice=1, staff=1, chord=True))
		onset += duration
	return events, pitch


def _accompaniment(rng: np.random.Generator, difficulty: float, start: Fraction) -> List[NoteEvent]:
	chord = PROGRESSION[int(rng.integers(len(PROGRESSION)))]
	events = []
	if difficulty < 0.25:
		if rng.random() < 0.3:
			# bass enters on beat 3, the first half stays empty
			return [NoteEvent(start + 2, F(2), Pitch.from_midi(chord[0]), voice=2, staff=2)]
		return [NoteEvent(start, MEASURE_LENGTH, Pitch.from_midi(chord[0]), voice=2, staff=2)]
	if difficulty < 0.6:
		for beat in range(4):
			onset = start + beat
			if beat == 3 and rng.random() < 0.2:
				events.append(NoteEvent(onset, F(1), None, voice=2, staff=2))
				continue
			for position, midi in enumerate(chord):
				events.append(
					NoteEvent(onset, F(1), Pitch.from_midi(midi), voice=2, staff=2, chord=position > 0)
				)
		return events
	if difficulty < 0.85:
		pattern = (chord[0], chord[2], chord[1], chord[2])
	else:
		pattern = (chord[0], chord[0] + 12, chord[2], chord[0] + 12)
	for step in range(8):
		pitch = Pitch.from_midi(pattern[step % 4])
		events.append(NoteEvent(start + F(step, 2), F(1, 2), pitch, voice=2, staff=2))
	return events


def generate_piece(index: int, seed: int, measures: int = 4) -> Score:
	"""
	One synthetic two-staff piece; depends only on (seed, index)
	"""
	rng = np.random.default_rng((seed, index))
	difficulty = float(rng.random())
	genre = str(rng.choice(GENRES))
	result = []
	previous = None
	tie_next = False
	for number in range(measures):
		start = MEASURE_LENGTH * number
		melody, previous = _melody(rng, difficulty, start, previous, tie_next)
		events = melody + _accompaniment(rng, difficulty, start)
		heads = [e for e in melody if e.pitch is not None and not e.grace and not e.chord]
		last = max(heads, key=lambda e: e.onset)
		tie_next = number + 1 < measures and last.offset == start + MEASURE_LENGTH and rng.random() < 0.15
		if tie_next:
			events[events.index(last)] = NoteEvent(
				last.onset,
				last.duration,
				last.pitch,
				voice=1,
				staff=1,
				tie_stop=last.tie_stop,
				tie_start=True,
				articulations=last.articulations,
				dynamics=last.dynamics,
			)
			previous = last.pitch.midi_number
		result.append(
			Measure(
				number=str(number + 1),
				start=start,
				duration=MEASURE_LENGTH,
				events=tuple(events),
				time=(4, 4) if number == 0 else None,
				key=0 if number == 0 else None,
				clefs=CLEFS if number == 0 else (),
			)
		)
	source_id = f"piece_{index:04d}"
	return Score(
		measures=tuple(result),
		metadata=ScoreMetadata(title=f"Fixture {index:04d}", genre=genre, source_id=source_id),
		staves=2,
	)


def gen_fixtures(pieces: int, seed: int, measures: int = 4) -> List[Score]:
	if pieces < 1:
		raise PreconditionError(f"pieces must be at least 1, got {pieces}")
	return [generate_piece(index, seed, measures) for index in range(pieces)]


def write_fixtures(pieces: int, seed: int, output_dir: Union[str, Path], measures: int = 4) -> List[Path]:
	output_dir = Path(output_dir)
	return [
		write_file(score, output_dir / f"{score.metadata.source_id}.musicxml")
		for score in gen_fixtures(pieces, seed, measures)
	]
