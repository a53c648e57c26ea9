import unittest
from fractions import Fraction

from piano_pairs.score.model import Measure, NoteEvent, Pitch, Score
from piano_pairs.score.timeline import sounding_notes, timeline

F = Fraction


def _score(*measures) -> Score:
	built = []
	for index, events in enumerate(measures):
		built.append(Measure(str(index + 1), F(4 * index), F(4), tuple(events), time=(4, 4) if index == 0 else None))
	return Score(tuple(built))


class TestTimeline(unittest.TestCase):
	def test_boundaries_are_onsets_and_offsets(self):
		score = _score(
			[
				NoteEvent(F(0), F(2), Pitch("C", 0, 5)),
				NoteEvent(F(2), F(2), Pitch("D", 0, 5)),
				NoteEvent(F(1), F(3), Pitch("C", 0, 3), voice=2, staff=2),
			]
		)
		segments = timeline(score)
		self.assertEqual([(s.start, s.end) for s in segments], [(0, 1), (1, 2), (2, 4)])
		self.assertEqual([[p.midi_number for p in s.pitches] for s in segments], [[72], [48, 72], [48, 74]])

	def test_silence_is_an_empty_segment(self):
		score = _score([NoteEvent(F(2), F(2), Pitch("C", 0, 5))])
		segments = timeline(score)
		self.assertEqual(segments[0].pitches, ())
		self.assertEqual(segments[0].duration, F(2))

	def test_tie_chain_is_one_sounding_note(self):
		"""
		A note tied across the barline sounds once, from its first onset to its last offset
		"""
		score = _score(
			[NoteEvent(F(2), F(2), Pitch("G", 0, 4), tie_start=True)],
			[NoteEvent(F(4), F(1), Pitch("G", 0, 4), tie_stop=True), NoteEvent(F(5), F(3), None)],
		)
		notes = sounding_notes(score)
		self.assertEqual(len(notes), 1)
		self.assertEqual((notes[0].start, notes[0].end), (F(2), F(5)))

	def test_grace_notes_do_not_sound(self):
		score = _score([NoteEvent(F(0), F(1, 2), Pitch("D", 0, 5), grace=True), NoteEvent(F(0), F(4), Pitch("C", 0, 5))])
		self.assertEqual([n.pitch.midi_number for n in sounding_notes(score)], [72])
