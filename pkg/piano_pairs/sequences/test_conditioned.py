import unittest
from fractions import Fraction

import numpy as np

from piano_pairs.analysis.profile import pitch_class_profile
from piano_pairs.analysis.skyline import SkylineSequence, melody_skyline
from piano_pairs.cli.fixtures import generate_piece
from piano_pairs.exceptions import PreconditionError
from piano_pairs.lmx.codec import linearize
from piano_pairs.lmx.vocabulary import BOS, EOS, HARMONY, TokenSequence, build_vocabulary
from piano_pairs.score.model import Pitch
from piano_pairs.sequences.conditioned import ConditionedSample, build_conditioned


class TestConditioned(unittest.TestCase):
	def setUp(self):
		self.score = generate_piece(0, seed=1, measures=2)
		self.body = linearize(self.score)
		self.skyline = melody_skyline(self.score)
		self.profile = pitch_class_profile(self.score)

	def test_layout_and_mask(self):
		"""
		[BOS, skyline..., HARMONY] is masked, the body and its end token carry loss
		"""
		sample = build_conditioned(self.skyline, self.profile, self.body)
		self.assertEqual(sample.prefix[0], BOS)
		self.assertEqual(sample.prefix[-1], HARMONY)
		self.assertEqual(sample.prefix[1:-1], self.skyline.tokens().tokens)
		self.assertEqual(sample.body, (*self.body.tokens, EOS))
		self.assertEqual(sample.mask, (1,) * len(sample.prefix) + (0,) * len(sample.body))
		self.assertEqual(sample.tokens[sample.harmony_position], HARMONY)
		np.testing.assert_array_equal(sample.harmony, self.profile.as_array())
		self.assertEqual(sample.source_id, self.body.source_id)

	def test_record_round_trip(self):
		sample = build_conditioned(self.skyline, self.profile, self.body)
		vocabulary = build_vocabulary([self.body, self.skyline.tokens()])
		restored = ConditionedSample.from_record(sample.to_record(vocabulary), vocabulary)
		self.assertEqual(restored.tokens, sample.tokens)
		self.assertEqual(restored.mask, sample.mask)
		self.assertEqual(restored.harmony_position, sample.harmony_position)
		np.testing.assert_allclose(restored.harmony, sample.harmony)

	def test_long_skyline_is_truncated(self):
		entries = tuple((Pitch.from_midi(60 + index % 12), Fraction(1)) for index in range(40))
		skyline = SkylineSequence(entries, "long")
		sample = build_conditioned(skyline, self.profile, TokenSequence(("measure",), "long"), max_len=40)
		self.assertEqual(len(sample.prefix), 20 + 2)
		self.assertLessEqual(len(sample), 40)

	def test_bounds(self):
		with self.assertRaises(PreconditionError):
			build_conditioned(self.skyline, self.profile, TokenSequence(()))
		with self.assertRaises(PreconditionError):
			build_conditioned(self.skyline, self.profile, self.body, max_len=len(self.body))
