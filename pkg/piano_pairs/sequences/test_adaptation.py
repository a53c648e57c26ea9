import unittest

from piano_pairs.exceptions import OversizedPairError, PreconditionError
from piano_pairs.lmx.vocabulary import EOS, SEP, SPECIALS, TokenSequence, Vocabulary
from piano_pairs.mining.export import PairRecord
from piano_pairs.sequences.adaptation import AdaptationSample, build_adaptation, build_adaptation_batch

MEASURE = ("measure", "C5", "whole", "staff:1")


def _record(hard_measures: int = 3, easy_measures: int = 1, hard_level: int = 6, easy_level: int = 3) -> PairRecord:
	return PairRecord(
		piece="p",
		hard_id="p#v001",
		easy_id="p#v002",
		hard=TokenSequence(MEASURE * hard_measures, "p#v001"),
		easy=TokenSequence(MEASURE * easy_measures, "p#v002"),
		hard_level=hard_level,
		easy_level=easy_level,
		gap=hard_level - easy_level,
		sim=0.9,
	)


class TestAdaptation(unittest.TestCase):
	def test_layout_with_level_tokens(self):
		"""
		[level(hard), hard..., [SEP], level(easy), easy..., EOS]; loss only on the easy part and EOS
		"""
		sample = build_adaptation(_record())
		self.assertEqual(sample.tokens[0], "level:6")
		self.assertEqual(sample.tokens[13], SEP)
		self.assertEqual(sample.tokens[14], "level:3")
		self.assertEqual(sample.tokens[-1], EOS)
		self.assertEqual(len(sample.tokens), 1 + 12 + 1 + 1 + 4 + 1)
		self.assertEqual(sample.easy_start, 15)
		self.assertEqual(sample.loss_positions, 4 + 1)
		self.assertEqual(sample.mask, (1,) * 15 + (0,) * 5)

	def test_layout_without_level_tokens(self):
		sample = build_adaptation(_record(), level_tokens=False)
		self.assertEqual(sample.tokens, (*MEASURE * 3, SEP, *MEASURE, EOS))
		self.assertEqual(sample.easy_start, 13)
		self.assertEqual(sample.loss_positions, 5)

	def test_trailing_hard_measures_are_dropped(self):
		sample = build_adaptation(_record(), max_len=16)
		self.assertEqual(len(sample.tokens), 16)
		self.assertEqual(sample.dropped_measures, 1)
		self.assertEqual(sample.tokens[-6:], ("level:3", *MEASURE, EOS))

	def test_oversized_pair(self):
		with self.assertRaises(OversizedPairError):
			build_adaptation(_record(), max_len=9)
		samples, skipped = build_adaptation_batch([_record(), _record(easy_measures=3)], max_len=17)
		self.assertEqual(len(samples), 1)
		self.assertEqual(skipped[0]["action"], "skip")

	def test_gap_must_be_positive(self):
		with self.assertRaises(PreconditionError):
			build_adaptation(_record(hard_level=3, easy_level=3))

	def test_record_round_trip(self):
		vocabulary = Vocabulary([*SPECIALS, "C5", "measure", "staff:1", "whole"])
		sample = build_adaptation(_record())
		self.assertEqual(AdaptationSample.from_record(sample.to_record(vocabulary), vocabulary), sample)
