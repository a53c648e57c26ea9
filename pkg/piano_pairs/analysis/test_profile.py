import unittest
from fractions import Fraction

import numpy as np

from piano_pairs.analysis.profile import PitchClassProfile, perturb_profile, perturbation, pitch_class_profile
from piano_pairs.exceptions import DegenerateProfileError, PreconditionError
from piano_pairs.score.model import Measure, NoteEvent, Pitch, Score

F = Fraction


def _score(events) -> Score:
	return Score((Measure("1", F(0), F(4), tuple(events), time=(4, 4)),))


class TestProfile(unittest.TestCase):
	def setUp(self):
		self.score = _score(
			[
				NoteEvent(F(0), F(3), Pitch("C", 0, 5)),
				NoteEvent(F(3), F(1), Pitch("G", 0, 4)),
				NoteEvent(F(0), F(4), Pitch("C", 0, 3), voice=2, staff=2),
				NoteEvent(F(0), F(1, 2), Pitch("F", 1, 5), grace=True),
			]
		)

	def test_duration_weighted(self):
		"""
		Weights follow sounding duration across octaves; grace notes do not count
		"""
		profile = pitch_class_profile(self.score).as_array()
		self.assertAlmostEqual(profile[0], 7 / 8)
		self.assertAlmostEqual(profile[7], 1 / 8)
		self.assertEqual(profile[6], 0.0)
		self.assertAlmostEqual(profile.sum(), 1.0)

	def test_no_pitched_note(self):
		with self.assertRaises(DegenerateProfileError):
			pitch_class_profile(_score([NoteEvent(F(0), F(4), None)]))

	def test_perturbation_bounds(self):
		"""
		10,000 draws stay within the multiplicative noise band and keep zero classes at zero
		"""
		profile = PitchClassProfile.from_array(np.array([0.3, 0, 0.1, 0, 0.2, 0.1, 0, 0.15, 0, 0.1, 0, 0.05]))
		p = profile.as_array()
		scale = 0.2
		for seed in range(10_000):
			raw = perturbation(profile, scale, seed)
			self.assertTrue(np.all(raw >= (1 - scale) * p - 1e-12))
			self.assertTrue(np.all(raw <= np.minimum((1 + scale) * p, 1.0) + 1e-12))
			self.assertTrue(np.all(raw[p == 0] == 0))
		perturbed = perturb_profile(profile, scale, seed=5).as_array()
		self.assertAlmostEqual(perturbed.sum(), 1.0)

	def test_seed_determinism_and_identity(self):
		profile = pitch_class_profile(self.score)
		self.assertEqual(perturb_profile(profile, 0.2, seed=3), perturb_profile(profile, 0.2, seed=3))
		self.assertNotEqual(perturb_profile(profile, 0.2, seed=3), perturb_profile(profile, 0.2, seed=4))
		self.assertIs(perturb_profile(profile, 0.0), profile)
		with self.assertRaises(PreconditionError):
			perturb_profile(profile, 1.0)
