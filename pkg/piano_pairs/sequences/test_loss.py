import math
import unittest

import numpy as np
import torch

from piano_pairs.exceptions import AllMaskedError, PreconditionError
from piano_pairs.sequences.loss import masked_cross_entropy


class TestMaskedCrossEntropy(unittest.TestCase):
	def test_uniform_logits(self):
		"""
		Uniform predictions over four tokens cost ln 4 per position
		"""
		logits = torch.zeros(2, 5, 4)
		targets = torch.randint(0, 4, (2, 5), generator=torch.Generator().manual_seed(0))
		mask = torch.zeros(2, 5, dtype=torch.long)
		self.assertAlmostEqual(float(masked_cross_entropy(logits, targets, mask)), math.log(4), places=6)

	def test_masked_targets_do_not_matter(self):
		"""
		100 random masks; permuting or replacing the masked targets, even with ids outside the vocabulary,
		leaves the loss bit-identical
		"""
		generator = torch.Generator().manual_seed(1)
		for trial in range(100):
			logits = torch.randn(3, 6, 7, generator=generator)
			targets = torch.randint(0, 7, (3, 6), generator=generator)
			mask = torch.randint(0, 2, (3, 6), generator=generator)
			mask[0, -1] = 0
			masked = mask.flatten().nonzero().flatten()
			changed = targets.clone().flatten()
			order = torch.randperm(len(masked), generator=generator)
			changed[masked] = changed[masked][order]
			if trial % 2:
				changed[masked] = torch.randint(-5, 50, (len(masked),), generator=generator)
			changed = changed.view(3, 6)
			with self.subTest(trial=trial):
				self.assertEqual(
					float(masked_cross_entropy(logits, targets, mask)), float(masked_cross_entropy(logits, changed, mask))
				)

	def test_matches_float64_reference(self):
		rng = np.random.default_rng(2)
		logits = rng.normal(size=(2, 4, 5))
		targets = rng.integers(0, 5, size=(2, 4))
		mask = np.array([[1, 0, 0, 1], [0, 0, 1, 1]])
		log_probs = logits - np.log(np.exp(logits).sum(axis=-1, keepdims=True))
		picked = np.take_along_axis(log_probs, targets[..., None], axis=-1)[..., 0]
		expected = -picked[mask == 0].mean()
		result = masked_cross_entropy(torch.from_numpy(logits), torch.from_numpy(targets), torch.from_numpy(mask))
		self.assertEqual(result.dtype, torch.float64)
		self.assertAlmostEqual(float(result), float(expected), places=12)

	def test_everything_masked(self):
		with self.assertRaises(AllMaskedError):
			masked_cross_entropy(torch.zeros(1, 3, 4), torch.zeros(1, 3), torch.ones(1, 3))

	def test_misaligned_shapes(self):
		with self.assertRaises(PreconditionError):
			masked_cross_entropy(torch.zeros(1, 3, 4), torch.zeros(1, 2), torch.zeros(1, 3))
