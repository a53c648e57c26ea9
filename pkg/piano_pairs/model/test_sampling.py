import unittest

import torch

from piano_pairs.lmx.vocabulary import EOS
from piano_pairs.model.config import ModelConfig
from piano_pairs.model.sampling import sample, validity_fraction
from piano_pairs.model.test_training import conditioned_corpus
from piano_pairs.model.training import init_state, train


class TestSampling(unittest.TestCase):
	@classmethod
	def setUpClass(cls):
		cls.samples, cls.vocabulary = conditioned_corpus(pieces=4, measures=1)
		config = ModelConfig(
			vocab_size=len(cls.vocabulary), max_context=max(len(s) for s in cls.samples) + 8, width=32, seed=3
		)
		cls.state = init_state(config)
		train(cls.state, cls.samples, cls.vocabulary, steps=60, batch_size=4)

	def test_count_and_ids(self):
		generations = sample(self.state.model, self.vocabulary, self.samples[0], 128, max_new_tokens=6, source_id="piece")
		self.assertEqual(len(generations), 128)
		self.assertEqual(generations[0].sequence.source_id, "piece#v000")
		self.assertEqual(generations[-1].sequence.source_id, "piece#v127")
		self.assertTrue(all(EOS not in g.sequence.tokens for g in generations))
		self.assertTrue(0.0 <= validity_fraction(generations) <= 1.0)

	def test_same_seed_same_output(self):
		first = sample(self.state.model, self.vocabulary, self.samples[1], 8, seed=5)
		second = sample(self.state.model, self.vocabulary, self.samples[1], 8, seed=5)
		self.assertEqual([g.sequence for g in first], [g.sequence for g in second])

	def test_greedy_is_deterministic_and_cache_free(self):
		"""
		Greedy decoding ignores the seed and matches decoding without a cache
		"""
		model = self.state.model.double()
		try:
			cached = sample(model, self.vocabulary, self.samples[2], 2, temperature=0, seed=1)
			uncached = sample(model, self.vocabulary, self.samples[2], 2, temperature=0, seed=2, use_cache=False)
		finally:
			self.state.model.float()
		self.assertEqual(cached[0].sequence, cached[1].sequence)
		self.assertEqual([g.sequence for g in cached], [g.sequence for g in uncached])

	def test_unfinished_generations_are_invalid(self):
		generations = sample(self.state.model, self.vocabulary, self.samples[0], 4, max_new_tokens=1, top_k=None)
		for generation in generations:
			if not generation.ended:
				self.assertFalse(generation.valid)
				self.assertTrue(generation.reason)

	def test_token_prompt(self):
		prompt = list(self.samples[3].prefix)
		generations = sample(
			self.state.model, self.vocabulary, prompt, 3, harmony=self.samples[3].harmony, max_new_tokens=4
		)
		self.assertEqual(len(generations), 3)
		self.assertTrue(all(len(g.sequence) <= 4 for g in generations))
