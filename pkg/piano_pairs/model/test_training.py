import tempfile
import unittest
from pathlib import Path

import torch

from piano_pairs.analysis.profile import pitch_class_profile
from piano_pairs.analysis.skyline import melody_skyline
from piano_pairs.cli.fixtures import gen_fixtures
from piano_pairs.lmx.codec import linearize
from piano_pairs.lmx.vocabulary import build_vocabulary
from piano_pairs.model.checkpoint import load_checkpoint, save_checkpoint
from piano_pairs.model.config import ModelConfig
from piano_pairs.model.training import batch_loss, collate, gradient_check, init_state, train, write_training_log
from piano_pairs.sequences.adaptation import AdaptationSample
from piano_pairs.sequences.conditioned import build_conditioned


def conditioned_corpus(pieces: int = 10, measures: int = 2):
	samples, corpus = [], []
	for score in gen_fixtures(pieces, seed=21, measures=measures):
		body = linearize(score)
		skyline = melody_skyline(score)
		corpus.extend((body, skyline.tokens()))
		samples.append(build_conditioned(skyline, pitch_class_profile(score), body))
	return samples, build_vocabulary(corpus)


class TestTraining(unittest.TestCase):
	def setUp(self):
		self.samples, self.vocabulary = conditioned_corpus()
		self.config = ModelConfig(
			vocab_size=len(self.vocabulary), max_context=max(len(s) for s in self.samples), layers=2, width=64, seed=7
		)

	def test_collate_pads_with_masked_positions(self):
		batch = collate(self.samples[:3], self.vocabulary)
		for row, sample in enumerate(self.samples[:3]):
			self.assertEqual(batch.ids[row, : len(sample)].tolist(), self.vocabulary.encode(sample.tokens))
			self.assertTrue(torch.all(batch.ids[row, len(sample) :] == self.vocabulary.pad_id))
			self.assertTrue(torch.all(batch.mask[row, len(sample) :] == 1))
			self.assertEqual(int(batch.harmony_position[row]), sample.harmony_position)
		tokens = ("level:2", "measure", "[SEP]", "level:1", "measure", "<eos>")
		adaptation = AdaptationSample(tokens, (1, 1, 1, 1, 0, 0), 2, 1)
		self.assertEqual(int(collate([adaptation], self.vocabulary).harmony_position[0]), -1)

	def test_gradients_match_finite_differences(self):
		config = ModelConfig(
			vocab_size=len(self.vocabulary), max_context=self.config.max_context, layers=1, width=16, heads=2
		)
		state = init_state(config)
		checks = gradient_check(state.model, collate(self.samples[:2], self.vocabulary), samples=100)
		self.assertEqual(len(checks), 100)
		self.assertLess(max(error for _, _, error in checks), 1e-3)

	def test_same_seed_same_weights(self):
		first, second = init_state(self.config), init_state(self.config)
		train(first, self.samples, self.vocabulary, steps=5, batch_size=4)
		train(second, self.samples, self.vocabulary, steps=5, batch_size=4)
		for a, b in zip(first.model.parameters(), second.model.parameters()):
			self.assertTrue(torch.equal(a, b))

	def test_overfits_ten_pieces(self):
		"""
		Ten short pieces are memorized within 2000 steps
		"""
		state = init_state(self.config)
		history = train(state, self.samples, self.vocabulary, steps=2000, batch_size=10, log_every=100, target_loss=0.1)
		self.assertLess(history[-1][1], 0.1)
		self.assertLess(history[-1][1], history[0][1])

	def test_checkpoint_resumes_exactly(self):
		state = init_state(self.config)
		train(state, self.samples, self.vocabulary, steps=3, batch_size=4)
		with tempfile.TemporaryDirectory() as directory:
			path = save_checkpoint(state, Path(directory) / "model.pt")
			restored = load_checkpoint(path)
			log = write_training_log([(1, 2.5), (3, 1.25)], Path(directory) / "training_log.csv")
			self.assertEqual(log.read_text().splitlines(), ["step,loss", "1,2.500000", "3,1.250000"])
		self.assertEqual(restored.step, 3)
		train(state, self.samples, self.vocabulary, steps=2, batch_size=4)
		train(restored, self.samples, self.vocabulary, steps=2, batch_size=4)
		for a, b in zip(state.model.parameters(), restored.model.parameters()):
			self.assertTrue(torch.equal(a, b))

	def test_loss_ignores_prefix_targets(self):
		"""
		The first body token is the first scored target: a model predicting it perfectly is not charged
		for the prefix
		"""
		state = init_state(self.config)
		batch = collate(self.samples[:1], self.vocabulary)
		loss = float(batch_loss(state.model, batch))
		self.assertGreater(loss, 0)
		prefix = len(self.samples[0].prefix)
		self.assertEqual(int(batch.mask[0, 1:].eq(0).sum()), len(self.samples[0].body))
		self.assertTrue(torch.all(batch.mask[0, 1:prefix] == 1))
