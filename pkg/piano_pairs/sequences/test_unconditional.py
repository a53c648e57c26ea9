import tempfile
import unittest
from pathlib import Path

import torch

from piano_pairs.cli.fixtures import generate_piece
from piano_pairs.exceptions import PreconditionError
from piano_pairs.lmx.codec import linearize
from piano_pairs.lmx.vocabulary import BOS, EOS, TokenSequence, build_vocabulary
from piano_pairs.model.training import collate
from piano_pairs.sequences.io import load_samples, write_samples
from piano_pairs.sequences.unconditional import UnconditionalSample, build_unconditional


class TestUnconditional(unittest.TestCase):
	def setUp(self):
		self.body = linearize(generate_piece(0, seed=1, measures=2))
		self.vocabulary = build_vocabulary([self.body])

	def test_layout_and_mask(self):
		"""
		Every target after BOS carries loss
		"""
		sample = build_unconditional(self.body)
		self.assertEqual(sample.tokens, (BOS, *self.body.tokens, EOS))
		self.assertEqual(sample.mask, (1,) + (0,) * (len(self.body) + 1))
		self.assertEqual(sample.source_id, self.body.source_id)

	def test_collates_without_harmony(self):
		batch = collate([build_unconditional(self.body)], self.vocabulary)
		self.assertEqual(int(batch.harmony_position[0]), -1)
		self.assertTrue(torch.all(batch.harmony == 0))
		self.assertEqual(int(batch.mask[0, 1:].sum()), 0)

	def test_length_and_empty_body(self):
		with self.assertRaises(PreconditionError):
			build_unconditional(self.body, max_len=len(self.body) + 1)
		self.assertEqual(len(build_unconditional(self.body, max_len=len(self.body) + 2)), len(self.body) + 2)
		with self.assertRaises(PreconditionError):
			build_unconditional(TokenSequence(()))

	def test_samples_file_round_trip(self):
		sample = build_unconditional(self.body)
		with tempfile.TemporaryDirectory() as directory:
			path = Path(directory) / "samples.jsonl"
			write_samples([sample], path, self.vocabulary)
			restored = load_samples(path, self.vocabulary)
		self.assertEqual(len(restored), 1)
		self.assertIsInstance(restored[0], UnconditionalSample)
		self.assertEqual(restored[0], sample)
