import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from piano_pairs.cli.fixtures import gen_fixtures
from piano_pairs.exceptions import EmbeddingFileError, EmbeddingMismatchError, ZeroNormError
from piano_pairs.lmx.codec import linearize
from piano_pairs.similarity.baseline import DIMENSION, PROVIDER_NAME, BaselineProvider, baseline_embed
from piano_pairs.similarity.embedding import EmbeddingProvider, StyleEmbedding, cosine_distance, cosine_similarity
from piano_pairs.similarity.store import PrecomputedProvider, load_precomputed, save_embeddings


class TestCosine(unittest.TestCase):
	def test_known_angles(self):
		a = StyleEmbedding(np.array([1.0, 0.0]), "p")
		b = StyleEmbedding(np.array([0.0, 2.0]), "p")
		c = StyleEmbedding(np.array([-3.0, 0.0]), "p")
		self.assertAlmostEqual(cosine_similarity(a, b), 0.0)
		self.assertAlmostEqual(cosine_similarity(a, c), -1.0)
		self.assertAlmostEqual(cosine_distance(a, a), 0.0)
		self.assertAlmostEqual(cosine_distance(a, c), 2.0)

	def test_mismatched_providers(self):
		with self.assertRaises(EmbeddingMismatchError):
			cosine_similarity(StyleEmbedding(np.ones(2), "p"), StyleEmbedding(np.ones(2), "q"))
		with self.assertRaises(EmbeddingMismatchError):
			cosine_similarity(StyleEmbedding(np.ones(2), "p"), StyleEmbedding(np.ones(3), "p"))

	def test_zero_vector(self):
		with self.assertRaises(ZeroNormError):
			StyleEmbedding(np.zeros(4), "p")


class TestBaseline(unittest.TestCase):
	def setUp(self):
		self.scores = gen_fixtures(6, seed=5)
		self.sequences = [linearize(score) for score in self.scores]

	def test_unit_norm_and_deterministic(self):
		for score, sequence in zip(self.scores, self.sequences):
			embedding = baseline_embed(sequence, score)
			self.assertEqual(embedding.dimension, DIMENSION)
			self.assertEqual(embedding.provider, PROVIDER_NAME)
			self.assertAlmostEqual(float(np.linalg.norm(embedding.vector)), 1.0)
			np.testing.assert_array_equal(embedding.vector, baseline_embed(sequence).vector)

	def test_identical_pieces_are_closest(self):
		embeddings = [baseline_embed(sequence) for sequence in self.sequences]
		for embedding in embeddings:
			self.assertAlmostEqual(cosine_distance(embedding, embedding), 0.0)
			self.assertTrue(all(0.0 <= cosine_distance(embedding, other) <= 2.0 for other in embeddings))

	def test_provider_protocol(self):
		self.assertIsInstance(BaselineProvider(), EmbeddingProvider)


class TestStore(unittest.TestCase):
	def test_round_trip(self):
		embeddings = {
			"a": StyleEmbedding(np.array([0.6, 0.8, 0.0]), "x"),
			"b": StyleEmbedding(np.array([1.0, 0.0, 0.0]), "x"),
		}
		with tempfile.TemporaryDirectory() as directory:
			path = Path(directory) / "embeddings.jsonl"
			self.assertEqual(save_embeddings(embeddings.items(), path), 2)
			loaded = load_precomputed(path)
			provider = PrecomputedProvider(loaded)
		self.assertEqual(sorted(loaded), ["a", "b"])
		np.testing.assert_array_equal(loaded["a"].vector, embeddings["a"].vector)
		self.assertEqual(provider.dimension, 3)
		self.assertAlmostEqual(cosine_similarity(loaded["a"], loaded["b"]), 0.6)

	def test_malformed_files(self):
		cases = {
			"duplicate": [{"id": "a", "dim": 2, "v": [1, 0]}, {"id": "a", "dim": 2, "v": [0, 1]}],
			"dimension": [{"id": "a", "dim": 3, "v": [1, 0]}],
			"inconsistent": [{"id": "a", "dim": 2, "v": [1, 0]}, {"id": "b", "dim": 3, "v": [1, 0, 0]}],
			"missing": [{"id": "a", "v": [1, 0]}],
			"zero": [{"id": "a", "dim": 2, "v": [0, 0]}],
		}
		for name, records in cases.items():
			with self.subTest(case=name), tempfile.TemporaryDirectory() as directory:
				path = Path(directory) / "bad.jsonl"
				path.write_text("".join(json.dumps(record) + "\n" for record in records), encoding="utf-8")
				with self.assertRaises(EmbeddingFileError):
					load_precomputed(path)
