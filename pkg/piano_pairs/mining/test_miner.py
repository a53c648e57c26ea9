import itertools
import json
import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from piano_pairs.difficulty.gnb import DifficultyPosterior
from piano_pairs.exceptions import MissingAnnotationError, PreconditionError
from piano_pairs.lmx.vocabulary import SPECIALS, TokenSequence, Vocabulary
from piano_pairs.mining.export import PairRecord, export_pairs, import_pairs
from piano_pairs.mining.miner import keep_most_similar, mean_distance, mine
from piano_pairs.mining.pairs import Variation, enumerate_pairs
from piano_pairs.similarity.embedding import StyleEmbedding

TOKENS = ("measure", "C5", "D5", "quarter", "whole", "staff:1")


def _variation(piece, index, label, rng, confidence=0.9, embedding=True) -> Variation:
	sequence = TokenSequence(("measure", "C5" if index % 2 else "D5", "whole", "staff:1"), f"{piece}#v{index:03d}")
	return Variation(
		piece_id=piece,
		variation_id=sequence.source_id,
		sequence=sequence,
		posterior=DifficultyPosterior((confidence,), label, confidence),
		embedding=StyleEmbedding(rng.normal(size=8), "test") if embedding else None,
	)


class TestEnumeratePairs(unittest.TestCase):
	def test_exhaustive_small_multisets(self):
		"""
		Every label multiset of size up to 8 over levels 1-4 yields exactly the ordered pairs with a
		large enough gap, harder first, in (harder index, easier index) order
		"""
		rng = np.random.default_rng(0)
		for size in range(9):
			for labels in itertools.combinations_with_replacement(range(1, 5), size):
				variations = [_variation("p", i, label, rng, embedding=False) for i, label in enumerate(labels)]
				for min_gap in (1, 2):
					pairs = enumerate_pairs(variations, min_gap)
					expected = [
						(i, j)
						for i in range(size)
						for j in range(size)
						if labels[i] - labels[j] >= min_gap
					]
					found = [(variations.index(p.harder), variations.index(p.easier)) for p in pairs]
					self.assertEqual(found, expected)
					self.assertTrue(all(p.gap == p.harder.label - p.easier.label >= min_gap for p in pairs))
					self.assertTrue(all(p.similarity is None for p in pairs))

	def test_one_piece_only(self):
		rng = np.random.default_rng(0)
		with self.assertRaises(PreconditionError):
			enumerate_pairs([_variation("a", 0, 1, rng), _variation("b", 0, 2, rng)])

	def test_missing_posterior(self):
		variation = Variation("p", "p#v000", TokenSequence(("measure",)))
		with self.assertRaises(MissingAnnotationError):
			enumerate_pairs([variation, variation])


class TestMine(unittest.TestCase):
	def setUp(self):
		rng = np.random.default_rng(42)
		self.variations = []
		for piece in ("piece_b", "piece_a", "piece_c"):
			for index in range(12):
				label = 1 + index % 5
				confidence = float(rng.uniform(0.3, 1.0))
				self.variations.append(_variation(piece, index, label, rng, confidence))

	def _ids(self, pairs):
		return [(p.harder.variation_id, p.easier.variation_id) for p in pairs]

	def test_filtered_pairs_are_a_subset_of_random(self):
		for min_gap in (1, 2):
			random_pairs, random_report = mine(self.variations, "random", min_gap)
			filtered_pairs, report = mine(self.variations, "filtered", min_gap, drop_fraction=0.25, keep_fraction=0.5)
			self.assertTrue(set(self._ids(filtered_pairs)) <= set(self._ids(random_pairs)))
			self.assertGreaterEqual(report.raw_pairs, report.confident_pairs)
			self.assertGreaterEqual(report.confident_pairs, report.kept_pairs)
			self.assertEqual(report.raw_pairs, random_report.kept_pairs)
			self.assertEqual(report.confident_variations, 36 - math.floor(0.25 * 36))

	def test_random_order_is_by_piece_then_enumeration(self):
		pairs, report = mine(self.variations, "random", 1)
		pieces = [pair.piece_id for pair in pairs]
		self.assertEqual(pieces, sorted(pieces))
		self.assertEqual(report.pieces, 3)

	def test_keep_count_per_piece(self):
		"""
		Without confidence drops each piece keeps ceil(keep_fraction * n) of its pairs
		"""
		raw, _ = mine(self.variations, "random", 1)
		filtered, _ = mine(self.variations, "filtered", 1, drop_fraction=0.0, keep_fraction=0.3)
		for piece in ("piece_a", "piece_b", "piece_c"):
			n = sum(1 for pair in raw if pair.piece_id == piece)
			kept = sum(1 for pair in filtered if pair.piece_id == piece)
			self.assertEqual(kept, math.ceil(0.3 * n))

	def test_filtered_pairs_are_closer_with_equal_pieces(self):
		_, report = mine(self.variations, "filtered", 1, drop_fraction=0.0, keep_fraction=0.5)
		self.assertLessEqual(report.mean_distance["filtered"], report.mean_distance["random"])

	def test_most_similar_within_each_group(self):
		raw, _ = mine(self.variations, "random", 1)
		kept = keep_most_similar(raw, 0.5, per_level_pair=True)
		for pair in raw:
			if pair in kept:
				continue
			group = [p for p in kept if p.piece_id == pair.piece_id and p.level_pair == pair.level_pair]
			self.assertTrue(all(p.similarity >= pair.similarity for p in group))

	def test_parallel_enumeration_is_identical(self):
		serial, _ = mine(self.variations, "filtered", 1, jobs=1)
		parallel, _ = mine(self.variations, "filtered", 1, jobs=4)
		self.assertEqual(self._ids(serial), self._ids(parallel))

	def test_missing_embedding(self):
		rng = np.random.default_rng(1)
		with self.assertRaises(MissingAnnotationError):
			mine([_variation("p", 0, 1, rng, embedding=False), _variation("p", 1, 3, rng)])

	def test_empty_input(self):
		pairs, report = mine([], "filtered", 1)
		self.assertEqual(pairs, [])
		self.assertIsNone(mean_distance(pairs))
		self.assertEqual(report.kept_pairs, 0)


class TestExport(unittest.TestCase):
	def test_round_trip_in_canonical_order(self):
		rng = np.random.default_rng(3)
		variations = [_variation("p", index, 1 + index % 3, rng) for index in range(6)]
		pairs, _ = mine(variations, "random", 1)
		vocabulary = Vocabulary([*SPECIALS, *sorted(TOKENS)])
		with tempfile.TemporaryDirectory() as directory:
			path = Path(directory) / "pairs.jsonl"
			self.assertEqual(export_pairs(pairs, path, vocabulary), len(pairs))
			records = import_pairs(path, vocabulary)
		expected = sorted((PairRecord.from_pair(pair) for pair in pairs), key=lambda r: (r.piece, r.hard_id, r.easy_id))
		self.assertEqual(records, expected)

	def test_missing_similarity_is_written_as_null(self):
		"""
		Pairs without embeddings export strict JSON with a null similarity
		"""
		rng = np.random.default_rng(4)
		variations = [_variation("p", index, 1 + index, rng, embedding=False) for index in range(3)]
		pairs = enumerate_pairs(variations)
		vocabulary = Vocabulary([*SPECIALS, *sorted(TOKENS)])

		def reject(constant):
			raise ValueError(f"non-standard JSON constant {constant}")

		with tempfile.TemporaryDirectory() as directory:
			path = Path(directory) / "pairs.jsonl"
			export_pairs(pairs, path, vocabulary)
			lines = path.read_text(encoding="utf-8").splitlines()
			records = import_pairs(path, vocabulary)
		self.assertEqual(len(lines), 3)
		self.assertTrue(all(json.loads(line, parse_constant=reject)["sim"] is None for line in lines))
		self.assertTrue(all(record.sim is None for record in records))
