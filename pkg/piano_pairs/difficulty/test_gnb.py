import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

from piano_pairs.difficulty.calibration import fit_temperature, golden_section
from piano_pairs.difficulty.gnb import (
	DifficultyPosterior,
	fit,
	load_model,
	log_posteriors,
	posterior,
	posteriors,
	save_model,
)
from piano_pairs.difficulty.filtering import confidence_filter
from piano_pairs.difficulty.labels import synthetic_levels
from piano_pairs.exceptions import NonFiniteFeatureError, PreconditionError, UnderSupportedClassError


def _gaussian(x: float, mean: float, var: float) -> float:
	return math.exp(-((x - mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)


class TestGnb(unittest.TestCase):
	def setUp(self):
		self.features = [[1.0, 10.0], [2.0, 12.0], [3.0, 11.0], [6.0, 20.0], [7.0, 22.0], [8.0, 25.0], [9.0, 23.0]]
		self.labels = [2, 2, 2, 5, 5, 5, 5]

	def test_matches_brute_force(self):
		"""
		Posterior equals prior x product of Gaussian densities, normalized, for every level
		"""
		model = fit(self.features, self.labels)
		x = [4.0, 15.0]
		scores = {}
		for level in (2, 5):
			rows = [f for f, label in zip(self.features, self.labels) if label == level]
			prior = len(rows) / len(self.features)
			density = 1.0
			for column in range(2):
				values = [row[column] for row in rows]
				mean = sum(values) / len(values)
				var = sum((v - mean) ** 2 for v in values) / len(values)
				density *= _gaussian(x[column], mean, var)
			scores[level] = prior * density
		total = sum(scores.values())
		result = posterior(model, x)
		self.assertAlmostEqual(result.probs[1], scores[2] / total, places=9)
		self.assertAlmostEqual(result.probs[4], scores[5] / total, places=9)
		self.assertEqual(result.probs[0], 0.0)
		self.assertAlmostEqual(sum(result.probs), 1.0)
		self.assertEqual(result.label, 2 if scores[2] > scores[5] else 5)

	def test_random_instances_match_brute_force(self):
		"""
		1,000 random fits, each checked against prior x Gaussian densities computed by hand in log space
		"""
		rng = np.random.default_rng(11)
		for instance in range(1000):
			levels = sorted(rng.choice(np.arange(1, 10), size=int(rng.integers(2, 5)), replace=False).tolist())
			width = int(rng.integers(1, 4))
			features, labels = [], []
			for level in levels:
				center = rng.normal(0.0, 3.0, size=width)
				for _ in range(int(rng.integers(2, 6))):
					features.append((center + rng.normal(0.0, 1.0, size=width)).tolist())
					labels.append(level)
			model = fit(features, labels)
			x = rng.normal(0.0, 3.0, size=width).tolist()
			scores = {}
			for level in levels:
				rows = [f for f, label in zip(features, labels) if label == level]
				score = math.log(len(rows) / len(features))
				for column in range(width):
					values = [row[column] for row in rows]
					mean = sum(values) / len(values)
					var = max(sum((v - mean) ** 2 for v in values) / len(values), model.variance_floor)
					score += -((x[column] - mean) ** 2) / (2 * var) - 0.5 * math.log(2 * math.pi * var)
				scores[level] = score
			top = max(scores.values())
			total = sum(math.exp(score - top) for score in scores.values())
			result = posterior(model, x)
			with self.subTest(instance=instance):
				for level in range(1, 10):
					expected = math.exp(scores[level] - top) / total if level in scores else 0.0
					self.assertAlmostEqual(result.probs[level - 1], expected, places=9)

	def test_high_temperature_flattens_to_uniform(self):
		"""
		Represented levels approach equal probability; absent levels stay at zero
		"""
		model = fit(self.features, self.labels).with_temperature(1e12)
		for x in self.features + [[100.0, -50.0]]:
			probs = posterior(model, x).probs
			self.assertAlmostEqual(probs[1], 0.5, places=6)
			self.assertAlmostEqual(probs[4], 0.5, places=6)
			self.assertEqual(sum(p for index, p in enumerate(probs) if index not in (1, 4)), 0.0)

	def test_symmetric_classes(self):
		"""
		Mirror-image classes split the midpoint evenly and swap posteriors under reflection
		"""
		features = [[-2.0, 1.0], [-3.0, -1.0], [-4.0, 0.0], [2.0, 1.0], [3.0, -1.0], [4.0, 0.0]]
		model = fit(features, [3, 3, 3, 7, 7, 7])
		middle = posterior(model, [0.0, 0.3]).probs
		self.assertAlmostEqual(middle[2], 0.5, places=12)
		self.assertAlmostEqual(middle[6], 0.5, places=12)
		for value in (0.5, 1.7, 3.2):
			left, right = posterior(model, [-value, 0.2]).probs, posterior(model, [value, 0.2]).probs
			self.assertAlmostEqual(left[2], right[6], places=12)
			self.assertAlmostEqual(left[6], right[2], places=12)
			self.assertEqual(posterior(model, [value, 0.2]).label, 7)

	def test_under_supported_class(self):
		with self.assertRaises(UnderSupportedClassError):
			fit(self.features + [[0.0, 0.0]], self.labels + [9])

	def test_labels_outside_range(self):
		with self.assertRaises(PreconditionError):
			fit(self.features, [0] * len(self.features))

	def test_non_finite_features(self):
		model = fit(self.features, self.labels)
		with self.assertRaises(NonFiniteFeatureError):
			posterior(model, [float("inf"), 1.0])

	def test_constant_feature_uses_the_variance_floor(self):
		features = [[1.0, 5.0], [2.0, 5.0], [3.0, 5.0], [4.0, 5.0]]
		model = fit(features, [1, 1, 3, 3])
		self.assertTrue(np.all(model.variances >= model.variance_floor))
		self.assertGreater(model.variance_floor, 0)
		self.assertTrue(np.all(np.isfinite(log_posteriors(model, features))))

	def test_temperature_keeps_the_argmax(self):
		model = fit(self.features, self.labels)
		hot = model.with_temperature(5.0)
		for x in self.features + [[4.5, 16.0]]:
			cold_result, hot_result = posterior(model, x), posterior(hot, x)
			self.assertEqual(cold_result.label, hot_result.label)
			self.assertLessEqual(hot_result.confidence, cold_result.confidence + 1e-12)

	def test_well_specified_data_calibrates_near_one(self):
		"""
		Data drawn from the model family needs no rescaling
		"""
		rng = np.random.default_rng(0)
		means = {1: (0.0, 0.0), 4: (1.5, 1.0), 8: (3.0, -1.0)}

		def draw(count):
			labels = rng.choice(list(means), size=count)
			features = np.vstack([rng.normal(means[label], 1.0) for label in labels])
			return features, labels.tolist()

		train_x, train_y = draw(3000)
		held_x, held_y = draw(3000)
		model = fit_temperature(fit(train_x, train_y), held_x, held_y)
		self.assertAlmostEqual(model.temperature, 1.0, delta=0.1)

	def test_golden_section_finds_the_minimum(self):
		self.assertAlmostEqual(golden_section(lambda t: (t - 2.5) ** 2, 0.05, 20.0), 2.5, places=3)

	def test_save_and_load(self):
		model = fit(self.features, self.labels).with_temperature(1.7)
		with tempfile.TemporaryDirectory() as directory:
			loaded = load_model(save_model(model, Path(directory) / "gnb.json"))
		self.assertEqual(loaded.temperature, 1.7)
		self.assertEqual(
			[p.probs for p in posteriors(loaded, self.features)], [p.probs for p in posteriors(model, self.features)]
		)


class TestConfidenceFilter(unittest.TestCase):
	def _posterior(self, confidence: float) -> DifficultyPosterior:
		return DifficultyPosterior((confidence,), 1, confidence)

	def test_drops_a_quarter(self):
		items = [self._posterior(c) for c in np.linspace(0.2, 0.99, 100)]
		kept = confidence_filter(items, 0.25)
		self.assertEqual(len(kept), 75)
		self.assertEqual(kept, list(range(25, 100)))

	def test_ties_keep_the_earlier_index(self):
		"""
		Among equal confidences the later items are dropped first
		"""
		items = [self._posterior(0.5) for _ in range(4)]
		self.assertEqual(confidence_filter(items, 0.5), [0, 1])

	def test_absolute_threshold(self):
		items = [self._posterior(c) for c in (0.9, 0.3, 0.6, 0.8)]
		self.assertEqual(confidence_filter(items, 0.0, min_confidence=0.6), [0, 2, 3])

	def test_invalid_fraction(self):
		with self.assertRaises(PreconditionError):
			confidence_filter([self._posterior(0.5)], 1.0)


class TestSyntheticLevels(unittest.TestCase):
	def test_quantiles_cover_every_level(self):
		features = [[float(i)] * 11 + [float(20 - i)] for i in range(20)]
		levels = synthetic_levels(features)
		self.assertEqual(levels, sorted(levels))
		self.assertEqual(set(levels), set(range(1, 10)))
		self.assertTrue(all(levels.count(level) >= 2 for level in range(1, 10)))
