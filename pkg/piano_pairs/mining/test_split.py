import unittest

from piano_pairs.exceptions import PreconditionError
from piano_pairs.mining.split import split_by_piece, validation_pieces

PIECES = [f"piece_{index:04d}" for index in range(20)]


class TestSplit(unittest.TestCase):
	def test_seeded_and_order_free(self):
		"""
		The held-out set depends only on the set of pieces, the fraction and the seed
		"""
		first = validation_pieces(PIECES, 0.25, seed=5)
		self.assertEqual(len(first), 5)
		self.assertEqual(first, validation_pieces(reversed(PIECES * 2), 0.25, seed=5))
		self.assertTrue(first <= set(PIECES))

	def test_items_of_a_piece_stay_together(self):
		items = [(piece, variation) for piece in PIECES for variation in range(3)]
		train, validation = split_by_piece(items, lambda item: item[0], 0.3, seed=1)
		self.assertEqual(len(train) + len(validation), len(items))
		self.assertFalse({piece for piece, _ in train} & {piece for piece, _ in validation})
		self.assertEqual(train, [item for item in items if item in train])
		self.assertEqual(len({piece for piece, _ in validation}), 6)

	def test_training_keeps_a_piece(self):
		self.assertEqual(len(validation_pieces(PIECES[:2], 0.9, seed=0)), 1)
		self.assertEqual(validation_pieces(PIECES[:1], 0.5, seed=0), set())
		self.assertEqual(validation_pieces([], 0.5, seed=0), set())
		self.assertEqual(validation_pieces(PIECES, 0.0, seed=0), set())

	def test_fraction_bounds(self):
		for fraction in (-0.1, 1.0, 1.5):
			with self.subTest(fraction=fraction):
				with self.assertRaises(PreconditionError):
					validation_pieces(PIECES, fraction, seed=0)
