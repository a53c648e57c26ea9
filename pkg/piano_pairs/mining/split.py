import math
from typing import Callable, Iterable, List, Sequence, Set, Tuple, TypeVar

import numpy as np

from piano_pairs.exceptions import PreconditionError

T = TypeVar("T")


def validation_pieces(pieces: Iterable[str], fraction: float, seed: int) -> Set[str]:
	"""
	Seeded choice of held-out pieces

	Every variation and pair of a piece lands on the same side. At least one piece stays in training.

	Args:
		pieces: Piece ids, duplicates allowed
		fraction: Share of pieces held out, in [0, 1)
		seed: Seed of the choice; the result depends only on (set of pieces, fraction, seed)

	Returns:
		Set of validation piece ids
	"""
	if not 0 <= fraction < 1:
		raise PreconditionError(f"Validation fraction must lie in [0, 1), got {fraction}")
	unique = sorted(set(pieces))
	count = min(math.floor(fraction * len(unique) + 0.5), max(len(unique) - 1, 0))
	if count == 0:
		return set()
	chosen = np.random.default_rng(seed).permutation(len(unique))[:count]
	return {unique[index] for index in chosen.tolist()}


def split_by_piece(
	items: Sequence[T], piece: Callable[[T], str], fraction: float, seed: int
) -> Tuple[List[T], List[T]]:
	"""
	Returns:
		Tuple of (training items, validation items), both in input order
	"""
	held = validation_pieces((piece(item) for item in items), fraction, seed)
	train = [item for item in items if piece(item) not in held]
	validation = [item for item in items if piece(item) in held]
	return train, validation
