import math
from typing import List, Optional, Sequence

from piano_pairs.config import DROP_FRACTION
from piano_pairs.difficulty.gnb import DifficultyPosterior
from piano_pairs.exceptions import PreconditionError


def confidence_filter(
	posteriors: Sequence[DifficultyPosterior],
	drop_fraction: float = DROP_FRACTION,
	min_confidence: Optional[float] = None,
) -> List[int]:
	"""
	Drop the floor(drop_fraction * N) least confident items

	Args:
		posteriors: Classified items
		drop_fraction: Fraction to drop, in [0, 1)
		min_confidence: Optional absolute threshold applied after the quantile cut

	Returns:
		Kept indices in original order; among equal confidences the earlier index is kept
	"""
	if not posteriors:
		raise PreconditionError("confidence_filter needs at least one posterior")
	if not 0 <= drop_fraction < 1:
		raise PreconditionError(f"drop_fraction must lie in [0, 1), got {drop_fraction}")
	count = math.floor(drop_fraction * len(posteriors))
	order = sorted(range(len(posteriors)), key=lambda i: (posteriors[i].confidence, -i))
	dropped = set(order[:count])
	kept = [i for i in range(len(posteriors)) if i not in dropped]
	if min_confidence is not None:
		kept = [i for i in kept if posteriors[i].confidence >= min_confidence]
	return kept
