import math
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from piano_pairs.config import DROP_FRACTION, KEEP_FRACTION, MIN_GAP
from piano_pairs.difficulty.filtering import confidence_filter
from piano_pairs.exceptions import MissingAnnotationError, PreconditionError
from piano_pairs.logging import log_progress
from piano_pairs.mining.pairs import Variation, VariationPair, enumerate_pairs

STRATEGIES = ("random", "filtered")


@dataclass
class MiningReport:
	"""
	Stage counts are non-increasing: raw_pairs >= confident_pairs >= kept_pairs
	"""

	strategy: str
	min_gap: int
	pieces: int
	variations: int
	confident_variations: int
	raw_pairs: int
	confident_pairs: int
	kept_pairs: int
	mean_distance: Dict[str, Optional[float]] = field(default_factory=dict)
	mean_distance_by_gap: Dict[str, Dict[int, float]] = field(default_factory=dict)
	pairs_by_gap: Dict[int, int] = field(default_factory=dict)

	def as_dict(self) -> dict:
		data = asdict(self)
		data["mean_distance_by_gap"] = {
			strategy: {str(gap): value for gap, value in by_gap.items()}
			for strategy, by_gap in self.mean_distance_by_gap.items()
		}
		data["pairs_by_gap"] = {str(gap): count for gap, count in self.pairs_by_gap.items()}
		return data


def mean_distance(pairs: Sequence[VariationPair]) -> Optional[float]:
	if not pairs:
		return None
	return float(np.mean([pair.distance for pair in pairs]))


def _by_gap(pairs: Sequence[VariationPair]) -> Dict[int, float]:
	gaps = sorted({pair.gap for pair in pairs})
	return {gap: mean_distance([pair for pair in pairs if pair.gap == gap]) for gap in gaps}


def keep_most_similar(
	pairs: Sequence[VariationPair], keep_fraction: float = KEEP_FRACTION, per_level_pair: bool = False
) -> List[VariationPair]:
	"""
	Keep the ceil(keep_fraction * n) most similar pairs of each group, in their original order

	Groups are whole pieces, or (piece, harder level, easier level) when `per_level_pair` is set.
	Equal similarities keep the earlier pair.
	"""
	groups: Dict[tuple, List[int]] = OrderedDict()
	for index, pair in enumerate(pairs):
		key = (pair.piece_id, *pair.level_pair) if per_level_pair else (pair.piece_id,)
		groups.setdefault(key, []).append(index)
	kept = set()
	for indices in groups.values():
		count = math.ceil(keep_fraction * len(indices))
		ranked = sorted(indices, key=lambda i: -pairs[i].similarity)
		kept.update(ranked[:count])
	return [pair for index, pair in enumerate(pairs) if index in kept]


def _check(variations: Sequence[Variation]) -> None:
	missing = [v.variation_id for v in variations if v.posterior is None or v.embedding is None]
	if missing:
		raise MissingAnnotationError(
			f"{len(missing)} variations lack a posterior or embedding: {', '.join(missing[:10])}"
		)


def _group(variations: Sequence[Variation]) -> Dict[str, List[Variation]]:
	pieces: Dict[str, List[Variation]] = {}
	for variation in variations:
		pieces.setdefault(variation.piece_id, []).append(variation)
	return {piece: pieces[piece] for piece in sorted(pieces)}


def _enumerate_all(pieces: Dict[str, List[Variation]], min_gap: int, jobs: int) -> List[VariationPair]:
	if jobs > 1:
		with ThreadPoolExecutor(max_workers=jobs) as pool:
			results = list(pool.map(lambda group: enumerate_pairs(group, min_gap), pieces.values()))
	else:
		results = [enumerate_pairs(group, min_gap) for group in pieces.values()]
	return [pair for result in results for pair in result]


def mine(
	variations: Sequence[Variation],
	strategy: str = "filtered",
	min_gap: int = MIN_GAP,
	drop_fraction: float = DROP_FRACTION,
	keep_fraction: float = KEEP_FRACTION,
	per_level_pair: bool = False,
	min_confidence: Optional[float] = None,
	jobs: int = 1,
) -> Tuple[List[VariationPair], MiningReport]:
	"""
	Mine difficulty-ordered pairs with the random or filtered strategy

	Args:
		variations: Classified and embedded variations of any number of pieces
		strategy: "random" keeps every ordered pair; "filtered" drops the least confident variations
			corpus-wide, then keeps the most similar pairs per piece
		min_gap: Smallest label difference of a pair
		drop_fraction: Share of least confident variations removed by the filtered strategy
		keep_fraction: Share of most similar pairs kept per piece by the filtered strategy
		per_level_pair: Apply the similarity cut per (piece, level pair) instead of per piece
		jobs: Worker threads for per-piece enumeration; output does not depend on it

	Returns:
		Tuple of (pairs ordered by piece id then enumeration order, MiningReport)
	"""
	if strategy not in STRATEGIES:
		raise PreconditionError(f"Unknown mining strategy: {strategy}")
	_check(variations)
	pieces = _group(variations)
	raw = _enumerate_all(pieces, min_gap, jobs)

	if variations:
		kept_indices = set(confidence_filter([v.posterior for v in variations], drop_fraction, min_confidence))
	else:
		kept_indices = set()
	confident_variations = [v for index, v in enumerate(variations) if index in kept_indices]
	confident = _enumerate_all(_group(confident_variations), min_gap, jobs)
	filtered = keep_most_similar(confident, keep_fraction, per_level_pair)

	pairs = filtered if strategy == "filtered" else raw
	report = MiningReport(
		strategy=strategy,
		min_gap=min_gap,
		pieces=len(pieces),
		variations=len(variations),
		confident_variations=len(confident_variations) if strategy == "filtered" else len(variations),
		raw_pairs=len(raw),
		confident_pairs=len(confident) if strategy == "filtered" else len(raw),
		kept_pairs=len(pairs),
		mean_distance={"random": mean_distance(raw), "filtered": mean_distance(filtered)},
		mean_distance_by_gap={"random": _by_gap(raw), "filtered": _by_gap(filtered)},
		pairs_by_gap={gap: sum(1 for pair in pairs if pair.gap == gap) for gap in sorted({p.gap for p in pairs})},
	)
	log_progress(
		"mining",
		strategy=strategy,
		min_gap=min_gap,
		raw_pairs=report.raw_pairs,
		confident_pairs=report.confident_pairs,
		kept_pairs=report.kept_pairs,
	)
	return pairs, report
