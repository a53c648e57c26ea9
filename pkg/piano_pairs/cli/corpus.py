from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Tuple, Union

from tqdm import tqdm

from piano_pairs.exceptions import PianoPairsError, PreconditionError
from piano_pairs.logging import log_skip
from piano_pairs.score.model import Score
from piano_pairs.score.parser import parse_file
from piano_pairs.score.validation import validate_two_staff

SCORE_SUFFIXES = (".musicxml", ".xml", ".mxl")


def list_scores(corpus_dir: Union[str, Path]) -> List[Path]:
	corpus_dir = Path(corpus_dir)
	if not corpus_dir.is_dir():
		raise PreconditionError(f"Corpus directory {corpus_dir} does not exist")
	return sorted(path for path in corpus_dir.iterdir() if path.suffix.lower() in SCORE_SUFFIXES)


def _load(path: Path):
	try:
		return validate_two_staff(parse_file(path)), None
	except PianoPairsError as e:
		return None, {"action": "skip", "reason": f"{type(e).__name__}: {e}", "source": path.name}


def load_corpus(corpus_dir: Union[str, Path], jobs: int = 1) -> Tuple[List[Score], List[Dict]]:
	"""
	Parse and validate every score of a directory, in file-name order

	Returns:
		Tuple of (eligible scores, skip report of the ineligible ones)
	"""
	paths = list_scores(corpus_dir)
	if jobs > 1:
		with ThreadPoolExecutor(max_workers=jobs) as pool:
			results = list(pool.map(_load, paths))
	else:
		results = [_load(path) for path in tqdm(paths, desc="parse", disable=len(paths) < 100)]
	scores, skipped = [], []
	for score, skip in results:
		if skip is None:
			scores.append(score)
		else:
			log_skip("score", skip["source"], skip["reason"])
			skipped.append(skip)
	return scores, skipped


def piece_of(source_id: str) -> str:
	"""
	Piece id of a variation id `piece#vNNN`; original ids map to themselves
	"""
	return source_id.split("#", 1)[0]
