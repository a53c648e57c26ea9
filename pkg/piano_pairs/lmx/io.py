from pathlib import Path
from typing import Iterable, List, Union

from piano_pairs import hooks
from piano_pairs.exceptions import PreconditionError
from piano_pairs.lmx.vocabulary import TokenSequence

TOKENS_FILE = hooks.output_files["tokens"]
SOURCES_FILE = hooks.output_files["sources"]
VOCABULARY_FILE = hooks.output_files["vocabulary"]


def write_token_file(sequences: Iterable[TokenSequence], path: Union[str, Path]) -> Path:
	"""
	Write one score per line, tokens space-separated, and a companion sources file with one source id per line

	Args:
		sequences: Token sequences in corpus order
		path: Token file path; the sources file is written next to it

	Returns:
		Path of the token file
	"""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	sequences = list(sequences)
	path.write_text("".join(sequence.text() + "\n" for sequence in sequences), encoding="utf-8")
	sources_path(path).write_text(
		"".join((sequence.source_id or "") + "\n" for sequence in sequences), encoding="utf-8"
	)
	return path


def read_token_file(path: Union[str, Path]) -> List[TokenSequence]:
	path = Path(path)
	lines = path.read_text(encoding="utf-8").splitlines()
	companion = sources_path(path)
	if companion.exists():
		sources = companion.read_text(encoding="utf-8").splitlines()
		if len(sources) != len(lines):
			raise PreconditionError(f"{companion} has {len(sources)} ids for {len(lines)} sequences")
	else:
		sources = [f"{path.stem}:{index}" for index in range(len(lines))]
	return [TokenSequence(tuple(line.split()), source or None) for line, source in zip(lines, sources)]


def sources_path(token_path: Path) -> Path:
	if token_path.name == TOKENS_FILE:
		return token_path.with_name(SOURCES_FILE)
	return token_path.with_suffix(".sources.txt")
