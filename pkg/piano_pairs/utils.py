import hashlib
import importlib
import json
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, List, Union


def write_jsonl(records: Iterable[Dict[str, Any]], path: Union[str, Path]) -> int:
	"""
	Write records as newline-delimited JSON, keys in insertion order

	Returns:
		Number of records written
	"""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	count = 0
	with path.open("w", encoding="utf-8") as handle:
		for record in records:
			handle.write(json.dumps(record, ensure_ascii=False, allow_nan=False) + "\n")
			count += 1
	return count


def iter_jsonl(path: Union[str, Path]) -> Iterator[Dict[str, Any]]:
	with Path(path).open(encoding="utf-8") as handle:
		for line in handle:
			line = line.strip()
			if line:
				yield json.loads(line)


def read_jsonl(path: Union[str, Path]) -> List[Dict[str, Any]]:
	return list(iter_jsonl(path))


def write_json(data: Any, path: Union[str, Path]) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
	return path


def read_json(path: Union[str, Path]) -> Any:
	return json.loads(Path(path).read_text(encoding="utf-8"))


def sha256_file(path: Union[str, Path]) -> str:
	digest = hashlib.sha256()
	with Path(path).open("rb") as handle:
		for block in iter(lambda: handle.read(1 << 16), b""):
			digest.update(block)
	return digest.hexdigest()


def get_attr(path: str) -> Callable:
	"""
	Resolve a dotted `module.attribute` path, as the hooks registry stores them
	"""
	module, _, attribute = path.rpartition(".")
	return getattr(importlib.import_module(module), attribute)
