from pathlib import Path
from typing import Iterable, Optional, Union

from piano_pairs import __version__, hooks
from piano_pairs.config import PipelineConfig
from piano_pairs.utils import sha256_file, write_json

MANIFEST_FILE = hooks.output_files["manifest"]


def write_manifest(
	output_dir: Union[str, Path],
	command: str,
	config: PipelineConfig,
	inputs: Iterable[Union[str, Path]] = (),
	outputs: Optional[Iterable[str]] = None,
) -> Path:
	"""
	Record what produced an output directory: command, config, seed and input digests. No timestamps,
	so identical runs write identical manifests.
	"""
	digests = {}
	for path in inputs:
		path = Path(path)
		if path.is_dir():
			for child in sorted(p for p in path.rglob("*") if p.is_file() and p.name != MANIFEST_FILE):
				digests[str(child)] = sha256_file(child)
		elif path.exists():
			digests[str(path)] = sha256_file(path)
	manifest = {
		"command": command,
		"version": __version__,
		"seed": config.seed,
		"config": config.as_dict(),
		"inputs": digests,
		"outputs": sorted(outputs or ()),
	}
	return write_json(manifest, Path(output_dir) / MANIFEST_FILE)
