from pathlib import Path
from typing import Iterable, List, Union

from piano_pairs import hooks
from piano_pairs.exceptions import PreconditionError
from piano_pairs.lmx.vocabulary import Vocabulary
from piano_pairs.sequences.adaptation import AdaptationSample
from piano_pairs.sequences.conditioned import ConditionedSample
from piano_pairs.sequences.unconditional import UnconditionalSample
from piano_pairs.utils import iter_jsonl, write_jsonl

SAMPLES_FILE = hooks.output_files["samples"]
_KINDS = {
	"unconditional": UnconditionalSample,
	"conditioned": ConditionedSample,
	"adaptation": AdaptationSample,
}

Sample = Union[UnconditionalSample, ConditionedSample, AdaptationSample]


def write_samples(samples: Iterable[Sample], path: Union[str, Path], vocabulary: Vocabulary) -> int:
	return write_jsonl((sample.to_record(vocabulary) for sample in samples), path)


def load_samples(path: Union[str, Path], vocabulary: Vocabulary) -> List[Sample]:
	samples = []
	for record in iter_jsonl(path):
		kind = _KINDS.get(record.get("kind"))
		if kind is None:
			raise PreconditionError(f"Unknown sample kind {record.get('kind')!r} in {path}")
		samples.append(kind.from_record(record, vocabulary))
	return samples
