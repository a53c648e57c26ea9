import argparse
import sys
from pathlib import Path
from typing import Callable, List, Optional

from piano_pairs import __version__, hooks
from piano_pairs.cli.manifest import write_manifest
from piano_pairs.config import (
	DEFAULT_SEED,
	MAX_ADAPTATION_LENGTH,
	SAMPLING_TEMPERATURE,
	SAMPLING_TOP_K,
	VARIATIONS_PER_PIECE,
	VOCABULARY_LIMIT,
	PipelineConfig,
)
from piano_pairs.exceptions import PianoPairsError
from piano_pairs.logging import set_level
from piano_pairs.utils import get_attr

# argument names holding input paths; their digests go into the manifest
INPUT_ARGUMENTS = (
	"corpus_dir",
	"model_path",
	"vocab_path",
	"embeddings_path",
	"tokens",
	"features",
	"labels",
	"posteriors",
	"pairs",
	"samples",
	"variations",
	"records",
	"init_from",
)


class ArgumentParser(argparse.ArgumentParser):
	"""
	Usage errors as a single `error:` line and exit status 2
	"""

	def error(self, message: str):
		self.exit(2, f"error: UsageError: {message}\n")


def _common() -> argparse.ArgumentParser:
	common = argparse.ArgumentParser(add_help=False)
	common.add_argument("--output-dir", default=None, help="Directory receiving the outputs and manifest.json")
	common.add_argument("--seed", type=int, default=None, help=f"Seed of every random choice (default {DEFAULT_SEED})")
	common.add_argument("--jobs", type=int, default=None, help="Worker threads for per-piece work")
	common.add_argument("--verbose", action="store_true", help="Debug logging")
	return common


def _add(subparsers, name: str, handler: str, common, help: str) -> argparse.ArgumentParser:
	parser = subparsers.add_parser(name, parents=[common], help=help)
	parser.set_defaults(handler=handler)
	return parser


def build_parser() -> ArgumentParser:
	common = _common()
	parser = ArgumentParser(prog="piano-pairs", description=hooks.app_description)
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

	p = _add(subparsers, "gen-fixtures", "gen-fixtures", common, "Write deterministic synthetic two-staff scores")
	p.add_argument("--pieces", type=int, default=20)
	p.add_argument("--measures", type=int, default=4)

	p = _add(subparsers, "parse", "parse", common, "Parse a corpus and report eligibility")
	p.add_argument("--corpus-dir", required=True)

	lmx = subparsers.add_parser("lmx", help="Linearized MusicXML tokens")
	lmx_commands = lmx.add_subparsers(dest="lmx_command", required=True, parser_class=ArgumentParser)
	p = _add(lmx_commands, "encode", "lmx encode", common, "Linearize a corpus and build the vocabulary")
	p.add_argument("--corpus-dir", required=True)
	p.add_argument("--vocab-limit", type=int, default=VOCABULARY_LIMIT)
	p = _add(lmx_commands, "decode", "lmx decode", common, "Rebuild MusicXML files from a token file")
	p.add_argument("--tokens", required=True)
	p.add_argument("--lenient", action="store_true", help="Skip malformed spans instead of rejecting the sequence")

	for name, help in (
		("skyline", "Melody skylines"),
		("profile", "Pitch-class profiles"),
		("features", "Difficulty feature vectors"),
		("embed", "Baseline style embeddings"),
	):
		p = _add(subparsers, name, name, common, help)
		p.add_argument("--corpus-dir")
		p.add_argument("--tokens", help="Token file to analyse instead of a corpus")
		if name == "profile":
			p.add_argument("--perturb", action="store_true")
			p.add_argument("--noise-scale", type=float)

	p = _add(subparsers, "fit-gnb", "fit-gnb", common, "Fit the Gaussian naive Bayes difficulty classifier")
	p.add_argument("--features", required=True)
	p.add_argument("--labels", help="JSONL of {id, level}; synthetic levels when omitted")
	p.add_argument("--held-out-fraction", type=float, default=0.2)
	p.add_argument("--variance-floor", type=float)

	p = _add(subparsers, "classify", "classify", common, "Difficulty posteriors")
	p.add_argument("--features", required=True)
	p.add_argument("--model-path", required=True)

	p = _add(subparsers, "mine-pairs", "mine-pairs", common, "Mine difficulty-ordered variation pairs")
	p.add_argument("--tokens", required=True)
	p.add_argument("--posteriors", required=True)
	p.add_argument("--embeddings-path", required=True)
	p.add_argument("--vocab-path", required=True)
	p.add_argument("--strategy", choices=("random", "filtered"))
	p.add_argument("--min-gap", type=int)
	p.add_argument("--drop-fraction", type=float)
	p.add_argument("--keep-fraction", type=float)
	p.add_argument("--per-level-pair", action="store_true")
	p.add_argument("--min-confidence", type=float)
	p.add_argument("--val-fraction", type=float, default=0.0, help="Share of pieces held out")

	p = _add(subparsers, "build-seqs", "build-seqs", common, "Training sequences")
	p.add_argument("--kind", choices=("unconditional", "conditioned", "adaptation"), default="conditioned")
	p.add_argument("--vocab-path", required=True)
	p.add_argument("--corpus-dir")
	p.add_argument("--tokens")
	p.add_argument("--pairs")
	p.add_argument("--max-len", type=int, default=MAX_ADAPTATION_LENGTH)
	p.add_argument("--no-level-tokens", action="store_true")
	p.add_argument("--perturb", action="store_true")
	p.add_argument("--val-fraction", type=float, default=0.0, help="Share of pieces held out")
	p.add_argument("--noise-scale", type=float)

	p = _add(subparsers, "train", "train", common, "Train the decoder")
	p.add_argument("--samples", required=True)
	p.add_argument("--init-from", help="Checkpoint to continue from instead of a fresh model")
	p.add_argument("--vocab-path", required=True)
	p.add_argument("--steps", type=int, default=500)
	p.add_argument("--batch-size", type=int, default=8)
	p.add_argument("--layers", type=int, default=2)
	p.add_argument("--width", type=int, default=64)
	p.add_argument("--heads", type=int, default=4)
	p.add_argument("--max-context", type=int, default=1024)
	p.add_argument("--learning-rate", type=float, default=6e-4)
	p.add_argument("--target-loss", type=float)
	p.add_argument("--log-every", type=int, default=50)
	p.add_argument("--progress", action="store_true")

	p = _add(subparsers, "sample", "sample", common, "Generate variations")
	p.add_argument("--model-path", required=True)
	p.add_argument("--vocab-path", required=True)
	p.add_argument("--corpus-dir")
	p.add_argument("--tokens")
	p.add_argument("--variations", type=int, default=VARIATIONS_PER_PIECE)
	p.add_argument("--temperature", type=float, default=SAMPLING_TEMPERATURE)
	p.add_argument("--top-k", type=int, default=SAMPLING_TOP_K)
	p.add_argument("--max-new-tokens", type=int)
	p.add_argument("--noise-scale", type=float)
	p.add_argument("--adapt", action="store_true", help="Hard -> easy prompts instead of conditioned ones")
	p.add_argument("--posteriors", help="Posteriors of the originals, required with --adapt")
	p.add_argument("--target-gap", type=int)
	p.add_argument("--no-level-tokens", action="store_true")

	p = _add(subparsers, "evaluate", "evaluate", common, "Easier/similar/harder outcomes of variations")
	p.add_argument("--model-path", required=True, help="Fitted difficulty classifier")
	p.add_argument("--corpus-dir", help="Originals")
	p.add_argument("--tokens", help="Originals as a token file")
	p.add_argument("--variations", required=True, help="Token file of generated variations")
	p.add_argument("--strategy", choices=("random", "filtered"))
	p.add_argument("--gap", type=int)
	p.add_argument("--records", help="Existing outcomes.jsonl merged into the report")
	return parser


def resolve(name: str) -> Callable:
	return get_attr(hooks.subcommands[name])


def _inputs(args: argparse.Namespace) -> List[Path]:
	values = vars(args)
	return [Path(values[name]) for name in INPUT_ARGUMENTS if isinstance(values.get(name), str)]


def main(argv: Optional[List[str]] = None) -> int:
	args = build_parser().parse_args(argv)
	set_level(args.verbose)
	name = args.handler
	inputs = _inputs(args)
	for key in ("command", "lmx_command"):
		if hasattr(args, key):
			delattr(args, key)
	try:
		config = PipelineConfig.from_args(args)
		outputs = resolve(name)(config)
		write_manifest(config.output_dir, name, config, inputs, outputs)
	except (PianoPairsError, OSError) as e:
		message = " ".join(str(e).split())
		print(f"error: {type(e).__name__}: {message}", file=sys.stderr)
		return 1
	return 0
