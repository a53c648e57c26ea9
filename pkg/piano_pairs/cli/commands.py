import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from piano_pairs import hooks
from piano_pairs.analysis.export import export_features, export_profiles, load_features
from piano_pairs.analysis.features import extract_features
from piano_pairs.analysis.profile import perturb_profile, pitch_class_profile
from piano_pairs.analysis.skyline import melody_skyline
from piano_pairs.cli.corpus import list_scores, load_corpus, piece_of
from piano_pairs.cli.fixtures import write_fixtures
from piano_pairs.config import (
	MAX_ADAPTATION_LENGTH,
	SAMPLING_TEMPERATURE,
	SAMPLING_TOP_K,
	VARIATIONS_PER_PIECE,
	VOCABULARY_LIMIT,
	PipelineConfig,
)
from piano_pairs.difficulty.calibration import fit_temperature
from piano_pairs.difficulty.gnb import DifficultyPosterior, fit, load_model, posterior, posteriors, save_model
from piano_pairs.difficulty.labels import synthetic_levels
from piano_pairs.evaluation.outcomes import OutcomeRecord, load_records, write_records
from piano_pairs.evaluation.rendering import render_report
from piano_pairs.exceptions import ConfigurationError, PianoPairsError, PreconditionError
from piano_pairs.lmx.codec import delinearize, delinearize_with_report, linearize
from piano_pairs.lmx.io import read_token_file, write_token_file
from piano_pairs.lmx.vocabulary import TokenSequence, Vocabulary, build_vocabulary
from piano_pairs.logging import log_progress, log_skip
from piano_pairs.mining.export import export_pairs, import_pairs
from piano_pairs.mining.miner import mine
from piano_pairs.mining.pairs import Variation
from piano_pairs.mining.split import split_by_piece
from piano_pairs.score.model import Score
from piano_pairs.score.parser import parse_file
from piano_pairs.score.validation import is_eligible, validate_two_staff
from piano_pairs.score.writer import write_file
from piano_pairs.sequences.adaptation import adaptation_prompt, build_adaptation_batch
from piano_pairs.sequences.conditioned import build_conditioned
from piano_pairs.sequences.io import write_samples
from piano_pairs.sequences.unconditional import build_unconditional
from piano_pairs.similarity.baseline import PROVIDER_NAME, baseline_embed
from piano_pairs.similarity.embedding import cosine_distance
from piano_pairs.similarity.store import load_precomputed, save_embeddings
from piano_pairs.utils import get_attr, iter_jsonl, write_json, write_jsonl

FILES = hooks.output_files


@dataclass
class Source:
	"""
	One input score: parsed from the corpus or decoded from a token file
	"""

	source_id: str
	score: Score
	sequence: Optional[TokenSequence] = None

	@property
	def genre(self) -> str:
		return self.score.metadata.genre


def _output_dir(config: PipelineConfig) -> Path:
	path = Path(config.output_dir)
	path.mkdir(parents=True, exist_ok=True)
	return path


def _require(config: PipelineConfig, name: str):
	value = getattr(config, name, None) if name in config.__dataclass_fields__ else config.extra.get(name)
	if value is None:
		raise PreconditionError(f"--{name.replace('_', '-')} is required")
	return value


def _decoded_sources(path) -> List[Source]:
	sources = []
	for sequence in read_token_file(path):
		try:
			score = validate_two_staff(delinearize(sequence))
		except PianoPairsError as e:
			log_skip("cli", sequence.source_id, f"{type(e).__name__}: {e}")
			continue
		sources.append(Source(sequence.source_id, score, sequence))
	return sources


def load_sources(config: PipelineConfig, need_sequence: bool = False) -> List[Source]:
	"""
	Inputs of the analysis commands: `--tokens` wins over `--corpus-dir`
	"""
	if config.extra.get("tokens"):
		return _decoded_sources(config.extra["tokens"])
	scores, _ = load_corpus(_require(config, "corpus_dir"), config.jobs)
	sources = []
	for score in scores:
		sequence = None
		if need_sequence:
			try:
				sequence = linearize(score)
			except PianoPairsError as e:
				log_skip("cli", score.metadata.source_id, f"{type(e).__name__}: {e}")
				continue
		sources.append(Source(score.metadata.source_id, score, sequence))
	return sources


def _read_posteriors(path) -> Dict[str, DifficultyPosterior]:
	return {
		record["id"]: DifficultyPosterior(tuple(record["probs"]), int(record["label"]), float(record["confidence"]))
		for record in iter_jsonl(path)
	}


# Corpus
# ------------------


def gen_fixtures_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	paths = write_fixtures(config.extra.get("pieces", 20), config.seed, out, config.extra.get("measures", 4))
	return [path.name for path in paths]


def parse_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	records = []
	for path in list_scores(_require(config, "corpus_dir")):
		try:
			score = parse_file(path)
		except PianoPairsError as e:
			records.append({"id": path.stem, "action": "skip", "reason": f"{type(e).__name__}: {e}"})
			continue
		records.append(
			{
				"id": score.metadata.source_id,
				"title": score.metadata.title,
				"genre": score.metadata.genre,
				"measures": len(score.measures),
				"events": len(score.events),
				"staves": score.staves,
				**is_eligible(score),
			}
		)
	write_jsonl(records, out / FILES["parsed"])
	return [FILES["parsed"]]


def lmx_encode_command(config: PipelineConfig) -> List[str]:
	"""
	Linearize the corpus and build the vocabulary; skylines are included so conditioning prefixes encode
	"""
	out = _output_dir(config)
	scores, skipped = load_corpus(_require(config, "corpus_dir"), config.jobs)
	sequences, skylines = [], []
	for score in scores:
		try:
			sequences.append(linearize(score))
		except PianoPairsError as e:
			log_skip("lmx", score.metadata.source_id, f"{type(e).__name__}: {e}")
			skipped.append({"action": "skip", "reason": str(e), "source": score.metadata.source_id})
			continue
		try:
			skylines.append(melody_skyline(score).tokens())
		except PianoPairsError:
			pass
	vocabulary = build_vocabulary([*sequences, *skylines], config.extra.get("vocab_limit", VOCABULARY_LIMIT))
	write_token_file(sequences, out / FILES["tokens"])
	vocabulary.save(out / FILES["vocabulary"])
	write_jsonl(skipped, out / FILES["skipped"])
	log_progress("lmx", sequences=len(sequences), vocabulary=len(vocabulary), skipped=len(skipped))
	return [FILES["tokens"], FILES["sources"], FILES["vocabulary"], FILES["skipped"]]


def lmx_decode_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	outputs, report = [], []
	for sequence in read_token_file(_require(config, "tokens")):
		name = f"{(sequence.source_id or 'score').replace('#', '_').replace(':', '_')}.musicxml"
		try:
			if config.extra.get("lenient"):
				score, issues = delinearize_with_report(sequence)
			else:
				score, issues = delinearize(sequence), []
		except PianoPairsError as e:
			report.append({"id": sequence.source_id, "action": "skip", "reason": f"{type(e).__name__}: {e}"})
			continue
		write_file(score, out / name)
		outputs.append(name)
		report.append(
			{
				"id": sequence.source_id,
				"action": "keep",
				"file": name,
				"issues": [{"index": issue.index, "message": issue.message} for issue in issues],
			}
		)
	write_jsonl(report, out / FILES["decode_report"])
	return [*outputs, FILES["decode_report"]]


# Analysis
# ------------------


def skyline_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	skylines = []
	for source in load_sources(config):
		try:
			skylines.append(melody_skyline(source.score).tokens())
		except PianoPairsError as e:
			log_skip("analysis", source.source_id, str(e))
	write_token_file(skylines, out / FILES["skylines"])
	return [FILES["skylines"], FILES["skyline_sources"]]


def profile_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	profiles = []
	for index, source in enumerate(load_sources(config)):
		try:
			profile = pitch_class_profile(source.score)
		except PianoPairsError as e:
			log_skip("analysis", source.source_id, str(e))
			continue
		if config.extra.get("perturb"):
			profile = perturb_profile(profile, config.noise_scale, config.seed + index)
		profiles.append((source.source_id, profile))
	export_profiles(profiles, out / FILES["profiles"])
	return [FILES["profiles"]]


def features_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	features = []
	for source in load_sources(config):
		try:
			features.append((source.source_id, extract_features(source.score)))
		except PianoPairsError as e:
			log_skip("analysis", source.source_id, str(e))
	export_features(features, out / FILES["features"])
	return [FILES["features"]]


# Difficulty
# ------------------


def held_out_split(labels: List[int], fraction: float, seed: int):
	"""
	Stratified split keeping at least two training items per level

	Returns:
		Tuple of (training indices, held-out indices), both sorted
	"""
	rng = np.random.default_rng(seed)
	train, held = [], []
	for level in sorted(set(labels)):
		members = [i for i, label in enumerate(labels) if label == level]
		count = min(math.floor(fraction * len(members)), max(len(members) - 2, 0))
		chosen = set(rng.permutation(members)[:count].tolist())
		held.extend(i for i in members if i in chosen)
		train.extend(i for i in members if i not in chosen)
	return sorted(train), sorted(held)


def fit_gnb_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	features = load_features(_require(config, "features"))
	ids = list(features)
	vectors = [features[source_id] for source_id in ids]
	if config.extra.get("labels"):
		given = {record["id"]: int(record["level"]) for record in iter_jsonl(config.extra["labels"])}
		missing = [source_id for source_id in ids if source_id not in given]
		if missing:
			raise PreconditionError(f"No level for {len(missing)} scores, e.g. {missing[0]}")
		labels = [given[source_id] for source_id in ids]
	else:
		labels = synthetic_levels(vectors)
	train, held = held_out_split(labels, config.extra.get("held_out_fraction", 0.2), config.seed)
	model = fit([vectors[i] for i in train], [labels[i] for i in train], config.extra.get("variance_floor"))
	if held:
		model = fit_temperature(model, [vectors[i] for i in held], [labels[i] for i in held])
	save_model(model, out / FILES["gnb"])
	write_jsonl(
		(
			{"id": source_id, "level": label, "split": "held_out" if index in set(held) else "train"}
			for index, (source_id, label) in enumerate(zip(ids, labels))
		),
		out / FILES["labels"],
	)
	return [FILES["gnb"], FILES["labels"]]


def classify_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	model = load_model(_require(config, "model_path"))
	features = load_features(_require(config, "features"))
	results = posteriors(model, list(features.values())) if features else []
	write_jsonl(
		(
			{"id": source_id, "probs": list(result.probs), "label": result.label, "confidence": result.confidence}
			for source_id, result in zip(features, results)
		),
		out / FILES["posteriors"],
	)
	return [FILES["posteriors"]]


# Similarity and mining
# ------------------


def embed_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	embeddings = []
	for source in load_sources(config, need_sequence=True):
		try:
			embeddings.append((source.source_id, baseline_embed(source.sequence, source.score)))
		except PianoPairsError as e:
			log_skip("similarity", source.source_id, str(e))
	save_embeddings(embeddings, out / FILES["embeddings"])
	return [FILES["embeddings"]]


def mine_pairs_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	vocabulary = Vocabulary.load(_require(config, "vocab_path"))
	found = _read_posteriors(_require(config, "posteriors"))
	embeddings = load_precomputed(_require(config, "embeddings_path"), PROVIDER_NAME)
	variations = [
		Variation(
			piece_id=piece_of(sequence.source_id),
			variation_id=sequence.source_id,
			sequence=sequence,
			posterior=found.get(sequence.source_id),
			embedding=embeddings.get(sequence.source_id),
		)
		for sequence in read_token_file(_require(config, "tokens"))
	]
	pairs, report = mine(
		variations,
		strategy=config.strategy,
		min_gap=config.min_gap,
		drop_fraction=config.drop_fraction,
		keep_fraction=config.keep_fraction,
		per_level_pair=bool(config.extra.get("per_level_pair")),
		min_confidence=config.extra.get("min_confidence"),
		jobs=config.jobs,
	)
	summary = report.as_dict()
	outputs = [FILES["pairs"], FILES["mining_report"]]
	fraction = config.extra.get("val_fraction", 0.0)
	if fraction > 0:
		pairs, held = split_by_piece(pairs, lambda pair: pair.piece_id, fraction, config.seed)
		export_pairs(held, out / FILES["pairs_val"], vocabulary)
		summary["split"] = {
			"train_pairs": len(pairs),
			"validation_pairs": len(held),
			"validation_pieces": sorted({pair.piece_id for pair in held}),
		}
		outputs.append(FILES["pairs_val"])
	export_pairs(pairs, out / FILES["pairs"], vocabulary)
	write_json(summary, out / FILES["mining_report"])
	return outputs


def _piece_of_sample(sample) -> str:
	return getattr(sample, "piece_id", "") or piece_of(sample.source_id or "")


def build_seqs_command(config: PipelineConfig) -> List[str]:
	out = _output_dir(config)
	vocabulary = Vocabulary.load(_require(config, "vocab_path"))
	max_len = config.extra.get("max_len", MAX_ADAPTATION_LENGTH)
	kind = config.extra.get("kind", "conditioned")
	skipped: List[Dict] = []
	if kind == "adaptation":
		records = import_pairs(_require(config, "pairs"), vocabulary)
		samples, skipped = build_adaptation_batch(records, max_len, not config.extra.get("no_level_tokens"))
	else:
		samples = []
		for index, source in enumerate(load_sources(config, need_sequence=True)):
			try:
				if kind == "unconditional":
					samples.append(build_unconditional(source.sequence, max_len))
					continue
				profile = pitch_class_profile(source.score)
				if config.extra.get("perturb"):
					profile = perturb_profile(profile, config.noise_scale, config.seed + index)
				samples.append(build_conditioned(melody_skyline(source.score), profile, source.sequence, max_len))
			except PianoPairsError as e:
				log_skip("sequences", source.source_id, str(e))
				skipped.append({"action": "skip", "reason": str(e), "id": source.source_id})
	outputs = [FILES["samples"], FILES["skipped"]]
	fraction = config.extra.get("val_fraction", 0.0)
	if fraction > 0:
		samples, held = split_by_piece(samples, _piece_of_sample, fraction, config.seed)
		write_samples(held, out / FILES["samples_val"], vocabulary)
		outputs.append(FILES["samples_val"])
	write_samples(samples, out / FILES["samples"], vocabulary)
	write_jsonl(skipped, out / FILES["skipped"])
	log_progress("sequences", kind=kind, samples=len(samples), skipped=len(skipped))
	return outputs


# Model
# ------------------


def train_command(config: PipelineConfig) -> List[str]:
	import torch

	from piano_pairs.model.checkpoint import load_checkpoint, save_checkpoint
	from piano_pairs.model.config import ModelConfig
	from piano_pairs.model.training import init_state, train, write_training_log
	from piano_pairs.sequences.io import load_samples

	out = _output_dir(config)
	vocabulary = Vocabulary.load(_require(config, "vocab_path"))
	samples = load_samples(_require(config, "samples"), vocabulary)
	if not samples:
		raise PreconditionError("No training samples")
	torch.set_num_threads(1)
	longest = max(len(sample.tokens) for sample in samples)
	if config.extra.get("init_from"):
		# finetuning continues the earlier run: architecture, optimizer moments and step come from it
		state = load_checkpoint(config.extra["init_from"])
		if state.config.vocab_size != len(vocabulary):
			raise ConfigurationError(
				f"Checkpoint vocabulary of {state.config.vocab_size} tokens, samples use {len(vocabulary)}"
			)
		if state.config.max_context < longest:
			raise ConfigurationError(
				f"Checkpoint context {state.config.max_context} is shorter than the longest sample ({longest})"
			)
		log_progress("model", init_from=config.extra["init_from"], step=state.step)
	else:
		model_config = ModelConfig(
			vocab_size=len(vocabulary),
			max_context=max(config.extra.get("max_context", 1024), longest),
			layers=config.extra.get("layers", 2),
			width=config.extra.get("width", 64),
			heads=config.extra.get("heads", 4),
			seed=config.seed,
			learning_rate=config.extra.get("learning_rate", 6e-4),
		)
		state = init_state(model_config)
	history = train(
		state,
		samples,
		vocabulary,
		steps=config.extra.get("steps", 500),
		batch_size=config.extra.get("batch_size", 8),
		log_every=config.extra.get("log_every", 50),
		target_loss=config.extra.get("target_loss"),
		progress=bool(config.extra.get("progress")),
	)
	save_checkpoint(state, out / FILES["checkpoint"])
	write_training_log(history, out / FILES["training_log"])
	return [FILES["checkpoint"], FILES["training_log"]]


def sample_command(config: PipelineConfig) -> List[str]:
	"""
	Generate variations of every original; `--adapt` switches from conditioned to hard -> easy prompts
	"""
	from piano_pairs.model.checkpoint import load_checkpoint
	from piano_pairs.model.sampling import sample, validity_fraction

	out = _output_dir(config)
	vocabulary = Vocabulary.load(_require(config, "vocab_path"))
	model = load_checkpoint(_require(config, "model_path")).model
	count = config.extra.get("variations", VARIATIONS_PER_PIECE)
	adapt = bool(config.extra.get("adapt"))
	found = _read_posteriors(_require(config, "posteriors")) if adapt else {}
	valid, report = [], []
	for index, source in enumerate(load_sources(config, need_sequence=True)):
		if adapt:
			if source.source_id not in found:
				log_skip("sampling", source.source_id, "no difficulty posterior")
				continue
			level = found[source.source_id].label
			target = level - config.extra.get("target_gap", config.min_gap)
			if target < 1:
				log_skip("sampling", source.source_id, "already at the lowest level", level=level)
				continue
			with_levels = not config.extra.get("no_level_tokens")
			prompt = adaptation_prompt(
				source.sequence.tokens, level if with_levels else None, target if with_levels else None
			)
		else:
			profile = pitch_class_profile(source.score)
			if config.noise_scale > 0:
				profile = perturb_profile(profile, config.noise_scale, config.seed + index)
			prompt = build_conditioned(melody_skyline(source.score), profile, source.sequence)
		try:
			generations = sample(
				model,
				vocabulary,
				prompt,
				count,
				temperature=config.extra.get("temperature", SAMPLING_TEMPERATURE),
				top_k=config.extra.get("top_k", SAMPLING_TOP_K),
				seed=config.seed + index,
				max_new_tokens=config.extra.get("max_new_tokens"),
				source_id=source.source_id,
			)
		except PianoPairsError as e:
			log_skip("sampling", source.source_id, str(e))
			continue
		log_progress("sampling", piece=source.source_id, validity=f"{validity_fraction(generations):.3f}")
		for generation in generations:
			report.append(
				{
					"id": generation.sequence.source_id,
					"valid": generation.valid,
					"ended": generation.ended,
					"reason": generation.reason,
					"length": len(generation.sequence),
				}
			)
			if generation.valid:
				valid.append(generation.sequence)
	write_token_file(valid, out / FILES["tokens"])
	write_jsonl(report, out / FILES["generations"])
	return [FILES["tokens"], FILES["sources"], FILES["generations"]]


# Evaluation
# ------------------


def evaluate_command(config: PipelineConfig) -> List[str]:
	"""
	Classify originals and their variations, record easier/similar/harder outcomes and render the reports
	"""
	out = _output_dir(config)
	model = load_model(_require(config, "model_path"))
	originals = {}
	for source in load_sources(config, need_sequence=True):
		try:
			label = posterior(model, extract_features(source.score)).label
			originals[source.source_id] = (source, label, baseline_embed(source.sequence, source.score))
		except PianoPairsError as e:
			log_skip("evaluation", source.source_id, str(e))
	gap = config.extra.get("gap", config.min_gap)
	records = load_records(config.extra["records"]) if config.extra.get("records") else []
	for variation in _decoded_sources(_require(config, "variations")):
		piece = piece_of(variation.source_id)
		if piece not in originals:
			log_skip("evaluation", variation.source_id, "no matching original")
			continue
		original, level, embedding = originals[piece]
		try:
			predicted = posterior(model, extract_features(variation.score)).label
			distance = cosine_distance(embedding, baseline_embed(variation.sequence, variation.score))
		except PianoPairsError as e:
			log_skip("evaluation", variation.source_id, str(e))
			continue
		records.append(
			OutcomeRecord(
				piece_id=piece,
				variation_id=variation.source_id,
				original_level=level,
				predicted_level=predicted,
				distance=distance,
				genre=original.genre,
				strategy=config.strategy,
				gap=gap,
			)
		)
	write_records(records, out / FILES["outcomes"])
	outputs = [FILES["outcomes"]]
	outcome_summary = get_attr(hooks.reports["outcome_summary"])
	groupings = {
		"report": ("strategy", "gap"),
		"report_genre": ("strategy", "gap", "genre"),
		"report_level": ("strategy", "gap", "original_level"),
	}
	for key, group_by in groupings.items():
		_, rows = outcome_summary({"records": records, "group_by": group_by})
		(out / FILES[key]).write_text(render_report(rows, "csv", group_by), encoding="utf-8")
		outputs.append(FILES[key])
		if key == "report":
			markdown = render_report(rows, "markdown", group_by)
			(out / FILES["report_markdown"]).write_text(markdown, encoding="utf-8")
			outputs.append(FILES["report_markdown"])
	log_progress("evaluation", originals=len(originals), records=len(records))
	return outputs
