app_name = "piano_pairs"
app_title = "Piano Pairs"
app_description = "Difficulty-ordered piano score pairs from MusicXML: LMX tokens, conditioning, mining, adaptation"
app_license = "mit"

# Subcommands
# ------------------

# CLI subcommand -> dotted path of its handler; handlers take a PipelineConfig and return
# the names of the files they wrote. Resolved lazily so that `--help` never imports torch.
subcommands = {
	"gen-fixtures": "piano_pairs.cli.commands.gen_fixtures_command",
	"parse": "piano_pairs.cli.commands.parse_command",
	"lmx encode": "piano_pairs.cli.commands.lmx_encode_command",
	"lmx decode": "piano_pairs.cli.commands.lmx_decode_command",
	"skyline": "piano_pairs.cli.commands.skyline_command",
	"profile": "piano_pairs.cli.commands.profile_command",
	"features": "piano_pairs.cli.commands.features_command",
	"fit-gnb": "piano_pairs.cli.commands.fit_gnb_command",
	"classify": "piano_pairs.cli.commands.classify_command",
	"embed": "piano_pairs.cli.commands.embed_command",
	"mine-pairs": "piano_pairs.cli.commands.mine_pairs_command",
	"build-seqs": "piano_pairs.cli.commands.build_seqs_command",
	"train": "piano_pairs.cli.commands.train_command",
	"sample": "piano_pairs.cli.commands.sample_command",
	"evaluate": "piano_pairs.cli.commands.evaluate_command",
}

# Reports
# ------------------

reports = {
	"outcome_summary": "piano_pairs.evaluation.report.outcome_summary.outcome_summary.execute",
}

# Artifact names
# ------------------

output_files = {
	"manifest": "manifest.json",
	"parsed": "parsed.jsonl",
	"skipped": "skipped.jsonl",
	"tokens": "tokens.txt",
	"sources": "sources.txt",
	"vocabulary": "vocab.txt",
	"decode_report": "decode_report.jsonl",
	"skylines": "skylines.txt",
	"skyline_sources": "skylines.sources.txt",
	"profiles": "profiles.jsonl",
	"features": "features.jsonl",
	"gnb": "gnb.json",
	"labels": "labels.jsonl",
	"posteriors": "posteriors.jsonl",
	"embeddings": "embeddings.jsonl",
	"pairs": "pairs.jsonl",
	"pairs_val": "pairs_val.jsonl",
	"mining_report": "mining_report.json",
	"samples": "samples.jsonl",
	"samples_val": "samples_val.jsonl",
	"checkpoint": "model.pt",
	"training_log": "training_log.csv",
	"generations": "generations.jsonl",
	"outcomes": "outcomes.jsonl",
	"report": "report.csv",
	"report_genre": "report_genre.csv",
	"report_level": "report_level.csv",
	"report_markdown": "report.md",
}
