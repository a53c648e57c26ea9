from piano_pairs.lmx.codec import DecodeIssue, delinearize, delinearize_with_report, linearize
from piano_pairs.lmx.io import read_token_file, write_token_file
from piano_pairs.lmx.vocabulary import (
	BOS,
	EOS,
	HARMONY,
	PAD,
	SEP,
	SPECIALS,
	TokenSequence,
	Vocabulary,
	build_vocabulary,
	level_token,
)
