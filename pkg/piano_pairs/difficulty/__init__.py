from piano_pairs.difficulty.calibration import fit_temperature
from piano_pairs.difficulty.filtering import confidence_filter
from piano_pairs.difficulty.gnb import (
	DifficultyPosterior,
	GnbModel,
	fit,
	load_model,
	posterior,
	posteriors,
	save_model,
)
from piano_pairs.difficulty.labels import synthetic_levels
