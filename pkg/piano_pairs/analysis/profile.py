from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from piano_pairs.config import DEFAULT_SEED, NOISE_SCALE
from piano_pairs.exceptions import DegenerateProfileError, PreconditionError
from piano_pairs.score.model import Score

PITCH_CLASSES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")


@dataclass(frozen=True)
class PitchClassProfile:
	weights: Tuple[float, ...]

	def __post_init__(self):
		if len(self.weights) != 12:
			raise PreconditionError(f"Pitch-class profile needs 12 weights, got {len(self.weights)}")

	def as_array(self) -> np.ndarray:
		return np.asarray(self.weights, dtype=np.float64)

	@classmethod
	def from_array(cls, values) -> "PitchClassProfile":
		return cls(tuple(float(value) for value in values))


def pitch_class_profile(score: Score) -> PitchClassProfile:
	"""
	Duration-weighted histogram of pitch classes, normalized to sum to 1

	Raises:
		DegenerateProfileError: no pitched note
	"""
	weights = np.zeros(12, dtype=np.float64)
	for note in score.notes:
		weights[note.pitch.pitch_class] += float(note.duration)
	total = weights.sum()
	if total <= 0:
		raise DegenerateProfileError(f"No pitched note in {score.metadata.source_id or 'score'}")
	return PitchClassProfile.from_array(weights / total)


def perturbation(
	profile: PitchClassProfile, noise_scale: float = NOISE_SCALE, seed: Optional[int] = DEFAULT_SEED
) -> np.ndarray:
	"""
	Pre-normalization weights clip(p + eps, 0, 1), eps_i uniform on [-noise_scale * p_i, noise_scale * p_i]
	"""
	p = profile.as_array()
	rng = np.random.default_rng(seed)
	noise = rng.uniform(-noise_scale * p, noise_scale * p)
	return np.clip(p + noise, 0.0, 1.0)


def perturb_profile(
	profile: PitchClassProfile, noise_scale: float = NOISE_SCALE, seed: Optional[int] = DEFAULT_SEED
) -> PitchClassProfile:
	"""
	Bounded multiplicative noise on a profile, renormalized

	Args:
		profile: Valid profile
		noise_scale: Relative half-width of the uniform noise, in [0, 1)
		seed: Seed of the numpy generator; equal seeds give equal output

	Returns:
		Perturbed profile summing to 1
	"""
	if not 0 <= noise_scale < 1:
		raise PreconditionError(f"noise_scale must lie in [0, 1), got {noise_scale}")
	if noise_scale == 0:
		return profile
	perturbed = perturbation(profile, noise_scale, seed)
	return PitchClassProfile.from_array(perturbed / perturbed.sum())
