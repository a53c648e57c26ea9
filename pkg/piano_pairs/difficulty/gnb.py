from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from piano_pairs.config import LEVELS
from piano_pairs.exceptions import NonFiniteFeatureError, PreconditionError, UnderSupportedClassError
from piano_pairs.utils import read_json, write_json

# Variance floor relative to the mean per-feature variance of the training set
RELATIVE_VARIANCE_FLOOR = 1e-6
MIN_VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class GnbModel:
	"""
	Gaussian Naive Bayes over the nine difficulty levels. Classes absent from training keep prior 0.
	"""

	priors: np.ndarray
	means: np.ndarray
	variances: np.ndarray
	variance_floor: float
	temperature: float = 1.0
	levels: Tuple[int, ...] = LEVELS

	@property
	def feature_count(self) -> int:
		return self.means.shape[1]

	def with_temperature(self, temperature: float) -> "GnbModel":
		if not temperature > 0:
			raise PreconditionError(f"Temperature must be positive, got {temperature}")
		return replace(self, temperature=float(temperature))

	def as_dict(self) -> dict:
		return {
			"levels": list(self.levels),
			"priors": self.priors.tolist(),
			"means": self.means.tolist(),
			"variances": self.variances.tolist(),
			"variance_floor": self.variance_floor,
			"temperature": self.temperature,
		}

	@classmethod
	def from_dict(cls, data: dict) -> "GnbModel":
		return cls(
			priors=np.asarray(data["priors"], dtype=np.float64),
			means=np.asarray(data["means"], dtype=np.float64),
			variances=np.asarray(data["variances"], dtype=np.float64),
			variance_floor=float(data["variance_floor"]),
			temperature=float(data.get("temperature", 1.0)),
			levels=tuple(data.get("levels", LEVELS)),
		)


@dataclass(frozen=True)
class DifficultyPosterior:
	probs: Tuple[float, ...]
	label: int
	confidence: float


def _matrix(features: Iterable) -> np.ndarray:
	rows = [np.asarray(f.as_array() if hasattr(f, "as_array") else f, dtype=np.float64) for f in features]
	if not rows:
		raise PreconditionError("No feature vectors given")
	matrix = np.vstack(rows)
	if not np.all(np.isfinite(matrix)):
		raise NonFiniteFeatureError("Feature matrix contains non-finite values")
	return matrix


def fit(features: Sequence, labels: Sequence[int], variance_floor: Optional[float] = None) -> GnbModel:
	"""
	Maximum-likelihood Gaussian Naive Bayes fit

	Args:
		features: Feature vectors (FeatureVector or array-like), one per sample
		labels: Difficulty level (1-9) per sample
		variance_floor: Lower bound on every variance; defaults to 1e-6 x the mean feature variance

	Returns:
		GnbModel with empirical priors and temperature 1

	Raises:
		UnderSupportedClassError: a represented class has fewer than 2 samples
	"""
	matrix = _matrix(features)
	labels = np.asarray(labels)
	if len(labels) != len(matrix):
		raise PreconditionError(f"{len(matrix)} feature vectors but {len(labels)} labels")
	unknown = sorted(set(labels.tolist()) - set(LEVELS))
	if unknown:
		raise PreconditionError(f"Labels outside {LEVELS[0]}-{LEVELS[-1]}: {unknown}")

	if variance_floor is None:
		variance_floor = RELATIVE_VARIANCE_FLOOR * float(matrix.var(axis=0).mean())
	variance_floor = max(float(variance_floor), MIN_VARIANCE_FLOOR)

	width = matrix.shape[1]
	priors = np.zeros(len(LEVELS))
	means = np.zeros((len(LEVELS), width))
	variances = np.ones((len(LEVELS), width))
	for index, level in enumerate(LEVELS):
		rows = matrix[labels == level]
		if len(rows) == 0:
			continue
		if len(rows) < 2:
			raise UnderSupportedClassError(f"Level {level} has {len(rows)} sample; at least 2 are required")
		priors[index] = len(rows) / len(matrix)
		means[index] = rows.mean(axis=0)
		variances[index] = rows.var(axis=0)
	variances = np.maximum(variances, variance_floor)
	return GnbModel(priors=priors, means=means, variances=variances, variance_floor=variance_floor)


def log_joint(model: GnbModel, features: Iterable) -> np.ndarray:
	"""
	Unscaled log prior + summed Gaussian log densities, shape (samples, levels)
	"""
	matrix = _matrix(features)
	if matrix.shape[1] != model.feature_count:
		raise PreconditionError(f"Model expects {model.feature_count} features, got {matrix.shape[1]}")
	with np.errstate(divide="ignore"):
		log_priors = np.log(model.priors)
	densities = norm.logpdf(matrix[:, None, :], loc=model.means[None], scale=np.sqrt(model.variances)[None])
	return log_priors[None, :] + densities.sum(axis=2)


def log_posteriors(model: GnbModel, features: Iterable, temperature: Optional[float] = None) -> np.ndarray:
	scaled = log_joint(model, features) / (temperature or model.temperature)
	return scaled - logsumexp(scaled, axis=1, keepdims=True)


def posteriors(model: GnbModel, features: Iterable) -> List[DifficultyPosterior]:
	results = []
	for row in np.exp(log_posteriors(model, features)):
		best = int(np.argmax(row))
		results.append(DifficultyPosterior(tuple(float(p) for p in row), model.levels[best], float(row[best])))
	return results


def posterior(model: GnbModel, f) -> DifficultyPosterior:
	"""
	Calibrated posterior over the nine levels for one feature vector

	Raises:
		NonFiniteFeatureError: feature vector contains NaN or infinity
	"""
	return posteriors(model, [f])[0]


def save_model(model: GnbModel, path: Union[str, Path]) -> Path:
	return write_json(model.as_dict(), path)


def load_model(path: Union[str, Path]) -> GnbModel:
	return GnbModel.from_dict(read_json(path))
