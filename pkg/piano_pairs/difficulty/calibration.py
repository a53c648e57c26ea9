import math
from typing import Sequence, Tuple

import numpy as np

from piano_pairs.difficulty.gnb import GnbModel, log_joint
from piano_pairs.exceptions import PreconditionError
from piano_pairs.logging import log_warning, logger

TEMPERATURE_BOUNDS = (0.05, 20.0)
_INVERSE_PHI = (math.sqrt(5) - 1) / 2


def negative_log_likelihood(joint: np.ndarray, targets: np.ndarray, temperature: float) -> float:
	scaled = joint / temperature
	peak = scaled.max(axis=1, keepdims=True)
	normalizer = peak[:, 0] + np.log(np.exp(scaled - peak).sum(axis=1))
	return float(np.sum(normalizer - scaled[np.arange(len(targets)), targets]))


def golden_section(objective, low: float, high: float, tolerance: float = 1e-5, max_iterations: int = 200) -> float:
	"""
	Minimize a unimodal function on [low, high]
	"""
	a, b = low, high
	c = b - _INVERSE_PHI * (b - a)
	d = a + _INVERSE_PHI * (b - a)
	fc, fd = objective(c), objective(d)
	for _ in range(max_iterations):
		if b - a <= tolerance:
			break
		if fc <= fd:
			b, d, fd = d, c, fc
			c = b - _INVERSE_PHI * (b - a)
			fc = objective(c)
		else:
			a, c, fc = c, d, fd
			d = a + _INVERSE_PHI * (b - a)
			fd = objective(d)
	return (a + b) / 2


def fit_temperature(
	model: GnbModel,
	features: Sequence,
	labels: Sequence[int],
	bounds: Tuple[float, float] = TEMPERATURE_BOUNDS,
) -> GnbModel:
	"""
	Temperature scaling: pick the temperature minimizing held-out negative log-likelihood

	Args:
		model: Fitted model
		features: Held-out feature vectors
		labels: Held-out levels

	Returns:
		Copy of the model with the fitted temperature; means, variances and priors unchanged
	"""
	if len(features) == 0 or len(features) != len(labels):
		raise PreconditionError("Held-out set must be nonempty and aligned with its labels")
	joint = log_joint(model, features)
	targets = np.asarray([model.levels.index(int(label)) for label in labels])
	supported = np.isfinite(joint[np.arange(len(targets)), targets])
	if not supported.all():
		log_warning(
			"difficulty", None, "held-out labels with zero prior ignored", count=int((~supported).sum())
		)
	if not supported.any():
		return model
	joint, targets = joint[supported], targets[supported]
	temperature = golden_section(lambda t: negative_log_likelihood(joint, targets, t), *bounds)
	logger("difficulty").info(f"Fitted temperature {temperature:.4f} on {len(targets)} held-out samples")
	return model.with_temperature(temperature)
