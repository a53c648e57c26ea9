from pathlib import Path
from typing import Union

import torch

from piano_pairs.exceptions import ConfigurationError
from piano_pairs.model.config import ModelConfig
from piano_pairs.model.training import TrainState, init_state

CHECKPOINT_VERSION = 1


def save_checkpoint(state: TrainState, path: Union[str, Path]) -> Path:
	"""
	Versioned checkpoint: config, parameters, optimizer moments, step and RNG state
	"""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	torch.save(
		{
			"version": CHECKPOINT_VERSION,
			"config": state.config.as_dict(),
			"model": state.model.state_dict(),
			"optimizer": state.optimizer.state_dict(),
			"step": state.step,
			"generator": state.generator.get_state(),
		},
		path,
	)
	return path


def load_checkpoint(path: Union[str, Path]) -> TrainState:
	payload = torch.load(Path(path), map_location="cpu", weights_only=True)
	if payload.get("version") != CHECKPOINT_VERSION:
		raise ConfigurationError(f"Unsupported checkpoint version {payload.get('version')} in {path}")
	state = init_state(ModelConfig(**payload["config"]))
	state.model.load_state_dict(payload["model"])
	state.optimizer.load_state_dict(payload["optimizer"])
	state.generator.set_state(payload["generator"])
	state.step = int(payload["step"])
	return state
