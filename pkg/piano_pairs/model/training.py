import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import torch
from tqdm import tqdm

from piano_pairs.exceptions import PreconditionError, TrainingDivergedError
from piano_pairs.lmx.vocabulary import Vocabulary
from piano_pairs.logging import logger
from piano_pairs.model.config import ModelConfig
from piano_pairs.model.transformer import TinyLM
from piano_pairs.sequences.conditioned import ConditionedSample
from piano_pairs.sequences.io import Sample
from piano_pairs.sequences.loss import masked_cross_entropy

BETAS = (0.9, 0.95)
GRAD_CLIP = 1.0


@dataclass
class TrainState:
	"""
	Everything needed to resume training bit-for-bit: parameters, optimizer moments, step and data-order RNG
	"""

	config: ModelConfig
	model: TinyLM
	optimizer: torch.optim.Optimizer
	generator: torch.Generator
	step: int = 0


@dataclass
class Batch:
	ids: torch.Tensor
	mask: torch.Tensor
	harmony: torch.Tensor
	harmony_position: torch.Tensor

	def __len__(self) -> int:
		return self.ids.shape[0]


def init_state(config: ModelConfig) -> TrainState:
	torch.manual_seed(config.seed)
	model = TinyLM(config)
	optimizer = torch.optim.AdamW(
		model.parameters(), lr=config.learning_rate, betas=BETAS, weight_decay=config.weight_decay
	)
	generator = torch.Generator().manual_seed(config.seed)
	return TrainState(config=config, model=model, optimizer=optimizer, generator=generator)


def collate(
	samples: Sequence[Sample], vocabulary: Vocabulary, harmony_dim: int = 12
) -> Batch:
	"""
	Pad samples to a common length; padding is masked out of the loss
	"""
	if not samples:
		raise PreconditionError("Cannot collate an empty batch")
	length = max(len(sample.tokens) for sample in samples)
	ids = torch.full((len(samples), length), vocabulary.pad_id, dtype=torch.long)
	mask = torch.ones((len(samples), length), dtype=torch.long)
	harmony = torch.zeros((len(samples), harmony_dim), dtype=torch.float32)
	position = torch.full((len(samples),), -1, dtype=torch.long)
	for row, sample in enumerate(samples):
		encoded = vocabulary.encode(sample.tokens)
		ids[row, : len(encoded)] = torch.tensor(encoded, dtype=torch.long)
		mask[row, : len(encoded)] = torch.tensor(sample.mask, dtype=torch.long)
		if isinstance(sample, ConditionedSample):
			harmony[row] = torch.as_tensor(sample.harmony, dtype=torch.float32)
			position[row] = sample.harmony_position
	return Batch(ids, mask, harmony, position)


def batch_loss(model: TinyLM, batch: Batch) -> torch.Tensor:
	"""
	Masked next-token loss: logits at t are scored against the token at t + 1
	"""
	logits = model(batch.ids, batch.harmony, batch.harmony_position)
	return masked_cross_entropy(logits[:, :-1], batch.ids[:, 1:], batch.mask[:, 1:])


def train_step(state: TrainState, batch: Batch, grad_clip: float = GRAD_CLIP) -> float:
	"""
	One AdamW step on the masked loss

	Raises:
		TrainingDivergedError: loss is NaN or infinite; parameters are left untouched
	"""
	state.model.train()
	state.optimizer.zero_grad(set_to_none=True)
	loss = batch_loss(state.model, batch)
	value = float(loss.detach())
	if not math.isfinite(value):
		raise TrainingDivergedError(
			f"Loss {value} at step {state.step} (batch of {len(batch)}, length {batch.ids.shape[1]})"
		)
	loss.backward()
	if grad_clip > 0:
		torch.nn.utils.clip_grad_norm_(state.model.parameters(), grad_clip)
	state.optimizer.step()
	state.step += 1
	return value


def train(
	state: TrainState,
	samples: Sequence[Sample],
	vocabulary: Vocabulary,
	steps: int,
	batch_size: int = 8,
	log_every: int = 50,
	log_path: Optional[Union[str, Path]] = None,
	target_loss: Optional[float] = None,
	progress: bool = False,
) -> List[Tuple[int, float]]:
	"""
	Train for up to `steps` optimizer steps, batches drawn in a seed-fixed order

	Args:
		state: Training state, updated in place
		samples: Training samples
		vocabulary: Vocabulary the samples are encoded with
		steps: Maximum number of steps
		batch_size: Samples per step
		log_every: Log and record the loss every N steps
		log_path: Optional CSV file receiving (step, loss) rows
		target_loss: Stop as soon as a step's loss falls below this value

	Returns:
		Recorded (step, loss) rows
	"""
	if not samples:
		raise PreconditionError("No training samples")
	history: List[Tuple[int, float]] = []
	order: List[int] = []
	final = state.step + steps
	bar = tqdm(range(steps), desc="train", disable=not progress)
	for _ in bar:
		if len(order) < batch_size:
			order.extend(torch.randperm(len(samples), generator=state.generator).tolist())
		indices, order = order[:batch_size], order[batch_size:]
		loss = train_step(state, collate([samples[i] for i in indices], vocabulary, state.config.harmony_dim))
		done = target_loss is not None and loss < target_loss
		if state.step % log_every == 0 or done or state.step == final:
			history.append((state.step, loss))
			logger("model").info(f"step {state.step} loss {loss:.4f}")
			bar.set_postfix(loss=f"{loss:.4f}")
		if done:
			break
	if log_path is not None:
		write_training_log(history, log_path)
	return history


def write_training_log(history: Sequence[Tuple[int, float]], path: Union[str, Path]) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with path.open("w", newline="", encoding="utf-8") as handle:
		writer = csv.writer(handle, lineterminator="\n")
		writer.writerow(["step", "loss"])
		for step, loss in history:
			writer.writerow([step, f"{loss:.6f}"])
	return path


def gradient_check(
	model: TinyLM, batch: Batch, samples: int = 100, epsilon: float = 1e-6, seed: int = 0
) -> List[Tuple[float, float, float]]:
	"""
	Compare autograd gradients with central finite differences in float64

	Returns:
		(analytic, numeric, relative error) for `samples` randomly chosen parameter entries
	"""
	model = model.double()
	model.eval()
	batch = Batch(batch.ids, batch.mask, batch.harmony.double(), batch.harmony_position)
	model.zero_grad(set_to_none=True)
	batch_loss(model, batch).backward()

	parameters = [p for p in model.parameters() if p.requires_grad]
	sizes = torch.tensor([p.numel() for p in parameters], dtype=torch.float64)
	generator = torch.Generator().manual_seed(seed)
	results = []
	with torch.no_grad():
		for _ in range(samples):
			which = int(torch.multinomial(sizes, 1, generator=generator))
			parameter = parameters[which]
			flat_index = int(torch.randint(parameter.numel(), (1,), generator=generator))
			flat = parameter.view(-1)
			analytic = float(parameter.grad.view(-1)[flat_index])
			original = float(flat[flat_index])
			flat[flat_index] = original + epsilon
			plus = float(batch_loss(model, batch))
			flat[flat_index] = original - epsilon
			minus = float(batch_loss(model, batch))
			flat[flat_index] = original
			numeric = (plus - minus) / (2 * epsilon)
			error = abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-5)
			results.append((analytic, numeric, error))
	return results
