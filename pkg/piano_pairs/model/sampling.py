from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import torch

from piano_pairs.config import DEFAULT_SEED, SAMPLING_TEMPERATURE, SAMPLING_TOP_K
from piano_pairs.exceptions import PianoPairsError, PreconditionError
from piano_pairs.lmx.codec import delinearize
from piano_pairs.lmx.vocabulary import EOS, SPECIALS, TokenSequence, Vocabulary
from piano_pairs.logging import log_warning
from piano_pairs.model.transformer import TinyLM
from piano_pairs.score.model import Score
from piano_pairs.score.validation import validate_two_staff
from piano_pairs.sequences.conditioned import ConditionedSample


@dataclass
class Generation:
	"""
	One sampled continuation; `sequence` holds the generated tokens up to (excluding) the end token
	"""

	sequence: TokenSequence
	ended: bool
	valid: bool
	reason: str = ""
	score: Optional[Score] = field(default=None, repr=False)


def _filter_top_k(logits: torch.Tensor, top_k: Optional[int]) -> torch.Tensor:
	if not top_k or top_k >= logits.shape[-1]:
		return logits
	threshold = torch.topk(logits, top_k, dim=-1).values[..., -1:]
	return logits.masked_fill(logits < threshold, float("-inf"))


def _validate(tokens: List[str], ended: bool, source_id: str) -> Generation:
	sequence = TokenSequence(tuple(tokens), source_id)
	if not ended:
		return Generation(sequence, ended, False, "no end token before the context limit")
	specials = sorted({token for token in tokens if token in SPECIALS})
	if specials:
		return Generation(sequence, ended, False, f"special tokens inside the body: {' '.join(specials)}")
	try:
		score = validate_two_staff(delinearize(sequence))
	except PianoPairsError as e:
		return Generation(sequence, ended, False, f"{type(e).__name__}: {e}")
	return Generation(sequence, ended, True, score=score)


@torch.no_grad()
def sample(
	model: TinyLM,
	vocabulary: Vocabulary,
	prompt: Union[ConditionedSample, Sequence[str]],
	n: int,
	temperature: float = SAMPLING_TEMPERATURE,
	top_k: Optional[int] = SAMPLING_TOP_K,
	seed: int = DEFAULT_SEED,
	max_new_tokens: Optional[int] = None,
	harmony: Optional[np.ndarray] = None,
	use_cache: bool = True,
	source_id: str = "sample",
) -> List[Generation]:
	"""
	Draw n continuations of a prompt

	Args:
		model: Trained model
		vocabulary: Vocabulary the model was trained with
		prompt: A conditioned sample (its prefix and harmony vector are used) or an adaptation prompt
			ending with the target level
		n: Number of sequences
		temperature: Softmax temperature; 0 means greedy decoding
		top_k: Keep only the k most likely tokens before sampling
		seed: Seed of the sampling generator; equal seeds give equal outputs
		max_new_tokens: Generation limit; defaults to the remaining context
		harmony: Harmony vector for a token prompt containing the harmony slot
		use_cache: Decode incrementally with a key/value cache

	Returns:
		n Generations; invalid ones are flagged with a reason, never dropped
	"""
	if n < 1:
		raise PreconditionError(f"n must be at least 1, got {n}")
	position = -1
	if isinstance(prompt, ConditionedSample):
		harmony = prompt.harmony
		position = prompt.harmony_position
		prompt_tokens = list(prompt.prefix)
	else:
		prompt_tokens = list(prompt)
		if harmony is not None and vocabulary.tokens[vocabulary.harmony_id] in prompt_tokens:
			position = prompt_tokens.index(vocabulary.tokens[vocabulary.harmony_id])
	if not prompt_tokens:
		raise PreconditionError("Empty prompt")

	model.eval()
	context = model.config.max_context
	limit = context - len(prompt_tokens)
	if max_new_tokens is not None:
		limit = min(limit, max_new_tokens)
	if limit < 1:
		raise PreconditionError(f"Prompt of {len(prompt_tokens)} tokens leaves no room in context {context}")

	generator = torch.Generator().manual_seed(seed)
	ids = torch.tensor([vocabulary.encode(prompt_tokens)] * n, dtype=torch.long)
	harmony_tensor = None
	positions = None
	if harmony is not None and position >= 0:
		harmony_tensor = torch.as_tensor(np.asarray(harmony), dtype=torch.float32).reshape(1, -1).repeat(n, 1)
		positions = torch.full((n,), position, dtype=torch.long)

	generated = torch.empty((n, 0), dtype=torch.long)
	finished = torch.zeros(n, dtype=torch.bool)
	cache = None
	for _ in range(limit):
		if use_cache:
			if cache is None:
				logits, cache = model(ids, harmony_tensor, positions, return_cache=True)
			else:
				logits, cache = model(generated[:, -1:], cache=cache, return_cache=True)
		else:
			logits = model(torch.cat((ids, generated), dim=1), harmony_tensor, positions)
		logits = logits[:, -1, :].float()
		if temperature == 0:
			chosen = torch.argmax(logits, dim=-1)
		else:
			probs = torch.softmax(_filter_top_k(logits / temperature, top_k), dim=-1)
			chosen = torch.multinomial(probs, 1, generator=generator).squeeze(-1)
		chosen = torch.where(finished, torch.full_like(chosen, vocabulary.eos_id), chosen)
		generated = torch.cat((generated, chosen[:, None]), dim=1)
		finished |= chosen == vocabulary.eos_id
		if bool(finished.all()):
			break

	results = []
	for row in range(n):
		tokens = [vocabulary.token_of(int(token_id)) for token_id in generated[row]]
		ended = EOS in tokens
		body = tokens[: tokens.index(EOS)] if ended else tokens
		result = _validate(body, ended, f"{source_id}#v{row:03d}")
		if not result.valid:
			log_warning("sampling", result.sequence.source_id, "invalid generation", detail=result.reason)
		results.append(result)
	return results


def validity_fraction(generations: Sequence[Generation]) -> float:
	return sum(1 for g in generations if g.valid) / len(generations) if generations else 0.0
