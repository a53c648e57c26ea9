import torch
import torch.nn.functional as F

from piano_pairs.exceptions import AllMaskedError, PreconditionError


def masked_cross_entropy(logits, targets, mask) -> torch.Tensor:
	"""
	Mean next-token negative log-likelihood over unmasked positions

	Args:
		logits: (..., T, V) unnormalized scores
		targets: (..., T) token ids
		mask: (..., T) with 1 on positions excluded from the loss

	Returns:
		Scalar tensor; masked positions contribute nothing, whatever their target

	Raises:
		AllMaskedError: no position carries loss
	"""
	logits = torch.as_tensor(logits)
	targets = torch.as_tensor(targets, dtype=torch.long, device=logits.device)
	mask = torch.as_tensor(mask, device=logits.device)
	if targets.shape != logits.shape[:-1] or mask.shape != targets.shape:
		raise PreconditionError(
			f"Misaligned shapes: logits {tuple(logits.shape)}, targets {tuple(targets.shape)}, mask {tuple(mask.shape)}"
		)
	keep = mask == 0
	count = int(keep.sum())
	if count == 0:
		raise AllMaskedError("Every position is masked")
	log_probs = F.log_softmax(logits, dim=-1)
	# masked targets may be any id, including padding; clamp them into range before gathering
	safe = torch.where(keep, targets, torch.zeros_like(targets))
	picked = log_probs.gather(-1, safe.unsqueeze(-1)).squeeze(-1)
	return -(picked * keep.to(log_probs.dtype)).sum() / count
