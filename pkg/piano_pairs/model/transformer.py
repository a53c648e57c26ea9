"""
Decoder-only transformer with rotary position encoding and a continuous harmony slot.
"""

import math
from typing import List, Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from piano_pairs.exceptions import ContextOverflowError
from piano_pairs.model.config import ModelConfig

KVCache = List[Tuple[torch.Tensor, torch.Tensor]]


class RMSNorm(nn.Module):
	def __init__(self, hidden_size: int, eps: float = 1e-6):
		super().__init__()
		self.weight = nn.Parameter(torch.ones(hidden_size))
		self.eps = eps

	def forward(self, x: torch.Tensor) -> torch.Tensor:
		rms = torch.sqrt(x.pow(2).mean(dim=-1, keepdim=True) + self.eps)
		return self.weight * (x / rms)


class RotaryEmbedding(nn.Module):
	def __init__(self, head_dim: int, base: float = 10000.0):
		super().__init__()
		self.head_dim = head_dim
		inv_freq = 1.0 / (base ** (torch.arange(0, head_dim, 2, dtype=torch.float64) / head_dim))
		self.register_buffer("inv_freq", inv_freq, persistent=False)

	def rotate_half(self, x: torch.Tensor) -> torch.Tensor:
		x1, x2 = x[..., : self.head_dim // 2], x[..., self.head_dim // 2 :]
		return torch.cat((-x2, x1), dim=-1)

	def forward(self, x: torch.Tensor, positions: torch.Tensor) -> torch.Tensor:
		"""
		Rotate (B, H, T, D) queries or keys by their absolute positions (T,)
		"""
		freqs = torch.outer(positions.to(torch.float64), self.inv_freq.to(torch.float64))
		emb = torch.cat((freqs, freqs), dim=-1)
		cos = emb.cos().to(x.dtype)[None, None]
		sin = emb.sin().to(x.dtype)[None, None]
		return x * cos + self.rotate_half(x) * sin


class CausalSelfAttention(nn.Module):
	def __init__(self, config: ModelConfig):
		super().__init__()
		self.heads = config.heads
		self.head_dim = config.head_dim
		self.qkv = nn.Linear(config.width, 3 * config.width, bias=False)
		self.proj = nn.Linear(config.width, config.width, bias=False)
		self.dropout = nn.Dropout(config.dropout)
		self.rotary = RotaryEmbedding(config.head_dim, config.rope_base)
		self.last_attention: Optional[torch.Tensor] = None

	def forward(
		self,
		x: torch.Tensor,
		positions: torch.Tensor,
		cache: Optional[Tuple[torch.Tensor, torch.Tensor]] = None,
	) -> Tuple[torch.Tensor, Tuple[torch.Tensor, torch.Tensor]]:
		batch, length, width = x.shape
		q, k, v = self.qkv(x).split(width, dim=2)
		q = q.view(batch, length, self.heads, self.head_dim).transpose(1, 2)
		k = k.view(batch, length, self.heads, self.head_dim).transpose(1, 2)
		v = v.view(batch, length, self.heads, self.head_dim).transpose(1, 2)
		q = self.rotary(q, positions)
		k = self.rotary(k, positions)
		past = 0
		if cache is not None:
			past = cache[0].shape[2]
			k = torch.cat((cache[0], k), dim=2)
			v = torch.cat((cache[1], v), dim=2)

		scores = (q @ k.transpose(-2, -1)) / math.sqrt(self.head_dim)
		allowed = torch.ones(length, past + length, dtype=torch.bool, device=x.device).tril(diagonal=past)
		scores = scores.masked_fill(~allowed, float("-inf"))
		attention = F.softmax(scores, dim=-1)
		self.last_attention = attention.detach()
		out = self.dropout(attention) @ v
		out = out.transpose(1, 2).contiguous().view(batch, length, width)
		return self.proj(out), (k, v)


class Block(nn.Module):
	def __init__(self, config: ModelConfig):
		super().__init__()
		self.attention_norm = RMSNorm(config.width, config.norm_eps)
		self.attention = CausalSelfAttention(config)
		self.mlp_norm = RMSNorm(config.width, config.norm_eps)
		self.mlp = nn.Sequential(
			nn.Linear(config.width, 4 * config.width),
			nn.GELU(),
			nn.Linear(4 * config.width, config.width),
			nn.Dropout(config.dropout),
		)

	def forward(self, x, positions, cache=None):
		attended, new_cache = self.attention(self.attention_norm(x), positions, cache)
		x = x + attended
		x = x + self.mlp(self.mlp_norm(x))
		return x, new_cache


class TinyLM(nn.Module):
	"""
	Next-token model over LMX vocabularies. The harmony vector is projected into the embedding
	space and added to the input embedding at its slot position.
	"""

	def __init__(self, config: ModelConfig):
		super().__init__()
		self.config = config
		self.embedding = nn.Embedding(config.vocab_size, config.width)
		self.harmony = nn.Linear(config.harmony_dim, config.width)
		self.dropout = nn.Dropout(config.dropout)
		self.blocks = nn.ModuleList(Block(config) for _ in range(config.layers))
		self.norm = RMSNorm(config.width, config.norm_eps)
		self.head = nn.Linear(config.width, config.vocab_size, bias=False)
		self.apply(self._init_weights)

	@staticmethod
	def _init_weights(module: nn.Module) -> None:
		if isinstance(module, nn.Linear):
			nn.init.normal_(module.weight, mean=0.0, std=0.02)
			if module.bias is not None:
				nn.init.zeros_(module.bias)
		elif isinstance(module, nn.Embedding):
			nn.init.normal_(module.weight, mean=0.0, std=0.02)

	def embed(
		self,
		ids: torch.Tensor,
		harmony: Optional[torch.Tensor] = None,
		harmony_position: Optional[torch.Tensor] = None,
	) -> torch.Tensor:
		x = self.embedding(ids)
		if harmony is not None and harmony_position is not None:
			harmony_position = torch.as_tensor(harmony_position, dtype=torch.long, device=ids.device).reshape(-1)
			projected = self.harmony(harmony.to(x.dtype).reshape(ids.shape[0], -1))
			slots = torch.arange(ids.shape[1], device=ids.device)[None, :] == harmony_position[:, None]
			x = x + slots[..., None].to(x.dtype) * projected[:, None, :]
		return x

	def forward(
		self,
		ids: torch.Tensor,
		harmony: Optional[torch.Tensor] = None,
		harmony_position: Optional[torch.Tensor] = None,
		positions: Optional[torch.Tensor] = None,
		cache: Optional[KVCache] = None,
		return_cache: bool = False,
	):
		"""
		Per-position next-token logits

		Args:
			ids: (B, T) token ids
			harmony: (B, harmony_dim) sidecar vectors, or None
			harmony_position: (B,) slot index per item; -1 means no slot
			positions: (T,) absolute positions; defaults to the positions following the cache
			cache: Per-layer keys and values from earlier calls
			return_cache: Also return the updated cache

		Raises:
			ContextOverflowError: more positions than max_context
		"""
		past = cache[0][0].shape[2] if cache else 0
		length = ids.shape[1]
		if positions is None:
			positions = torch.arange(past, past + length, device=ids.device)
		if past + length > self.config.max_context or int(positions.max()) >= self.config.max_context:
			raise ContextOverflowError(
				f"{past + length} tokens exceed the model context of {self.config.max_context}"
			)
		x = self.dropout(self.embed(ids, harmony, harmony_position))
		new_cache: KVCache = []
		for index, block in enumerate(self.blocks):
			x, layer_cache = block(x, positions, cache[index] if cache else None)
			new_cache.append(layer_cache)
		logits = self.head(self.norm(x))
		if return_cache:
			return logits, new_cache
		return logits
