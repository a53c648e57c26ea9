from dataclasses import asdict, dataclass

from piano_pairs.config import DEFAULT_SEED, LEARNING_RATE, VOCABULARY_LIMIT
from piano_pairs.exceptions import ConfigurationError


@dataclass(frozen=True)
class ModelConfig:
	vocab_size: int
	max_context: int = 1024
	layers: int = 2
	width: int = 64
	heads: int = 4
	dropout: float = 0.0
	seed: int = DEFAULT_SEED
	harmony_dim: int = 12
	rope_base: float = 10000.0
	learning_rate: float = LEARNING_RATE
	weight_decay: float = 0.01
	norm_eps: float = 1e-6

	def __post_init__(self):
		if self.width % self.heads:
			raise ConfigurationError(f"width {self.width} is not divisible by heads {self.heads}")
		if (self.width // self.heads) % 2:
			raise ConfigurationError(f"Head size {self.width // self.heads} must be even for rotary encoding")
		if not 0 < self.vocab_size <= VOCABULARY_LIMIT:
			raise ConfigurationError(f"vocab_size must lie in 1..{VOCABULARY_LIMIT}, got {self.vocab_size}")
		if self.layers < 1 or self.max_context < 2:
			raise ConfigurationError("Model needs at least one layer and a context of two tokens")
		if not 0 <= self.dropout < 1:
			raise ConfigurationError(f"dropout must lie in [0, 1), got {self.dropout}")

	@property
	def head_dim(self) -> int:
		return self.width // self.heads

	def as_dict(self) -> dict:
		return asdict(self)
