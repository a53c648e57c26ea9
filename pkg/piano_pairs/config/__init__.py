from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from piano_pairs.exceptions import ConfigurationError

# Defaults
# ------------------

DEFAULT_SEED = 42
NOISE_SCALE = 0.2
DROP_FRACTION = 0.25
KEEP_FRACTION = 0.5
MIN_GAP = 1
VOCABULARY_LIMIT = 512
MAX_ADAPTATION_LENGTH = 8000
VARIATIONS_PER_PIECE = 128
LEARNING_RATE = 6e-4
SAMPLING_TEMPERATURE = 1.0
SAMPLING_TOP_K = 32
LEVELS = tuple(range(1, 10))


@dataclass
class PipelineConfig:
	"""
	Configuration of one CLI run, written verbatim into the run manifest
	"""

	corpus_dir: Optional[str] = None
	output_dir: str = "out"
	model_path: Optional[str] = None
	vocab_path: Optional[str] = None
	embeddings_path: Optional[str] = None
	seed: int = DEFAULT_SEED
	strategy: str = "filtered"
	min_gap: int = MIN_GAP
	noise_scale: float = NOISE_SCALE
	drop_fraction: float = DROP_FRACTION
	keep_fraction: float = KEEP_FRACTION
	jobs: int = 1
	extra: Dict[str, Any] = field(default_factory=dict)

	@classmethod
	def from_args(cls, args) -> "PipelineConfig":
		values = vars(args).copy()
		known = {name: values.pop(name) for name in list(values) if name in cls.__dataclass_fields__}
		values.pop("handler", None)
		values.pop("verbose", None)
		extra = {key: value for key, value in values.items() if value is not None}
		config = cls(**{k: v for k, v in known.items() if v is not None}, extra=extra)
		config.validate()
		return config

	def validate(self) -> None:
		for name in ("noise_scale", "drop_fraction", "keep_fraction"):
			value = getattr(self, name)
			if not 0 <= value < 1:
				raise ConfigurationError(f"{name} must lie in [0, 1), got {value}")
		if self.seed < 0:
			raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
		if self.strategy not in ("random", "filtered"):
			raise ConfigurationError(f"Unknown mining strategy: {self.strategy}")
		if self.min_gap < 1:
			raise ConfigurationError(f"min_gap must be at least 1, got {self.min_gap}")
		if self.jobs < 1:
			raise ConfigurationError(f"jobs must be at least 1, got {self.jobs}")

	def as_dict(self) -> Dict[str, Any]:
		return asdict(self)
