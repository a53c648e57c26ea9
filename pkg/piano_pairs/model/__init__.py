from piano_pairs.model.checkpoint import load_checkpoint, save_checkpoint
from piano_pairs.model.config import ModelConfig
from piano_pairs.model.sampling import Generation, sample, validity_fraction
from piano_pairs.model.training import (
	Batch,
	TrainState,
	batch_loss,
	collate,
	gradient_check,
	init_state,
	train,
	train_step,
)
from piano_pairs.model.transformer import TinyLM
