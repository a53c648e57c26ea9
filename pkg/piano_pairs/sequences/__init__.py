from piano_pairs.sequences.adaptation import (
	AdaptationSample,
	adaptation_prompt,
	build_adaptation,
	build_adaptation_batch,
)
from piano_pairs.sequences.conditioned import ConditionedSample, build_conditioned, conditioning_prefix
from piano_pairs.sequences.io import SAMPLES_FILE, load_samples, write_samples
from piano_pairs.sequences.unconditional import UnconditionalSample, build_unconditional
