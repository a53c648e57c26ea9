from piano_pairs.analysis.features import FEATURE_NAMES, FeatureVector, extract_features
from piano_pairs.analysis.profile import PitchClassProfile, perturb_profile, pitch_class_profile
from piano_pairs.analysis.skyline import SkylineSequence, melody_skyline
