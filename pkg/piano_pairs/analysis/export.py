from pathlib import Path
from typing import Dict, Iterable, Tuple, Union

from piano_pairs.analysis.features import FEATURE_NAMES, FeatureVector
from piano_pairs.analysis.profile import PitchClassProfile
from piano_pairs.exceptions import PreconditionError
from piano_pairs.utils import iter_jsonl, write_jsonl


def export_profiles(profiles: Iterable[Tuple[str, PitchClassProfile]], path: Union[str, Path]) -> int:
	return write_jsonl(({"id": source_id, "profile": list(profile.weights)} for source_id, profile in profiles), path)


def load_profiles(path: Union[str, Path]) -> Dict[str, PitchClassProfile]:
	return {record["id"]: PitchClassProfile.from_array(record["profile"]) for record in iter_jsonl(path)}


def export_features(features: Iterable[Tuple[str, FeatureVector]], path: Union[str, Path]) -> int:
	"""
	Write feature vectors as JSONL records `{"id", "names", "values"}`
	"""
	return write_jsonl(
		({"id": source_id, "names": list(FEATURE_NAMES), "values": list(vector.values)} for source_id, vector in features),
		path,
	)


def load_features(path: Union[str, Path]) -> Dict[str, FeatureVector]:
	features = {}
	for record in iter_jsonl(path):
		if tuple(record.get("names", FEATURE_NAMES)) != FEATURE_NAMES:
			raise PreconditionError(f"Feature order of {record['id']} does not match {FEATURE_NAMES}")
		features[record["id"]] = FeatureVector(tuple(float(value) for value in record["values"]))
	return features
