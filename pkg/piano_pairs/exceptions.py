class PianoPairsError(Exception):
	"""Base class for every error raised by the pipeline."""


# score model
class ScoreSyntaxError(PianoPairsError):
	pass


class UnsupportedStructureError(PianoPairsError):
	pass


class MissingDivisionsError(PianoPairsError):
	pass


class MalformedScoreError(PianoPairsError):
	pass


class StaffCountError(PianoPairsError):
	pass


class EmptyScoreError(PianoPairsError):
	pass


# lmx
class UnencodableElementError(PianoPairsError):
	def __init__(self, elements):
		self.elements = list(elements)
		super().__init__(f"Unencodable elements: {', '.join(self.elements)}")


class DecodeError(PianoPairsError):
	def __init__(self, message: str, index: int):
		self.index = index
		super().__init__(f"{message} (token {index})")


class VocabularyOverflowError(PianoPairsError):
	def __init__(self, excess, limit: int):
		self.excess = list(excess)
		self.limit = limit
		super().__init__(
			f"Vocabulary exceeds {limit} entries by {len(self.excess)}: {' '.join(self.excess[:20])}"
			+ (" ..." if len(self.excess) > 20 else "")
		)


# analysis
class EmptySkylineError(PianoPairsError):
	pass


class DegenerateProfileError(PianoPairsError):
	pass


# difficulty
class UnderSupportedClassError(PianoPairsError):
	pass


class NonFiniteFeatureError(PianoPairsError):
	pass


# similarity
class EmbeddingMismatchError(PianoPairsError):
	pass


class ZeroNormError(PianoPairsError):
	pass


class EmbeddingFileError(PianoPairsError):
	pass


# mining / sequences
class MissingAnnotationError(PianoPairsError):
	pass


class PreconditionError(PianoPairsError):
	pass


class OversizedPairError(PianoPairsError):
	pass


class AllMaskedError(PianoPairsError):
	pass


# model
class ContextOverflowError(PianoPairsError):
	pass


class TrainingDivergedError(PianoPairsError):
	pass


class ConfigurationError(PianoPairsError):
	pass
