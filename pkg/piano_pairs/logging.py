import logging
from typing import Any, Dict, Optional

LOGGER_NAME = "piano_pairs"
_configured = False


def logger(module: Optional[str] = None) -> logging.Logger:
	"""
	Get the package logger, configuring the root handler on first use

	Args:
		module: Optional dotted suffix, e.g. "lmx.codec"

	Returns:
		Logger under the piano_pairs namespace
	"""
	global _configured
	base = logging.getLogger(LOGGER_NAME)
	if not _configured:
		handler = logging.StreamHandler()
		handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
		base.addHandler(handler)
		base.setLevel(logging.INFO)
		base.propagate = False
		_configured = True
	return base.getChild(module) if module else base


def set_level(verbose: bool = False) -> None:
	logger().setLevel(logging.DEBUG if verbose else logging.INFO)


def log_error(message: str, title: str = "Piano Pairs") -> None:
	logger().error(f"{title}: {message}")


def log_pipeline_event(
	stage: str,
	event_type: str,
	subject: Optional[str] = None,
	details: Optional[Dict[str, Any]] = None,
	level: int = logging.INFO,
) -> bool:
	"""
	Log a pipeline event as one key=value line

	Args:
		stage: Pipeline stage (lmx, mining, sequences, ...)
		event_type: Skip/Warning/Drop/Progress
		subject: Source id or item the event is about
		details: Extra fields to log

	Returns:
		Success status
	"""
	try:
		fields = [f"event={event_type}", f"stage={stage}"]
		if subject is not None:
			fields.append(f"subject={subject}")
		for key, value in (details or {}).items():
			fields.append(f"{key}={value}")
		logger(stage).log(level, " ".join(fields))
		return True
	except Exception as e:
		log_error(f"Failed to log pipeline event: {e!s}\nStage: {stage}, Event: {event_type}", "Pipeline Logging")
		return False


def log_skip(stage: str, subject: Optional[str], reason: str, **details: Any) -> bool:
	"""
	Log an item skipped by a batch operation
	"""
	return log_pipeline_event(stage, "Skip", subject, {"reason": reason, **details}, level=logging.WARNING)


def log_warning(stage: str, subject: Optional[str], reason: str, **details: Any) -> bool:
	"""
	Log a recoverable anomaly
	"""
	return log_pipeline_event(stage, "Warning", subject, {"reason": reason, **details}, level=logging.WARNING)


def log_drop(stage: str, subject: Optional[str], element: str, **details: Any) -> bool:
	"""
	Log notation dropped because it is outside the token inventory
	"""
	return log_pipeline_event(stage, "Drop", subject, {"element": element, **details}, level=logging.WARNING)


def log_progress(stage: str, **details: Any) -> bool:
	return log_pipeline_event(stage, "Progress", None, details)
