from collections import defaultdict
from dataclasses import replace
from typing import Any, Dict, List

from piano_pairs.exceptions import EmptyScoreError, MalformedScoreError, StaffCountError
from piano_pairs.score.model import Score


def validate_two_staff(score: Score) -> Score:
	"""
	Check that a parsed score is an eligible two-staff piano piece

	Args:
		score: Parsed score

	Returns:
		The same score with the validated flag set

	Raises:
		StaffCountError: staff count other than two
		EmptyScoreError: no measures
		MalformedScoreError: overlapping events within a voice
	"""
	if not score.measures:
		raise EmptyScoreError(f"Score {score.metadata.source_id!r} has no measures")
	if score.staves != 2:
		raise StaffCountError(f"Score {score.metadata.source_id!r} has {score.staves} staves, expected 2")
	for event in score.events:
		if event.staff not in (1, 2):
			raise StaffCountError(f"Event on staff {event.staff} in {score.metadata.source_id!r}")
	problems = voice_overlaps(score)
	if problems:
		first = problems[0]
		raise MalformedScoreError(
			f"Voice {first['voice']} overlaps at {first['onset']} in {score.metadata.source_id!r}"
		)
	return replace(score, validated=True)


def voice_overlaps(score: Score) -> List[Dict[str, Any]]:
	"""
	List places where consecutive chord heads of one voice overlap in time
	"""
	by_voice = defaultdict(list)
	for event in score.events:
		if not event.grace and not event.chord:
			by_voice[event.voice].append(event)
	problems = []
	for voice, events in by_voice.items():
		events.sort(key=lambda e: e.onset)
		for previous, current in zip(events, events[1:]):
			if current.onset < previous.offset:
				problems.append({"voice": voice, "onset": current.onset})
	return problems


def is_eligible(score: Score) -> Dict[str, Any]:
	"""
	Non-raising corpus eligibility check used by batch commands
	"""
	try:
		validate_two_staff(score)
		return {"action": "keep", "reason": "Two-staff piano score"}
	except (EmptyScoreError, StaffCountError, MalformedScoreError) as e:
		return {"action": "skip", "reason": str(e)}
