"""
Linearized MusicXML: one token per atomic notation element.

Grammar, per measure::

	measure [key:F] [time:B/T] [clef:S:SignLine]* item*
	item  := voice:V | forward TYPE [dot]* [tuplet:A:N] | note
	note  := [grace] [chord] (PITCH | rest) TYPE [dot]* [tuplet:A:N]
	         [tie:stop] [tie:start] [art:X]* [dyn:X] staff:S

Items are emitted in onset order, staff 1 before staff 2 at equal onsets. Each voice keeps its own
time cursor; `voice:V` switches the voice that subsequent items belong to and resets to 1 at every
measure. `forward` advances the current voice without sounding.
"""

import re
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from piano_pairs.exceptions import DecodeError, EmptyScoreError, UnencodableElementError
from piano_pairs.lmx.vocabulary import TokenSequence
from piano_pairs.logging import log_drop
from piano_pairs.score.model import Measure, NoteEvent, Pitch, Score, ScoreMetadata, time_signature_length
from piano_pairs.score.notation import ARTICULATIONS, DYNAMICS, TYPE_QUARTERS, Notated, notate, split_gap

MEASURE = "measure"
FORWARD = "forward"
REST = "rest"
GRACE = "grace"
CHORD = "chord"
DOT = "dot"

ACCIDENTALS = {-2: "bb", -1: "b", 0: "", 1: "#", 2: "##"}
_ALTERS = {text: alter for alter, text in ACCIDENTALS.items()}
_PITCH_RE = re.compile(r"^([A-G])(bb|b|##|#)?(-?\d+)$")
_CLEF_RE = re.compile(r"^clef:(\d+):([A-Za-z]+)(\d+)$")
_TIME_RE = re.compile(r"^time:(\d+)/(\d+)$")


def pitch_token(pitch: Pitch) -> str:
	if pitch.alter not in ACCIDENTALS:
		raise UnencodableElementError([f"alter {pitch.alter}"])
	return f"{pitch.step}{ACCIDENTALS[pitch.alter]}{pitch.octave}"


def parse_pitch_token(token: str) -> Optional[Pitch]:
	match = _PITCH_RE.match(token)
	if not match:
		return None
	step, accidental, octave = match.groups()
	pitch = Pitch(step, _ALTERS[accidental or ""], int(octave))
	if not 0 <= pitch.midi_number <= 127:
		return None
	return pitch


def notation_tokens(notated: Notated) -> List[str]:
	tokens = [notated.type] + [DOT] * notated.dots
	if notated.tuplet:
		tokens.append(f"tuplet:{notated.tuplet[0]}:{notated.tuplet[1]}")
	return tokens


# Encoding
# ------------------


def linearize(score: Score) -> TokenSequence:
	"""
	Flatten a score into an LMX token sequence

	Args:
		score: Validated two-staff score

	Returns:
		TokenSequence carrying the score's source id

	Raises:
		UnencodableElementError: durations, alterations or voice overlaps the grammar cannot express
	"""
	source_id = score.metadata.source_id or None
	tokens: List[str] = []
	active_time = None
	problems: List[str] = []
	for measure in score.measures:
		active_time = measure.time or active_time
		tokens.append(MEASURE)
		if measure.key is not None:
			tokens.append(f"key:{measure.key}")
		if measure.time:
			tokens.append(f"time:{measure.time[0]}/{measure.time[1]}")
		for staff, sign, line in measure.clefs:
			tokens.append(f"clef:{staff}:{sign}{line}")
		try:
			tokens.extend(_measure_tokens(measure, active_time, source_id))
		except UnencodableElementError as e:
			problems.extend(f"measure {measure.number}: {element}" for element in e.elements)
	if problems:
		raise UnencodableElementError(problems)
	return TokenSequence(tuple(tokens), source_id)


def _measure_tokens(measure: Measure, active_time, source_id) -> List[str]:
	by_voice = defaultdict(list)
	for index, event in enumerate(measure.events):
		by_voice[event.voice].append((event.onset, 0 if event.grace else 1, event.chord, index, event))

	items = []
	cursors: Dict[int, Fraction] = {}
	for voice, entries in by_voice.items():
		entries.sort(key=lambda entry: entry[:4])
		groups: List[List[NoteEvent]] = []
		for entry in entries:
			event = entry[-1]
			if event.chord and groups:
				groups[-1].append(event)
			else:
				groups.append([event])
		primary_staff = groups[0][0].staff
		cursor = measure.start
		for sequence_index, group in enumerate(groups):
			head = group[0]
			if head.onset < cursor:
				raise UnencodableElementError([f"overlap in voice {voice} at {head.onset - measure.start}"])
			gap = head.onset - cursor
			items.append((head.onset, primary_staff, voice, sequence_index, gap, group))
			cursor = head.onset if head.grace else head.offset
		cursors[voice] = cursor - measure.start
	items.sort(key=lambda item: item[:4])

	tokens: List[str] = []
	current_voice = 1
	for _onset, _staff, voice, _index, gap, group in items:
		if voice != current_voice:
			tokens.append(f"voice:{voice}")
			current_voice = voice
		tokens.extend(_forward_tokens(gap))
		for position, event in enumerate(group):
			tokens.extend(_note_tokens(event, position > 0, source_id))

	furthest = max(cursors.values(), default=Fraction(0))
	implied = furthest if furthest > 0 else time_signature_length(active_time)
	if implied != measure.duration:
		tokens.extend(_forward_tokens(measure.duration - cursors.get(current_voice, Fraction(0))))
	return tokens


def _forward_tokens(gap: Fraction) -> List[str]:
	tokens = []
	if gap > 0:
		for piece in split_gap(gap):
			tokens.append(FORWARD)
			tokens.extend(notation_tokens(piece))
	return tokens


def _note_tokens(event: NoteEvent, chord: bool, source_id) -> List[str]:
	tokens = []
	if event.grace:
		tokens.append(GRACE)
	if chord:
		tokens.append(CHORD)
	tokens.append(REST if event.pitch is None else pitch_token(event.pitch))
	tokens.extend(notation_tokens(notate(event.duration)))
	if event.tie_stop:
		tokens.append("tie:stop")
	if event.tie_start:
		tokens.append("tie:start")
	for articulation in event.articulations:
		if articulation in ARTICULATIONS:
			tokens.append(f"art:{articulation}")
		else:
			log_drop("lmx", source_id, articulation, onset=event.onset)
	if event.dynamics:
		if event.dynamics in DYNAMICS:
			tokens.append(f"dyn:{event.dynamics}")
		else:
			log_drop("lmx", source_id, event.dynamics, onset=event.onset)
	tokens.append(f"staff:{event.staff}")
	return tokens


# Decoding
# ------------------


@dataclass(frozen=True)
class DecodeIssue:
	index: int
	message: str


class _MeasureBuilder:
	def __init__(self, number: str, start: Fraction):
		self.number = number
		self.start = start
		self.events: List[NoteEvent] = []
		self.cursors: Dict[int, Fraction] = defaultdict(Fraction)
		self.head_onsets: Dict[int, Fraction] = {}
		self.voice = 1
		self.time = None
		self.key = None
		self.clefs: Dict[int, Tuple[str, int]] = {}

	def build(self, active_time) -> Measure:
		furthest = max(self.cursors.values(), default=Fraction(0))
		duration = furthest if furthest > 0 else time_signature_length(active_time)
		return Measure(
			number=self.number,
			start=self.start,
			duration=duration,
			events=tuple(self.events),
			time=self.time,
			key=self.key,
			clefs=tuple(sorted((staff, sign, line) for staff, (sign, line) in self.clefs.items())),
		)


class _Decoder:
	def __init__(self, sequence: TokenSequence, strict: bool):
		self.tokens = sequence.tokens
		self.source_id = sequence.source_id or ""
		self.strict = strict
		self.issues: List[DecodeIssue] = []
		self.measures: List[Measure] = []
		self.active_time = None
		self.current: Optional[_MeasureBuilder] = None
		self.max_staff = 0

	def run(self) -> Score:
		if not self.tokens:
			raise EmptyScoreError("Cannot decode an empty token sequence")
		index = 0
		while index < len(self.tokens):
			try:
				index = self._step(index)
			except DecodeError as e:
				if self.strict:
					raise
				self.issues.append(DecodeIssue(e.index, str(e)))
				index = self._next_measure(e.index + 1)
		self._close_measure()
		if not self.measures:
			raise DecodeError("No decodable measure", 0)
		return Score(
			measures=tuple(self.measures),
			metadata=ScoreMetadata(source_id=self.source_id),
			staves=max(self.max_staff, 2),
		)

	def _next_measure(self, index: int) -> int:
		while index < len(self.tokens) and self.tokens[index] != MEASURE:
			index += 1
		return index

	def _close_measure(self) -> None:
		if self.current is not None:
			self.active_time = self.current.time or self.active_time
			self.measures.append(self.current.build(self.active_time))
			self.current = None

	def _step(self, index: int) -> int:
		token = self.tokens[index]
		if token == MEASURE:
			self._close_measure()
			start = self.measures[-1].end if self.measures else Fraction(0)
			self.current = _MeasureBuilder(str(len(self.measures) + 1), start)
			return index + 1
		if self.current is None:
			raise DecodeError(f"Expected 'measure', found {token!r}", index)
		measure = self.current
		if token.startswith("key:"):
			measure.key = self._int(token[4:], index)
			return index + 1
		if token.startswith("time:"):
			match = _TIME_RE.match(token)
			if not match or int(match.group(2)) == 0:
				raise DecodeError(f"Malformed time signature {token!r}", index)
			measure.time = (int(match.group(1)), int(match.group(2)))
			return index + 1
		if token.startswith("clef:"):
			match = _CLEF_RE.match(token)
			if not match:
				raise DecodeError(f"Malformed clef {token!r}", index)
			staff = int(match.group(1))
			measure.clefs[staff] = (match.group(2), int(match.group(3)))
			self.max_staff = max(self.max_staff, staff)
			return index + 1
		if token.startswith("voice:"):
			measure.voice = self._int(token[6:], index)
			return index + 1
		if token == FORWARD:
			duration, index = self._duration(index + 1, what="forward")
			measure.cursors[measure.voice] += duration
			return index
		if token in TYPE_QUARTERS or token == DOT or token.startswith("tuplet:"):
			raise DecodeError(f"Duration token {token!r} with no preceding pitch", index)
		return self._note(index)

	def _int(self, text: str, index: int) -> int:
		try:
			return int(text)
		except ValueError:
			raise DecodeError(f"Malformed integer in {self.tokens[index]!r}", index)

	def _duration(self, index: int, what: str) -> Tuple[Fraction, int]:
		if index >= len(self.tokens) or self.tokens[index] not in TYPE_QUARTERS:
			raise DecodeError(f"{what} without a duration type", min(index, len(self.tokens) - 1))
		type_name = self.tokens[index]
		index += 1
		dots = 0
		tuplet = None
		while index < len(self.tokens):
			token = self.tokens[index]
			if token == DOT:
				dots += 1
			elif token.startswith("tuplet:"):
				parts = token.split(":")
				if len(parts) != 3 or not all(part.isdigit() and int(part) > 0 for part in parts[1:]):
					raise DecodeError(f"Malformed tuplet {token!r}", index)
				tuplet = (int(parts[1]), int(parts[2]))
			else:
				break
			index += 1
		return Notated(type_name, dots, tuplet).duration, index

	def _note(self, index: int) -> int:
		measure = self.current
		start = index
		grace = chord = False
		while index < len(self.tokens) and self.tokens[index] in (GRACE, CHORD):
			grace = grace or self.tokens[index] == GRACE
			chord = chord or self.tokens[index] == CHORD
			index += 1
		if index >= len(self.tokens):
			raise DecodeError("Unterminated note", start)
		token = self.tokens[index]
		if token == REST:
			pitch = None
		else:
			pitch = parse_pitch_token(token)
			if pitch is None:
				raise DecodeError(f"Unknown token {token!r}", index)
		duration, index = self._duration(index + 1, what="note")

		tie_start = tie_stop = False
		articulations: List[str] = []
		dynamics = None
		staff = None
		while index < len(self.tokens):
			token = self.tokens[index]
			index += 1
			if token.startswith("staff:"):
				staff = self._int(token[6:], index - 1)
				break
			if token == "tie:start":
				tie_start = True
			elif token == "tie:stop":
				tie_stop = True
			elif token.startswith("art:") and token[4:] in ARTICULATIONS:
				articulations.append(token[4:])
			elif token.startswith("dyn:") and token[4:] in DYNAMICS:
				dynamics = token[4:]
			else:
				raise DecodeError(f"Unexpected {token!r} inside note", index - 1)
		if staff is None:
			raise DecodeError("Note without staff", start)

		voice = measure.voice
		if grace:
			onset = measure.cursors[voice]
		elif chord:
			if voice not in measure.head_onsets:
				raise DecodeError("Chord note without a preceding note in its voice", start)
			onset = measure.head_onsets[voice]
		else:
			onset = measure.cursors[voice]
			measure.head_onsets[voice] = onset
			measure.cursors[voice] += duration
		measure.events.append(
			NoteEvent(
				onset=measure.start + onset,
				duration=duration,
				pitch=pitch,
				voice=voice,
				staff=staff,
				chord=chord,
				tie_start=tie_start,
				tie_stop=tie_stop,
				grace=grace,
				articulations=tuple(articulations),
				dynamics=dynamics,
			)
		)
		self.max_staff = max(self.max_staff, staff)
		return index


def delinearize(sequence: TokenSequence) -> Score:
	"""
	Rebuild a Score from an LMX token sequence

	Raises:
		EmptyScoreError: empty sequence
		DecodeError: first grammar violation, with its token index
	"""
	return _Decoder(sequence, strict=True).run()


def delinearize_with_report(sequence: TokenSequence) -> Tuple[Score, List[DecodeIssue]]:
	"""
	Recoverable decoding: malformed spans are skipped up to the next measure and reported
	"""
	decoder = _Decoder(sequence, strict=False)
	score = decoder.run()
	return score, decoder.issues
