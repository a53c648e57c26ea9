import math
from collections import defaultdict
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Union

from lxml import etree

from piano_pairs import __version__
from piano_pairs.exceptions import UnencodableElementError
from piano_pairs.score.model import Measure, NoteEvent, Score, time_signature_length
from piano_pairs.score.notation import notate

DOCTYPE = (
	'<!DOCTYPE score-partwise PUBLIC "-//Recordare//DTD MusicXML 4.0 Partwise//EN" '
	'"http://www.musicxml.org/dtds/partwise.dtd">'
)
DEFAULT_CLEFS = ((1, "G", 2), (2, "F", 4))


def serialize_musicxml(score: Score) -> bytes:
	"""
	Write a Score as partwise MusicXML (UTF-8)

	Args:
		score: Score to write; musical content is preserved, layout is not

	Returns:
		MusicXML document bytes
	"""
	divisions = _divisions(score.events, score.measures)
	root = etree.Element("score-partwise", version="4.0")
	work = etree.SubElement(root, "work")
	_sub(work, "work-title", score.metadata.title or score.metadata.source_id or "Untitled")
	identification = etree.SubElement(root, "identification")
	encoding = etree.SubElement(identification, "encoding")
	_sub(encoding, "software", f"piano_pairs {__version__}")
	if score.metadata.genre:
		miscellaneous = etree.SubElement(identification, "miscellaneous")
		_sub(miscellaneous, "miscellaneous-field", score.metadata.genre, name="genre")

	part_list = etree.SubElement(root, "part-list")
	score_part = etree.SubElement(part_list, "score-part", id="P1")
	_sub(score_part, "part-name", "Piano")
	part = etree.SubElement(root, "part", id="P1")

	active_time = None
	for index, measure in enumerate(score.measures):
		active_time = measure.time or active_time
		_write_measure(part, measure, index == 0, divisions, score.staves, active_time)

	return etree.tostring(root, pretty_print=True, xml_declaration=True, encoding="UTF-8", doctype=DOCTYPE)


def write_file(score: Score, path: Union[str, Path]) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_bytes(serialize_musicxml(score))
	return path


def _sub(parent, tag: str, text=None, **attributes):
	element = etree.SubElement(parent, tag, **attributes)
	if text is not None:
		element.text = str(text)
	return element


def _divisions(events: Iterable[NoteEvent], measures: Iterable[Measure]) -> int:
	denominators = {1}
	for measure in measures:
		denominators.add(Fraction(measure.duration).denominator)
		for event in measure.events:
			denominators.add((event.onset - measure.start).denominator)
			if not event.grace:
				denominators.add(event.duration.denominator)
	return math.lcm(*denominators)


def _ticks(value: Fraction, divisions: int) -> int:
	return int(value * divisions)


def _write_measure(part, measure: Measure, first: bool, divisions: int, staves: int, active_time) -> None:
	measure_el = etree.SubElement(part, "measure", number=measure.number or "0")
	clefs = measure.clefs or (DEFAULT_CLEFS if first else ())
	if first or measure.key is not None or measure.time or clefs:
		attributes = etree.SubElement(measure_el, "attributes")
		if first:
			_sub(attributes, "divisions", divisions)
		if measure.key is not None or first:
			key = etree.SubElement(attributes, "key")
			_sub(key, "fifths", measure.key or 0)
		if measure.time:
			time = etree.SubElement(attributes, "time")
			_sub(time, "beats", measure.time[0])
			_sub(time, "beat-type", measure.time[1])
		if first:
			_sub(attributes, "staves", staves)
		for staff, sign, line in clefs:
			clef = etree.SubElement(attributes, "clef", number=str(staff))
			_sub(clef, "sign", sign)
			_sub(clef, "line", line)

	voices = defaultdict(list)
	for index, event in enumerate(measure.events):
		onset = event.onset - measure.start
		voices[event.voice].append((onset, 0 if event.grace else 1, event.chord, index, event))

	cursor = high_water = Fraction(0)
	last_staff = 1
	for voice in sorted(voices):
		if cursor > 0:
			backup = etree.SubElement(measure_el, "backup")
			_sub(backup, "duration", _ticks(cursor, divisions))
			cursor = Fraction(0)
		for onset, _grace, _chord, _index, event in sorted(voices[voice], key=lambda item: item[:4]):
			if not event.chord and onset > cursor:
				_forward(measure_el, onset - cursor, divisions, voice, event.staff)
				cursor = onset
			_write_note(measure_el, event, divisions)
			if not event.chord and not event.grace:
				cursor += event.duration
				high_water = max(high_water, cursor)
			last_staff = event.staff
	if not measure.events and measure.duration == time_signature_length(active_time):
		return
	if high_water < measure.duration:
		_forward(measure_el, measure.duration - cursor, divisions, max(voices) if voices else 1, last_staff)


def _forward(measure_el, gap: Fraction, divisions: int, voice: int, staff: int) -> None:
	forward = etree.SubElement(measure_el, "forward")
	_sub(forward, "duration", _ticks(gap, divisions))
	_sub(forward, "voice", voice)
	_sub(forward, "staff", staff)


def _write_note(measure_el, event: NoteEvent, divisions: int) -> None:
	if event.dynamics and not event.chord:
		direction = etree.SubElement(measure_el, "direction", placement="below")
		direction_type = etree.SubElement(direction, "direction-type")
		dynamics = etree.SubElement(direction_type, "dynamics")
		etree.SubElement(dynamics, event.dynamics)
		_sub(direction, "staff", event.staff)

	note = etree.SubElement(measure_el, "note")
	if event.grace:
		etree.SubElement(note, "grace")
	if event.chord:
		etree.SubElement(note, "chord")
	if event.pitch is None:
		etree.SubElement(note, "rest")
	else:
		pitch = etree.SubElement(note, "pitch")
		_sub(pitch, "step", event.pitch.step)
		if event.pitch.alter:
			_sub(pitch, "alter", event.pitch.alter)
		_sub(pitch, "octave", event.pitch.octave)
	if not event.grace:
		_sub(note, "duration", _ticks(event.duration, divisions))
	if event.tie_stop:
		etree.SubElement(note, "tie", type="stop")
	if event.tie_start:
		etree.SubElement(note, "tie", type="start")
	_sub(note, "voice", event.voice)
	try:
		notated = notate(event.duration)
	except UnencodableElementError:
		notated = None
	if notated is not None:
		_sub(note, "type", notated.type)
		for _ in range(notated.dots):
			etree.SubElement(note, "dot")
		if notated.tuplet:
			modification = etree.SubElement(note, "time-modification")
			_sub(modification, "actual-notes", notated.tuplet[0])
			_sub(modification, "normal-notes", notated.tuplet[1])
	_sub(note, "staff", event.staff)
	_write_notations(note, event)


def _write_notations(note, event: NoteEvent) -> None:
	articulations: List[str] = [a for a in event.articulations if a != "fermata"]
	if not (event.tie_start or event.tie_stop or event.articulations):
		return
	notations = etree.SubElement(note, "notations")
	if event.tie_stop:
		etree.SubElement(notations, "tied", type="stop")
	if event.tie_start:
		etree.SubElement(notations, "tied", type="start")
	if articulations:
		group = etree.SubElement(notations, "articulations")
		for name in articulations:
			etree.SubElement(group, name)
	if "fermata" in event.articulations:
		etree.SubElement(notations, "fermata")
