import io
import zipfile
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from lxml import etree

from piano_pairs.exceptions import (
	MalformedScoreError,
	MissingDivisionsError,
	ScoreSyntaxError,
	UnsupportedStructureError,
)
from piano_pairs.logging import log_warning
from piano_pairs.score.model import Measure, NoteEvent, Pitch, Score, ScoreMetadata, time_signature_length
from piano_pairs.score.notation import ARTICULATIONS, DYNAMICS, TYPE_QUARTERS, notated_duration

_PARSER = etree.XMLParser(resolve_entities=False, no_network=True, remove_comments=True, huge_tree=True)


def read_document(path: Union[str, Path]) -> bytes:
	"""
	Read the root MusicXML document of a .musicxml/.xml file or a compressed .mxl container
	"""
	path = Path(path)
	if path.suffix.lower() != ".mxl":
		return path.read_bytes()
	return unpack_mxl(path.read_bytes())


def unpack_mxl(data: bytes) -> bytes:
	try:
		archive = zipfile.ZipFile(io.BytesIO(data))
	except zipfile.BadZipFile:
		raise UnsupportedStructureError("Compressed MusicXML is not a zip container")
	names = archive.namelist()
	if "META-INF/container.xml" in names:
		container = etree.fromstring(archive.read("META-INF/container.xml"), _PARSER)
		for rootfile in container.iter("{*}rootfile", "rootfile"):
			full_path = rootfile.get("full-path")
			if full_path and full_path in names and not full_path.startswith("META-INF"):
				return archive.read(full_path)
	candidates = [
		name for name in names if name.endswith((".xml", ".musicxml")) and not name.startswith("META-INF")
	]
	if not candidates:
		raise UnsupportedStructureError("No MusicXML document found in .mxl container")
	return archive.read(candidates[0])


def parse_file(path: Union[str, Path], source_id: Optional[str] = None) -> Score:
	path = Path(path)
	return parse_musicxml(read_document(path), source_id=source_id or path.stem)


def parse_musicxml(document: bytes, source_id: str = "") -> Score:
	"""
	Parse a partwise MusicXML document into a Score

	Args:
		document: Raw MusicXML bytes (uncompressed)
		source_id: Provenance identifier stored in the metadata

	Returns:
		Score with absolute onsets in quarter notes
	"""
	if isinstance(document, str):
		document = document.encode("utf-8")
	try:
		root = etree.fromstring(document, _PARSER)
	except etree.XMLSyntaxError as e:
		raise ScoreSyntaxError(f"Invalid XML in {source_id or 'document'}: {e}")

	if root.tag == "score-timewise":
		raise UnsupportedStructureError("Timewise MusicXML is not supported")
	if root.tag != "score-partwise":
		raise UnsupportedStructureError(f"Unexpected root element <{root.tag}>")

	parts = root.findall("part")
	if len(parts) != 1:
		raise UnsupportedStructureError(f"Expected exactly one part, found {len(parts)}")

	metadata = ScoreMetadata(
		title=_text(root, "work/work-title") or _text(root, "movement-title") or "",
		genre=_genre(root),
		source_id=source_id,
	)
	measures, staves = _parse_part(parts[0], source_id)
	return Score(measures=tuple(measures), metadata=metadata, staves=staves)


def _text(element, path: str) -> Optional[str]:
	found = element.find(path)
	if found is None or found.text is None:
		return None
	return found.text.strip()


def _genre(root) -> str:
	for item in root.iterfind("identification/miscellaneous/miscellaneous-field"):
		if item.get("name") == "genre" and item.text:
			return item.text.strip()
	return ""


class _PartReader:
	def __init__(self, source_id: str):
		self.source_id = source_id
		self.divisions: Optional[int] = None
		self.staves = 1
		self.time: Optional[Tuple[int, int]] = None

	def duration(self, element, what: str) -> Fraction:
		text = _text(element, "duration")
		if text is None:
			raise MalformedScoreError(f"<{what}> without <duration> in {self.source_id}")
		if self.divisions is None:
			raise MissingDivisionsError(f"<{what}> before any <divisions> in {self.source_id}")
		return Fraction(_whole(text, "duration", self.source_id), self.divisions)


def _whole(text: str, what: str, source_id: str) -> int:
	try:
		value = Fraction(text)
	except (ValueError, ZeroDivisionError):
		raise MalformedScoreError(f"<{what}> {text!r} is not a number in {source_id}")
	if value.denominator != 1:
		raise MalformedScoreError(f"<{what}> {text!r} is not a whole number of divisions in {source_id}")
	return int(value)


def _parse_part(part, source_id: str) -> Tuple[List[Measure], int]:
	reader = _PartReader(source_id)
	measures = []
	start = Fraction(0)
	max_staff = 1
	for measure_el in part.findall("measure"):
		measure = _parse_measure(measure_el, reader, start)
		max_staff = max([max_staff] + [event.staff for event in measure.events])
		measures.append(measure)
		start = measure.end
	return measures, max(reader.staves, max_staff)


def _parse_measure(measure_el, reader: _PartReader, start: Fraction) -> Measure:
	cursor = Fraction(0)
	high_water = Fraction(0)
	last_onset = Fraction(0)
	grace_onset = Fraction(0)
	time = key = None
	clefs: Dict[int, Tuple[str, int]] = {}
	pending_dynamics: Dict[int, str] = {}
	events = []

	for child in measure_el:
		tag = child.tag
		if tag == "attributes":
			divisions = _text(child, "divisions")
			if divisions is not None:
				reader.divisions = _whole(divisions, "divisions", reader.source_id)
				if reader.divisions <= 0:
					raise MalformedScoreError(f"Non-positive divisions in {reader.source_id}")
			staves = _text(child, "staves")
			if staves is not None:
				reader.staves = int(staves)
			fifths = _text(child, "key/fifths")
			if fifths is not None:
				key = int(fifths)
			beats, beat_type = _text(child, "time/beats"), _text(child, "time/beat-type")
			if beats is not None and beat_type is not None:
				try:
					time = (int(beats), int(beat_type))
				except ValueError:
					# composite meters like "3+2" are summed
					time = (sum(int(b) for b in beats.split("+")), int(beat_type))
				reader.time = time
			for clef in child.findall("clef"):
				number = int(clef.get("number", "1"))
				clefs[number] = (_text(clef, "sign") or "G", int(_text(clef, "line") or 2))
		elif tag == "backup":
			cursor -= reader.duration(child, "backup")
			if cursor < 0:
				raise MalformedScoreError(f"<backup> before measure start in {reader.source_id}")
		elif tag == "forward":
			cursor += reader.duration(child, "forward")
			high_water = max(high_water, cursor)
		elif tag == "direction":
			staff = int(_text(child, "staff") or 1)
			for dynamics in child.iterfind("direction-type/dynamics"):
				for mark in dynamics:
					if mark.tag in DYNAMICS:
						pending_dynamics[staff] = mark.tag
		elif tag == "note":
			event, advance = _parse_note(child, reader, start, cursor, last_onset, grace_onset, pending_dynamics)
			if event is None:
				continue
			if not event.chord:
				if event.grace:
					grace_onset = cursor
				else:
					last_onset = cursor
			cursor += advance
			high_water = max(high_water, cursor)
			events.append(event)

	duration = high_water if high_water > 0 else time_signature_length(reader.time)
	return Measure(
		number=measure_el.get("number", ""),
		start=start,
		duration=duration,
		events=tuple(events),
		time=time,
		key=key,
		clefs=tuple(sorted((staff, sign, line) for staff, (sign, line) in clefs.items())),
	)


def _parse_note(note, reader: _PartReader, start, cursor, last_onset, grace_onset, pending_dynamics):
	grace = note.find("grace") is not None
	chord = note.find("chord") is not None
	if note.find("cue") is not None:
		return None, Fraction(0)

	if grace:
		type_name = _text(note, "type") or "eighth"
		if type_name not in TYPE_QUARTERS:
			raise MalformedScoreError(f"Unknown note type {type_name!r} in {reader.source_id}")
		duration = notated_duration(type_name, len(note.findall("dot")))
	else:
		duration = reader.duration(note, "note")
		if duration <= 0:
			raise MalformedScoreError(f"Non-positive note duration in {reader.source_id}")

	pitch = None
	pitch_el = note.find("pitch")
	if pitch_el is not None:
		if _text(pitch_el, "step") not in ("C", "D", "E", "F", "G", "A", "B") or _text(pitch_el, "octave") is None:
			raise MalformedScoreError(f"Incomplete <pitch> in {reader.source_id}")
		pitch = Pitch(
			step=_text(pitch_el, "step"),
			alter=int(round(float(_text(pitch_el, "alter") or 0))),
			octave=int(_text(pitch_el, "octave")),
		)
	elif note.find("unpitched") is not None:
		log_warning("score", reader.source_id, "unpitched note read as rest")

	staff = int(_text(note, "staff") or 1)
	ties = {tie.get("type") for tie in note.findall("tie")}
	ties |= {tie.get("type") for tie in note.iterfind("notations/tied")}
	articulations = []
	for notations in note.findall("notations"):
		for articulation_group in notations.findall("articulations"):
			articulations.extend(child.tag for child in articulation_group if child.tag in ARTICULATIONS)
		if notations.find("fermata") is not None:
			articulations.append("fermata")

	# grace chord members follow their own grace head
	onset = (grace_onset if grace else last_onset) if chord else cursor
	event = NoteEvent(
		onset=start + onset,
		duration=duration,
		pitch=pitch,
		voice=int(_text(note, "voice") or 1),
		staff=staff,
		chord=chord,
		tie_start="start" in ties,
		tie_stop="stop" in ties,
		grace=grace,
		articulations=tuple(dict.fromkeys(articulations)),
		dynamics=pending_dynamics.pop(staff, None) if not chord else None,
	)
	advance = Fraction(0) if grace or chord else duration
	return event, advance
