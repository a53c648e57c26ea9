from piano_pairs.score.model import Measure, NoteEvent, Pitch, Score, ScoreMetadata, musically_equal
from piano_pairs.score.parser import parse_file, parse_musicxml, read_document
from piano_pairs.score.timeline import Segment, timeline
from piano_pairs.score.validation import validate_two_staff
from piano_pairs.score.writer import serialize_musicxml, write_file
