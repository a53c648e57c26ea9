from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from piano_pairs.exceptions import UnencodableElementError

TYPE_QUARTERS = {
	"breve": Fraction(8),
	"whole": Fraction(4),
	"half": Fraction(2),
	"quarter": Fraction(1),
	"eighth": Fraction(1, 2),
	"16th": Fraction(1, 4),
	"32nd": Fraction(1, 8),
	"64th": Fraction(1, 16),
}
# (actual, normal): `actual` notes in the time of `normal`
TUPLETS = ((3, 2), (5, 4), (6, 4), (7, 4))
MAX_DOTS = 2
ARTICULATIONS = ("staccato", "staccatissimo", "tenuto", "accent", "strong-accent", "fermata")
DYNAMICS = ("ppp", "pp", "p", "mp", "mf", "f", "ff", "fff", "sf", "sfz", "fp", "fz")


@dataclass(frozen=True)
class Notated:
	type: str
	dots: int = 0
	tuplet: Optional[Tuple[int, int]] = None

	@property
	def duration(self) -> Fraction:
		return notated_duration(self.type, self.dots, self.tuplet)


def notated_duration(type_name: str, dots: int = 0, tuplet: Optional[Tuple[int, int]] = None) -> Fraction:
	base = TYPE_QUARTERS[type_name]
	value = base * (2 - Fraction(1, 2**dots))
	if tuplet:
		actual, normal = tuplet
		value = value * Fraction(normal, actual)
	return value


def _build_table():
	table = {}
	for tuplet in (None, *TUPLETS):
		for type_name in TYPE_QUARTERS:
			for dots in range(MAX_DOTS + 1):
				value = notated_duration(type_name, dots, tuplet)
				table.setdefault(value, Notated(type_name, dots, tuplet))
	return table


_NOTATED = _build_table()


def notate(duration: Fraction) -> Notated:
	"""
	Find the simplest notated value (plain before tuplet, fewer dots first) for a duration

	Raises:
		UnencodableElementError: when no type/dot/tuplet combination matches
	"""
	notated = _NOTATED.get(Fraction(duration))
	if notated is None:
		raise UnencodableElementError([f"duration {duration}"])
	return notated


def split_gap(gap: Fraction) -> List[Notated]:
	"""
	Decompose a gap into a sequence of plain notated values, largest first
	"""
	remaining = Fraction(gap)
	pieces = []
	plain = sorted(
		((value, notated) for value, notated in _NOTATED.items() if notated.tuplet is None and notated.dots == 0),
		reverse=True,
		key=lambda item: item[0],
	)
	while remaining > 0:
		if remaining in _NOTATED:
			pieces.append(_NOTATED[remaining])
			break
		for value, notated in plain:
			if value <= remaining:
				pieces.append(notated)
				remaining -= value
				break
		else:
			raise UnencodableElementError([f"gap {gap}"])
	return pieces
