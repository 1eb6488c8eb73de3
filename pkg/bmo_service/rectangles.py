'''
	Axis-parallel dyadic rectangles from the three shifted grids, exact union
	areas, and the raster that turns rectangles into index ranges.

	The interval with scale j, offset ℓ in grid i is 2^j (ℓ + i(−1)^j/3 + [0, 1)).
'''
import math
from dataclasses import dataclass
from fractions import Fraction

SHIFTS = (0, 1, 2)


def dyadic_interval(shift, scale, offset):
	'''(start, end) of 2^scale (offset + shift·(−1)^scale/3 + [0, 1)).'''
	if shift not in SHIFTS:
		raise ValueError(f"grid shift must be 0, 1 or 2, got {shift}")
	length = Fraction(2) ** scale
	start = length * (offset + Fraction(shift * (-1) ** (scale % 2), 3))
	return start, start + length


@dataclass(frozen=True, order=True)
class DyadicRect:
	shift: int
	j1: int
	l1: int
	j2: int
	l2: int

	def __post_init__(self):
		if self.shift not in SHIFTS:
			raise ValueError(f"grid shift must be 0, 1 or 2, got {self.shift}")

	@property
	def I(self):
		return dyadic_interval(self.shift, self.j1, self.l1)

	@property
	def J(self):
		return dyadic_interval(self.shift, self.j2, self.l2)

	@property
	def box(self):
		'''(x0, x1, y0, y1) as Fractions.'''
		return self.I + self.J

	@property
	def area(self) -> Fraction:
		return Fraction(2) ** (self.j1 + self.j2)

	def contains(self, other) -> bool:
		x0, x1, y0, y1 = self.box
		a0, a1, b0, b1 = other.box
		return x0 <= a0 and a1 <= x1 and y0 <= b0 and b1 <= y1

	def __str__(self):
		return f"D{self.shift}[{self.j1},{self.l1}]x[{self.j2},{self.l2}]"


def integer_boxes(boxes):
	'''Rescales Fraction boxes to integers over their common denominator.'''
	denominator = math.lcm(*(Fraction(value).denominator for box in boxes for value in box)) if boxes else 1
	return [tuple(int(Fraction(value) * denominator) for value in box) for box in boxes], denominator


def union_area(boxes):
	'''
		Exact area of a union of half-open boxes (x0, x1, y0, y1) by
		coordinate compression: for each slab between consecutive x-events
		the covered y-length is merged from the boxes spanning the slab.
	'''
	boxes = [box for box in boxes if box[1] > box[0] and box[3] > box[2]]
	if not boxes:
		return 0
	xs = sorted({box[0] for box in boxes} | {box[1] for box in boxes})
	total = 0
	for left, right in zip(xs, xs[1:]):
		spans = sorted((box[2], box[3]) for box in boxes if box[0] <= left and right <= box[1])
		covered, reach = 0, None
		for low, high in spans:
			if reach is None or low > reach:
				covered += high - low
				reach = high
			elif high > reach:
				covered += high - reach
				reach = high
		total += covered * (right - left)
	return total


def exact_union_area(boxes) -> Fraction:
	scaled, denominator = integer_boxes(list(boxes))
	return Fraction(union_area(scaled), denominator ** 2)


@dataclass(frozen=True)
class Raster:
	'''
		An n×n sampling of the square [origin, origin + side)²; cell (i, j)
		covers [x0 + i·h, x0 + (i+1)·h) × [y0 + j·h, y0 + (j+1)·h).
	'''
	origin: tuple
	side: Fraction
	n: int

	def __post_init__(self):
		object.__setattr__(self, 'origin', tuple(Fraction(value) for value in self.origin))
		object.__setattr__(self, 'side', Fraction(self.side))
		if self.side <= 0 or self.n < 1:
			raise ValueError("a raster needs a positive side and resolution")

	@property
	def cell(self) -> Fraction:
		return self.side / self.n

	def _index(self, value, origin):
		position = (value - origin) / self.cell
		if position.denominator != 1 or not 0 <= position <= self.n:
			raise ValueError("misaligned raster")
		return int(position)

	def cells(self, rect):
		'''Index ranges (i0, i1, j0, j1) of the cells covered by the rectangle.'''
		x0, x1, y0, y1 = rect.box
		return (
			self._index(x0, self.origin[0]), self._index(x1, self.origin[0]),
			self._index(y0, self.origin[1]), self._index(y1, self.origin[1]),
		)

	@classmethod
	def covering(cls, rects, n=None, cells_per_side=2):
		'''
			Smallest power-of-two raster anchored at the lower-left corner of the
			family in which the smallest rectangle side spans `cells_per_side` cells.
		'''
		boxes = [rect.box for rect in rects]
		if not boxes:
			raise ValueError("cannot build a raster for an empty family")
		x0, y0 = min(box[0] for box in boxes), min(box[2] for box in boxes)
		extent = max(max(box[1] for box in boxes) - x0, max(box[3] for box in boxes) - y0)
		cell = min(min(box[1] - box[0], box[3] - box[2]) for box in boxes) / cells_per_side
		if n is None:
			n = 8
			while n * cell < extent:
				n *= 2
		raster = cls((x0, y0), cell * n, n)
		for rect in rects:
			raster.cells(rect)
		return raster
