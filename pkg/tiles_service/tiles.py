'''
	Time-frequency tiles s = R_s × Ω_s.

	ann = 4^e is the annulus scale and ω = [k·2^−ℓ, (k+1)·2^−ℓ) a dyadic arc
	of angles (turns) with left child ω₁ and right child ω₂. R_s is the
	rectangle [a·d₁, (a+1)·d₁) × [b·d₂, (b+1)·d₂) in the frame rotated to the
	centre c(ω), with d₁ = 1/ann along e(c(ω)) and d₂ = 1/(|ω|·ann) across it.
	Ω_s is the sector {|η| ∈ [¾ann, 7/4·ann), θ(η) ∈ ω} in cycles per unit
	length.
'''
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from django.conf import settings

from operator_service.cones import Arc

logger = logging.getLogger(__name__)

RADIAL_BAND = (Fraction(3, 4), Fraction(7, 4))


def unit_vector(turns):
	angle = 2 * np.pi * float(turns)
	vector = np.array([np.cos(angle), np.sin(angle)])
	vector[np.abs(vector) < 1e-15] = 0.0
	return vector


def dyadic_arc(level, index) -> Arc:
	length = Fraction(1, 2 ** level)
	return Arc(index * length, length)


def arc_within(inner: Arc, outer: Arc) -> bool:
	'''Containment of dyadic arcs (nested or disjoint by construction).'''
	return inner.length <= outer.length and outer.contains_point(inner.start)


@dataclass(frozen=True, order=True)
class Tile:
	ann_exp: int
	level: int
	arc: int
	a: int
	b: int

	def __post_init__(self):
		if self.level < 0 or not 0 <= self.arc < 2 ** self.level:
			raise ValueError(f"no dyadic arc with level {self.level} and index {self.arc}")

	@property
	def ann(self) -> Fraction:
		return Fraction(4) ** self.ann_exp

	@property
	def omega(self) -> Arc:
		return dyadic_arc(self.level, self.arc)

	@property
	def omega1(self) -> Arc:
		return dyadic_arc(self.level + 1, 2 * self.arc)

	@property
	def omega2(self) -> Arc:
		return dyadic_arc(self.level + 1, 2 * self.arc + 1)

	@property
	def ecc(self) -> Fraction:
		return self.omega.length

	@property
	def orientation(self) -> Fraction:
		return self.omega.midpoint

	@property
	def d1(self) -> Fraction:
		return 1 / self.ann

	@property
	def d2(self) -> Fraction:
		return 1 / (self.ecc * self.ann)

	@property
	def area(self) -> Fraction:
		return self.d1 * self.d2

	@property
	def box(self):
		'''R_s in its rotated frame, (u0, u1, w0, w1) as Fractions.'''
		return (self.a * self.d1, (self.a + 1) * self.d1, self.b * self.d2, (self.b + 1) * self.d2)

	def frame(self):
		'''(e, e⊥): the long side of R_s runs along e⊥.'''
		e = unit_vector(self.orientation)
		return e, np.array([-e[1], e[0]])

	def centre(self):
		e, normal = self.frame()
		return (self.a + 0.5) * float(self.d1) * e + (self.b + 0.5) * float(self.d2) * normal

	def corners(self):
		e, normal = self.frame()
		u0, u1, w0, w1 = (float(value) for value in self.box)
		return np.array([u * e + w * normal for u in (u0, u1) for w in (w0, w1)])

	def frequency(self):
		'''Modulation of the packet: the centre of Ω_{1s}, in cycles.'''
		radius = float(self.ann * sum(RADIAL_BAND) / 2)
		return radius * unit_vector(self.omega1.midpoint)

	def rotated(self, points):
		'''(u, w) coordinates of points of shape (..., 2) in the tile's frame.'''
		e, normal = self.frame()
		return points @ e, points @ normal

	def inside_dilate(self, points, factor, tolerance=1e-12):
		'''Mask of points inside factor·R_s (dilation about the centre).'''
		u, w = self.rotated(np.asarray(points, dtype=float) - self.centre())
		half1, half2 = factor * float(self.d1) / 2, factor * float(self.d2) / 2
		return (np.abs(u) <= half1 * (1 + tolerance)) & (np.abs(w) <= half2 * (1 + tolerance))

	def contains_rect(self, other, factor=1) -> bool:
		return bool(np.all(self.inside_dilate(other.corners(), factor)))

	def __str__(self):
		return f"s(4^{self.ann_exp}, [{self.omega.start}, {self.omega.end}), {self.a}, {self.b})"


def build_tile_set(ann_exponents, levels, side=1, limit=None):
	'''
		Every tile with ann ∈ 4^ann_exponents and |ω| ∈ 2^−levels whose
		rectangle centre lies in the ambient square [0, side)².
	'''
	limit = settings.DIRLAB_TILE_LIMIT if limit is None else limit
	side = Fraction(side)
	span = float(side)
	corners = np.array([[0.0, 0.0], [span, 0.0], [0.0, span], [span, span]])
	tiles = []
	for ann_exp in ann_exponents:
		for level in levels:
			ann, ecc = Fraction(4) ** ann_exp, Fraction(1, 2 ** level)
			d1, d2 = float(1 / ann), float(1 / (ecc * ann))
			for arc in range(2 ** level):
				probe = Tile(ann_exp, level, arc, 0, 0)
				u, w = probe.rotated(corners)
				for a in range(math.floor(u.min() / d1) - 1, math.ceil(u.max() / d1) + 1):
					for b in range(math.floor(w.min() / d2) - 1, math.ceil(w.max() / d2) + 1):
						tile = Tile(ann_exp, level, arc, a, b)
						x, y = tile.centre()
						if 0 <= x < span and 0 <= y < span:
							tiles.append(tile)
				if len(tiles) > limit:
					raise ValueError("tile overflow")
	logger.debug(f"Built {len(tiles)} tiles over [0, {side})²")
	return sorted(tiles)
