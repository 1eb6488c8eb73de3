'''
	Frequency cones: arcs of the circle of angles, partitions into arcs, and
	the rough and smooth cone projections built on them.
'''
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from direction_service.directions import DirectionSet, LacunaryCertificate, circular_distance
from spectral_service.grid import GridField
from spectral_service.services import apply_symbol

from .multipliers import cone_window

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Arc:
	'''[start, start + length) on the circle of angles, in turns.'''
	start: Fraction
	length: Fraction

	def __post_init__(self):
		start, length = Fraction(self.start) % 1, Fraction(self.length)
		if not 0 < length <= 1:
			raise ValueError(f"arc length must lie in (0, 1], got {length}")
		object.__setattr__(self, 'start', start)
		object.__setattr__(self, 'length', length)

	@classmethod
	def between(cls, start, end):
		'''The arc running counter-clockwise from start to end.'''
		length = (Fraction(end) - Fraction(start)) % 1
		return cls(start, length or 1)

	@property
	def end(self):
		return self.start + self.length

	@property
	def midpoint(self):
		return (self.start + self.length / 2) % 1

	def contains_point(self, angle) -> bool:
		return (Fraction(angle) - self.start) % 1 < self.length

	def contains(self, theta):
		'''Mask of float angles in [0, 1) that fall in the arc.'''
		if self.length == 1:
			return np.ones(np.shape(theta), dtype=bool)
		low, high = float(self.start), float(self.end)
		if self.end <= 1:
			return (theta >= low) & (theta < high)
		return (theta >= low) | (theta < high - 1.0)

	def overlaps(self, other) -> bool:
		return (other.start - self.start) % 1 < self.length or (self.start - other.start) % 1 < other.length

	def __str__(self):
		return f"[{self.start}, {self.end})"


@dataclass(frozen=True)
class ConePartition:
	'''
		Increasing boundaries b_0 < … < b_{M−1} in [0, 1); arc j is
		[b_j, b_{j+1}) and the last arc wraps around to b_0.
	'''
	boundaries: tuple

	def __post_init__(self):
		values = tuple(Fraction(value) for value in self.boundaries)
		if not values:
			raise ValueError("a cone partition needs at least one boundary")
		if any(not 0 <= value < 1 for value in values):
			raise ValueError("partition boundaries must lie in [0, 1)")
		if any(not a < b for a, b in zip(values, values[1:])):
			raise ValueError("partition boundaries must be strictly increasing")
		object.__setattr__(self, 'boundaries', values)

	@classmethod
	def from_points(cls, points):
		return cls(tuple(sorted({Fraction(point) % 1 for point in points})))

	@classmethod
	def uniform(cls, M):
		if M < 1:
			raise ValueError("a uniform partition needs M >= 1")
		return cls(tuple(Fraction(j, M) for j in range(M)))

	@classmethod
	def lacunary(cls, node, depth):
		'''Boundaries {node} ∪ {node ± 2^{−j} : 1 ≤ j ≤ depth}.'''
		node = Fraction(node)
		points = [node]
		for j in range(1, depth + 1):
			points += [node + Fraction(1, 2 ** j), node - Fraction(1, 2 ** j)]
		return cls.from_points(points)

	@classmethod
	def from_certificate(cls, V: DirectionSet, certificate: LacunaryCertificate):
		'''Boundaries at the node and at node ± d_j for each distance d_j of the sequence.'''
		node = certificate.node
		points = [node]
		for direction in certificate.directions(V):
			distance = circular_distance(direction.angle, node)
			if distance:
				points += [node + distance, node - distance]
		return cls.from_points(points)

	@property
	def arcs(self):
		values = self.boundaries
		if len(values) == 1:
			return [Arc(values[0], 1)]
		return [Arc.between(a, b) for a, b in zip(values, values[1:] + (values[0],))]

	def __len__(self):
		return len(self.boundaries)


def lacunary_arc_partition(V: DirectionSet, certificate: LacunaryCertificate = None) -> ConePartition:
	from direction_service.services import extract_lacunary_subsequence

	certificate = certificate or extract_lacunary_subsequence(V)
	return ConePartition.from_certificate(V, certificate)


def _rough_symbol(arc):
	return lambda lattice: arc.contains(lattice.theta)


def cone_project(f: GridField, arc: Arc) -> GridField:
	'''G_α: restriction to the frequencies with θ(ξ) ∈ α; ξ = 0 is dropped.'''
	return apply_symbol(f, _rough_symbol(arc), zero_value=0)


def _smooth_symbol(theta, start, length):
	# minimal image of θ − start in [−L/2, 1 − L/2)
	offset = np.mod(theta - float(start) + float(length) / 2, 1.0) - float(length) / 2
	return cone_window(offset / float(length))


def smooth_cone_project(f: GridField, arc: Arc) -> GridField:
	'''
		G^s_I: the symbol β((θ(ξ) − start)/|I|). Its support is the doubled arc
		[start − |I|/2, start + 3|I|/2], so arcs longer than half a turn are refused.
	'''
	if arc.length > Fraction(1, 2):
		raise ValueError("smooth cones need arcs of at most half a turn")
	return apply_symbol(f, lambda lattice: _smooth_symbol(lattice.theta, arc.start, arc.length), zero_value=0)


def refined_smooth_cone(f: GridField, arc: Arc, pieces=128) -> GridField:
	'''
		Sum of `pieces` smooth windows of length |I|/pieces tiling the arc plus
		one guard window at each end; the symbol equals 1 on the whole arc.
	'''
	if pieces < 1:
		raise ValueError("pieces must be positive")
	step = arc.length / pieces
	if step > Fraction(1, 2):
		raise ValueError("smooth cones need arcs of at most half a turn")

	def symbol(lattice):
		total = np.zeros(lattice.theta.shape)
		for j in range(-1, pieces + 1):
			total += _smooth_symbol(lattice.theta, arc.start + j * step, step)
		return total

	return apply_symbol(f, symbol, zero_value=0)


def signed_cone_sum(f: GridField, arcs, signs) -> GridField:
	'''Σ_j ε_j G_{α_j} f for pairwise disjoint arcs and ε_j ∈ {−1, 0, 1}.'''
	arcs, signs = list(arcs), list(signs)
	if len(arcs) != len(signs):
		raise ValueError("one sign per arc is required")
	if any(sign not in (-1, 0, 1) for sign in signs):
		raise ValueError("signs must be -1, 0 or 1")
	for i, first in enumerate(arcs):
		for second in arcs[i + 1:]:
			if first.overlaps(second):
				raise ValueError("overlapping arcs")

	def symbol(lattice):
		total = np.zeros(lattice.theta.shape)
		for arc, sign in zip(arcs, signs):
			if sign:
				total += sign * arc.contains(lattice.theta)
		return total

	return apply_symbol(f, symbol, zero_value=0)


def _cone_pieces(f, partition):
	spectrum = np.fft.fft2(f.data, norm="ortho")
	theta = f.lattice().theta
	spectrum[0, 0] = 0
	for arc in partition.arcs:
		yield np.fft.ifft2(np.where(arc.contains(theta), spectrum, 0), norm="ortho")


def cone_square_function(f: GridField, partition: ConePartition) -> GridField:
	total = np.zeros(f.shape)
	for piece in _cone_pieces(f, partition):
		total += np.abs(piece) ** 2
	return f.with_data(np.sqrt(total))


def even_odd_split(f: GridField, partition: ConePartition):
	'''(Σ_j G_{α_{2j}} f, Σ_j G_{α_{2j+1}} f); the two add up to f − mean.'''
	even = np.zeros(f.shape, dtype=np.complex128)
	odd = np.zeros(f.shape, dtype=np.complex128)
	for index, piece in enumerate(_cone_pieces(f, partition)):
		if index % 2:
			odd += piece
		else:
			even += piece
	return f.with_data(even), f.with_data(odd)


def partial_cone_maximal(f: GridField, partition: ConePartition) -> GridField:
	'''max_ν |Σ_{j ≤ ν} G_{α_j} f|.'''
	running = np.zeros(f.shape, dtype=np.complex128)
	best = np.zeros(f.shape)
	for piece in _cone_pieces(f, partition):
		running += piece
		best = np.maximum(best, np.abs(running))
	return f.with_data(best)
