'''
	Exact-rational directions on the circle.

	A direction is an angle in turns, v = (cos 2πθ, sin 2πθ) with θ ∈ [0, 1).
	All lacunarity logic runs on Fractions; `float_view` is only for the
	spectral side.
'''
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np


def circular_distance(a, b) -> Fraction:
	'''min(|a − b|, 1 − |a − b|) on [0, 1).'''
	gap = abs(Fraction(a) - Fraction(b)) % 1
	return min(gap, 1 - gap)


@dataclass(frozen=True, order=True)
class Direction:
	angle: Fraction

	def __post_init__(self):
		angle = Fraction(self.angle)
		if not 0 <= angle < 1:
			raise ValueError(f"direction angle must lie in [0, 1), got {angle}")
		object.__setattr__(self, 'angle', angle)

	@classmethod
	def of(cls, value):
		'''Direction from any rational, reduced mod 1.'''
		return cls(Fraction(value) % 1)

	@property
	def float_view(self) -> float:
		return float(self.angle)

	def vector(self):
		turn = 2 * np.pi * self.float_view
		return np.cos(turn), np.sin(turn)

	def __str__(self):
		return str(self.angle)


@dataclass(frozen=True)
class DirectionSet:
	'''
		Strictly increasing directions with the family they were generated from.
		`params` keeps the generator arguments (q, n, ratio, node, N).
	'''
	dirs: tuple
	family: str = 'custom'
	params: dict = field(default_factory=dict, compare=False)

	def __post_init__(self):
		dirs = tuple(entry if isinstance(entry, Direction) else Direction(entry) for entry in self.dirs)
		if not dirs:
			raise ValueError("a direction set needs at least one direction")
		for previous, current in zip(dirs, dirs[1:]):
			if not previous.angle < current.angle:
				raise ValueError(f"directions must be strictly increasing ({previous} >= {current})")
		object.__setattr__(self, 'dirs', dirs)

	@classmethod
	def from_angles(cls, angles, family='custom', **params):
		'''Sorts the angles; duplicates are an error.'''
		values = sorted(Fraction(angle) % 1 for angle in angles)
		if len(set(values)) != len(values):
			raise ValueError("duplicate directions")
		return cls(tuple(Direction(value) for value in values), family, params)

	@property
	def N(self):
		return len(self.dirs)

	@property
	def angles(self):
		return [entry.angle for entry in self.dirs]

	def float_angles(self):
		return np.array([entry.float_view for entry in self.dirs])

	def index_of(self, angle):
		angle = Fraction(angle)
		for index, entry in enumerate(self.dirs):
			if entry.angle == angle:
				return index
		raise KeyError(angle)

	def subset(self, indices):
		return DirectionSet.from_angles([self.dirs[index].angle for index in indices])

	def rotated(self, turn):
		return DirectionSet.from_angles([entry.angle + Fraction(turn) for entry in self.dirs], self.family, **self.params)

	def __len__(self):
		return len(self.dirs)

	def __iter__(self):
		return iter(self.dirs)

	def __getitem__(self, index):
		return self.dirs[index]


@dataclass(frozen=True)
class LacunaryCertificate:
	'''
		An ordered index list into a DirectionSet together with the node v∞.
		Valid when every consecutive pair satisfies
		|v_{j+1} − v∞| ≤ ½ |v_j − v∞| (circular distance, exact).
	'''
	subsequence: tuple
	node: Fraction

	def __post_init__(self):
		object.__setattr__(self, 'subsequence', tuple(int(index) for index in self.subsequence))
		object.__setattr__(self, 'node', Fraction(self.node) % 1)

	def directions(self, V):
		return [V[index] for index in self.subsequence]

	def is_valid(self, V):
		from .services import is_lacunary_with_node

		if len(set(self.subsequence)) != len(self.subsequence):
			return False
		if any(not 0 <= index < V.N for index in self.subsequence):
			return False
		return is_lacunary_with_node(self.directions(V), self.node)

	def __len__(self):
		return len(self.subsequence)
