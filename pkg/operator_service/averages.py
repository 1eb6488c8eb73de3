'''
	Discrete directional averages on the torus: M_V and the bi-parameter
	maximal function in the coordinates of a direction.

	Averages are taken over sample sets, never interpolated. For a direction
	that is a lattice direction (p, q) with |p|, |q| ≤ 4 the segment samples
	are x + s·(p, q); any other direction uses the nearest lattice point to
	x + s·v, one cell per step.
'''
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from direction_service.directions import Direction, DirectionSet
from spectral_service.grid import GridField

logger = logging.getLogger(__name__)

LATTICE_REACH = 4


def _lattice_directions():
	table = []
	for p in range(-LATTICE_REACH, LATTICE_REACH + 1):
		for q in range(-LATTICE_REACH, LATTICE_REACH + 1):
			if (p or q) and math.gcd(p, q) == 1:
				table.append(((math.atan2(q, p) / (2 * math.pi)) % 1.0, (p, q)))
	return table


LATTICE_DIRECTIONS = _lattice_directions()


def lattice_step(angle):
	'''The primitive step (p, q) matching the angle, or None.'''
	for value, step in LATTICE_DIRECTIONS:
		if min(abs(value - angle), 1 - abs(value - angle)) <= 1e-12:
			return step
	return None


def segment_offsets(angle, t):
	'''Integer offset of the t-th sample along the direction.'''
	step = lattice_step(angle)
	if step is not None:
		return t * step[0], t * step[1]
	turn = 2 * math.pi * angle
	return int(np.rint(t * math.cos(turn))), int(np.rint(t * math.sin(turn)))


def _shifted(values, offset):
	'''values[i + a, j + b] (periodic).'''
	return np.roll(values, (-offset[0], -offset[1]), axis=(0, 1))


def directional_average_sup(values, angle, max_half_length):
	'''max over 0 ≤ t ≤ L of the mean of values over {x + offset(s) : |s| ≤ t}.'''
	total = np.array(values, dtype=float)
	best = total.copy()
	for t in range(1, max_half_length + 1):
		forward = segment_offsets(angle, t)
		backward = segment_offsets(angle, -t)
		total = total + _shifted(values, forward) + _shifted(values, backward)
		best = np.maximum(best, total / (2 * t + 1))
	return best


def _angle(v):
	return v.float_view if isinstance(v, Direction) else float(v)


def default_reach(n):
	'''Largest half-length whose segment never wraps onto itself on the n-torus.'''
	return (n - 1) // 2


def maximal_avg_directional(f: GridField, V: DirectionSet, max_half_length=None, workers=1) -> GridField:
	'''M_V f(x) = max_{v ∈ V} max_ε (average of |f| over the segment of half-length ε at x).'''
	length = default_reach(f.n) if max_half_length is None else int(max_half_length)
	values = np.abs(f.data)
	angles = [_angle(v) for v in V]

	def compute(angle):
		return directional_average_sup(values, angle, length)

	if workers > 1:
		with ThreadPoolExecutor(max_workers=workers) as executor:
			fields = list(executor.map(compute, angles))
	else:
		fields = [compute(angle) for angle in angles]
	best = fields[0]
	for field in fields[1:]:
		best = np.maximum(best, field)
	return f.with_data(best)


def rectangle_sup(values, e1, e2, max_a, max_b):
	'''
		max over 0 ≤ a ≤ max_a, 0 ≤ b ≤ max_b of the mean of values over
		{x + s·e1 + r·e2 : |s| ≤ a, |r| ≤ b}, periodic in both axes.
	'''
	values = np.asarray(values, dtype=float)
	line = values.copy()
	best = values.copy()
	for a in range(max_a + 1):
		if a:
			line = line + _shifted(values, (a * e1[0], a * e1[1])) + _shifted(values, (-a * e1[0], -a * e1[1]))
		total = line.copy()
		best = np.maximum(best, total / (2 * a + 1))
		for b in range(1, max_b + 1):
			total = total + _shifted(line, (b * e2[0], b * e2[1])) + _shifted(line, (-b * e2[0], -b * e2[1]))
			best = np.maximum(best, total / ((2 * a + 1) * (2 * b + 1)))
	return best


def rectangle_frame(angle):
	'''Lattice frame (e1, e2) of an axis or diagonal direction.'''
	angle = Fraction(angle)
	if (angle * 4).denominator == 1:
		return (1, 0), (0, 1)
	if (angle * 8).denominator == 1:
		return (1, 1), (-1, 1)
	raise ValueError("resampling required")


def bi_maximal(f: GridField, v, max_half_width=None) -> GridField:
	'''
		Averages of |f| over rectangles centred at x with sides along v and v^⊥.
		Only directions whose rotated frame is a lattice frame are supported.
	'''
	angle = v.angle if isinstance(v, Direction) else Fraction(v)
	e1, e2 = rectangle_frame(angle)
	width = default_reach(f.n) if max_half_width is None else int(max_half_width)
	return f.with_data(rectangle_sup(np.abs(f.data), e1, e2, width, width))
