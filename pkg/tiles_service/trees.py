'''
	Trees of tiles, their shadows and sizes.

	A family T is a lacunary tree when ∩ω_{2s} ≠ ∅, an overlapping tree when
	∩ω_{1s} ≠ ∅ and a conical tree when all ω_{2s} coincide. Dyadic arcs are
	nested or disjoint, so an intersection is non-empty exactly when every arc
	contains the shortest one; its midpoint is the stored top direction.
'''
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from django.conf import settings

from bmo_service.rectangles import integer_boxes, union_area
from operator_service.cones import Arc

from .tiles import Tile, arc_within

logger = logging.getLogger(__name__)

KINDS = ('lacunary', 'overlapping', 'conical')


def common_arc(arcs) -> Optional[Arc]:
	'''The intersection of dyadic arcs, or None when it is empty.'''
	arcs = list(arcs)
	if not arcs:
		return None
	shortest = min(arcs, key=lambda arc: (arc.length, arc.start))
	return shortest if all(arc_within(shortest, arc) for arc in arcs) else None


def kind_holds(tiles, kind, witness) -> bool:
	witness = Fraction(witness)
	if kind == 'lacunary':
		return all(tile.omega2.contains_point(witness) for tile in tiles)
	if kind == 'overlapping':
		return all(tile.omega1.contains_point(witness) for tile in tiles)
	if kind == 'conical':
		return len({tile.omega2 for tile in tiles}) == 1 and tiles[0].omega2.contains_point(witness)
	raise ValueError(f"unknown tree kind '{kind}'")


def classify_tree(tiles) -> str:
	'''The strongest class of the family: conical, lacunary, overlapping or "none".'''
	tiles = list(tiles)
	if not tiles:
		raise ValueError("cannot classify an empty family")
	if len({tile.omega2 for tile in tiles}) == 1:
		return 'conical'
	if common_arc(tile.omega2 for tile in tiles):
		return 'lacunary'
	if common_arc(tile.omega1 for tile in tiles):
		return 'overlapping'
	return 'none'


def top_direction(tiles, kind) -> Fraction:
	arcs = (tile.omega1 for tile in tiles) if kind == 'overlapping' else (tile.omega2 for tile in tiles)
	arc = common_arc(arcs)
	if arc is None:
		raise ValueError(f"family is not a {kind} tree")
	return arc.midpoint


@dataclass(frozen=True)
class Tree:
	tiles: tuple
	kind: str
	witness: Fraction

	def __post_init__(self):
		object.__setattr__(self, 'tiles', tuple(self.tiles))
		object.__setattr__(self, 'witness', Fraction(self.witness))
		if not self.tiles:
			raise ValueError("a tree needs at least one tile")
		if self.kind not in KINDS or not kind_holds(self.tiles, self.kind, self.witness):
			raise ValueError(f"tiles do not form a {self.kind} tree with top {self.witness}")

	@classmethod
	def of(cls, tiles, kind=None):
		tiles = tuple(tiles)
		kind = kind or classify_tree(tiles)
		if kind == 'none':
			raise ValueError("tiles do not form a tree")
		return cls(tiles, kind, top_direction(tiles, kind))

	def __len__(self):
		return len(self.tiles)


def crown(tree: Tree):
	'''∪ω_{2s} as disjoint arcs, merged where they touch.'''
	merged = []
	for arc in sorted({tile.omega2 for tile in tree.tiles}, key=lambda arc: arc.start):
		if merged and arc.start <= merged[-1][1]:
			merged[-1][1] = max(merged[-1][1], arc.end)
		else:
			merged.append([arc.start, arc.end])
	return [Arc(start, end - start) for start, end in merged]


def convex_union_area(polygons) -> float:
	'''
		Area of a union of convex polygons, given as an array (k, m, 2) of
		vertices in cyclic order. Between consecutive x-events (vertices and
		edge crossings) every cross-section is an interval with linear ends,
		so the covered length is linear on each slab and its midpoint value
		integrates exactly.
	'''
	polygons = np.asarray(polygons, dtype=float)
	if not len(polygons):
		return 0.0
	starts = polygons.reshape(-1, 2)
	ends = np.roll(polygons, -1, axis=1).reshape(-1, 2)
	r = ends - starts
	i, j = np.triu_indices(len(starts), k=1)
	denominator = r[i, 0] * r[j, 1] - r[i, 1] * r[j, 0]
	gap = starts[j] - starts[i]
	usable = np.abs(denominator) > 1e-14
	with np.errstate(divide='ignore', invalid='ignore'):
		t = (gap[:, 0] * r[j, 1] - gap[:, 1] * r[j, 0]) / denominator
		u = (gap[:, 0] * r[i, 1] - gap[:, 1] * r[i, 0]) / denominator
	crossing = usable & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
	xs = np.concatenate([starts[:, 0], starts[i[crossing], 0] + t[crossing] * r[i[crossing], 0]])
	xs = np.unique(xs)
	xs = xs[np.concatenate([[True], np.diff(xs) > 1e-12])]
	if len(xs) < 2:
		return 0.0
	mids = (xs[:-1] + xs[1:]) / 2
	x0, y0 = polygons[..., 0], polygons[..., 1]
	dx = np.roll(x0, -1, axis=1) - x0
	dy = np.roll(y0, -1, axis=1) - y0
	with np.errstate(divide='ignore', invalid='ignore'):
		s = (mids[:, None, None] - x0) / dx
	valid = (dx != 0) & (s >= 0) & (s <= 1)
	y = y0 + s * dy
	low = np.where(valid, y, np.inf).min(axis=2)
	high = np.where(valid, y, -np.inf).max(axis=2)
	floor = y0.min()
	empty = low > high
	low = np.where(empty, floor, low)
	high = np.where(empty, floor, high)
	order = np.argsort(low, axis=1)
	low = np.take_along_axis(low, order, axis=1)
	high = np.take_along_axis(high, order, axis=1)
	reach = np.maximum.accumulate(high, axis=1)
	previous = np.concatenate([np.full((len(mids), 1), floor), reach[:, :-1]], axis=1)
	covered = np.clip(high - np.maximum(low, previous), 0, None).sum(axis=1)
	return float(np.dot(covered, np.diff(xs)))


class ShadowMeter:
	'''
		Shadow areas |∪R_s| of subfamilies of a fixed tile list.

		A family of one orientation is measured exactly in rational arithmetic
		by the rectangle sweep in its rotated frame; mixed families go through
		the slab sweep of convex_union_area, exact up to float rounding.
	'''

	def __init__(self, tiles):
		self.tiles = list(tiles)
		self._quads = None

	def area(self, indices) -> float:
		indices = list(indices)
		if not indices:
			return 0.0
		chosen = [self.tiles[index] for index in indices]
		if len({tile.orientation for tile in chosen}) == 1:
			boxes, denominator = integer_boxes([tile.box for tile in chosen])
			return float(Fraction(union_area(boxes), denominator ** 2))
		if self._quads is None:
			# corners() runs u0w0, u0w1, u1w0, u1w1
			self._quads = np.array([tile.corners()[[0, 1, 3, 2]] for tile in self.tiles])
		return convex_union_area(self._quads[indices])


def shadow_area(tiles) -> float:
	'''|sh(T)| = |∪R_s|.'''
	tiles = list(tiles)
	return ShadowMeter(tiles).area(range(len(tiles)))


def tree_energy(tiles, coefficients) -> float:
	return math.fsum(abs(coefficients[tile]) ** 2 for tile in tiles)


def tree_size(tree, coefficients) -> float:
	'''(Σ_T |⟨f, φ_s⟩|² / |sh(T)|)^{1/2}.'''
	tiles = tree.tiles if isinstance(tree, Tree) else tuple(tree)
	return math.sqrt(tree_energy(tiles, coefficients) / shadow_area(tiles))


def _pools(tiles, mode):
	'''Index lists whose subsets are exactly the trees of the given mode.'''
	pools = {}
	for tile in tiles:
		top = tile.omega2
		if mode == 'conical':
			pool = tuple(index for index, other in enumerate(tiles) if other.omega2 == top)
		else:
			pool = tuple(index for index, other in enumerate(tiles) if other.omega2.contains_point(top.midpoint))
		pools[pool] = None
	return list(pools)


def _below(tiles, pool, index):
	'''Members of the pool whose rectangle centre lies in R_s.'''
	tile = tiles[index]
	return tuple(member for member in pool if tile.inside_dilate(tiles[member].centre()[None, :], 1)[0])


def candidate_trees(tiles, mode='lacunary', limit=None):
	'''
		(candidates, exact): index tuples of trees of the given mode. Pools of
		at most `limit` tiles are enumerated completely; larger pools
		contribute themselves, their singletons, the families below each tile
		and, for lacunary trees, their conical groups.
	'''
	if mode not in ('lacunary', 'conical'):
		raise ValueError(f"unknown size mode '{mode}'")
	limit = settings.DIRLAB_EXHAUSTIVE_LIMIT if limit is None else limit
	tiles = list(tiles)
	candidates, exact = set(), True
	for pool in _pools(tiles, mode):
		if len(pool) <= limit:
			for size in range(1, len(pool) + 1):
				candidates.update(itertools.combinations(pool, size))
			continue
		exact = False
		candidates.add(pool)
		candidates.update((index,) for index in pool)
		candidates.update(_below(tiles, pool, index) for index in pool)
		if mode == 'lacunary':
			members = [tiles[index] for index in pool]
			candidates.update(tuple(pool[member] for member in group) for group in _pools(members, 'conical'))
	return sorted(candidates), exact


@dataclass
class SizeCertificate:
	value: float
	tiles: tuple
	energy: float
	shadow: float
	exact: bool

	def as_dict(self, ids=None):
		return {
			'size': self.value,
			'exact': self.exact,
			'lower_bound': not self.exact,
			'tiles': [ids[tile] for tile in self.tiles] if ids else [str(tile) for tile in self.tiles],
			'energy': self.energy,
			'shadow': self.shadow,
		}


def tile_set_size(tiles, coefficients, mode='lacunary', limit=None) -> SizeCertificate:
	'''
		sup over trees T of the given mode inside the family of
		(Σ_T |⟨f, φ_s⟩|² / |sh(T)|)^{1/2}, with the maximizing tree. Exact when
		every pool was enumerated, a lower bound otherwise.
	'''
	tiles = sorted(tiles)
	if not tiles:
		return SizeCertificate(0.0, (), 0.0, 0.0, True)
	candidates, exact = candidate_trees(tiles, mode, limit)
	meter = ShadowMeter(tiles)
	best = None
	for candidate in candidates:
		chosen = [tiles[index] for index in candidate]
		energy = tree_energy(chosen, coefficients)
		shadow = meter.area(candidate)
		if best is None or energy / shadow > best[0] / best[1]:
			best = (energy, shadow, tuple(chosen))
	energy, shadow, chosen = best
	if not exact:
		logger.info(f"{mode.capitalize()} size of {len(tiles)} tiles estimated from candidate trees (lower bound)")
	return SizeCertificate(math.sqrt(energy / shadow), chosen, energy, shadow, exact)


def lacunary_size(tiles, coefficients, limit=None) -> SizeCertificate:
	return tile_set_size(tiles, coefficients, 'lacunary', limit)


def conical_size(tiles, coefficients, limit=None) -> SizeCertificate:
	return tile_set_size(tiles, coefficients, 'conical', limit)


def _box_within(inner: Tile, outer: Tile) -> bool:
	'''R_inner ⊆ R_outer for tiles of one orientation, exact.'''
	a0, a1, b0, b1 = inner.box
	c0, c1, d0, d1 = outer.box
	return c0 <= a0 and a1 <= c1 and d0 <= b0 and b1 <= d1


@dataclass
class Saturation:
	core: Tree
	overlap: Optional[Tree]
	shadow_ratio: float

	@property
	def tiles(self):
		return self.core.tiles + (self.overlap.tiles if self.overlap else ())


def saturate_conical(tree: Tree, ambient) -> Saturation:
	'''
		T(t) = {s′ : ω_{1s′} ⊇ ω_t, R_{s′} ⊆ 10·R_s for a maximal s ∈ t} over
		the ambient tiles outside t, returned as an overlapping tree next to t.

		10·R_s scales both sides of R_s tenfold about its centre, so it has
		100 times the area. The tiles of t share ω and sit on nested grids,
		hence their maximal rectangles are disjoint and the shadow grows by at
		most 100; a larger ratio raises ValueError.
	'''
	tiles = list(tree.tiles)
	if not tiles or classify_tree(tiles) != 'conical':
		raise ValueError("non-conical input")
	top = tiles[0].omega2
	maximal = [
		tile for tile in tiles
		if not any(other != tile and _box_within(tile, other) for other in tiles)
	]
	core = set(tiles)
	overlap = [
		tile for tile in sorted(ambient)
		if tile not in core and arc_within(top, tile.omega1)
		and any(parent.contains_rect(tile, factor=10) for parent in maximal)
	]
	core_tree = tree if tree.kind == 'conical' else Tree.of(tiles, 'conical')
	overlap_tree = Tree(overlap, 'overlapping', top.midpoint) if overlap else None
	ratio = shadow_area(tiles + overlap) / shadow_area(tiles)
	if ratio > 100 * (1 + 1e-9):
		raise ValueError(f"saturation shadow grew by {ratio:.3g} (bound 100)")
	return Saturation(core_tree, overlap_tree, ratio)


def split_lacunary_overlapping(tiles, V):
	'''
		Drops tiles with V ∩ ω_{2s} = ∅ and splits the rest into
		(L: V ∩ ω_{1s} = ∅, O: V ∩ ω_{1s} ≠ ∅).
	'''
	angles = V.angles
	lacunary, overlapping = [], []
	for tile in sorted(tiles):
		if not any(tile.omega2.contains_point(angle) for angle in angles):
			continue
		if any(tile.omega1.contains_point(angle) for angle in angles):
			overlapping.append(tile)
		else:
			lacunary.append(tile)
	return lacunary, overlapping


def sparse_split(tiles, K=2):
	'''
		{(level mod (K+1), index mod (2K+1)): tiles}. Within a class the arcs
		ω_{1s} of one length are at least 2K arcs apart and distinct lengths
		differ by a factor of at least 2^{K+1}.
	'''
	classes = {}
	for tile in sorted(tiles):
		classes.setdefault((tile.level % (K + 1), tile.arc % (2 * K + 1)), []).append(tile)
	return dict(sorted(classes.items()))
