'''
	Greedy size decomposition into forests, the phase-plane model sums and
	the square operators SQ and SC.
'''
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings

from direction_service.directions import DirectionSet
from spectral_service.grid import GridField

from .packets import realize_packets, tile_indicator
from .trees import ShadowMeter, Tree, candidate_trees, saturate_conical, tree_energy

logger = logging.getLogger(__name__)


@dataclass
class ForestTree:
	'''An extracted tree with its selection certificate Σ|coef|² ≥ σ²/4·|sh|.'''
	tree: Tree
	sigma: float
	energy: float
	shadow: float
	overlap: Optional[Tree] = None

	@property
	def tiles(self):
		return self.tree.tiles + (self.overlap.tiles if self.overlap else ())

	def verifies(self) -> bool:
		return self.energy >= self.sigma ** 2 / 4 * self.shadow


@dataclass
class SigmaRound:
	sigma: float
	trees: list
	residual_size: float


@dataclass
class Forest:
	mode: str
	sigma0: float
	rounds: list = field(default_factory=list)
	residual: list = field(default_factory=list)
	exact: bool = True

	@property
	def trees(self):
		return [entry for sigma_round in self.rounds for entry in sigma_round.trees]

	def tiles(self):
		return [tile for entry in self.trees for tile in entry.tiles] + list(self.residual)


class _Candidates:
	'''Candidate trees of the remaining tiles with cached energies and shadows.'''

	def __init__(self, tiles, coefficients, mode):
		self.tiles = tiles
		self.coefficients = coefficients
		self.mode = mode
		self.meter = ShadowMeter(tiles)
		self.cache = {}
		self.entries = None
		self.exact = False
		self.refresh(set())

	def refresh(self, removed):
		# exhaustive lists stay complete after removals, so they are only filtered
		if self.entries is not None and self.exact:
			self.entries = [entry for entry in self.entries if not removed.intersection(entry[2])]
			return
		remaining = [index for index in range(len(self.tiles)) if index not in removed]
		candidates, self.exact = candidate_trees([self.tiles[index] for index in remaining], self.mode)
		self.entries = [self._entry(tuple(remaining[member] for member in candidate)) for candidate in candidates]

	def _entry(self, indices):
		if indices not in self.cache:
			chosen = [self.tiles[index] for index in indices]
			self.cache[indices] = (tree_energy(chosen, self.coefficients), self.meter.area(indices), indices)
		return self.cache[indices]

	def best_value(self):
		return max((math.sqrt(energy / shadow) for energy, shadow, _ in self.entries), default=0.0)

	def select(self, sigma):
		'''The eligible tree with the largest energy, ties to the lowest tile ids.'''
		eligible = [
			entry for entry in self.entries
			if entry[0] > 0 and entry[0] >= sigma ** 2 / 4 * entry[1]
		]
		return min(eligible, key=lambda entry: (-entry[0], entry[2]), default=None)


def greedy_size_decompose(tiles, coefficients, mode='lacunary') -> Forest:
	'''
		Halving σ from the top size rounded up to a power of two, repeatedly
		extract the tree with the largest Σ|⟨f, φ_s⟩|² among those with
		Σ|⟨f, φ_s⟩|² ≥ σ²/4·|sh(T)|. In conical mode each extracted conical
		tree takes its saturation along. Stops below DIRLAB_SIGMA_FLOOR·σ₀.
	'''
	tiles = sorted(tiles)
	if not tiles:
		raise ValueError("cannot decompose an empty tile set")
	candidates = _Candidates(tiles, coefficients, mode)
	top = candidates.best_value()
	if top == 0:
		return Forest(mode, 0.0, residual=list(tiles), exact=candidates.exact)

	sigma0 = 2.0 ** math.ceil(math.log2(top))
	floor = settings.DIRLAB_SIGMA_FLOOR * sigma0
	forest = Forest(mode, sigma0, exact=candidates.exact)
	removed = set()
	sigma = sigma0
	while sigma >= floor and len(removed) < len(tiles):
		extracted = []
		while (entry := candidates.select(sigma)) is not None:
			energy, shadow, indices = entry
			chosen = tuple(tiles[index] for index in indices)
			tree = Tree.of(chosen, mode)
			overlap = None
			removed.update(indices)
			if mode == 'conical':
				remaining = [tile for index, tile in enumerate(tiles) if index not in removed]
				overlap = saturate_conical(tree, remaining).overlap
				if overlap:
					removed.update(tiles.index(tile) for tile in overlap.tiles)
			extracted.append(ForestTree(tree, sigma, energy, shadow, overlap))
			candidates.refresh(removed)
		forest.exact = forest.exact and candidates.exact
		forest.rounds.append(SigmaRound(sigma, extracted, candidates.best_value()))
		logger.debug(f"σ = {sigma:.4g}: {len(extracted)} tree(s), {len(tiles) - len(removed)} tile(s) left")
		sigma /= 2
	forest.residual = [tile for index, tile in enumerate(tiles) if index not in removed]
	logger.info(f"Greedy {mode} decomposition: {len(forest.trees)} tree(s) over {len(forest.rounds)} σ-round(s)")
	return forest


def _arc_key(arc):
	return arc.start, arc.length


def model_sum(f: GridField, tiles, V: DirectionSet):
	'''
		H_S f(x, v) = Σ_s ⟨f, φ_s⟩ φ_s(x) 1_{ω_{2s}}(v) for every v ∈ V, and the
		maximal field sup_v |H_S f(·, v)|. Tiles are grouped by ω_{2s}.
	'''
	packets, _ = realize_packets(sorted(tiles), f.n, f.side)
	groups = {}
	for packet in packets:
		top = packet.tile.omega2
		groups.setdefault(top, np.zeros((f.n, f.n), dtype=np.complex128))
		groups[top] += packet.inner(f) * packet.dense()
	fields = []
	for direction in V:
		data = np.zeros((f.n, f.n), dtype=np.complex128)
		for top in sorted(groups, key=_arc_key):
			if top.contains_point(direction.angle):
				data += groups[top]
		fields.append(f.with_data(data))
	maximal = np.max([np.abs(entry.data) for entry in fields], axis=0) if fields else np.zeros((f.n, f.n))
	return fields, f.with_data(maximal)


def square_ops(f: GridField, tiles, V: DirectionSet):
	'''
		SQ f = sup_v (Σ_{s: v ∈ ω_{2s}} |⟨f, φ_s⟩|² 1_{R_s}/|R_s|)^{1/2} and SC f,
		the same with an inner sup over the groups of one ω_{2s}.
	'''
	packets, _ = realize_packets(sorted(tiles), f.n, f.side)
	groups = {}
	for packet in packets:
		tile = packet.tile
		groups.setdefault(tile.omega2, np.zeros((f.n, f.n)))
		groups[tile.omega2] += abs(packet.inner(f)) ** 2 / float(tile.area) * tile_indicator(tile, f.n, f.side)
	sq = np.zeros((f.n, f.n))
	sc = np.zeros((f.n, f.n))
	for direction in V:
		total = np.zeros((f.n, f.n))
		for top in sorted(groups, key=_arc_key):
			if top.contains_point(direction.angle):
				total += groups[top]
				np.maximum(sc, groups[top], out=sc)
		np.maximum(sq, total, out=sq)
	return f.with_data(np.sqrt(sq)), f.with_data(np.sqrt(sc))
