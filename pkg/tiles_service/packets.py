'''
	Wave packets realized on the periodic sampling grid of a GridField.

	φ_s is a smooth window supported in 2R_s (rotated frame of the tile)
	times the modulation e^{2πi η·(x − c_s)} at the centre η of Ω_{1s};
	samples are L²-normalized with the cell area, Σ|φ_s|²h² = 1. The grid is
	a torus, so displacements are taken to their minimal image.
'''
import logging
from dataclasses import dataclass

import numpy as np

from spectral_service.grid import GridField
from spectral_service.services import forward_dft

from .tiles import RADIAL_BAND, Tile

logger = logging.getLogger(__name__)

MIN_CELLS = 4


def bump(t):
	'''exp(1 − 1/(1 − t²)) on |t| < 1, zero elsewhere.'''
	t = np.asarray(t, dtype=float)
	values = np.zeros(t.shape)
	inside = np.abs(t) < 1
	values[inside] = np.exp(1 - 1 / (1 - t[inside] ** 2))
	return values


def displacements(tile: Tile, n, side):
	'''Minimal-image offsets x − c_s of every sample, shape (n, n, 2).'''
	axis = np.arange(n) * (side / n)
	points = np.stack(np.meshgrid(axis, axis, indexing='ij'), axis=-1)
	offsets = points - tile.centre()
	return (offsets + side / 2) % side - side / 2


def resolution_problem(tile: Tile, n, side):
	'''Why the tile cannot carry a packet on this grid, or None.'''
	cell = side / n
	if min(tile.d1, tile.d2) < MIN_CELLS * cell:
		return f"R_s narrower than {MIN_CELLS} cells"
	if 2 * max(tile.d1, tile.d2) > side:
		return "2R_s wraps around the torus"
	return None


@dataclass(frozen=True, eq=False)
class WavePacket:
	tile: Tile
	n: int
	side: float
	index: np.ndarray
	values: np.ndarray

	@classmethod
	def realize(cls, tile: Tile, n, side):
		problem = resolution_problem(tile, n, float(side))
		if problem:
			raise ValueError(f"under-resolved tile {tile}: {problem}")
		side = float(side)
		offsets = displacements(tile, n, side)
		u, w = tile.rotated(offsets)
		window = bump(u / float(tile.d1)) * bump(w / float(tile.d2))
		index = np.flatnonzero(window)
		phase = np.exp(2j * np.pi * (offsets.reshape(-1, 2)[index] @ tile.frequency()))
		values = window.ravel()[index] * phase
		cell = side / n
		values = values / np.sqrt(np.sum(np.abs(values) ** 2) * cell ** 2)
		return cls(tile, n, side, index, values)

	@property
	def cell(self):
		return self.side / self.n

	def dense(self):
		data = np.zeros(self.n * self.n, dtype=np.complex128)
		data[self.index] = self.values
		return data.reshape(self.n, self.n)

	def field(self) -> GridField:
		return GridField(self.n, self.side, self.dense())

	def inner(self, f: GridField) -> complex:
		'''⟨f, φ_s⟩ = Σ f·conj(φ_s)·h².'''
		return complex(np.sum(f.data.ravel()[self.index] * np.conj(self.values)) * self.cell ** 2)

	def mass_inside(self, factor=4):
		'''Share of Σ|φ_s|² carried by samples inside factor·R_s.'''
		offsets = displacements(self.tile, self.n, self.side).reshape(-1, 2)[self.index]
		u, w = self.tile.rotated(offsets)
		inside = (np.abs(u) < factor * float(self.tile.d1) / 2) & (np.abs(w) < factor * float(self.tile.d2) / 2)
		energy = np.abs(self.values) ** 2
		return float(energy[inside].sum() / energy.sum())


def realize_packets(tiles, n, side):
	'''(packets, skipped) with skipped = [(tile, reason)] for under-resolved tiles.'''
	packets, skipped = [], []
	for tile in tiles:
		problem = resolution_problem(tile, n, float(side))
		if problem:
			skipped.append((tile, problem))
			continue
		packets.append(WavePacket.realize(tile, n, side))
	if skipped:
		logger.warning(f"Skipped {len(skipped)} under-resolved tile(s) on the {n}x{n} grid")
	return packets, skipped


def packet_coefficients(f: GridField, tiles):
	'''({tile: ⟨f, φ_s⟩}, skipped) over the tiles resolvable on f's grid.'''
	packets, skipped = realize_packets(tiles, f.n, f.side)
	return {packet.tile: packet.inner(f) for packet in packets}, skipped


def sector_mask(tile: Tile, n, side):
	'''Lattice frequencies of an n×n grid of period `side` lying in Ω_s.'''
	k = np.fft.fftfreq(n, d=1.0 / n)
	k1, k2 = np.meshgrid(k, k, indexing='ij')
	radius = np.hypot(k1, k2) / side
	theta = np.arctan2(k2, k1) / (2 * np.pi) % 1.0
	low, high = (float(tile.ann * bound) for bound in RADIAL_BAND)
	return (radius >= low) & (radius < high) & tile.omega.contains(theta)


def packet_leakage(packet: WavePacket) -> float:
	'''Share of the packet's energy outside its frequency sector Ω_s.'''
	spectrum = np.abs(forward_dft(packet.field()).data) ** 2
	inside = spectrum[sector_mask(packet.tile, packet.n, packet.side)].sum()
	return float(1 - inside / spectrum.sum())


def gram_matrix(packets):
	'''G[i, j] = ⟨φ_j, φ_i⟩.'''
	if not packets:
		return np.zeros((0, 0), dtype=np.complex128)
	stacked = np.array([packet.dense().ravel() for packet in packets])
	return (np.conj(stacked) @ stacked.T) * packets[0].cell ** 2


def frame_constant(packets) -> float:
	'''
		Smallest F with Σ_s |⟨f, φ_s⟩|² ≤ F‖f‖² for every f: the top
		eigenvalue of the Gram matrix.
	'''
	if not packets:
		return 0.0
	return float(np.linalg.eigvalsh(gram_matrix(packets))[-1])


def tile_indicator(tile: Tile, n, side):
	'''1_{R_s} on the sample grid (periodic minimal image).'''
	u, w = tile.rotated(displacements(tile, n, float(side)))
	half1, half2 = float(tile.d1) / 2, float(tile.d2) / 2
	return (u >= -half1) & (u < half1) & (w >= -half2) & (w < half2)
