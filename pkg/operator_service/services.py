'''
	Directional multipliers, their maximal versions and the Littlewood–Paley
	pieces, all realized spectrally on GridFields.
'''
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core_service.helpers import fraction_pair
from direction_service.directions import Direction, DirectionSet
from spectral_service.grid import GridField
from spectral_service.services import apply_symbol

from .averages import maximal_avg_directional
from .multipliers import MultiplierSpec, annulus_profile, directional_symbol

logger = logging.getLogger(__name__)


def _angle(v):
	return v.float_view if isinstance(v, Direction) else float(v)


def directional_multiplier(f: GridField, v, m: MultiplierSpec) -> GridField:
	'''T_v f: the symbol m(ξ·v).'''
	return apply_symbol(f, directional_symbol(f.lattice(), _angle(v), m))


def hilbert_directional(f: GridField, v) -> GridField:
	'''H_v: the line integral p.v. ∫ f(x − tv) dt/πt, symbol −i·sign(ξ·v).'''
	return directional_multiplier(f, v, MultiplierSpec.hilbert())


def directional_adjoint(f: GridField, v, m: MultiplierSpec) -> GridField:
	return directional_multiplier(f, v, m.conjugate())


def line_projection(f: GridField, v) -> GridField:
	'''P_v: removes the frequencies on the line ξ·v = 0 and on the Nyquist lines, the kernel of the odd symbols.'''
	return apply_symbol(f, lambda lattice: ~(lattice.on_line(_angle(v)) | lattice.nyquist))


def _direction_fields(f, V, m, workers, transform=None):
	'''
		Yields (index, T_v f samples) in index order. Spectra are computed in
		chunks of `workers` directions, each on its own thread.
	'''
	lattice = f.lattice()
	spectrum = np.fft.fft2(f.data, norm="ortho")
	angles = [_angle(v) for v in V]

	def compute(angle):
		values = np.fft.ifft2(directional_symbol(lattice, angle, m) * spectrum, norm="ortho")
		return transform(values) if transform else values

	workers = max(1, int(workers))
	if workers == 1:
		for index, angle in enumerate(angles):
			yield index, compute(angle)
		return
	with ThreadPoolExecutor(max_workers=workers) as executor:
		for start in range(0, len(angles), workers):
			chunk = angles[start:start + workers]
			for offset, values in enumerate(executor.map(compute, chunk)):
				yield start + offset, values


def maximal_directional(f: GridField, V: DirectionSet, m: MultiplierSpec, return_argmax=False, workers=1):
	'''
		T_V f(x) = max_{v ∈ V} |T_v f(x)|. Ties in the argmax go to the lowest
		direction index; the reduction runs in index order whatever `workers` is.
	'''
	if len(V) < 1:
		raise ValueError("maximal_directional needs at least one direction")
	best, argmax = None, None
	for index, values in _direction_fields(f, V, m, workers, transform=np.abs):
		if best is None:
			best, argmax = values, np.zeros(values.shape, dtype=np.int64)
			continue
		larger = values > best
		best = np.where(larger, values, best)
		argmax[larger] = index
	result = f.with_data(best)
	if return_argmax:
		return result, argmax
	return result


def selected_directional(f: GridField, V: DirectionSet, m: MultiplierSpec, selection, workers=1) -> GridField:
	'''The linear operator g ↦ (T_{v(x)} g)(x) for a fixed selection field v(x).'''
	data = np.zeros(f.shape, dtype=np.complex128)
	for index, values in _direction_fields(f, V, m, workers):
		mask = selection == index
		data[mask] = values[mask]
	return f.with_data(data)


def selected_directional_adjoint(h: GridField, V: DirectionSet, m: MultiplierSpec, selection) -> GridField:
	'''Adjoint of selected_directional: Σ_v T_v*(1_{v(x)=v} h).'''
	data = np.zeros(h.shape, dtype=np.complex128)
	conjugate = m.conjugate()
	for index, v in enumerate(V):
		mask = selection == index
		if not mask.any():
			continue
		piece = h.with_data(np.where(mask, h.data, 0))
		data += directional_multiplier(piece, v, conjugate).data
	return h.with_data(data)


def active_scales(f: GridField):
	'''Every k for which Φ(2^{−k}|ξ|) can be nonzero on the lattice.'''
	modulus = f.lattice().modulus
	smallest = float(modulus[modulus > 0].min())
	largest = float(modulus.max())
	return list(range(math.floor(math.log2(smallest)) - 1, math.ceil(math.log2(largest)) + 2))


def lp_piece(f: GridField, k) -> GridField:
	'''S_k f: the symbol Φ(2^{−k}|ξ|), zero at ξ = 0.'''
	return apply_symbol(f, lambda lattice: annulus_profile(lattice.modulus * 2.0 ** (-k)), zero_value=0)


def lp_square_function(f: GridField) -> GridField:
	'''(Σ_k |S_k f|²)^{1/2}.'''
	total = np.zeros(f.shape)
	for k in active_scales(f):
		total += np.abs(lp_piece(f, k).data) ** 2
	return f.with_data(np.sqrt(total))


def lacunary_square_function(f: GridField, V: DirectionSet, m: MultiplierSpec, workers=1) -> GridField:
	'''(Σ_k |T_V(S_k f)|²)^{1/2} pointwise.'''
	total = np.zeros(f.shape)
	for k in active_scales(f):
		piece = lp_piece(f, k)
		total += np.abs(maximal_directional(piece, V, m, workers=workers).data) ** 2
	return f.with_data(np.sqrt(total))


@dataclass
class OperatorSpec:
	'''
		A resolved operator descriptor: `op` names the operation and the other
		fields carry what it needs. Calling it applies the operator.
	'''
	op: str
	multiplier: MultiplierSpec = None
	directions: Optional[DirectionSet] = None
	direction: Optional[Direction] = None
	source: Optional[str] = None

	LINEAR = ('identity', 'directional_multiplier', 'hilbert_directional')
	KINDS = LINEAR + ('maximal_directional', 'maximal_hilbert', 'maximal_avg_directional', 'lacunary_square_function')

	def __post_init__(self):
		if self.op not in self.KINDS:
			raise ValueError(f"unknown operator '{self.op}'")
		if self.op in ('hilbert_directional', 'maximal_hilbert'):
			self.multiplier = MultiplierSpec.hilbert()
		elif self.multiplier is None:
			self.multiplier = MultiplierSpec.sign()
		if self.op in ('directional_multiplier', 'hilbert_directional') and self.direction is None:
			raise ValueError(f"{self.op} needs a direction")
		if self.op.startswith('maximal') or self.op == 'lacunary_square_function':
			if self.directions is None:
				raise ValueError(f"{self.op} needs a direction set")

	def __call__(self, f: GridField, workers=1) -> GridField:
		if self.op == 'identity':
			return f
		if self.op == 'directional_multiplier':
			return directional_multiplier(f, self.direction, self.multiplier)
		if self.op == 'hilbert_directional':
			return hilbert_directional(f, self.direction)
		if self.op in ('maximal_directional', 'maximal_hilbert'):
			return maximal_directional(f, self.directions, self.multiplier, workers=workers)
		if self.op == 'maximal_avg_directional':
			return maximal_avg_directional(f, self.directions, workers=workers)
		return lacunary_square_function(f, self.directions, self.multiplier, workers=workers)

	def descriptor(self) -> dict:
		payload = {'op': self.op, 'm': self.multiplier.name}
		if self.direction is not None:
			payload['direction'] = fraction_pair(self.direction.angle)
		if self.directions is not None:
			payload['directions'] = self.source or {
				'family': self.directions.family,
				'N': self.directions.N,
				'angles': [fraction_pair(angle) for angle in self.directions.angles],
			}
		return payload

