'''
	Unitary discrete Fourier transforms and Fourier multipliers on GridFields.
'''
import logging

import numpy as np

from .grid import GridField

logger = logging.getLogger(__name__)


def forward_dft(f: GridField) -> GridField:
	'''
		Unitary DFT (1/n overall, 1/√n per axis each way), so Parseval holds
		without extra factors and a constant c has DC magnitude c·n.
	'''
	return f.with_data(np.fft.fft2(f.data, norm="ortho"), spectral=True)


def inverse_dft(f: GridField) -> GridField:
	return f.with_data(np.fft.ifft2(f.data, norm="ortho"), spectral=False)


def evaluate_symbol(lattice, symbol, zero_value=None):
	'''
		Evaluate a symbol on the lattice. `symbol` is an array, a scalar, or a
		callable taking the FreqLattice. When `zero_value` is given it overrides
		the value at ξ = 0.
	'''
	values = symbol(lattice) if callable(symbol) else symbol
	values = np.broadcast_to(np.asarray(values, dtype=np.complex128), (lattice.n, lattice.n)).copy()
	if zero_value is not None:
		values[0, 0] = zero_value
	if not np.all(np.isfinite(values)):
		raise ValueError("invalid symbol")
	return values


def apply_symbol(f: GridField, symbol, zero_value=None) -> GridField:
	'''
		inverse_dft(σ · forward_dft(f)).
	'''
	values = evaluate_symbol(f.lattice(), symbol, zero_value)
	spectrum = np.fft.fft2(f.data, norm="ortho")
	return f.with_data(np.fft.ifft2(values * spectrum, norm="ortho"), spectral=False)


def remove_mean(f: GridField) -> GridField:
	return f.with_data(f.data - f.data.mean())


def cyclic_shift(f: GridField, shift) -> GridField:
	'''Translate by an integer number of cells along each axis.'''
	return f.with_data(np.roll(f.data, shift, axis=(0, 1)))


def rotate_quarter(f: GridField, turns=1) -> GridField:
	'''
		g(x) = f(R⁻¹x) with R the rotation by a quarter turn, i.e.
		g[i, j] = f[j, −i mod n]. Exact index permutation.
	'''
	data = f.data
	for _ in range(turns % 4):
		data = np.roll(data.T[::-1, :], 1, axis=0)
	return f.with_data(data)
