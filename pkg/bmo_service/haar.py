'''
	Haar martingale square functions on the dyadic structure of the grid.

	Coefficients are computed level by level: for blocks of L cells the detail
	is (sum over the left half − sum over the right half)/√L, the discrete
	ℓ²-normalized Haar coefficient. Continuum coefficients ⟨f, h_Q⟩ are the
	discrete ones times the cell length per parameter; in the square
	functions the scaling cancels against 1/|Q|.
'''
import numpy as np

from spectral_service.grid import GridField, is_power_of_two


def _check(values):
	rows, cols = values.shape
	if not (is_power_of_two(rows) and is_power_of_two(cols)):
		raise ValueError(f"Haar analysis needs power-of-two sides, got {values.shape}")


def haar_details(values, axis=0):
	'''
		[(L, details)] for L = 2, 4, …, n along `axis`; details has n/L entries
		along that axis, one per dyadic block of L cells.
	'''
	values = np.moveaxis(np.asarray(values), axis, 0)
	n = values.shape[0]
	levels = []
	sums = values
	length = 1
	while length < n:
		left, right = sums[0::2], sums[1::2]
		length *= 2
		levels.append((length, np.moveaxis((left - right) / np.sqrt(length), 0, axis)))
		sums = left + right
	return levels


def _expand(array, length, axis):
	return np.repeat(array, length, axis=axis)


def tensor_coefficients(values):
	'''[(L1, L2, coefficients)] for every pair of levels, discrete normalization.'''
	values = np.asarray(values)
	_check(values)
	result = []
	for first, along_rows in haar_details(values, axis=0):
		for second, coefficients in haar_details(along_rows, axis=1):
			result.append((first, second, coefficients))
	return result


def delta12_array(values):
	'''(Σ_Q |⟨f, h_Q⟩|² 1_Q/|Q|)^{1/2} on an array, Q over all tensor dyadic rectangles.'''
	values = np.asarray(values)
	total = np.zeros(values.shape)
	for first, second, coefficients in tensor_coefficients(values):
		energy = np.abs(coefficients) ** 2 / (first * second)
		total += _expand(_expand(energy, first, 0), second, 1)
	return np.sqrt(total)


def delta1_array(values, axis=0):
	'''One-parameter square function along `axis`, separately on every line.'''
	values = np.asarray(values)
	_check(values)
	total = np.zeros(values.shape)
	for length, coefficients in haar_details(values, axis=axis):
		total += _expand(np.abs(coefficients) ** 2 / length, length, axis)
	return np.sqrt(total)


def haar_delta12(f: GridField) -> GridField:
	return f.with_data(delta12_array(f.data))


def haar_delta1(f: GridField) -> GridField:
	'''Δ₁ in the first variable, for every value of the second.'''
	return f.with_data(delta1_array(f.data, axis=0))


def haar_coefficient_norm(f: GridField) -> float:
	'''‖{⟨f, h_Q⟩}‖_ℓ² with continuum normalization.'''
	total = sum(float(np.sum(np.abs(coefficients) ** 2)) for _, _, coefficients in tensor_coefficients(f.data))
	return np.sqrt(total) * f.cell


def marginal_residual(f: GridField) -> GridField:
	'''f − E₁f − E₂f + mean: the part of f the tensor Haar system spans.'''
	data = f.data
	return f.with_data(
		data - data.mean(axis=0, keepdims=True) - data.mean(axis=1, keepdims=True) + data.mean()
	)
