import io
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
from django.test import SimpleTestCase, TestCase

from core_service.cli import run
from core_service.helpers import load_json

from .converters import HEADER, decode_field, encode_field, field_digest, read_field
from .grid import FreqLattice, GridField, is_power_of_two
from .services import apply_symbol, cyclic_shift, forward_dft, inverse_dft, remove_mean, rotate_quarter


def random_field(rng, n=8, side=1.0):
	return GridField(n, side, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


class GridFieldTest(SimpleTestCase):

	def test_resolution_must_be_a_power_of_two(self):
		self.assertTrue(is_power_of_two(64))
		self.assertFalse(is_power_of_two(48))
		for n in (4, 12, 8192):
			with self.assertRaises(ValueError):
				GridField.zeros(n)
		with self.assertRaises(ValueError):
			GridField(8, 0.0, np.zeros((8, 8)))
		with self.assertRaises(ValueError):
			GridField(8, 1.0, np.zeros((8, 4)))

	def test_sample_positions(self):
		f = GridField.zeros(8, side=2.0)
		x1, x2 = f.coordinates()
		self.assertEqual(x1[3, 5], 0.75)
		self.assertEqual(x2[3, 5], 1.25)
		self.assertEqual(f.cell_area, 0.0625)


class FreqLatticeTest(SimpleTestCase):

	def setUp(self):
		self.lattice = FreqLattice(16, 2.0)

	def test_centred_frequencies(self):
		k1, k2 = self.lattice.k
		self.assertEqual(k1[8, 0], -8)
		self.assertEqual(k1[7, 0], 7)
		self.assertEqual(k2[0, 15], -1)
		xi1, _ = self.lattice.xi
		self.assertAlmostEqual(xi1[1, 0], np.pi)

	def test_angles(self):
		theta = self.lattice.theta
		self.assertTrue(np.all((theta >= 0) & (theta < 1)))
		self.assertEqual(theta[1, 0], 0.0)
		self.assertEqual(theta[0, 1], 0.25)
		self.assertEqual(theta[1, 1], 0.125)
		self.assertEqual(theta[0, 0], 0.0)
		self.assertTrue(self.lattice.zero[0, 0])

	def test_opposite_frequencies_differ_by_half_a_turn(self):
		n = self.lattice.n
		theta = self.lattice.theta
		for a in range(-n // 2 + 1, n // 2):
			for b in range(-n // 2 + 1, n // 2):
				if a == 0 and b == 0:
					continue
				gap = (theta[-a % n, -b % n] - theta[a % n, b % n] - 0.5) % 1.0
				self.assertLess(min(gap, 1 - gap), 1e-12)


class TransformTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(1)

	def test_round_trip_and_parseval(self):
		f = random_field(self.rng, 32)
		spectrum = forward_dft(f)
		self.assertTrue(spectrum.spectral)
		self.assertLess(np.abs(inverse_dft(spectrum).data - f.data).max(), 1e-10)
		self.assertAlmostEqual(spectrum.l2(), f.l2(), delta=1e-10)

	def test_constant_field(self):
		f = GridField(8, 1.0, 3.0 * np.ones((8, 8)))
		spectrum = forward_dft(f).data
		self.assertAlmostEqual(abs(spectrum[0, 0]), 24.0, delta=1e-12)
		spectrum[0, 0] = 0
		self.assertLess(np.abs(spectrum).max(), 1e-12)

	def test_pure_mode(self):
		n = 16
		i, j = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
		f = GridField(n, 1.0, np.exp(2j * np.pi * (3 * i - 2 * j) / n))
		spectrum = np.abs(forward_dft(f).data)
		self.assertAlmostEqual(spectrum[3, n - 2], n, delta=1e-10)
		spectrum[3, n - 2] = 0
		self.assertLess(spectrum.max(), 1e-10)

	def test_matches_direct_summation(self):
		n = 8
		index = np.arange(n)
		phase = np.exp(-2j * np.pi * np.outer(index, index) / n)
		for _ in range(20):
			f = random_field(self.rng, n)
			expected = np.zeros((n, n), dtype=complex)
			for k1 in range(n):
				for k2 in range(n):
					expected[k1, k2] = np.sum(f.data * np.outer(phase[k1], phase[k2])) / n
			self.assertLess(np.abs(forward_dft(f).data - expected).max(), 1e-10)


class ApplySymbolTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(2)
		self.f = random_field(self.rng, 16)

	def test_constant_symbols(self):
		self.assertLess(np.abs(apply_symbol(self.f, 1).data - self.f.data).max(), 1e-10)
		self.assertEqual(np.abs(apply_symbol(self.f, 0).data).max(), 0.0)

	def test_invalid_symbol(self):
		with self.assertRaisesMessage(ValueError, "invalid symbol"), np.errstate(divide='ignore'):
			apply_symbol(self.f, lambda lattice: 1.0 / lattice.modulus)
		result = apply_symbol(self.f, lambda lattice: 1.0 / np.maximum(lattice.modulus, 1.0), zero_value=0)
		self.assertTrue(np.all(np.isfinite(result.data)))

	def test_linear_and_multiplicative(self):
		g = random_field(self.rng, 16)
		symbol = lambda lattice: np.exp(-lattice.modulus / 20.0) * (1 + 1j * np.cos(2 * np.pi * lattice.theta))
		combined = apply_symbol(self.f.with_data(2 * self.f.data - 3j * g.data), symbol)
		separate = 2 * apply_symbol(self.f, symbol).data - 3j * apply_symbol(g, symbol).data
		self.assertLess(np.abs(combined.data - separate).max(), 1e-10)

		other = lambda lattice: np.cos(lattice.xi[0] / 10.0)
		twice = apply_symbol(apply_symbol(self.f, symbol), other)
		once = apply_symbol(self.f, lambda lattice: symbol(lattice) * other(lattice))
		self.assertLess(np.abs(twice.data - once.data).max(), 1e-10)

	def test_translation_covariance(self):
		symbol = lambda lattice: np.sign(lattice.xi[0] + 2 * lattice.xi[1])
		shifted = apply_symbol(cyclic_shift(self.f, (3, -5)), symbol)
		expected = cyclic_shift(apply_symbol(self.f, symbol), (3, -5))
		self.assertLess(np.abs(shifted.data - expected.data).max(), 1e-10)

	def test_quarter_turn_covariance(self):
		n = self.f.n
		f = apply_symbol(self.f, lambda lattice: (lattice.k[0] != -n // 2) & (lattice.k[1] != -n // 2))
		symbol = lambda lattice: np.exp(-lattice.modulus / 30.0) * lattice.xi[0]
		# σ∘R⁻¹ with R⁻¹(ξ₁, ξ₂) = (ξ₂, −ξ₁)
		rotated_symbol = lambda lattice: np.exp(-lattice.modulus / 30.0) * lattice.xi[1]
		left = apply_symbol(rotate_quarter(f), rotated_symbol)
		right = rotate_quarter(apply_symbol(f, symbol))
		self.assertLess(np.abs(left.data - right.data).max(), 1e-12)

	def test_rotation_is_an_index_permutation(self):
		f = self.f
		rotated = rotate_quarter(f)
		self.assertEqual(rotated.data[2, 5], f.data[5, -2 % f.n])
		self.assertTrue(np.array_equal(rotate_quarter(f, 4).data, f.data))

	def test_remove_mean(self):
		self.assertAlmostEqual(remove_mean(self.f).mean(), 0, delta=1e-12)


class ConverterTest(SimpleTestCase):

	def test_bit_exact_round_trip(self):
		f = random_field(np.random.default_rng(3), 8, side=0.3)
		payload = encode_field(f)
		self.assertEqual(payload[:4], b'DSF1')
		self.assertEqual(len(payload), HEADER.size + 64 * 16)
		decoded = decode_field(payload)
		self.assertEqual(decoded.n, 8)
		self.assertEqual(decoded.side, 0.3)
		self.assertTrue(np.array_equal(decoded.data, f.data))
		self.assertEqual(encode_field(decoded), payload)
		self.assertEqual(field_digest(decoded), field_digest(f))

	def test_rejects_bad_payloads(self):
		payload = encode_field(GridField.zeros(8))
		with self.assertRaises(ValueError):
			decode_field(b'DSF2' + payload[4:])
		with self.assertRaises(ValueError):
			decode_field(payload[:-1])
		with self.assertRaises(ValueError):
			decode_field(payload[:6])


class FieldCommandTest(TestCase):

	def setUp(self):
		self.tmp = TemporaryDirectory()
		self.root = Path(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def call(self, *argv):
		return run(list(argv), stdout=io.StringIO(), stderr=io.StringIO())

	def test_gen_and_info(self):
		code = self.call('field', 'gen', '--kind', 'mode', '--n', '16', '--k', '2,1', '--out', str(self.root))
		self.assertEqual(code, 0)
		f = read_field(self.root / 'field.dsf')
		self.assertEqual(f.n, 16)
		code = self.call('field', 'info', '--input', str(self.root / 'field.dsf'), '--out', str(self.root / 'info'))
		self.assertEqual(code, 0)
		info = load_json(self.root / 'info' / 'info.json')
		self.assertAlmostEqual(info['l2'], 16.0, delta=1e-10)
		manifest = load_json(self.root / 'info' / 'manifest.json')
		self.assertEqual([entry['path'] for entry in manifest['files']], ['info.json'])

	def test_random_fields_are_reproducible(self):
		for name in ('a', 'b'):
			code = self.call('field', 'gen', '--kind', 'random', '--n', '8', '--seed', '42', '--out', str(self.root / name))
			self.assertEqual(code, 0)
		self.assertEqual((self.root / 'a' / 'field.dsf').read_bytes(), (self.root / 'b' / 'field.dsf').read_bytes())

	def test_bad_resolution_is_a_data_error(self):
		code = self.call('field', 'gen', '--kind', 'constant', '--n', '12', '--out', str(self.root))
		self.assertEqual(code, 2)
