import io
import itertools
import json
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
from django.test import SimpleTestCase, TestCase, override_settings
from rest_framework.exceptions import ValidationError

from core_service.cli import run
from core_service.helpers import load_json
from spectral_service.converters import read_field
from spectral_service.grid import GridField

from .haar import delta1_array, delta12_array, haar_coefficient_norm, haar_delta1, haar_delta12, marginal_residual
from .rectangles import DyadicRect, Raster, dyadic_interval, exact_union_area
from .serializers import ProductCoefficientsSerializer, load_coefficients
from .services import (
	ProductCoefficients, jn_level_set_profile, packet_profile, product_size, random_coefficients,
	rectangle_maximal, sb_square_function, shadow_area, shadow_mask, wave_packet_sum
)

UNIT = DyadicRect(0, 0, 0, 0, 0)


def haar_vector(n, length, block):
	'''ℓ²-normalized Haar function on cells [block·length, (block+1)·length).'''
	vector = np.zeros(n)
	start, half = block * length, length // 2
	vector[start:start + half] = 1 / np.sqrt(length)
	vector[start + half:start + length] = -1 / np.sqrt(length)
	return vector


def direct_delta12(values):
	'''Δ₁₂ by summing over every dyadic rectangle Q of the array explicitly.'''
	rows, cols = values.shape
	total = np.zeros(values.shape)
	for first in (2 ** k for k in range(1, int(np.log2(rows)) + 1)):
		for second in (2 ** k for k in range(1, int(np.log2(cols)) + 1)):
			for a in range(rows // first):
				for b in range(cols // second):
					coefficient = haar_vector(rows, first, a) @ values @ haar_vector(cols, second, b)
					total[a * first:(a + 1) * first, b * second:(b + 1) * second] += abs(coefficient) ** 2 / (first * second)
	return np.sqrt(total)


def subset_size_oracle(C, raster):
	'''Size by enumerating every subfamily, shadows counted on the raster.'''
	masks = []
	for rect in C.rects:
		mask = np.zeros((raster.n, raster.n), dtype=bool)
		i0, i1, j0, j1 = raster.cells(rect)
		mask[i0:i1, j0:j1] = True
		masks.append(mask)
	masks = np.array(masks)
	energy = np.abs(C.values) ** 2
	cell_area = float(raster.cell) ** 2
	best = 0.0
	for size in range(1, len(C) + 1):
		for subset in itertools.combinations(range(len(C)), size):
			area = np.any(masks[list(subset)], axis=0).sum() * cell_area
			best = max(best, energy[list(subset)].sum() / area)
	return np.sqrt(best)


class RectangleTest(SimpleTestCase):

	def test_shadow_examples(self):
		self.assertEqual(shadow_area(ProductCoefficients([(UNIT, 1)])), 1)
		disjoint = ProductCoefficients([(UNIT, 1), (DyadicRect(0, 0, 1, 0, 0), 1)])
		self.assertEqual(shadow_area(disjoint), 2)
		nested = ProductCoefficients([(UNIT, 1), (DyadicRect(0, 1, 0, 1, 0), 1)])
		self.assertEqual(shadow_area(nested), 4)
		self.assertEqual(shadow_area(nested, subset=[0]), 1)

	def test_shifted_grids_nest(self):
		for shift in (0, 1, 2):
			intervals = [dyadic_interval(shift, scale, offset) for scale in range(-3, 3) for offset in range(-4, 5)]
			for (a0, a1), (b0, b1) in itertools.combinations(intervals, 2):
				disjoint = a1 <= b0 or b1 <= a0
				nested = (a0 <= b0 and b1 <= a1) or (b0 <= a0 and a1 <= b1)
				self.assertTrue(disjoint or nested)
		self.assertEqual(dyadic_interval(1, 0, 0), (Fraction(1, 3), Fraction(4, 3)))
		with self.assertRaises(ValueError):
			DyadicRect(3, 0, 0, 0, 0)

	def test_union_area_matches_raster_count(self):
		rng = np.random.default_rng(11)
		raster = Raster((0, 0), 1, 8)
		for _ in range(20):
			C = random_coefficients(rng, 6, depth=3)
			self.assertEqual(
				exact_union_area(rect.box for rect in C.rects),
				Fraction(int(shadow_mask(C, raster).sum()), 64)
			)

	def test_raster_alignment(self):
		raster = Raster((0, 0), 1, 8)
		self.assertEqual(raster.cells(DyadicRect(0, -1, 1, -3, 2)), (4, 8, 2, 3))
		with self.assertRaisesMessage(ValueError, "misaligned raster"):
			raster.cells(DyadicRect(1, -1, 1, -1, 1))
		with self.assertRaisesMessage(ValueError, "misaligned raster"):
			raster.cells(DyadicRect(0, 0, 1, 0, 0))
		covering = Raster.covering([UNIT, DyadicRect(0, -2, 1, -1, 0)])
		self.assertEqual(covering.cell, Fraction(1, 8))
		self.assertEqual(covering.n, 8)


class SizeTest(SimpleTestCase):

	def test_examples(self):
		single = product_size(ProductCoefficients([(UNIT, 3)]))
		self.assertEqual(single.value, 3.0)
		self.assertTrue(single.exact)
		pair = ProductCoefficients([(UNIT, 3), (DyadicRect(0, 0, 1, 0, 0), 3)])
		self.assertAlmostEqual(product_size(pair).value, 3.0, places=12)
		self.assertEqual(product_size(ProductCoefficients([])).value, 0.0)

	def test_exhaustive_oracle(self):
		rng = np.random.default_rng(12)
		raster = Raster((0, 0), 1, 8)
		for _ in range(50):
			C = random_coefficients(rng, 10, depth=3)
			estimate = product_size(C)
			self.assertTrue(estimate.exact)
			self.assertTrue(np.isclose(estimate.value, subset_size_oracle(C, raster), rtol=1e-12, atol=0))

	def test_candidate_estimator_is_a_flagged_lower_bound(self):
		rng = np.random.default_rng(13)
		for _ in range(10):
			C = random_coefficients(rng, 8, depth=3)
			exact = product_size(C)
			with override_settings(DIRLAB_EXHAUSTIVE_LIMIT=0):
				estimate = product_size(C)
			self.assertFalse(estimate.exact)
			self.assertTrue(estimate.as_dict()['lower_bound'])
			self.assertLessEqual(estimate.value, exact.value + 1e-12)
			singles = max(abs(value) / np.sqrt(float(rect.area)) for rect, value in C.entries)
			self.assertGreaterEqual(estimate.value, singles - 1e-12)

	def test_monotone_and_homogeneous(self):
		rng = np.random.default_rng(14)
		for _ in range(10):
			C = random_coefficients(rng, 8, depth=3)
			full = product_size(C).value
			self.assertLessEqual(product_size(C.subfamily(range(5))).value, full + 1e-12)
			self.assertTrue(np.isclose(product_size(C.scaled(2.5)).value, 2.5 * full, rtol=1e-13))
			self.assertEqual(product_size(C.scaled(0)).value, 0.0)

	def test_witness_certifies_value(self):
		rng = np.random.default_rng(15)
		C = random_coefficients(rng, 9, depth=3)
		estimate = product_size(C)
		energy = np.sum(np.abs(C.values[list(estimate.witness)]) ** 2)
		self.assertEqual(estimate.shadow, shadow_area(C, estimate.witness))
		self.assertTrue(np.isclose(estimate.value ** 2, energy / float(estimate.shadow), rtol=1e-12))

	def test_family_validation(self):
		with self.assertRaisesMessage(ValueError, "duplicate"):
			ProductCoefficients([(UNIT, 1), (UNIT, 2)])
		with self.assertRaises(ValueError):
			ProductCoefficients([(DyadicRect(0, 1, 0, 0, 0), 1)], bounds=(0, 1, 0, 1))


class SquareFunctionTest(SimpleTestCase):

	def test_single_rectangle(self):
		C = ProductCoefficients([(DyadicRect(0, 1, 0, 1, 0), 2)])
		sb = sb_square_function(C, Raster((0, 0), 4, 8))
		expected = np.zeros((8, 8))
		expected[:4, :4] = 1
		np.testing.assert_allclose(sb.data.real, expected, atol=1e-15)

	def test_direct_summation_oracle(self):
		rng = np.random.default_rng(16)
		raster = Raster((0, 0), 1, 8)
		centres = (np.arange(8) + 0.5) / 8
		for _ in range(20):
			C = random_coefficients(rng, 10, depth=3)
			sb = sb_square_function(C, raster).data.real
			expected = np.zeros((8, 8))
			for i, j in itertools.product(range(8), repeat=2):
				for rect, value in C.entries:
					x0, x1, y0, y1 = (float(bound) for bound in rect.box)
					if x0 <= centres[i] < x1 and y0 <= centres[j] < y1:
						expected[i, j] += abs(value) ** 2 / float(rect.area)
			np.testing.assert_allclose(sb, np.sqrt(expected), rtol=0, atol=1e-10)

	def test_energy_identity(self):
		rng = np.random.default_rng(17)
		for _ in range(10):
			C = random_coefficients(rng, 12, depth=4)
			sb = sb_square_function(C, Raster((0, 0), 1, 16))
			self.assertTrue(np.isclose(np.sum(np.abs(sb.data) ** 2) * sb.cell_area, np.sum(np.abs(C.values) ** 2), rtol=1e-10))

	def test_misaligned_raster(self):
		C = ProductCoefficients([(DyadicRect(0, -4, 1, 0, 0), 1)])
		with self.assertRaisesMessage(ValueError, "misaligned raster"):
			sb_square_function(C, Raster((0, 0), 1, 8))

	def test_rectangle_maximal(self):
		raster = Raster((0, 0), 1, 8)
		data = np.zeros((8, 8))
		data[0, 0] = 1
		f = GridField(8, 1.0, data)
		large, small = DyadicRect(0, -1, 0, -1, 0), DyadicRect(0, -2, 0, -2, 0)
		result = rectangle_maximal(f, [large, small], raster).data.real
		expected = np.zeros((8, 8))
		expected[:4, :4] = 1 / 16
		expected[:2, :2] = 1 / 4
		np.testing.assert_allclose(result, expected, atol=1e-15)


class HaarTest(SimpleTestCase):

	def test_constant_has_no_details(self):
		f = GridField(16, 1.0, np.full((16, 16), 2.5))
		self.assertEqual(np.abs(haar_delta12(f).data).max(), 0)
		self.assertEqual(np.abs(haar_delta1(f).data).max(), 0)

	def test_direct_oracle(self):
		rng = np.random.default_rng(18)
		for shape in [(4, 4)] + [(8, 8)] * 20:
			values = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
			np.testing.assert_allclose(delta12_array(values), direct_delta12(values), rtol=0, atol=1e-10)

	def test_single_haar_tensor(self):
		values = np.outer(haar_vector(8, 2, 1), haar_vector(8, 4, 0))
		expected = np.zeros((8, 8))
		expected[2:4, 0:4] = 1 / np.sqrt(8)
		np.testing.assert_allclose(delta12_array(values), expected, atol=1e-14)

	def test_parseval(self):
		rng = np.random.default_rng(19)
		f = GridField(32, 2.0, rng.standard_normal((32, 32)))
		self.assertTrue(np.isclose(haar_coefficient_norm(f), marginal_residual(f).l2() * f.cell, rtol=1e-10))
		residual = marginal_residual(f)
		centred = residual.data - residual.mean()
		self.assertTrue(np.isclose(haar_coefficient_norm(residual), np.sqrt(np.sum(np.abs(centred) ** 2)) * f.cell, rtol=1e-10))

	def test_one_parameter_square_function(self):
		rng = np.random.default_rng(20)
		column = rng.standard_normal(8)
		values = np.tile(column[:, None], (1, 8))
		result = delta1_array(values, axis=0)
		expected = np.zeros(8)
		for length in (2, 4, 8):
			for block in range(8 // length):
				coefficient = haar_vector(8, length, block) @ column
				expected[block * length:(block + 1) * length] += coefficient ** 2 / length
		np.testing.assert_allclose(result, np.tile(np.sqrt(expected)[:, None], (1, 8)), atol=1e-12)
		np.testing.assert_allclose(delta1_array(values, axis=1), 0, atol=1e-15)


class WavePacketTest(SimpleTestCase):

	def test_profile(self):
		for cells in (2, 3, 8, 32):
			values = packet_profile(cells, 0.25)
			self.assertAlmostEqual(values.sum(), 0, places=12)
			self.assertAlmostEqual(np.sum(values ** 2) * 0.25, 1, places=12)
		with self.assertRaises(ValueError):
			packet_profile(1, 0.5)

	def test_packet_sum_lives_on_the_shadow(self):
		rng = np.random.default_rng(21)
		raster = Raster((0, 0), 1, 16)
		C = random_coefficients(rng, 6, depth=3)
		B = wave_packet_sum(C, raster).data
		self.assertEqual(np.abs(B[~shadow_mask(C, raster)]).max(initial=0.0), 0)
		rect, value = C.entries[0]
		single = wave_packet_sum(ProductCoefficients([(rect, value)]), raster).data
		i0, i1, j0, j1 = raster.cells(rect)
		np.testing.assert_allclose(single[i0:i1, j0:j1].sum(axis=0), 0, atol=1e-12)
		self.assertAlmostEqual(np.sum(np.abs(single) ** 2) * float(raster.cell) ** 2, abs(value) ** 2, places=10)

	def test_pointwise_square_function_bound(self):
		rng = np.random.default_rng(22)
		raster = Raster((0, 0), 1, 16)
		worst = 0.0
		for _ in range(50):
			C = random_coefficients(rng, 10, depth=3)
			delta = haar_delta12(wave_packet_sum(C, raster)).data.real
			sb = sb_square_function(C, raster).data.real
			inside = shadow_mask(C, raster)
			self.assertLessEqual(np.abs(delta[~inside]).max(initial=0.0), 1e-10 * delta.max())
			worst = max(worst, float((delta[inside] / sb[inside]).max()))
		self.assertLessEqual(worst, 50)


class LevelSetProfileTest(SimpleTestCase):

	def test_zero_family(self):
		C = ProductCoefficients([(UNIT, 0), (DyadicRect(0, -1, 0, -1, 1), 0)])
		profile = jn_level_set_profile(C)
		self.assertEqual(np.abs(profile.fractions).max(), 0)
		self.assertIsNone(profile.sqrt_rate)

	def test_single_rectangle_is_a_step(self):
		profile = jn_level_set_profile(ProductCoefficients([(UNIT, 3)]))
		self.assertAlmostEqual(profile.lambdas[-1], 3.0, places=12)
		self.assertTrue(np.all(profile.fractions[:-1] == 1))
		self.assertEqual(profile.fractions[-1], 0)

	def test_decay_rate_is_positive(self):
		rng = np.random.default_rng(23)
		positive = 0
		for _ in range(100):
			C = random_coefficients(rng, 8, depth=3)
			C = C.scaled(1 / product_size(C).value)
			profile = jn_level_set_profile(C)
			self.assertAlmostEqual(profile.size, 1.0, places=12)
			self.assertTrue(np.all(np.diff(profile.fractions) <= 0))
			positive += bool(profile.sqrt_rate and profile.sqrt_rate > 0)
		self.assertGreaterEqual(positive, 95)


class CoefficientSerializerTest(SimpleTestCase):

	def test_document(self):
		C = ProductCoefficients(
			[(DyadicRect(2, -1, 1, 0, 0), 1 - 2j)], bounds=(0, 2, 0, 2), raster=Raster((0, 0), 2, 8)
		)
		payload = ProductCoefficientsSerializer.document(C)
		self.assertEqual(payload['rects'][0], {'shift': 2, 'i': [-1, 1], 'j': [0, 0], 'b': [1.0, -2.0]})
		loaded = load_coefficients(json.loads(json.dumps(payload)))
		self.assertEqual(loaded.entries, C.entries)
		self.assertEqual(loaded.raster, C.raster)

	def test_rejects_bad_documents(self):
		bad = [
			{'rects': [{'shift': 3, 'i': [0, 0], 'j': [0, 0], 'b': [1, 0]}]},
			{'rects': [{'i': [0], 'j': [0, 0], 'b': [1, 0]}]},
			{'rects': [{'i': [0, 0], 'j': [0, 0], 'b': [1, 0]}, {'i': [0, 0], 'j': [0, 0], 'b': [2, 0]}]},
		]
		for payload in bad:
			with self.assertRaises(ValidationError):
				load_coefficients(payload)


class BmoCommandTest(TestCase):

	def setUp(self):
		self.tmp = TemporaryDirectory()
		self.root = Path(self.tmp.name)
		rng = np.random.default_rng(24)
		C = random_coefficients(rng, 6, depth=3)
		C.raster = Raster((0, 0), 1, 16)
		(self.root / 'family.json').write_text(json.dumps(ProductCoefficientsSerializer.document(C)))
		(self.root / 'single.json').write_text(json.dumps(
			{'rects': [{'shift': 0, 'i': [0, 0], 'j': [0, 0], 'b': [3, 0]}]}
		))

	def tearDown(self):
		self.tmp.cleanup()

	def call(self, *argv):
		stdout, stderr = io.StringIO(), io.StringIO()
		code = run(list(argv), stdout=stdout, stderr=stderr)
		return code, stderr.getvalue()

	def test_size(self):
		code, _ = self.call('bmo', 'size', '--input', str(self.root / 'single.json'), '--sb', '--out', str(self.root / 'size'))
		self.assertEqual(code, 0)
		payload = load_json(self.root / 'size' / 'size.json')
		self.assertEqual(payload['size'], 3.0)
		self.assertTrue(payload['exact'])
		self.assertEqual(payload['shadow'], ['1', '1'])
		self.assertTrue((self.root / 'size' / 'sb.dsf').exists())

	def test_jn_profile(self):
		code, _ = self.call('bmo', 'jn-profile', '--trials', '5', '--count', '6', '--out', str(self.root / 'jn'))
		self.assertEqual(code, 0)
		self.assertEqual(load_json(self.root / 'jn' / 'fit.json')['trials'], 5)
		code, _ = self.call('bmo', 'jn-profile', '--input', str(self.root / 'family.json'), '--out', str(self.root / 'one'))
		self.assertEqual(code, 0)
		self.assertTrue((self.root / 'one' / 'profile.csv').exists())

	def test_delta12(self):
		out = self.root / 'delta'
		code, _ = self.call('bmo', 'delta12', '--coefficients', str(self.root / 'family.json'), '--delta1', '--out', str(out))
		self.assertEqual(code, 0)
		ratio = load_json(out / 'ratio.json')
		self.assertLessEqual(ratio['max_outside_shadow'], 1e-10)
		self.assertLessEqual(ratio['max_ratio'], 50)
		self.assertEqual(read_field(out / 'delta12.dsf').n, 16)
		self.assertTrue((out / 'delta1.dsf').exists())

	def test_delta12_needs_one_source(self):
		code, err = self.call('bmo', 'delta12', '--out', str(self.root / 'none'))
		self.assertEqual(code, 2)
		self.assertTrue(err.startswith('E:'))
