import io
import json
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
from django.test import SimpleTestCase, TestCase
from rest_framework.exceptions import ValidationError

from core_service.cli import run
from direction_service.directions import Direction, DirectionSet, LacunaryCertificate
from direction_service.serializers import DirectionSetSerializer
from direction_service.services import gen_lacunary, gen_uniform
from spectral_service.converters import write_field
from spectral_service.grid import GridField
from spectral_service.services import rotate_quarter

from .averages import bi_maximal, default_reach, maximal_avg_directional, rectangle_sup, segment_offsets
from .cones import (
	Arc, ConePartition, cone_project, cone_square_function, even_odd_split, lacunary_arc_partition,
	partial_cone_maximal, refined_smooth_cone, signed_cone_sum, smooth_cone_project
)
from .multipliers import MultiplierSpec, annulus_profile, cone_window, directional_symbol, smooth_step
from .serializers import load_operator
from .services import (
	active_scales, directional_adjoint, directional_multiplier, hilbert_directional,
	lacunary_square_function, line_projection, lp_piece, lp_square_function, maximal_directional
)


def random_field(rng, n=8, side=1.0, real=False):
	data = rng.standard_normal((n, n))
	if not real:
		data = data + 1j * rng.standard_normal((n, n))
	return GridField(n, side, data)


def inner(f, g):
	return complex(np.sum(f.data * np.conj(g.data)))


def direct_multiplier(data, symbol):
	'''Σ over all samples and frequencies, no FFT: g = F⁻¹(σ · F f).'''
	n = data.shape[0]
	index = np.arange(n)
	centred = np.where(index >= n // 2, index - n, index)
	phase = np.exp(-2j * np.pi * np.einsum('a,b->ab', index, index) / n)
	kernel = np.einsum('ki,lj->klij', phase, phase)
	spectrum = np.tensordot(kernel, data, axes=([2, 3], [0, 1]))
	k1, k2 = np.meshgrid(centred, centred, indexing='ij')
	values = symbol(k1, k2) * spectrum
	return np.tensordot(np.conj(kernel), values, axes=([0, 1], [0, 1])) / n ** 2


class ProfileTest(SimpleTestCase):

	def test_smooth_step(self):
		self.assertEqual(float(smooth_step(0.0)), 0.0)
		self.assertEqual(float(smooth_step(1.0)), 1.0)
		self.assertEqual(float(smooth_step(0.5)), 0.5)
		self.assertEqual(float(smooth_step(-3.0)), 0.0)

	def test_annulus_profile_is_a_dyadic_partition_of_unity(self):
		rng = np.random.default_rng(11)
		radii = 2.0 ** rng.uniform(-10, 10, size=200)
		total = sum(annulus_profile(radii * 2.0 ** (-k)) for k in range(-20, 21))
		self.assertTrue(np.allclose(total, 1.0, atol=1e-12))
		self.assertTrue(np.all(annulus_profile(np.array([0.0, 0.25, 0.5, 2.0, 3.0])) == 0))

	def test_cone_window_translates_sum_to_one(self):
		t = np.linspace(-3, 3, 601)
		total = sum(cone_window(t - shift) for shift in range(-6, 7))
		self.assertTrue(np.allclose(total, 1.0, atol=1e-12))
		self.assertTrue(np.all(cone_window(np.array([-0.5, -1.0, 1.5, 2.0])) == 0))

	def test_custom_symbol_is_checked(self):
		m = MultiplierSpec.custom(lambda t: 3 * np.ones_like(t), bound=1)
		with self.assertRaisesMessage(ValueError, "invalid symbol"):
			m(np.array([0.5]))
		with self.assertRaises(ValueError):
			MultiplierSpec('sign', zero_value=1)

	def test_parse(self):
		self.assertEqual(MultiplierSpec.parse('sign').kind, 'sign')
		self.assertEqual(MultiplierSpec.parse('annulus_bump:3').k, 3)
		self.assertEqual(MultiplierSpec.parse('annulus_bump:-2').name, 'annulus_bump:-2')
		with self.assertRaises(ValueError):
			MultiplierSpec.parse('laplacian')


class DirectionalMultiplierTest(SimpleTestCase):

	def test_sign_kills_constants(self):
		f = GridField(8, 1.0, 3 * np.ones((8, 8)))
		result = directional_multiplier(f, Direction(Fraction(1, 8)), MultiplierSpec.sign())
		self.assertLess(np.abs(result.data).max(), 1e-12)

	def test_positive_mode_is_unchanged(self):
		n = 8
		i, j = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
		f = GridField(n, 1.0, np.exp(2j * np.pi * (1 * i + 2 * j) / n))
		result = directional_multiplier(f, Direction(0), MultiplierSpec.sign())
		self.assertTrue(np.allclose(result.data, f.data, atol=1e-12))

	def test_matches_direct_summation(self):
		rng = np.random.default_rng(2024)
		angles = [Fraction(1, 8), Fraction(1, 5), Fraction(2, 7), Fraction(0), Fraction(3, 4)]
		for trial in range(20):
			f = random_field(rng)
			angle = angles[trial % len(angles)]
			c, s = np.cos(2 * np.pi * float(angle)), np.sin(2 * np.pi * float(angle))

			def sign_symbol(k1, k2):
				projection = k1 * c + k2 * s
				line = np.abs(projection) <= 1e-9 * np.maximum(1.0, np.hypot(k1, k2))
				line |= (k1 == -4) | (k2 == -4)
				return np.where(line, 0.0, np.sign(projection))

			expected = direct_multiplier(f.data, sign_symbol)
			result = directional_multiplier(f, Direction(angle), MultiplierSpec.sign())
			self.assertLess(np.abs(result.data - expected).max(), 1e-10)

	def test_adjoint_of_custom_symbol(self):
		rng = np.random.default_rng(5)
		f, g = random_field(rng, 16), random_field(rng, 16)
		m = MultiplierSpec.custom(lambda t: np.exp(1j * np.arctan(t)), bound=1, zero_value=1)
		v = Direction(Fraction(1, 3))
		left = inner(directional_multiplier(f, v, m), g)
		right = inner(f, directional_adjoint(g, v, m))
		self.assertAlmostEqual(left, right, delta=1e-10)


class HilbertTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(7)

	def test_square_is_minus_line_projection(self):
		f = random_field(self.rng, 16)
		for angle in (Fraction(1, 8), Fraction(1, 10), Fraction(0)):
			v = Direction(angle)
			twice = hilbert_directional(hilbert_directional(f, v), v)
			self.assertLess(np.abs(twice.data + line_projection(f, v).data).max(), 1e-10)

	def test_real_fields_stay_real(self):
		for seed in (7, 8, 9):
			f = random_field(np.random.default_rng(seed), 16, real=True)
			for angle in (Fraction(0), Fraction(1, 8), Fraction(1, 6), Fraction(2, 5), Fraction(1, 4)):
				result = hilbert_directional(f, Direction(angle))
				self.assertLess(np.abs(result.data.imag).max(), 1e-10)

	def test_odd_symbols_vanish_on_the_nyquist_lines(self):
		lattice = GridField.zeros(16).lattice()
		for m in (MultiplierSpec.sign(), MultiplierSpec.hilbert(), MultiplierSpec.hilbert().conjugate()):
			self.assertTrue(m.is_odd)
			for angle in (0.0, 0.125, 0.3):
				symbol = directional_symbol(lattice, angle, m)
				self.assertEqual(np.abs(symbol[lattice.nyquist]).max(), 0.0)
		bump = directional_symbol(lattice, 0.0, MultiplierSpec.annulus_bump(3))
		self.assertGreater(np.abs(bump[lattice.nyquist]).max(), 0.0)

	def test_axis_direction_acts_on_each_line(self):
		n = 16
		f = random_field(self.rng, n)
		result = hilbert_directional(f, Direction(0))
		frequencies = np.fft.fftfreq(n, d=1.0 / n)
		symbol = np.where(frequencies == -n // 2, 0, -1j * np.sign(frequencies))
		# the column Nyquist line k₂ = −n/2 is removed as well
		spectrum = np.fft.fft(f.data, axis=1)
		spectrum[:, n // 2] = 0
		kept = np.fft.ifft(spectrum, axis=1)
		for j in range(n):
			expected = np.fft.ifft(symbol * np.fft.fft(kept[:, j]))
			self.assertLess(np.abs(result.data[:, j] - expected).max(), 1e-12)

	def test_anti_self_adjoint(self):
		f = random_field(self.rng, 16, real=True)
		g = random_field(self.rng, 16, real=True)
		v = Direction(Fraction(3, 10))
		left = inner(hilbert_directional(f, v), g)
		right = -inner(f, hilbert_directional(g, v))
		self.assertAlmostEqual(left, right, delta=1e-10)


class MaximalDirectionalTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(99)
		self.sign = MultiplierSpec.sign()

	def test_single_direction_is_the_modulus(self):
		f = random_field(self.rng, 16)
		v = Direction(Fraction(1, 8))
		result = maximal_directional(f, DirectionSet((v,)), self.sign)
		expected = np.abs(directional_multiplier(f, v, self.sign).data)
		self.assertTrue(np.array_equal(result.data, expected))

	def test_matches_pointwise_max(self):
		f = random_field(self.rng, 16)
		V = gen_uniform(4)
		result = maximal_directional(f, V, self.sign)
		expected = np.max([np.abs(directional_multiplier(f, v, self.sign).data) for v in V], axis=0)
		self.assertLess(np.abs(result.data - expected).max(), 1e-12)
		for v in V:
			self.assertTrue(np.all(result.data.real >= np.abs(directional_multiplier(f, v, self.sign).data)))

	def test_monotone_in_the_direction_set(self):
		f = random_field(self.rng, 16)
		V = gen_uniform(8)
		smaller = maximal_directional(f, V.subset([0, 3, 5]), self.sign)
		larger = maximal_directional(f, V, self.sign)
		self.assertTrue(np.all(smaller.data.real <= larger.data.real))

	def test_thread_count_does_not_change_the_result(self):
		f = random_field(self.rng, 16)
		V = gen_uniform(7)
		serial, serial_argmax = maximal_directional(f, V, self.sign, return_argmax=True, workers=1)
		threaded, threaded_argmax = maximal_directional(f, V, self.sign, return_argmax=True, workers=3)
		self.assertTrue(np.array_equal(serial.data, threaded.data))
		self.assertTrue(np.array_equal(serial_argmax, threaded_argmax))

	def test_ties_go_to_the_lowest_index(self):
		f = random_field(self.rng, 8)
		V = DirectionSet.from_angles([0, Fraction(1, 2)])
		_, argmax = maximal_directional(f, V, self.sign, return_argmax=True, workers=2)
		self.assertTrue(np.all(argmax == 0))

	def test_sublinear(self):
		f, g = random_field(self.rng, 16), random_field(self.rng, 16)
		V = gen_lacunary(Fraction(1, 2), 5)
		total = maximal_directional(f.with_data(f.data + g.data), V, self.sign).data.real
		bound = maximal_directional(f, V, self.sign).data.real + maximal_directional(g, V, self.sign).data.real
		self.assertTrue(np.all(total <= bound + 1e-10))

	def test_quarter_turn_covariance(self):
		V = DirectionSet.from_angles([Fraction(1, 8), Fraction(1, 5), Fraction(2, 3)])
		for seed in (8, 99):
			f = random_field(np.random.default_rng(seed), 16)
			rotated = maximal_directional(rotate_quarter(f), V.rotated(Fraction(1, 4)), self.sign)
			expected = rotate_quarter(maximal_directional(f, V, self.sign))
			self.assertLess(np.abs(rotated.data - expected.data).max(), 1e-12)
		single = DirectionSet((Direction(Fraction(1, 8)),))
		f = random_field(np.random.default_rng(8), 16)
		rotated = maximal_directional(rotate_quarter(f), single.rotated(Fraction(1, 4)), MultiplierSpec.hilbert())
		expected = rotate_quarter(maximal_directional(f, single, MultiplierSpec.hilbert()))
		self.assertLess(np.abs(rotated.data - expected.data).max(), 1e-12)


class LittlewoodPaleyTest(SimpleTestCase):

	def test_pieces_sum_to_the_field_minus_its_mean(self):
		rng = np.random.default_rng(3)
		f = random_field(rng, 32)
		total = sum(lp_piece(f, k).data for k in active_scales(f))
		self.assertLess(np.abs(total - (f.data - f.data.mean())).max(), 1e-10)

	def test_pure_mode(self):
		n = 32
		i, _ = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
		f = GridField(n, 2 * np.pi, np.exp(2j * np.pi * 4 * i / n))
		for k in range(0, 5):
			expected = float(annulus_profile(4.0 * 2.0 ** (-k))) * f.data
			self.assertLess(np.abs(lp_piece(f, k).data - expected).max(), 1e-12)
		self.assertLess(np.abs(lp_piece(f, 2).data - f.data).max(), 1e-12)

	def test_square_function_ratio_is_bounded(self):
		rng = np.random.default_rng(8)
		ratios = []
		for _ in range(50):
			f = random_field(rng, 16)
			centred = f.with_data(f.data - f.data.mean())
			ratios.append(lp_square_function(f).l2() / centred.l2())
		self.assertGreaterEqual(min(ratios), 0.70)
		self.assertLessEqual(max(ratios), 1.0 + 1e-12)

	def test_lacunary_square_function_is_flat(self):
		n = 64
		axis = np.arange(n) / n - 0.5
		x1, x2 = np.meshgrid(axis, axis, indexing='ij')
		ball = GridField(n, 1.0, (np.hypot(x1, x2) < 1 / 16).astype(float))
		m = MultiplierSpec.hilbert()
		Ns = [8, 16, 32]
		lacunary = [lacunary_square_function(ball, gen_lacunary(Fraction(1, 2), N), m).l2() / ball.l2() for N in Ns]
		uniform = [maximal_directional(ball, gen_uniform(N), m).l2() / ball.l2() for N in Ns]
		uniform_slope = np.polyfit(np.log(Ns), uniform, 1)[0]
		self.assertTrue(all(a < b for a, b in zip(uniform, uniform[1:])))
		self.assertLessEqual(abs(np.polyfit(np.log(Ns), lacunary, 1)[0]), 0.1 * uniform_slope)

	def test_lacunary_square_function(self):
		n = 32
		i, j = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
		f = GridField(n, 2 * np.pi, np.exp(2j * np.pi * (3 * i + 1 * j) / n))
		V = DirectionSet((Direction(0),))
		m = MultiplierSpec.sign()
		modulus = np.hypot(3.0, 1.0)
		weight = np.sqrt(sum(float(annulus_profile(modulus * 2.0 ** (-k))) ** 2 for k in active_scales(f)))
		result = lacunary_square_function(f, V, m)
		self.assertTrue(np.allclose(result.data, weight, atol=1e-10))
		zero = lacunary_square_function(GridField.zeros(16), gen_uniform(3), m)
		self.assertEqual(np.abs(zero.data).max(), 0.0)


class ConeTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(17)
		self.f = random_field(self.rng, 16)
		self.centred = self.f.data - self.f.data.mean()

	def test_arc_membership_wraps(self):
		arc = Arc(Fraction(7, 8), Fraction(1, 4))
		self.assertTrue(arc.contains(np.array([0.9, 0.05])).all())
		self.assertFalse(arc.contains(np.array([0.2, 0.5])).any())
		self.assertTrue(arc.contains_point(Fraction(1, 16)))
		self.assertFalse(arc.contains_point(Fraction(1, 8)))

	def test_partitions_sum_to_the_field(self):
		for partition in (ConePartition.uniform(5), ConePartition.lacunary(Fraction(1, 8), 4)):
			total = sum(cone_project(self.f, arc).data for arc in partition.arcs)
			self.assertLess(np.abs(total - self.centred).max(), 1e-10)

	def test_projections_are_orthogonal_idempotents(self):
		arcs = ConePartition.uniform(3).arcs
		g = random_field(self.rng, 16)
		for index, arc in enumerate(arcs):
			once = cone_project(self.f, arc)
			self.assertLess(np.abs(cone_project(once, arc).data - once.data).max(), 1e-10)
			for other in arcs[index + 1:]:
				self.assertAlmostEqual(inner(once, cone_project(g, other)), 0, delta=1e-10)

	def test_lacunary_partition_from_a_certificate(self):
		V = gen_lacunary(Fraction(1, 2), 3)
		partition = lacunary_arc_partition(V, LacunaryCertificate((2, 1, 0), 0))
		self.assertEqual(partition, ConePartition.lacunary(0, 3))
		self.assertEqual(
			partition.boundaries,
			tuple(Fraction(value) for value in ('0', '1/8', '1/4', '1/2', '3/4', '7/8'))
		)
		extracted = lacunary_arc_partition(V)
		total = sum(cone_project(self.f, arc).data for arc in extracted.arcs)
		self.assertLess(np.abs(total - self.centred).max(), 1e-10)

	def test_translated_smooth_cones_sum_to_the_field(self):
		total = sum(smooth_cone_project(self.f, arc).data for arc in ConePartition.uniform(4).arcs)
		self.assertLess(np.abs(total - self.centred).max(), 1e-10)

	def test_smooth_cone_lives_on_the_doubled_arc(self):
		arc = Arc(Fraction(1, 8), Fraction(1, 8))
		result = smooth_cone_project(self.f, arc)
		spectrum = np.fft.fft2(result.data, norm="ortho")
		theta = self.f.lattice().theta
		outside = (theta < 1 / 16) | (theta > 5 / 16)
		outside[0, 0] = True
		self.assertLess(np.abs(spectrum[outside]).max(), 1e-12)
		with self.assertRaises(ValueError):
			smooth_cone_project(self.f, Arc(0, Fraction(3, 4)))

	def test_rough_cone_absorbs_the_refined_smooth_cone(self):
		partition = ConePartition.lacunary(0, 4)
		for _ in range(10):
			f = random_field(self.rng, 16)
			for arc in partition.arcs:
				left = cone_project(refined_smooth_cone(f, arc), arc)
				self.assertLess(np.abs(left.data - cone_project(f, arc).data).max(), 1e-10)

	def test_signed_cone_sums(self):
		arcs = ConePartition.lacunary(0, 3).arcs
		total = signed_cone_sum(self.f, arcs, [1] * len(arcs))
		self.assertLess(np.abs(total.data - self.centred).max(), 1e-10)
		for _ in range(20):
			signs = self.rng.integers(-1, 2, size=len(arcs)).tolist()
			self.assertLessEqual(signed_cone_sum(self.f, arcs, signs).l2(), self.f.l2() + 1e-10)
		with self.assertRaisesMessage(ValueError, "overlapping arcs"):
			signed_cone_sum(self.f, [Arc(0, Fraction(1, 2)), Arc(Fraction(1, 4), Fraction(1, 2))], [1, 1])
		with self.assertRaises(ValueError):
			signed_cone_sum(self.f, arcs, [2] * len(arcs))

	def test_signed_cone_sums_in_l4(self):
		f = random_field(self.rng, 32)

		def l4(g):
			return np.mean(np.abs(g.data) ** 4) ** 0.25

		best = []
		for depth in (2, 3, 4):
			arcs = ConePartition.lacunary(0, depth).arcs
			ratios = [
				l4(signed_cone_sum(f, arcs, self.rng.integers(-1, 2, size=len(arcs)).tolist())) / l4(f)
				for _ in range(200)
			]
			best.append(max(ratios))
		self.assertLessEqual(max(best), 1.5)
		self.assertLessEqual(max(best) / min(best), 1.25)

	def test_square_function_and_even_odd_split(self):
		partition = ConePartition.uniform(6)
		square = cone_square_function(self.f, partition)
		self.assertAlmostEqual(square.l2(), np.sqrt(np.sum(np.abs(self.centred) ** 2)), delta=1e-10)
		even, odd = even_odd_split(self.f, partition)
		self.assertLess(np.abs(even.data + odd.data - self.centred).max(), 1e-10)
		self.assertAlmostEqual(inner(even, odd), 0, delta=1e-10)
		partial = partial_cone_maximal(self.f, partition)
		self.assertTrue(np.all(partial.data.real >= np.abs(self.centred) - 1e-10))


class AverageTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(21)

	def test_constant_fields(self):
		f = GridField(8, 1.0, 2.5 * np.ones((8, 8)))
		self.assertTrue(np.allclose(maximal_avg_directional(f, gen_uniform(4)).data, 2.5, atol=1e-12))
		self.assertTrue(np.allclose(bi_maximal(f, Direction(Fraction(1, 8))).data, 2.5, atol=1e-12))

	def test_ball_indicator(self):
		f = GridField.zeros(16)
		x1, x2 = f.coordinates()
		ball = np.hypot(x1 - 0.5, x2 - 0.5) <= 0.25
		f = f.with_data(ball.astype(float))
		result = maximal_avg_directional(f, gen_uniform(6)).data.real
		self.assertTrue(np.all(result[ball] == 1.0))
		self.assertTrue(np.all(result <= 1.0 + 1e-12))

	def test_axis_direction_against_brute_force(self):
		n = 8
		f = random_field(self.rng, n)
		values = np.abs(f.data)
		result = maximal_avg_directional(f, DirectionSet((Direction(0),))).data.real
		expected = np.zeros((n, n))
		for i in range(n):
			for j in range(n):
				expected[i, j] = max(
					np.mean([values[(i + s) % n, j] for s in range(-t, t + 1)]) for t in range(n // 2)
				)
		self.assertLess(np.abs(result - expected).max(), 1e-12)

	def test_segments_never_wrap_onto_themselves(self):
		n = 8
		spike = np.zeros((n, n))
		spike[0, 0] = 1.0
		f = GridField(n, 1.0, spike)
		for angle in (Fraction(0), Fraction(1, 8)):
			result = maximal_avg_directional(f, DirectionSet((Direction(angle),))).data.real
			step = segment_offsets(float(angle), n // 2)
			self.assertEqual(result[step[0] % n, step[1] % n], 0.0)
			self.assertAlmostEqual(result[1, 0] if angle == 0 else result[1, 1], 1 / 3)
		self.assertEqual(default_reach(n), 3)

	def test_segment_offsets(self):
		self.assertEqual(segment_offsets(1 / 8, 3), (3, 3))
		self.assertEqual(segment_offsets(0.25, -2), (0, -2))
		self.assertEqual(segment_offsets(float(np.arctan2(1, 2) / (2 * np.pi)), 2), (4, 2))
		self.assertEqual(segment_offsets(0.1, 5), (4, 3))

	def test_rectangles_against_brute_force(self):
		values = self.rng.random((4, 4))
		result = rectangle_sup(values, (1, 0), (0, 1), 2, 2)
		expected = np.zeros((4, 4))
		for i in range(4):
			for j in range(4):
				expected[i, j] = max(
					np.mean([values[(i + s) % 4, (j + r) % 4] for s in range(-a, a + 1) for r in range(-b, b + 1)])
					for a in range(3) for b in range(3)
				)
		self.assertLess(np.abs(result - expected).max(), 1e-12)

	def test_bi_maximal_dominates_segment_averages(self):
		f = random_field(self.rng, 16)
		for angle in (Fraction(0), Fraction(1, 8), Fraction(3, 8)):
			rectangles = bi_maximal(f, Direction(angle)).data.real
			segments = maximal_avg_directional(f, DirectionSet((Direction(angle),))).data.real
			self.assertTrue(np.all(rectangles >= segments - 1e-12))
		with self.assertRaisesMessage(ValueError, "resampling required"):
			bi_maximal(f, Direction(Fraction(1, 5)))


class OperatorDescriptorTest(SimpleTestCase):

	def test_inline_and_file_directions(self):
		V = gen_uniform(4)
		document = DirectionSetSerializer.document(V)
		spec = load_operator({'op': 'maximal_directional', 'm': 'sign', 'directions': document})
		self.assertEqual(spec.directions.N, 4)
		with TemporaryDirectory() as tmp:
			Path(tmp, 'dirs.json').write_text(json.dumps(document))
			spec = load_operator({'op': 'maximal_directional', 'directions': 'dirs.json'}, base_dir=tmp)
			self.assertEqual(spec.descriptor(), {'op': 'maximal_directional', 'm': 'sign', 'directions': 'dirs.json'})

	def test_hilbert_descriptor(self):
		spec = load_operator({'op': 'hilbert_directional', 'direction': ['1', '8']})
		self.assertEqual(spec.multiplier.kind, 'hilbert')
		f = random_field(np.random.default_rng(1), 8)
		self.assertTrue(np.array_equal(spec(f).data, hilbert_directional(f, Direction(Fraction(1, 8))).data))

	def test_invalid_descriptors(self):
		with self.assertRaises(ValidationError):
			load_operator({'op': 'fractional_laplacian'})
		with self.assertRaises(ValidationError):
			load_operator({'op': 'hilbert_directional'})
		with self.assertRaises(ValidationError):
			load_operator({'op': 'directional_multiplier', 'm': 'cosine', 'direction': ['1', '3']})


class OpCommandTest(TestCase):

	def setUp(self):
		self.tmp = TemporaryDirectory()
		self.root = Path(self.tmp.name)
		rng = np.random.default_rng(4)
		write_field(random_field(rng, 16), self.root / 'f.dsf')
		V = DirectionSet((Direction(Fraction(1, 8)),))
		(self.root / 'dirs.json').write_text(json.dumps(DirectionSetSerializer.document(V)))
		(self.root / 'op.json').write_text(json.dumps({
			'op': 'directional_multiplier', 'm': 'sign', 'direction': ['1', '8'],
		}))

	def tearDown(self):
		self.tmp.cleanup()

	def call(self, *argv):
		stdout, stderr = io.StringIO(), io.StringIO()
		code = run(list(argv), stdout=stdout, stderr=stderr)
		return code, stderr.getvalue()

	def test_maximal_over_one_direction_reproduces_apply(self):
		code, _ = self.call(
			'op', 'maximal', '--input', str(self.root / 'f.dsf'), '--directions', str(self.root / 'dirs.json'),
			'--out', str(self.root / 'maximal')
		)
		self.assertEqual(code, 0)
		code, _ = self.call(
			'op', 'apply', '--input', str(self.root / 'f.dsf'), '--operator', str(self.root / 'op.json'),
			'--modulus', '--out', str(self.root / 'apply')
		)
		self.assertEqual(code, 0)
		self.assertEqual(
			(self.root / 'maximal' / 'result.dsf').read_bytes(), (self.root / 'apply' / 'result.dsf').read_bytes()
		)

	def test_cone_and_lp_actions(self):
		code, _ = self.call(
			'op', 'cone', '--input', str(self.root / 'f.dsf'), '--partition', 'lacunary:0:3', '--out', str(self.root / 'cone')
		)
		self.assertEqual(code, 0)
		self.assertEqual(len(list((self.root / 'cone').glob('cone_*.dsf'))), 6)
		code, _ = self.call('op', 'lp', '--input', str(self.root / 'f.dsf'), '--out', str(self.root / 'lp'))
		self.assertEqual(code, 0)
		self.assertTrue((self.root / 'lp' / 'scales.csv').exists())

	def test_bad_inputs(self):
		code, err = self.call(
			'op', 'maximal', '--input', str(self.root / 'missing.dsf'), '--directions', 'x.json',
			'--out', str(self.root / 'bad')
		)
		self.assertEqual(code, 2)
		self.assertTrue(err.startswith('E:'))
		code, err = self.call('op', 'transmogrify')
		self.assertEqual(code, 1)
		self.assertTrue(err.startswith('E:'))
