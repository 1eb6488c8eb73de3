import io
import itertools
import json
import math
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import mock

import numpy as np
import pandas as pd
from django.test import SimpleTestCase, TestCase
from rest_framework.exceptions import ValidationError

from core_service.cli import run
from core_service.helpers import load_json
from direction_service.directions import DirectionSet
from direction_service.serializers import DirectionSetSerializer
from operator_service.cones import Arc
from spectral_service.converters import read_field, write_field
from spectral_service.grid import GridField

from .packets import (
	WavePacket, frame_constant, packet_coefficients, packet_leakage, realize_packets, resolution_problem,
	tile_indicator
)
from .serializers import TileSetSerializer, coefficient_frame, load_tile_set, read_coefficients
from .services import greedy_size_decompose, model_sum, square_ops
from .tiles import Tile, build_tile_set
from .trees import (
	ShadowMeter, Tree, classify_tree, conical_size, convex_union_area, crown, lacunary_size, saturate_conical, shadow_area,
	sparse_split, split_lacunary_overlapping, tile_set_size, tree_size
)


def random_field(rng, n, side=1.0):
	return GridField(n, side, rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_coefficients(rng, tiles):
	return {tile: complex(rng.standard_normal(), rng.standard_normal()) for tile in tiles}


def random_tiles(rng, pool, count):
	return sorted(pool[index] for index in rng.choice(len(pool), size=count, replace=False))


def common_point(arcs):
	'''Dyadic arcs never wrap, so they share a point iff max start < min end.'''
	return max(arc.start for arc in arcs) < min(arc.end for arc in arcs)


def norm(data, cell):
	return math.sqrt(float(np.sum(np.abs(data) ** 2)) * cell ** 2)


def resolvable(tiles, n, side=1):
	return [tile for tile in tiles if resolution_problem(tile, n, side) is None]


class TileTest(SimpleTestCase):

	def test_geometry(self):
		tile = Tile(1, 1, 0, 1, -1)
		self.assertEqual(tile.ann, 4)
		self.assertEqual(tile.ecc, Fraction(1, 2))
		self.assertEqual((tile.d1, tile.d2), (Fraction(1, 4), Fraction(1, 2)))
		self.assertEqual(tile.area, Fraction(1, 8))
		self.assertEqual(tile.omega1, Arc(0, Fraction(1, 4)))
		self.assertEqual(tile.omega2, Arc(Fraction(1, 4), Fraction(1, 4)))
		np.testing.assert_allclose(tile.centre(), [0.25, 0.375], atol=1e-15)
		self.assertAlmostEqual(float(np.linalg.norm(tile.frequency())), 5.0, places=12)
		with self.assertRaises(ValueError):
			Tile(1, 1, 2, 0, 0)

	def test_build_counts(self):
		tiles = build_tile_set([1], [1])
		self.assertEqual(len(tiles), 16)
		self.assertEqual(sum(tile.arc == 0 for tile in tiles), 8)
		self.assertEqual(sum(tile.area for tile in tiles), 2)
		self.assertEqual(len(build_tile_set([1], [0])), 16)
		for tile in tiles:
			x, y = tile.centre()
			self.assertTrue(0 <= x < 1 and 0 <= y < 1)
		self.assertEqual(tiles, sorted(tiles))

	def test_arc_count_halves_with_doubled_arcs(self):
		fine = {tile.omega for tile in build_tile_set([1], [2])}
		coarse = {tile.omega for tile in build_tile_set([1], [1])}
		self.assertEqual(len(fine), 2 * len(coarse))

	def test_empty_and_overflow(self):
		self.assertEqual(build_tile_set([], [1]), [])
		self.assertEqual(build_tile_set([1], []), [])
		with self.assertRaisesMessage(ValueError, "tile overflow"):
			build_tile_set([1], [1], limit=10)


class WavePacketTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(31)

	def test_normalization_and_support(self):
		for tile in (Tile(1, 1, 0, 1, -1), Tile(1, 0, 0, 2, -3), Tile(2, 2, 3, 1, 0)):
			packet = WavePacket.realize(tile, 64, 1)
			self.assertAlmostEqual(np.sum(np.abs(packet.values) ** 2) * packet.cell ** 2, 1, places=10)
			self.assertAlmostEqual(packet.inner(packet.field()), 1, places=10)
			self.assertEqual(packet.mass_inside(4), 1.0)
			self.assertLess(packet.mass_inside(1), 1.0)

	def test_coefficients(self):
		tile = Tile(1, 1, 0, 1, -1)
		packet = WavePacket.realize(tile, 64, 1)
		coefficients, skipped = packet_coefficients(packet.field(), [tile])
		self.assertEqual(skipped, [])
		self.assertAlmostEqual(abs(coefficients[tile] - 1), 0, places=6)
		tiles = build_tile_set([1], [1])
		coefficients, _ = packet_coefficients(GridField.zeros(64), tiles)
		self.assertEqual(set(coefficients.values()), {0j})

	def test_disjoint_sectors_bounded_by_leakage(self):
		tiles = build_tile_set([1], [1])
		packets, _ = realize_packets(tiles, 64, 1)
		leakage = {packet.tile: packet_leakage(packet) for packet in packets}
		for first, second in itertools.combinations(packets, 2):
			if first.tile.omega == second.tile.omega:
				continue
			bound = math.sqrt(leakage[first.tile]) + math.sqrt(leakage[second.tile])
			self.assertLessEqual(abs(second.inner(first.field())), bound + 1e-12)
		self.assertTrue(all(0 <= value < 1 for value in leakage.values()))

	def test_under_resolved_tiles_are_skipped(self):
		coefficients, skipped = packet_coefficients(GridField.zeros(8), [Tile(2, 0, 0, 0, 0), Tile(0, 0, 0, 0, 0)])
		self.assertEqual(coefficients, {})
		self.assertEqual(
			[reason for _, reason in skipped],
			["R_s narrower than 4 cells", "2R_s wraps around the torus"],
		)
		with self.assertRaises(ValueError):
			WavePacket.realize(Tile(2, 0, 0, 0, 0), 8, 1)

	def test_bessel_with_frame_constant(self):
		tiles = build_tile_set([1], [0, 1])
		packets, skipped = realize_packets(tiles, 32, 1)
		self.assertEqual(skipped, [])
		F = frame_constant(packets)
		self.assertGreaterEqual(F, 1 - 1e-10)
		cell = 1 / 32
		for _ in range(100):
			f = random_field(self.rng, 32)
			coefficients = [packet.inner(f) for packet in packets]
			energy = math.fsum(abs(value) ** 2 for value in coefficients)
			self.assertLessEqual(energy, F * norm(f.data, cell) ** 2 * (1 + 1e-10))
			synthesis = sum(value * packet.dense() for value, packet in zip(coefficients, packets))
			self.assertLessEqual(norm(synthesis, cell), F * norm(f.data, cell) * (1 + 1e-10))

	def test_indicator(self):
		tile = Tile(1, 1, 0, 1, -1)
		mask = tile_indicator(tile, 64, 1)
		self.assertEqual(mask.sum() * (1 / 64) ** 2, float(tile.area))


class ShadowTest(SimpleTestCase):

	def test_square_and_its_diagonal_turn(self):
		square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
		turned = 0.5 + np.array([[0, -1], [1, 0], [0, 1], [-1, 0]]) * math.sqrt(0.5)
		self.assertAlmostEqual(convex_union_area([square]), 1.0, places=12)
		self.assertAlmostEqual(convex_union_area([square, square]), 1.0, places=12)
		self.assertAlmostEqual(convex_union_area([square, turned]), 4 - 2 * math.sqrt(2), places=12)
		self.assertAlmostEqual(convex_union_area([2 * square - 0.5, turned]), 4.0, places=12)
		self.assertEqual(convex_union_area([]), 0.0)

	def test_mixed_orientations_are_exact(self):
		near, far = Tile(1, 2, 1, 0, 0), Tile(1, 0, 0, 100, 100)
		self.assertNotEqual(near.orientation, far.orientation)
		self.assertAlmostEqual(shadow_area([near, far]), float(near.area + far.area), places=12)
		parent, child = Tile(1, 1, 0, 0, -1), Tile(2, 0, 0, -2, -2)
		self.assertNotEqual(parent.orientation, child.orientation)
		self.assertTrue(parent.contains_rect(child))
		self.assertAlmostEqual(shadow_area([parent, child]), float(parent.area), places=12)

	def test_meter_matches_fresh_measurements(self):
		rng = np.random.default_rng(41)
		pool = build_tile_set([1, 2], [0, 1, 2])
		tiles = random_tiles(rng, pool, 12)
		meter = ShadowMeter(tiles)
		for _ in range(10):
			indices = sorted(rng.choice(len(tiles), size=4, replace=False))
			self.assertAlmostEqual(meter.area(indices), shadow_area([tiles[index] for index in indices]), places=12)
			self.assertLessEqual(meter.area(indices), math.fsum(float(tiles[index].area) for index in indices) + 1e-12)


class TreeTest(SimpleTestCase):

	def test_classify(self):
		self.assertEqual(classify_tree([Tile(1, 1, 0, 0, -1), Tile(2, 1, 0, 3, -2)]), 'conical')
		self.assertEqual(classify_tree([Tile(1, 1, 0, 0, -1), Tile(1, 2, 1, 0, 0)]), 'lacunary')
		self.assertEqual(classify_tree([Tile(1, 1, 0, 0, -1), Tile(1, 2, 0, 0, 0)]), 'overlapping')
		self.assertEqual(classify_tree([Tile(1, 1, 0, 0, -1), Tile(1, 1, 1, 0, 0)]), 'none')
		with self.assertRaises(ValueError):
			classify_tree([])

	def test_tree_witness(self):
		tree = Tree.of([Tile(1, 1, 0, 0, -1), Tile(1, 2, 1, 0, 0)])
		self.assertEqual(tree.kind, 'lacunary')
		self.assertEqual(tree.witness, Fraction(7, 16))
		with self.assertRaises(ValueError):
			Tree(tree.tiles, 'lacunary', Fraction(5, 16))
		with self.assertRaises(ValueError):
			Tree.of([Tile(1, 1, 0, 0, -1), Tile(1, 1, 1, 0, 0)])

	def test_crown(self):
		tree = Tree.of([Tile(1, 1, 0, 0, -1), Tile(1, 2, 1, 0, 0), Tile(1, 3, 3, 0, 0)])
		self.assertEqual(crown(tree), [Arc(Fraction(1, 4), Fraction(1, 4))])

	def test_single_tile_size(self):
		tile = Tile(1, 1, 0, 1, -1)
		coefficients = {tile: 3 - 4j}
		self.assertAlmostEqual(tree_size(Tree.of([tile]), coefficients), 5 / math.sqrt(1 / 8), places=12)
		certificate = lacunary_size([tile], coefficients)
		self.assertTrue(certificate.exact)
		self.assertAlmostEqual(certificate.value, 5 / math.sqrt(1 / 8), places=12)
		self.assertEqual(certificate.tiles, (tile,))

	def test_adding_inside_the_shadow_increases_size(self):
		parent = Tile(1, 1, 0, 0, -1)
		child = Tile(2, 1, 0, 0, -4)
		self.assertTrue(parent.contains_rect(child))
		coefficients = {parent: 1, child: 0.5}
		self.assertEqual(shadow_area([parent, child]), shadow_area([parent]))
		self.assertGreater(tree_size([parent, child], coefficients), tree_size([parent], coefficients))

	def test_sizes_match_subset_oracle(self):
		rng = np.random.default_rng(32)
		pool = build_tile_set([0, 1], [0, 1, 2])
		for _ in range(50):
			tiles = random_tiles(rng, pool, 10)
			coefficients = random_coefficients(rng, tiles)
			best = {'lacunary': 0.0, 'conical': 0.0}
			for size in range(1, len(tiles) + 1):
				for subset in itertools.combinations(tiles, size):
					tops = [tile.omega2 for tile in subset]
					if not common_point(tops):
						continue
					ratio = math.fsum(abs(coefficients[tile]) ** 2 for tile in subset) / shadow_area(subset)
					best['lacunary'] = max(best['lacunary'], ratio)
					if len(set(tops)) == 1:
						best['conical'] = max(best['conical'], ratio)
			lacunary = lacunary_size(tiles, coefficients)
			conical = conical_size(tiles, coefficients)
			self.assertTrue(lacunary.exact and conical.exact)
			self.assertAlmostEqual(lacunary.value, math.sqrt(best['lacunary']), places=10)
			self.assertAlmostEqual(conical.value, math.sqrt(best['conical']), places=10)
			self.assertLessEqual(conical.value, lacunary.value + 1e-12)

	def test_candidate_estimate_is_a_lower_bound(self):
		rng = np.random.default_rng(33)
		pool = build_tile_set([0, 1], [0, 1, 2])
		tiles = random_tiles(rng, pool, 12)
		coefficients = random_coefficients(rng, tiles)
		exact = tile_set_size(tiles, coefficients)
		estimate = tile_set_size(tiles, coefficients, limit=0)
		self.assertTrue(exact.exact)
		self.assertLessEqual(estimate.value, exact.value + 1e-12)
		self.assertEqual(tile_set_size([], {}).value, 0.0)


class GreedyDecompositionTest(SimpleTestCase):

	def setUp(self):
		self.pool = build_tile_set([0, 1], [0, 1, 2])

	def assertValidForest(self, forest, tiles, coefficients):
		covered = forest.tiles()
		self.assertEqual(len(covered), len(tiles))
		self.assertEqual(sorted(covered), sorted(tiles))
		total = math.fsum(abs(coefficients[tile]) ** 2 for tile in tiles)
		for sigma_round in forest.rounds:
			shadows = 0.0
			for entry in sigma_round.trees:
				self.assertTrue(entry.verifies())
				self.assertEqual(entry.sigma, sigma_round.sigma)
				self.assertAlmostEqual(entry.shadow, shadow_area(entry.tree.tiles), places=12)
				self.assertEqual(entry.energy, math.fsum(abs(coefficients[tile]) ** 2 for tile in entry.tree.tiles))
				self.assertIn(classify_tree(entry.tree.tiles), ('conical', forest.mode))
				if entry.overlap is not None:
					self.assertEqual(entry.overlap.kind, 'overlapping')
				shadows += entry.shadow
			self.assertLessEqual(shadows, 4 * total / sigma_round.sigma ** 2 * (1 + 1e-12))
			self.assertLessEqual(sigma_round.residual_size, sigma_round.sigma / 2 * (1 + 1e-12))

	def test_single_tile(self):
		tile = Tile(1, 1, 0, 1, -1)
		coefficients = {tile: 0.3}
		forest = greedy_size_decompose([tile], coefficients)
		self.assertEqual(len(forest.rounds), 1)
		self.assertEqual([entry.tree.tiles for entry in forest.rounds[0].trees], [(tile,)])
		self.assertEqual(forest.residual, [])
		self.assertEqual(forest.sigma0, 1.0)

	def test_zero_coefficients(self):
		tiles = build_tile_set([1], [1])
		forest = greedy_size_decompose(tiles, dict.fromkeys(tiles, 0))
		self.assertEqual(forest.rounds, [])
		self.assertEqual(forest.residual, tiles)
		with self.assertRaises(ValueError):
			greedy_size_decompose([], {})

	def test_twelve_tiles(self):
		rng = np.random.default_rng(34)
		tiles = random_tiles(rng, self.pool, 12)
		coefficients = random_coefficients(rng, tiles)
		for mode in ('lacunary', 'conical'):
			forest = greedy_size_decompose(tiles, coefficients, mode)
			self.assertTrue(forest.exact)
			self.assertValidForest(forest, tiles, coefficients)

	def test_random_instances(self):
		rng = np.random.default_rng(35)
		for trial in range(100):
			tiles = random_tiles(rng, self.pool, 8)
			coefficients = random_coefficients(rng, tiles)
			mode = ('lacunary', 'conical')[trial % 2]
			self.assertValidForest(greedy_size_decompose(tiles, coefficients, mode), tiles, coefficients)

	def test_deterministic(self):
		rng = np.random.default_rng(36)
		tiles = random_tiles(rng, self.pool, 10)
		coefficients = random_coefficients(rng, tiles)
		first = greedy_size_decompose(tiles, coefficients)
		second = greedy_size_decompose(list(reversed(tiles)), coefficients)
		self.assertEqual(
			[[entry.tree.tiles for entry in sigma_round.trees] for sigma_round in first.rounds],
			[[entry.tree.tiles for entry in sigma_round.trees] for sigma_round in second.rounds],
		)


class SaturationTest(SimpleTestCase):
	top = Tile(1, 2, 1, 0, 0)

	def test_ambient_is_the_tree(self):
		tree = Tree.of([self.top])
		saturation = saturate_conical(tree, [self.top])
		self.assertIsNone(saturation.overlap)
		self.assertEqual(saturation.tiles, tree.tiles)
		self.assertEqual(saturation.shadow_ratio, 1.0)

	def test_near_and_far_tiles(self):
		near, far = Tile(1, 0, 0, 1, 0), Tile(1, 0, 0, 100, 100)
		saturation = saturate_conical(Tree.of([self.top]), [self.top, near, far])
		self.assertEqual(saturation.overlap.tiles, (near,))
		self.assertEqual(saturation.overlap.kind, 'overlapping')
		self.assertEqual(saturation.overlap.witness, Fraction(7, 16))

	def test_growth_beyond_the_dilation_bound_is_rejected(self):
		with mock.patch('tiles_service.trees.shadow_area', side_effect=[101.0, 1.0]):
			with self.assertRaisesMessage(ValueError, "bound 100"):
				saturate_conical(Tree.of([self.top]), [self.top])

	def test_non_conical_input(self):
		with self.assertRaisesMessage(ValueError, "non-conical input"):
			saturate_conical(Tree.of([Tile(1, 1, 0, 0, -1), Tile(1, 2, 1, 0, 0)]), [])

	def test_membership_matches_predicate(self):
		rng = np.random.default_rng(37)
		pool = build_tile_set([1, 2], [0, 1, 2])
		found = 0
		for _ in range(20):
			ambient = random_tiles(rng, pool, 50)
			seed = ambient[int(rng.integers(len(ambient)))]
			t = [tile for tile in ambient if tile.omega2 == seed.omega2]
			maximal = [
				s for s in t
				if not any(
					r != s and r.box[0] <= s.box[0] and s.box[1] <= r.box[1] and r.box[2] <= s.box[2] and s.box[3] <= r.box[3]
					for r in t
				)
			]
			expected = []
			for candidate in ambient:
				if candidate in t:
					continue
				arc = candidate.omega1
				if not (arc.start <= seed.omega2.start and seed.omega2.end <= arc.end):
					continue
				for s in maximal:
					angle = 2 * math.pi * float(s.orientation)
					e = np.array([math.cos(angle), math.sin(angle)])
					normal = np.array([-e[1], e[0]])
					offsets = candidate.corners() - s.centre()
					if np.all(np.abs(offsets @ e) <= 5 * float(s.d1) + 1e-9) and np.all(np.abs(offsets @ normal) <= 5 * float(s.d2) + 1e-9):
						expected.append(candidate)
						break
			saturation = saturate_conical(Tree.of(t, 'conical'), ambient)
			self.assertEqual(list(saturation.overlap.tiles) if saturation.overlap else [], expected)
			self.assertLessEqual(saturation.shadow_ratio, 100)
			found += len(expected)
		self.assertGreater(found, 0)


class SplitTest(SimpleTestCase):

	def test_lacunary_overlapping_split(self):
		A, B, C, D = Tile(1, 1, 0, 0, -1), Tile(1, 2, 1, 0, 0), Tile(1, 0, 0, 0, 0), Tile(1, 2, 0, 0, 0)
		V = DirectionSet.from_angles([Fraction(1, 8), Fraction(3, 8)])
		lacunary, overlapping = split_lacunary_overlapping([A, B, C, D], V)
		self.assertEqual(lacunary, sorted([B, D]))
		self.assertEqual(overlapping, [A])

	def test_sparse_split(self):
		tiles = build_tile_set([1], [0, 1, 2, 3])
		classes = sparse_split(tiles)
		self.assertEqual(sorted(tile for members in classes.values() for tile in members), tiles)
		self.assertLessEqual(len(classes), 15)
		for members in classes.values():
			for first, second in itertools.combinations(members, 2):
				self.assertEqual((first.level - second.level) % 3, 0)
				if first.level == second.level and first.arc != second.arc:
					self.assertGreaterEqual(abs(first.arc - second.arc), 5)


class ModelSumTest(SimpleTestCase):

	def setUp(self):
		self.rng = np.random.default_rng(38)
		self.pool = resolvable(build_tile_set([1, 2], [0, 1, 2, 3]), 64)

	def random_directions(self, count):
		angles = self.rng.choice(64, size=count, replace=False)
		return DirectionSet.from_angles([Fraction(int(angle), 64) for angle in angles])

	def test_empty_tile_set(self):
		f = random_field(self.rng, 32)
		fields, maximal = model_sum(f, [], self.random_directions(3))
		self.assertEqual(len(fields), 3)
		self.assertEqual(np.abs(maximal.data).max(), 0)

	def test_single_tile(self):
		tile = Tile(1, 1, 0, 1, -1)
		f = random_field(self.rng, 64)
		packet = WavePacket.realize(tile, 64, 1)
		V = DirectionSet.from_angles([0, Fraction(3, 8)])
		fields, maximal = model_sum(f, [tile], V)
		self.assertEqual(np.abs(fields[0].data).max(), 0)
		np.testing.assert_allclose(fields[1].data, packet.inner(f) * packet.dense(), atol=1e-12)
		np.testing.assert_allclose(maximal.data.real, np.abs(packet.inner(f) * packet.dense()), atol=1e-12)

		sq, sc = square_ops(f, [tile], V)
		expected = abs(packet.inner(f)) / math.sqrt(float(tile.area)) * tile_indicator(tile, 64, 1)
		np.testing.assert_allclose(sq.data.real, expected, atol=1e-12)
		np.testing.assert_allclose(sc.data.real, expected, atol=1e-12)

	def test_direct_oracle(self):
		for _ in range(20):
			tiles = random_tiles(self.rng, self.pool, 12)
			f = random_field(self.rng, 64)
			V = self.random_directions(5)
			packets, skipped = realize_packets(tiles, 64, 1)
			self.assertEqual(skipped, [])
			fields, maximal = model_sum(f, tiles, V)
			sq, sc = square_ops(f, tiles, V)
			expected_sq = np.zeros((64, 64))
			expected_sc = np.zeros((64, 64))
			for index, direction in enumerate(V):
				v = direction.angle
				total = np.zeros((64, 64), dtype=np.complex128)
				squares = np.zeros((64, 64))
				groups = {}
				for packet in packets:
					arc = packet.tile.omega2
					if not arc.start <= v < arc.end:
						continue
					coefficient = packet.inner(f)
					total += coefficient * packet.dense()
					term = abs(coefficient) ** 2 / float(packet.tile.area) * tile_indicator(packet.tile, 64, 1)
					squares += term
					groups[arc] = groups.get(arc, 0) + term
				np.testing.assert_allclose(fields[index].data, total, atol=1e-10)
				expected_sq = np.maximum(expected_sq, squares)
				for group in groups.values():
					expected_sc = np.maximum(expected_sc, group)
			expected_maximal = np.max([np.abs(field.data) for field in fields], axis=0)
			np.testing.assert_allclose(maximal.data.real, expected_maximal, atol=1e-10)
			np.testing.assert_allclose(sq.data.real ** 2, expected_sq, atol=1e-10, rtol=1e-10)
			np.testing.assert_allclose(sc.data.real ** 2, expected_sc, atol=1e-10, rtol=1e-10)
			self.assertTrue(np.all(sc.data.real <= sq.data.real))

	def test_frame_bound(self):
		tiles = random_tiles(self.rng, self.pool, 12)
		packets, _ = realize_packets(tiles, 64, 1)
		F = frame_constant(packets)
		V = self.random_directions(4)
		cell = 1 / 64
		for _ in range(100):
			f = random_field(self.rng, 64)
			fields, _ = model_sum(f, tiles, V)
			for field in fields:
				self.assertLessEqual(norm(field.data, cell), F * norm(f.data, cell) * (1 + 1e-10))


class TileSerializerTest(SimpleTestCase):

	def test_document(self):
		tiles = build_tile_set([1], [1])
		payload = json.loads(json.dumps(TileSetSerializer.document(tiles, Fraction(1))))
		self.assertEqual(payload['side'], ['1', '1'])
		self.assertEqual(payload['tiles'][0], {'ann': 1, 'level': 1, 'arc': 0, 'a': 0, 'b': -2})
		loaded, side = load_tile_set(payload)
		self.assertEqual(loaded, tiles)
		self.assertEqual(side, 1)

	def test_rejects_bad_documents(self):
		bad = [
			{'tiles': [{'ann': 1, 'level': 1, 'arc': 2, 'a': 0, 'b': 0}]},
			{'tiles': [{'ann': 1, 'level': 1, 'arc': 0, 'a': 0, 'b': 0}] * 2},
			{'side': ['0', '1'], 'tiles': []},
		]
		for payload in bad:
			with self.assertRaises(ValidationError):
				load_tile_set(payload)

	def test_coefficient_table(self):
		tiles = build_tile_set([1], [1])
		coefficients = {tiles[3]: 1 - 2j, tiles[0]: 0.5j}
		with TemporaryDirectory() as tmp:
			path = Path(tmp) / 'coefficients.csv'
			coefficient_frame(coefficients, tiles).to_csv(path, index=False)
			loaded = read_coefficients(path, tiles)
			self.assertEqual(loaded[tiles[3]], 1 - 2j)
			self.assertEqual(loaded[tiles[0]], 0.5j)
			self.assertEqual(loaded[tiles[1]], 0)
			pd.DataFrame({'id': [16], 're': [1.0], 'im': [0.0]}).to_csv(path, index=False)
			with self.assertRaises(ValueError):
				read_coefficients(path, tiles)


class TilesCommandTest(TestCase):

	def setUp(self):
		self.tmp = TemporaryDirectory()
		self.root = Path(self.tmp.name)
		rng = np.random.default_rng(39)
		write_field(random_field(rng, 32), self.root / 'f.dsf')
		V = DirectionSet.from_angles([Fraction(1, 8), Fraction(3, 8), Fraction(5, 8)])
		(self.root / 'V.json').write_text(json.dumps(DirectionSetSerializer.document(V)))

	def tearDown(self):
		self.tmp.cleanup()

	def call(self, *argv):
		stdout, stderr = io.StringIO(), io.StringIO()
		code = run(list(argv), stdout=stdout, stderr=stderr)
		return code, stderr.getvalue()

	def build(self):
		code, _ = self.call('tiles', 'build', '--ann', '1', '--levels', '1', '--out', str(self.root / 'build'))
		self.assertEqual(code, 0)
		return str(self.root / 'build' / 'tiles.json')

	def test_build(self):
		payload = load_json(self.build())
		self.assertEqual(len(payload['tiles']), 16)

	def test_coefficients_and_decomposition(self):
		tiles = self.build()
		code, _ = self.call('tiles', 'coeffs', '--input', str(self.root / 'f.dsf'), '--tiles', tiles, '--out', str(self.root / 'c'))
		self.assertEqual(code, 0)
		self.assertEqual(load_json(self.root / 'c' / 'skipped.json')['resolved'], 16)
		table = pd.read_csv(self.root / 'c' / 'coefficients.csv')
		self.assertEqual(list(table.columns), ['id', 're', 'im'])
		self.assertEqual(len(table), 16)

		code, _ = self.call(
			'tiles', 'decompose', '--tiles', tiles, '--coefficients', str(self.root / 'c' / 'coefficients.csv'),
			'--mode', 'conical', '--out', str(self.root / 'd')
		)
		self.assertEqual(code, 0)
		forest = load_json(self.root / 'd' / 'forest.json')
		ids = list(forest['residual'])
		for sigma_round in forest['rounds']:
			for tree in sigma_round['trees']:
				self.assertTrue(tree['certificate']['verified'])
				ids.extend(tree['tiles'])
				if tree.get('overlap'):
					ids.extend(tree['overlap']['tiles'])
		self.assertEqual(sorted(ids), list(range(16)))

	def test_saturate(self):
		tiles = self.build()
		code, _ = self.call('tiles', 'saturate', '--tiles', tiles, '--tree', '0,1', '--out', str(self.root / 's'))
		self.assertEqual(code, 0)
		payload = load_json(self.root / 's' / 'saturation.json')
		self.assertEqual(payload['core']['kind'], 'conical')
		self.assertEqual(payload['core']['tiles'], [0, 1])
		code, err = self.call('tiles', 'saturate', '--tiles', tiles, '--tree', '0,15', '--out', str(self.root / 'bad'))
		self.assertEqual(code, 2)
		self.assertTrue(err.startswith('E:'))

	def test_modelsum(self):
		tiles = self.build()
		out = self.root / 'm'
		code, _ = self.call(
			'tiles', 'modelsum', '--input', str(self.root / 'f.dsf'), '--tiles', tiles,
			'--directions', str(self.root / 'V.json'), '--out', str(out)
		)
		self.assertEqual(code, 0)
		sq, sc = read_field(out / 'sq.dsf'), read_field(out / 'sc.dsf')
		self.assertTrue(np.all(sc.data.real <= sq.data.real))
		self.assertEqual(read_field(out / 'maximal.dsf').n, 32)

	def test_duplicate_tiles(self):
		path = self.root / 'dup.json'
		path.write_text(json.dumps({'tiles': [{'ann': 1, 'level': 1, 'arc': 0, 'a': 0, 'b': 0}] * 2}))
		code, err = self.call('tiles', 'coeffs', '--input', str(self.root / 'f.dsf'), '--tiles', str(path), '--out', str(self.root / 'y'))
		self.assertEqual(code, 2)
		self.assertTrue(err.startswith('E:'))
