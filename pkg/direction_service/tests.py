import io
import json
import math
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
from django.test import SimpleTestCase, TestCase
from rest_framework.exceptions import ValidationError

from core_service.cli import run
from core_service.helpers import load_json

from .directions import Direction, DirectionSet, LacunaryCertificate, circular_distance
from .serializers import DirectionSetSerializer, load_direction_set
from .services import (
	candidate_nodes, exhaustive_longest_lacunary, extract_lacunary_subsequence, gen_cantor, gen_lacunary,
	gen_uniform, is_lacunary_with_node, longest_lacunary_estimate, vargas_constant_estimate
)


def random_set(rng, N, denominator=4096):
	numerators = rng.choice(denominator, size=N, replace=False)
	return DirectionSet.from_angles([Fraction(int(value), denominator) for value in numerators], 'random')


class DirectionTest(SimpleTestCase):

	def test_circular_distance(self):
		self.assertEqual(circular_distance(Fraction(1, 8), Fraction(7, 8)), Fraction(1, 4))
		self.assertEqual(circular_distance(0, Fraction(1, 2)), Fraction(1, 2))
		self.assertEqual(circular_distance(Fraction(3, 10), Fraction(3, 10)), 0)

	def test_direction_range(self):
		with self.assertRaises(ValueError):
			Direction(1)
		self.assertEqual(Direction.of(Fraction(5, 4)).angle, Fraction(1, 4))

	def test_sets_are_strictly_increasing(self):
		with self.assertRaises(ValueError):
			DirectionSet((Direction(Fraction(1, 2)), Direction(Fraction(1, 4))))
		with self.assertRaises(ValueError):
			DirectionSet.from_angles([Fraction(1, 3), Fraction(4, 3)])
		V = DirectionSet.from_angles([Fraction(3, 4), Fraction(1, 4)])
		self.assertEqual(V.angles, [Fraction(1, 4), Fraction(3, 4)])
		self.assertEqual(V.rotated(Fraction(1, 2)).angles, [Fraction(1, 4), Fraction(3, 4)])


class GeneratorTest(SimpleTestCase):

	def test_uniform(self):
		V = gen_uniform(6)
		self.assertEqual(V.angles, [Fraction(j, 6) for j in range(6)])

	def test_lacunary(self):
		V = gen_lacunary(Fraction(1, 2), 4, Fraction(1, 3))
		self.assertEqual(V.N, 4)
		self.assertIn(Fraction(1, 3) + Fraction(1, 16), V.angles)
		certificate = LacunaryCertificate((3, 2, 1, 0), Fraction(1, 3))
		self.assertTrue(certificate.is_valid(V))
		with self.assertRaises(ValueError):
			gen_lacunary(Fraction(2, 3), 4)

	def test_cantor(self):
		V = gen_cantor(3, 2)
		self.assertEqual(V.angles, [Fraction(0), Fraction(2, 9), Fraction(2, 3), Fraction(8, 9)])
		self.assertEqual(gen_cantor(4, 5).N, 32)
		with self.assertRaisesMessage(ValueError, "size overflow"):
			gen_cantor(3, 21)

	def test_cantor_reflection(self):
		for q, n in ((3, 3), (5, 2), (3, 6)):
			V = gen_cantor(q, n)
			top = sum(Fraction(q - 1, q ** j) for j in range(1, n + 1))
			self.assertEqual(sorted(top - angle for angle in V.angles), V.angles)


class LacunarityTest(SimpleTestCase):

	def test_definition(self):
		node = Fraction(0)
		self.assertTrue(is_lacunary_with_node([Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)], node))
		self.assertTrue(is_lacunary_with_node([Fraction(1, 4), Fraction(7, 8)], node))
		self.assertFalse(is_lacunary_with_node([Fraction(1, 4), Fraction(1, 5)], node))

	def test_extraction_on_the_standard_families(self):
		families = []
		for N in (16, 64, 256, 1024):
			families.append(gen_uniform(N))
		for n in (4, 6, 8, 10):
			families.append(gen_cantor(3, n))
		for V in families:
			certificate = extract_lacunary_subsequence(V)
			self.assertTrue(certificate.is_valid(V))
			self.assertGreaterEqual(len(certificate), math.floor(math.log2(V.N) / 3))

	def test_extraction_on_random_sets(self):
		rng = np.random.default_rng(31)
		for trial in range(100):
			N = (16, 64, 256, 1024)[trial % 4]
			V = random_set(rng, N, 1 << 16)
			certificate = extract_lacunary_subsequence(V)
			self.assertTrue(certificate.is_valid(V))
			self.assertGreaterEqual(len(certificate), math.floor(math.log2(N) / 3))

	def test_antipodal_pair(self):
		V = DirectionSet.from_angles([0, Fraction(1, 2)])
		self.assertTrue(extract_lacunary_subsequence(V).is_valid(V))

	def test_cantor_sets_have_short_lacunary_subsets(self):
		for n in range(1, 6):
			V = gen_cantor(3, n)
			length, certificate = longest_lacunary_estimate(V)
			self.assertTrue(certificate.is_valid(V))
			self.assertLessEqual(length, 4 * n)

	def test_uniform_sets_grow_like_log(self):
		lengths = [longest_lacunary_estimate(gen_uniform(N))[0] for N in (8, 32, 128)]
		self.assertEqual(lengths, sorted(lengths))
		self.assertGreater(lengths[-1], lengths[0])

	def test_estimate_matches_subset_enumeration(self):
		rng = np.random.default_rng(5)
		for trial in range(50):
			V = random_set(rng, 4 + trial % 9, 64)
			nodes = candidate_nodes(V, 16)
			length, certificate = longest_lacunary_estimate(V, 16)
			exhaustive, witness = exhaustive_longest_lacunary(V, nodes)
			self.assertEqual(length, exhaustive)
			self.assertTrue(certificate.is_valid(V))
			self.assertTrue(witness.is_valid(V))

	def test_estimate_is_monotone_under_inclusion(self):
		rng = np.random.default_rng(13)
		for trial in range(30):
			W = random_set(rng, 6 + trial % 20, 256)
			keep = sorted(int(index) for index in rng.choice(W.N, size=W.N // 2, replace=False))
			V = DirectionSet.from_angles([W.angles[index] for index in keep], 'random')
			smaller, _ = longest_lacunary_estimate(V, 16)
			larger, certificate = longest_lacunary_estimate(W, 16, extra_nodes=candidate_nodes(V, 16))
			self.assertGreaterEqual(larger, smaller)
			self.assertTrue(certificate.is_valid(W))

	def test_vargas_constant_examples(self):
		self.assertEqual(vargas_constant_estimate(gen_lacunary(Fraction(1, 2), 16)), 4)
		self.assertTrue(Fraction(1, 3) <= vargas_constant_estimate(gen_uniform(256)) <= 2)
		self.assertLessEqual(vargas_constant_estimate(gen_cantor(3, 4)), 4)

	def test_extraction_on_a_fine_uniform_set(self):
		V = gen_uniform(4096)
		certificate = extract_lacunary_subsequence(V)
		self.assertTrue(certificate.is_valid(V))
		self.assertGreaterEqual(len(certificate), 4)

	def test_vargas_constant(self):
		V = gen_uniform(16)
		length, _ = longest_lacunary_estimate(V)
		self.assertEqual(vargas_constant_estimate(V), Fraction(length, 4))
		with self.assertRaises(ValueError):
			vargas_constant_estimate(gen_uniform(1))


class DirectionSetSerializerTest(SimpleTestCase):

	def test_document_round_trip(self):
		V = gen_lacunary(Fraction(1, 3), 5, Fraction(1, 7))
		document = json.loads(json.dumps(DirectionSetSerializer.document(V)))
		self.assertEqual(document['ratio'], ['1', '3'])
		W = load_direction_set(document)
		self.assertEqual(W.angles, V.angles)
		self.assertEqual(W.family, 'lacunary')

	def test_rejects_bad_documents(self):
		with self.assertRaises(ValidationError):
			load_direction_set({'angles': [['3', '2']]})
		with self.assertRaises(ValidationError):
			load_direction_set({'angles': [['1', '2'], ['1', '4']]})
		with self.assertRaises(ValidationError):
			load_direction_set({'angles': [0.25]})
		with self.assertRaises(ValidationError):
			load_direction_set({'family': 'cantor', 'n': 2, 'angles': [['0', '1']]})


class DirsCommandTest(TestCase):

	def setUp(self):
		self.tmp = TemporaryDirectory()
		self.root = Path(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def call(self, *argv):
		return run(list(argv), stdout=io.StringIO(), stderr=io.StringIO())

	def test_gen_cantor(self):
		code = self.call('dirs', 'gen', '--family', 'cantor', '--q', '3', '--n', '2', '--out', str(self.root))
		self.assertEqual(code, 0)
		document = load_json(self.root / 'directions.json')
		self.assertEqual(document['angles'], [['0', '1'], ['2', '9'], ['2', '3'], ['8', '9']])

	def test_analyze(self):
		self.call('dirs', 'gen', '--family', 'uniform', '--N', '16', '--out', str(self.root))
		code = self.call(
			'dirs', 'analyze', '--input', str(self.root / 'directions.json'), '--out', str(self.root / 'analysis')
		)
		self.assertEqual(code, 0)
		report = load_json(self.root / 'analysis' / 'analysis.json')
		self.assertTrue(report['extracted']['valid'])
		self.assertTrue(report['longest']['valid'])

	def test_identical_runs_are_byte_identical(self):
		for name in ('a', 'b'):
			self.call('dirs', 'gen', '--family', 'lacunary', '--N', '6', '--out', str(self.root / name))
		self.assertEqual(
			(self.root / 'a' / 'directions.json').read_bytes(), (self.root / 'b' / 'directions.json').read_bytes()
		)
		self.assertEqual(
			load_json(self.root / 'a' / 'manifest.json')['config_hash'],
			load_json(self.root / 'b' / 'manifest.json')['config_hash'],
		)

	def test_unknown_config_keys_are_rejected(self):
		config = self.root / 'config.json'
		config.write_text(json.dumps({'family': 'uniform', 'colour': 'blue'}))
		code = self.call('dirs', 'gen', '--family', 'uniform', '--config', str(config), '--out', str(self.root))
		self.assertEqual(code, 2)
