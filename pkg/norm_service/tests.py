import io
import math
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory
from types import SimpleNamespace
from unittest import mock

import numpy as np
import pandas as pd
from django.test import SimpleTestCase, TestCase
from openpyxl import load_workbook

from core_service.cli import run
from core_service.helpers import load_json
from direction_service.directions import Direction, DirectionSet
from direction_service.services import gen_uniform
from operator_service.multipliers import MultiplierSpec
from operator_service.services import OperatorSpec
from spectral_service.converters import field_digest, read_field
from spectral_service.grid import GridField

from .certificates import (
	ball_area_bound, extremizer_ball, lower_bound_certificate, lp_norm, weak_lp_norm
)
from .exports import write_workbook
from .models import GrowthScanRecord, NormCertificateRecord
from .services import (
	alternating_maximization, direction_family, fit_growth_models, growth_scan, loglog_slope,
	refinement_gate, select_model
)
from .tasks import handle_scan_result, queue_growth_scan, run_growth_scan


def hilbert_maximal(V):
	return OperatorSpec('maximal_hilbert', directions=V)


class ExtremizerBallTest(SimpleTestCase):

	def test_area_within_boundary_bound(self):
		for n in (64, 256, 512):
			f = extremizer_ball(n)
			self.assertLessEqual(abs(lp_norm(f, 1) - math.pi / 256), ball_area_bound(n))

	def test_indicator_norms(self):
		f = extremizer_ball(128, side=2.0, radius=0.2)
		self.assertTrue(set(np.unique(f.data.real)) <= {0.0, 1.0})
		for p in (1.5, 2, 4):
			self.assertAlmostEqual(lp_norm(f, p), lp_norm(f, 1) ** (1 / p), places=12)

	def test_mean_removed(self):
		f = extremizer_ball(64, remove_mean=True)
		self.assertLess(abs(np.fft.fft2(f.data)[0, 0]), 1e-9)

	def test_radius_rules(self):
		with self.assertRaisesMessage(ValueError, "radius too large"):
			extremizer_ball(64, radius=0.2)
		with self.assertRaises(ValueError):
			extremizer_ball(64, radius=0)


class CertificateTest(SimpleTestCase):

	def test_identity(self):
		f = extremizer_ball(64)
		certificate = lower_bound_certificate(OperatorSpec('identity'), f, 3)
		self.assertEqual(certificate.ratio, 1.0)
		self.assertEqual(certificate.witness_hash, field_digest(f))
		self.assertEqual(certificate.grid, {'n': 64, 'side': 1.0})

	def test_directional_hilbert_on_pure_mode(self):
		f = GridField.zeros(64)
		x, _ = f.coordinates()
		f = f.with_data(np.exp(2j * np.pi * 3 * x))
		op = OperatorSpec('hilbert_directional', direction=Direction(Fraction(0)))
		self.assertAlmostEqual(lower_bound_certificate(op, f, 2).ratio, 1.0, places=10)

	def test_zero_input(self):
		with self.assertRaisesMessage(ValueError, "zero input"):
			lower_bound_certificate(OperatorSpec('identity'), GridField.zeros(16), 2)

	def test_uniform_sixteen_beats_two(self):
		f = extremizer_ball(512)
		two = lower_bound_certificate(hilbert_maximal(gen_uniform(2)), f, 2, workers=4)
		sixteen = lower_bound_certificate(hilbert_maximal(gen_uniform(16)), f, 2, workers=4)
		self.assertGreater(sixteen.ratio, two.ratio)

	def test_monotone_in_directions(self):
		rng = np.random.default_rng(5)
		f = GridField(64, 1.0, rng.standard_normal((64, 64)))
		angles = [Fraction(1, 7), Fraction(2, 5), Fraction(3, 4)]
		previous = 0.0
		for k in range(1, len(angles) + 1):
			ratio = lower_bound_certificate(hilbert_maximal(DirectionSet.from_angles(angles[:k])), f, 2).ratio
			self.assertGreaterEqual(ratio, previous)
			previous = ratio

	def test_self_verifying(self):
		op = hilbert_maximal(gen_uniform(4))
		f = extremizer_ball(64)
		certificate = lower_bound_certificate(op, f, 2)
		self.assertTrue(certificate.verify(op))
		self.assertFalse(certificate.verify(op, f.with_data(2 * f.data)))
		self.assertNotIn('witness', certificate.as_dict())

	def test_weak_type_numerator(self):
		rng = np.random.default_rng(8)
		g = GridField(32, 1.0, rng.standard_normal((32, 32)))
		for p in (1, 2, 4):
			self.assertLessEqual(weak_lp_norm(g, p), lp_norm(g, p) * (1 + 1e-12))
		op = hilbert_maximal(gen_uniform(4))
		f = extremizer_ball(64)
		weak = lower_bound_certificate(op, f, 2, weak=True)
		self.assertTrue(weak.weak)
		self.assertLessEqual(weak.ratio, lower_bound_certificate(op, f, 2).ratio * (1 + 1e-12))


class AlternatingMaximizationTest(SimpleTestCase):

	def test_single_direction_sign(self):
		V = DirectionSet.from_angles([Fraction(0)])
		certificate = alternating_maximization(V, MultiplierSpec.sign(), n=64, iterations=2, seed=3)
		self.assertAlmostEqual(certificate.ratio, 1.0, places=8)
		self.assertTrue(certificate.converged)

	def test_history_non_decreasing(self):
		certificate = alternating_maximization(gen_uniform(4), MultiplierSpec.hilbert(), n=64, iterations=3, seed=1)
		self.assertEqual(len(certificate.history), 4)
		for before, after in zip(certificate.history, certificate.history[1:]):
			self.assertGreaterEqual(after, before - 1e-9 * before)
		self.assertAlmostEqual(certificate.ratio, max(certificate.history), places=9)

	def test_more_directions_from_previous_witness(self):
		eight = alternating_maximization(gen_uniform(8), MultiplierSpec.hilbert(), n=256, iterations=1, workers=4)
		thirty_two = alternating_maximization(
			gen_uniform(32), MultiplierSpec.hilbert(), n=256, iterations=1, initial=eight.witness, workers=4
		)
		self.assertGreater(thirty_two.ratio, eight.ratio)

	def test_not_below_own_witness(self):
		V = gen_uniform(4)
		certificate = alternating_maximization(V, MultiplierSpec.hilbert(), n=64, iterations=2, seed=2)
		again = lower_bound_certificate(hilbert_maximal(V), certificate.witness, 2)
		self.assertGreaterEqual(certificate.ratio, again.ratio * (1 - 1e-12))
		self.assertTrue(certificate.verify(hilbert_maximal(V)))

	def test_deterministic(self):
		first = alternating_maximization(gen_uniform(4), MultiplierSpec.sign(), n=32, iterations=2, seed=11)
		second = alternating_maximization(gen_uniform(4), MultiplierSpec.sign(), n=32, iterations=2, seed=11, workers=3)
		self.assertEqual(first.witness_hash, second.witness_hash)
		self.assertEqual(first.ratio, second.ratio)

	def test_preconditions(self):
		with self.assertRaises(ValueError):
			alternating_maximization(gen_uniform(4), MultiplierSpec.sign(), p=3, n=32)
		with self.assertRaises(ValueError):
			alternating_maximization(gen_uniform(4), MultiplierSpec.sign(), n=32, iterations=0)


class GrowthScanTest(SimpleTestCase):

	def test_direction_families(self):
		self.assertEqual(direction_family('uniform', 4).angles, [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
		self.assertEqual(len(direction_family('lacunary', 5)), 5)
		self.assertEqual(len(direction_family('cantor', 8)), 8)
		with self.assertRaises(ValueError):
			direction_family('cantor', 6)
		with self.assertRaises(ValueError):
			direction_family('random', 4)

	def test_single_point_fit_is_undefined(self):
		scan = growth_scan('uniform', [4], n=32, iterations=0)
		self.assertEqual(len(scan.points), 1)
		for fit in scan.fits.values():
			self.assertIsNone(fit['r2'])
		self.assertEqual(scan.winner, 'undefined')
		self.assertIsNone(scan.loglog_slope)

	def test_nested_families_are_monotone(self):
		for family, N_list in (('uniform', [2, 4, 8, 16]), ('lacunary', [2, 4, 8]), ('cantor', [2, 4, 8])):
			scan = growth_scan(family, N_list, n=64, iterations=0)
			self.assertEqual(scan.N_list, N_list)
			for before, after in zip(scan.ratios, scan.ratios[1:]):
				self.assertGreaterEqual(after, before)
			for name in ('log', 'sqrt_log', 'power'):
				self.assertIn('r2', scan.fits[name])

	def test_alternating_candidate_used(self):
		plain = growth_scan('uniform', [2, 4], n=32, iterations=0)
		improved = growth_scan('uniform', [2, 4], n=32, iterations=1)
		for low, high in zip(plain.ratios, improved.ratios):
			self.assertGreaterEqual(high, low)

	def test_unresolvable_N_skipped(self):
		with self.assertLogs('norm_service.services', 'WARNING'):
			scan = growth_scan('uniform', [4, 8, 32], n=64, iterations=0)
		self.assertEqual(scan.N_list, [4, 8])
		self.assertEqual(scan.skipped[0]['N'], 32)

	def test_bad_N_list(self):
		with self.assertRaises(ValueError):
			growth_scan('uniform', [4, 4], n=64)
		with self.assertRaises(ValueError):
			growth_scan('uniform', [], n=64)

	def test_other_exponents_and_operators(self):
		scan = growth_scan('uniform', [2, 4], p=Fraction(4, 3), n=32, iterations=2)
		self.assertEqual(scan.p, 4 / 3)
		self.assertTrue(all(point.certificate.history == [] for point in scan.points))
		scan = growth_scan('uniform', [2, 4], operator='average', n=32)
		self.assertEqual(scan.points[0].certificate.operator['op'], 'maximal_avg_directional')

	def test_fits_and_model_selection(self):
		Ns = [2, 4, 8, 16, 32, 64]
		fits = fit_growth_models(Ns, [2 * math.log(N) + 1 for N in Ns], 2)
		self.assertAlmostEqual(fits['log']['a'], 2.0, places=9)
		self.assertAlmostEqual(fits['log']['b'], 1.0, places=9)
		self.assertAlmostEqual(fits['log']['r2'], 1.0, places=9)
		self.assertEqual(select_model({'log': {'r2': 0.99}, 'sqrt_log': {'r2': 0.95}, 'power': {'r2': 0.5}}), 'log')
		self.assertEqual(select_model({'log': {'r2': 0.99}, 'sqrt_log': {'r2': 0.98}, 'power': {'r2': 0.5}}), 'inconclusive')
		self.assertEqual(select_model({'log': {'r2': None}, 'sqrt_log': {'r2': None}}), 'undefined')
		self.assertIsNone(fit_growth_models(Ns, [1.0] * len(Ns), 2)['log']['r2'])

	def test_loglog_slope(self):
		Ns = [4, 8, 16, 32]
		self.assertAlmostEqual(loglog_slope(Ns, [N ** 0.75 for N in Ns]), 0.75, places=9)
		self.assertIsNone(loglog_slope([4], [1.0]))

	def test_refinement_gate(self):
		gate = refinement_gate('uniform', 4, 64)
		self.assertEqual((gate.N, gate.n), (4, 64))
		self.assertAlmostEqual(gate.difference, abs(gate.fine - gate.coarse) / gate.coarse)
		self.assertEqual(gate.passed, gate.difference < 0.1)
		self.assertEqual(set(gate.as_dict()), {'family', 'N', 'n', 'coarse', 'fine', 'difference', 'passed'})


class GrowthTrendTest(SimpleTestCase):
	'''Reduced-scale growth laws of the ball extremizer on a 128 grid, where uniform sets up to N = 16 are not yet saturated.'''

	Ns = [2, 4, 8, 16]

	def test_uniform_sets_grow_logarithmically(self):
		for operator in ('hilbert', 'average'):
			with self.subTest(operator=operator):
				scan = growth_scan('uniform', self.Ns, operator=operator, n=128, iterations=0)
				self.assertTrue(all(before < after for before, after in zip(scan.ratios, scan.ratios[1:])))
				self.assertGreaterEqual(scan.fits['log']['r2'], 0.9)
				self.assertGreater(scan.fits['log']['r2'], scan.fits['power']['r2'])

	def test_smaller_exponent_grows_faster(self):
		steep = growth_scan('uniform', self.Ns, p=Fraction(4, 3), n=128, iterations=0)
		flat = growth_scan('uniform', self.Ns, p=2, n=128, iterations=0)
		self.assertGreater(steep.loglog_slope, flat.loglog_slope)
		self.assertGreater(flat.loglog_slope, 0)
		self.assertLessEqual(steep.loglog_slope, 1.3 * 0.75)

	def test_lacunary_sets_grow_slower(self):
		Ns = [4, 8, 16, 32]
		uniform = growth_scan('uniform', Ns, n=128, iterations=0)
		lacunary = growth_scan('lacunary', Ns, n=128, iterations=0)
		self.assertGreater(uniform.fits['log']['a'], 0)
		self.assertLessEqual(lacunary.fits['log']['a'], 0.6 * uniform.fits['log']['a'])


class PersistenceTest(TestCase):

	def setUp(self):
		self.scan = growth_scan('uniform', [2, 4], n=32, iterations=0)

	def test_store(self):
		record = GrowthScanRecord.store(self.scan)
		self.assertEqual(record.certificates.count(), 2)
		self.assertEqual(sorted(record.certificates.values_list('N', flat=True)), [2, 4])
		self.assertEqual(record.metadata['skipped'], [])
		self.assertEqual(NormCertificateRecord.objects.filter(scan=record, N=4).get().witness_hash, self.scan.points[1].certificate.witness_hash)

	def test_workbook(self):
		with TemporaryDirectory() as tmp:
			path = write_workbook(self.scan, Path(tmp) / 'scan.xlsx')
			workbook = load_workbook(path)
			self.assertEqual(workbook.sheetnames, ["Certificates", "Fits"])
			self.assertEqual(workbook["Certificates"].max_row, 3)
			self.assertEqual(workbook["Fits"].max_row, 4)

	def test_task_runs_and_stores(self):
		record_id = run_growth_scan({'family': 'uniform', 'N_list': [2, 4], 'p': 2.0, 'operator': 'hilbert', 'n': 32, 'iterations': 0})
		self.assertEqual(GrowthScanRecord.objects.get(id=record_id).certificates.count(), 2)

	@mock.patch('norm_service.tasks.async_task', return_value='task-1')
	def test_queue(self, async_task):
		params = {'family': 'lacunary', 'N_list': [2, 4], 'p': 2.0, 'operator': 'hilbert'}
		self.assertEqual(queue_growth_scan(params), 'task-1')
		args, kwargs = async_task.call_args
		self.assertEqual(args, ('norm_service.tasks.run_growth_scan', params))
		self.assertEqual(kwargs['hook'], 'norm_service.tasks.handle_scan_result')
		self.assertIn('lacunary', kwargs['q_options']['task_name'])

	def test_result_hook(self):
		with self.assertLogs('norm_service.tasks', 'ERROR'):
			handle_scan_result(SimpleNamespace(success=False, id='t', result='boom'))


class ScanCommandTest(TestCase):

	def setUp(self):
		self.tmp = TemporaryDirectory()
		self.root = Path(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def call(self, *argv):
		stdout, stderr = io.StringIO(), io.StringIO()
		code = run(list(argv), stdout=stdout, stderr=stderr)
		return code, stderr.getvalue()

	def test_uniform_hilbert_scan(self):
		out = self.root / 'scan'
		code, _ = self.call(
			'scan', 'norms', '--family', 'uniform', '--p', '2', '--op', 'hilbert', '--N', '2,4,8,16,32',
			'--n', '128', '--iterations', '1', '--xlsx', '--record', '--out', str(out)
		)
		self.assertEqual(code, 0)
		table = pd.read_csv(out / 'scan.csv')
		self.assertEqual(list(table.columns), ['family', 'N', 'p', 'operator', 'ratio', 'witness_hash', 'grid_n'])
		self.assertEqual(list(table['N']), [2, 4, 8, 16, 32])
		ratios = list(table['ratio'])
		for before, after in zip(ratios, ratios[1:]):
			self.assertGreaterEqual(after, before)
		report = load_json(out / 'scan.json')
		self.assertIn(report['winner'], ('log', 'sqrt_log', 'power', 'inconclusive'))
		self.assertEqual(field_digest(read_field(out / 'witness_32.dsf')), table['witness_hash'].iloc[-1])
		self.assertTrue((out / 'scan.xlsx').exists())
		self.assertEqual(GrowthScanRecord.objects.get().certificates.count(), 5)
		manifest = load_json(out / 'manifest.json')
		self.assertIn('scan norms', manifest['command'])

	def test_fractional_exponent_and_gate(self):
		out = self.root / 'p'
		code, _ = self.call(
			'scan', 'norms', '--family', 'lacunary', '--p', '4/3', '--N', '2,4', '--n', '32', '--gate', '--out', str(out)
		)
		self.assertEqual(code, 0)
		self.assertAlmostEqual(pd.read_csv(out / 'scan.csv')['p'].iloc[0], 4 / 3)
		self.assertEqual(load_json(out / 'gate.json')['N'], 4)

	def test_queue(self):
		with mock.patch('norm_service.tasks.async_task', return_value='task-9'):
			code, _ = self.call('scan', 'norms', '--family', 'uniform', '--N', '2,4', '--queue', '--out', str(self.root / 'q'))
		self.assertEqual(code, 0)
		self.assertEqual(load_json(self.root / 'q' / 'queued.json')['task'], 'task-9')

	def test_errors(self):
		code, err = self.call('scan', 'norms', '--family', 'uniform', '--N', '8,4', '--out', str(self.root / 'e'))
		self.assertEqual(code, 2)
		self.assertTrue(err.startswith('E:'))
		code, err = self.call('scan', 'norms', '--family', 'spiral', '--N', '2', '--out', str(self.root / 'e'))
		self.assertEqual(code, 1)
		self.assertTrue(err.startswith('E:'))
