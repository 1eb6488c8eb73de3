import importlib
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import mock

import pandas as pd
from django.test import SimpleTestCase, TestCase
from rest_framework.exceptions import ValidationError

from dirlab import settings as lab_settings

from .cli import COMMANDS, run
from .helpers import (
	canonical_json, config_hash, dump_csv, fraction_pair, load_json, parse_fraction, parse_int_list, sha256_file
)
from .models import ExperimentRun
from .serializers import ExperimentConfigSerializer


class HelperTest(SimpleTestCase):

	def test_canonical_json_ignores_key_order(self):
		self.assertEqual(canonical_json({'b': 1, 'a': [1, 2]}), '{"a":[1,2],"b":1}')
		self.assertEqual(config_hash({'b': 1, 'a': 2}), config_hash({'a': 2, 'b': 1}))

	def test_fractions(self):
		self.assertEqual(fraction_pair(Fraction(6, 8)), ['3', '4'])
		self.assertEqual(parse_fraction(['3', '4']), Fraction(3, 4))
		self.assertEqual(parse_fraction('2/9'), Fraction(2, 9))
		with self.assertRaises(ValueError):
			parse_fraction(0.1)
		with self.assertRaises(ValueError):
			parse_fraction(['1', '2', '3'])

	def test_int_lists(self):
		self.assertEqual(parse_int_list('2,4, 8,'), [2, 4, 8])

	def test_csv_floats_round_trip(self):
		with TemporaryDirectory() as tmp:
			path = dump_csv(pd.DataFrame({'x': [0.1, 1 / 3]}), Path(tmp) / 'x.csv')
			self.assertEqual(path.read_text(), f"x\n0.1\n{1 / 3!r}\n")
			self.assertEqual(len(sha256_file(path)), 64)


class SettingsTest(SimpleTestCase):

	def test_only_the_output_directory_comes_from_the_environment(self):
		environment = {
			'DEBUG': '1', 'DJANGO_SECRET': 'elsewhere', 'DIRLAB_LOG_LEVEL': 'DEBUG', 'DIRLAB_OUTPUT_DIR': '/tmp/dirlab-runs',
		}
		self.addCleanup(importlib.reload, lab_settings)
		with mock.patch.dict(os.environ, environment), mock.patch.object(sys, 'argv', ['manage.py', 'dirs']):
			reloaded = importlib.reload(lab_settings)
		self.assertFalse(reloaded.DEBUG)
		self.assertEqual(reloaded.SECRET_KEY, 'dirlab-local-only')
		self.assertEqual(reloaded.DIRLAB_OUTPUT_DIR, '/tmp/dirlab-runs')
		self.assertEqual({logger['level'] for logger in reloaded.LOGGING['loggers'].values()}, {'INFO'})


class ExperimentConfigTest(SimpleTestCase):

	def payload(self, **extra):
		payload = {'command': 'dirs gen', 'params': {'family': 'uniform'}, 'seed': 3, 'output_dir': '/tmp/x'}
		payload.update(extra)
		return payload

	def test_valid_config(self):
		serializer = ExperimentConfigSerializer(data=self.payload(), context={'allowed_params': {'family'}})
		self.assertTrue(serializer.is_valid())
		self.assertNotIn('output_dir', serializer.hashed_view())

	def test_unknown_keys(self):
		serializer = ExperimentConfigSerializer(data=self.payload(colour='blue'))
		self.assertFalse(serializer.is_valid())
		serializer = ExperimentConfigSerializer(
			data=self.payload(params={'family': 'uniform', 'N': 3}), context={'allowed_params': {'family'}}
		)
		with self.assertRaises(ValidationError):
			serializer.is_valid(raise_exception=True)

	def test_seed_is_u64(self):
		self.assertTrue(ExperimentConfigSerializer(data=self.payload(seed=2 ** 64 - 1)).is_valid())
		self.assertFalse(ExperimentConfigSerializer(data=self.payload(seed=2 ** 64)).is_valid())
		self.assertFalse(ExperimentConfigSerializer(data=self.payload(seed=-1)).is_valid())


class CliTest(TestCase):

	def setUp(self):
		self.tmp = TemporaryDirectory()
		self.root = Path(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def call(self, *argv):
		stdout, stderr = io.StringIO(), io.StringIO()
		code = run(list(argv), stdout=stdout, stderr=stderr)
		return code, stdout.getvalue(), stderr.getvalue()

	def test_usage_errors(self):
		code, _, err = self.call()
		self.assertEqual(code, 1)
		self.assertTrue(err.startswith('E: usage'))
		code, _, err = self.call('plot')
		self.assertEqual(code, 1)
		code, _, err = self.call('dirs', 'gen', '--family', 'spiral')
		self.assertEqual(code, 1)
		self.assertTrue(err.startswith('E:'))

	def test_help_lists_every_command(self):
		code, out, _ = self.call('--help')
		self.assertEqual(code, 0)
		for name in COMMANDS:
			self.assertIn(name, out)

	def test_manifest_and_run_record(self):
		code, out, _ = self.call('dirs', 'gen', '--family', 'uniform', '--N', '4', '--seed', '9', '--out', str(self.root))
		self.assertEqual(code, 0)
		manifest = load_json(self.root / 'manifest.json')
		self.assertEqual(manifest['command'], 'dirs gen')
		self.assertEqual(manifest['config']['seed'], 9)
		[entry] = manifest['files']
		self.assertEqual(entry['sha256'], sha256_file(self.root / 'directions.json'))
		self.assertIn('wall_time', manifest)
		self.assertIn('cpu_count', manifest['host'])
		run_record = ExperimentRun.objects.get()
		self.assertEqual(run_record.config_hash, manifest['config_hash'])
		self.assertEqual(run_record.seed, '9')

	def test_config_file_overrides_flags(self):
		config = self.root / 'config.json'
		config.write_text(json.dumps({'N': 5}))
		code, _, _ = self.call(
			'dirs', 'gen', '--family', 'uniform', '--N', '4', '--config', str(config), '--out', str(self.root / 'run')
		)
		self.assertEqual(code, 0)
		self.assertEqual(len(load_json(self.root / 'run' / 'directions.json')['angles']), 5)
