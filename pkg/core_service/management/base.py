'''
	Shared machinery of the lab subcommands (`dirs`, `field`, `op`, `bmo`,
	`tiles`, `scan`).

	Every subcommand is a LabCommand with a set of actions. Each action gets
	its own sub-parser carrying the common flags (--seed, --threads, --out,
	--config), a `arguments_<action>` hook to declare its parameters and a
	`handle_<action>` method doing the work. Output files are written through
	`write_json` / `write_csv` / `write_field` so that they end up in the
	run manifest.

	Exit codes: 0 success, 1 usage error, 2 data error. Error lines start
	with `E:`.
'''
import logging
import sys
import time
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError as DjangoValidationError
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError, connections
from rest_framework.exceptions import ValidationError

from core_service.helpers import config_hash, dump_csv, dump_json, load_json, write_manifest
from core_service.serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)

COMMON_OPTIONS = ('seed', 'threads', 'out', 'config', 'action')
DJANGO_OPTIONS = ('verbosity', 'settings', 'pythonpath', 'traceback', 'no_color', 'force_color', 'skip_checks')


class LabCommand(BaseCommand):
	requires_system_checks = []
	# action name -> help text
	actions = {}

	def add_arguments(self, parser):
		subparsers = parser.add_subparsers(dest='action', metavar='ACTION', required=True)
		self.declared = {}
		for action, text in self.actions.items():
			subparser = subparsers.add_parser(action, help=text, description=text)
			self.add_common_arguments(subparser)
			hook = getattr(self, f"arguments_{action.replace('-', '_')}", None)
			if hook:
				hook(subparser)
			self.declared[action] = {
				entry.dest for entry in subparser._actions
				if entry.dest not in COMMON_OPTIONS and entry.dest != 'help'
			}

	def add_common_arguments(self, parser):
		parser.add_argument('--seed', type=int, default=0, help="u64 seed of the PCG64 generator")
		parser.add_argument(
			'--threads', type=int, default=settings.DIRLAB_DEFAULT_THREADS,
			help="worker threads (default: available cores); outputs do not depend on it"
		)
		parser.add_argument('--out', default=None, help="output directory (default: DIRLAB_OUTPUT_DIR)")
		parser.add_argument('--config', default=None, help="JSON parameter block; unknown keys are rejected")

	def run_argv(self, argv, prog_name='manage.py'):
		'''Parse and execute `argv` (without the command name); returns the exit code.'''
		parser = self.create_parser(prog_name, self.name)
		try:
			options = parser.parse_args(argv)
		except CommandError as error:
			self.stderr.write(f"E: usage: {_strip_prefix(error)}")
			return 1
		cmd_options = vars(options)
		args = cmd_options.pop('args', ())
		try:
			self.execute(*args, **cmd_options)
		except CommandError as error:
			self.stderr.write(f"E: usage: {_strip_prefix(error)}")
			return 1
		except (ValidationError, DjangoValidationError) as error:
			self.stderr.write(f"E: data: {_validation_detail(error)}")
			return 2
		except (ValueError, OSError) as error:
			self.stderr.write(f"E: data: {error}")
			return 2
		return 0

	def run_from_argv(self, argv):
		code = self.run_argv(argv[2:], prog_name=argv[0])
		connections.close_all()
		sys.exit(code)

	def handle(self, *args, **options):
		action = options['action']
		handler = getattr(self, f"handle_{action.replace('-', '_')}")
		params = {
			key: value for key, value in options.items()
			if key not in COMMON_OPTIONS and key not in DJANGO_OPTIONS and key not in ('stdout', 'stderr')
		}
		if options.get('config'):
			overrides = load_json(options['config'])
			if not isinstance(overrides, dict):
				raise ValueError("config must be a JSON object")
			params.update(overrides)

		self.out_dir = Path(options.get('out') or settings.DIRLAB_OUTPUT_DIR)
		self.threads = max(1, int(options.get('threads') or 1))
		self.seed = int(options.get('seed') or 0)
		self.outputs = []

		serializer = ExperimentConfigSerializer(
			data={
				'command': f"{self.name} {action}",
				'inputs': [str(value) for key, value in params.items() if key.startswith('input') and value],
				'params': _jsonable(params),
				'seed': self.seed,
				'output_dir': str(self.out_dir),
			},
			context={'allowed_params': self.declared[action]},
		)
		serializer.is_valid(raise_exception=True)
		config = serializer.hashed_view()
		digest = config_hash(config)

		started = time.perf_counter()
		self.out_dir.mkdir(parents=True, exist_ok=True)
		handler(params)
		wall_time = time.perf_counter() - started

		manifest = write_manifest(self.out_dir, config['command'], config, digest, wall_time, self.outputs)
		self.record_run(config, digest, wall_time)
		logger.info(f"{config['command']} wrote {len(self.outputs)} file(s) to {self.out_dir}")
		self.stdout.write(str(manifest))

	def record_run(self, config, digest, wall_time):
		from core_service.models import ExperimentRun

		try:
			ExperimentRun.objects.create(
				command=config['command'],
				config_hash=digest,
				seed=str(config['seed']),
				output_dir=str(self.out_dir),
				wall_time=wall_time,
				metadata={'files': [str(path) for path in self.outputs]},
			)
		except DatabaseError as e:
			logger.warning(f"Run not recorded (database unavailable): {e}")

	# Output helpers; every file written here is listed in the manifest.

	def output_path(self, name):
		return self.out_dir / name

	def write_json(self, name, payload):
		path = dump_json(payload, self.output_path(name))
		self.outputs.append(path)
		return path

	def write_csv(self, name, frame):
		path = dump_csv(frame, self.output_path(name))
		self.outputs.append(path)
		return path

	def write_field(self, name, field):
		from spectral_service.converters import write_field

		path = write_field(field, self.output_path(name))
		self.outputs.append(path)
		return path

	def register_output(self, path):
		self.outputs.append(Path(path))
		return path


def _strip_prefix(error):
	message = str(error)
	return message[len("Error: "):] if message.startswith("Error: ") else message


def _validation_detail(error):
	detail = getattr(error, 'detail', None) or getattr(error, 'messages', None) or str(error)
	return detail if isinstance(detail, str) else str(detail)


def _jsonable(params):
	clean = {}
	for key, value in params.items():
		if isinstance(value, Path):
			value = str(value)
		clean[key] = value
	return clean
