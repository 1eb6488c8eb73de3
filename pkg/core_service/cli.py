'''
	Programmatic entry point to the lab subcommands.

		python -m core_service.cli dirs gen --family cantor --q 3 --n 2

	behaves exactly like `python manage.py dirs gen ...` and `run(argv)` returns
	the exit code instead of exiting.
'''
import os
import sys
from importlib import import_module

COMMANDS = {
	'dirs': 'direction_service',
	'field': 'spectral_service',
	'op': 'operator_service',
	'bmo': 'bmo_service',
	'tiles': 'tiles_service',
	'scan': 'norm_service',
}


def load_command(name, stdout=None, stderr=None):
	module = import_module(f"{COMMANDS[name]}.management.commands.{name}")
	return module.Command(stdout=stdout, stderr=stderr)


def usage():
	lines = ["usage: dirlab COMMAND ACTION [flags]", "", "commands:"]
	for name in COMMANDS:
		command = load_command(name)
		lines.append(f"  {name:<6} {'|'.join(command.actions)}")
	return '\n'.join(lines)


def run(argv, stdout=None, stderr=None) -> int:
	stdout = stdout or sys.stdout
	stderr = stderr or sys.stderr
	if not argv:
		stderr.write("E: usage: missing command\n" + usage() + "\n")
		return 1
	if argv[0] in ('-h', '--help'):
		stdout.write(usage() + "\n")
		return 0
	name, rest = argv[0], list(argv[1:])
	if name not in COMMANDS:
		stderr.write(f"E: usage: unknown command '{name}'\n")
		return 1
	return load_command(name, stdout=stdout, stderr=stderr).run_argv(rest, prog_name='dirlab')


def main():
	import django

	os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'dirlab.settings')
	django.setup()
	sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
	main()
