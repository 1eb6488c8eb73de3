# Miscellaneous methods used by every lab app: hashing, exact-rational encoding,
# deterministic file output and run manifests.
import hashlib
import json
import logging
import platform
from fractions import Fraction
from pathlib import Path

import numpy as np
import psutil

logger = logging.getLogger(__name__)


def sha256_bytes(payload: bytes) -> str:
	return hashlib.sha256(payload).hexdigest()


def sha256_file(path) -> str:
	digest = hashlib.sha256()
	with open(path, 'rb') as handle:
		for chunk in iter(lambda: handle.read(1 << 20), b''):
			digest.update(chunk)
	return digest.hexdigest()


def canonical_json(payload) -> str:
	'''Key-sorted compact JSON, the form that gets hashed.'''
	return json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)


def config_hash(payload) -> str:
	return sha256_bytes(canonical_json(payload).encode())


def dump_json(payload, path) -> Path:
	'''
		Write JSON deterministically. Floats go through repr, which is the
		shortest round-trip form.
	'''
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_text(json.dumps(payload, indent=2, allow_nan=False) + '\n')
	return path


def load_json(path):
	with open(path) as handle:
		return json.load(handle)


def dump_csv(frame, path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	frame.to_csv(path, index=False, lineterminator='\n')
	return path


def fraction_pair(value) -> list:
	value = Fraction(value)
	return [str(value.numerator), str(value.denominator)]


def parse_fraction(value) -> Fraction:
	'''Accepts ["p", "q"] pairs, "p/q" strings and integers.'''
	if isinstance(value, (list, tuple)):
		if len(value) != 2:
			raise ValueError(f"expected a numerator/denominator pair, got {value!r}")
		return Fraction(int(value[0]), int(value[1]))
	if isinstance(value, float):
		raise ValueError(f"refusing inexact float {value!r}; use a p/q string")
	return Fraction(value)


def parse_int_list(value) -> list:
	if isinstance(value, str):
		return [int(part) for part in value.split(',') if part.strip()]
	return [int(part) for part in value]


def seeded_rng(seed):
	'''numpy's default generator (PCG64) seeded with the run seed.'''
	return np.random.default_rng(seed)


def complex_pair(value) -> list:
	value = complex(value)
	return [value.real, value.imag]


def package_versions() -> dict:
	import django
	import pandas
	import rest_framework

	import dirlab

	return {
		'dirlab': dirlab.__version__,
		'python': platform.python_version(),
		'django': django.get_version(),
		'djangorestframework': rest_framework.VERSION,
		'numpy': np.__version__,
		'pandas': pandas.__version__,
	}


def host_info() -> dict:
	memory = psutil.virtual_memory()
	return {
		'platform': platform.platform(),
		'cpu_count': psutil.cpu_count(),
		'physical_cores': psutil.cpu_count(logical=False),
		'memory_total': memory.total,
	}


def write_manifest(out_dir, command, config, digest, wall_time, files) -> Path:
	'''
		manifest.json lists every output file with its SHA-256 next to the
		config hash, versions, host and wall time.
	'''
	out_dir = Path(out_dir)
	entries = []
	for path in files:
		path = Path(path)
		entries.append({
			'path': str(path.relative_to(out_dir)) if path.is_relative_to(out_dir) else str(path),
			'sha256': sha256_file(path),
		})
	manifest = {
		'command': command,
		'config_hash': digest,
		'config': config,
		'versions': package_versions(),
		'host': host_info(),
		'wall_time': wall_time,
		'files': entries,
	}
	return dump_json(manifest, out_dir / 'manifest.json')
