'''
	The DSF1 binary field format.

	Layout: 4-byte magic `DSF1`, u32 little-endian n, f64 little-endian side,
	then n·n complex samples as interleaved (re, im) f64 little-endian, row-major.
'''
import hashlib
import struct
from pathlib import Path

import numpy as np

from .grid import GridField

MAGIC = b'DSF1'
HEADER = struct.Struct('<4sId')
SAMPLE_DTYPE = np.dtype('<c16')


def encode_field(f: GridField) -> bytes:
	header = HEADER.pack(MAGIC, f.n, f.side)
	return header + np.ascontiguousarray(f.data, dtype=SAMPLE_DTYPE).tobytes()


def decode_field(payload: bytes) -> GridField:
	if len(payload) < HEADER.size:
		raise ValueError("truncated DSF1 header")
	magic, n, side = HEADER.unpack_from(payload)
	if magic != MAGIC:
		raise ValueError(f"not a DSF1 field (magic {magic!r})")
	expected = HEADER.size + n * n * SAMPLE_DTYPE.itemsize
	if len(payload) != expected:
		raise ValueError(f"DSF1 payload has {len(payload)} bytes, expected {expected}")
	data = np.frombuffer(payload, dtype=SAMPLE_DTYPE, offset=HEADER.size).reshape(n, n)
	return GridField(n, side, data.astype(np.complex128))


def field_digest(f: GridField) -> str:
	'''SHA-256 of the DSF1 encoding; identifies witness fields.'''
	return hashlib.sha256(encode_field(f)).hexdigest()


def write_field(f: GridField, path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_bytes(encode_field(f))
	return path


def read_field(path) -> GridField:
	return decode_field(Path(path).read_bytes())
