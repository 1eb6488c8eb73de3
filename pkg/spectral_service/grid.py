'''
	Periodic n×n fields and the frequency lattice attached to them.

	Sample (i, j) of a field sits at x = (i·side/n, j·side/n): axis 0 carries x₁
	and axis 1 carries x₂. Frequencies are ξ = 2π/side · (k̃₁, k̃₂) where k̃ is the
	centred representative of the index in [−n/2, n/2).
'''
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MIN_RESOLUTION = 8
MAX_RESOLUTION = 4096


def is_power_of_two(n):
	return isinstance(n, (int, np.integer)) and n > 0 and (n & (n - 1)) == 0


def validate_resolution(n):
	if not is_power_of_two(n) or not MIN_RESOLUTION <= n <= MAX_RESOLUTION:
		raise ValueError(f"grid resolution must be a power of two in [{MIN_RESOLUTION}, {MAX_RESOLUTION}], got {n}")


@dataclass(frozen=True, eq=False)
class GridField:
	'''
		A complex periodic field on the torus [0, side)².
		`spectral` marks fields holding DFT coefficients rather than samples.
	'''
	n: int
	side: float
	data: np.ndarray
	spectral: bool = False

	def __post_init__(self):
		validate_resolution(self.n)
		if not self.side > 0:
			raise ValueError(f"side must be positive, got {self.side}")
		data = np.asarray(self.data, dtype=np.complex128)
		if data.shape != (self.n, self.n):
			raise ValueError(f"expected {self.n}x{self.n} samples, got shape {data.shape}")
		object.__setattr__(self, 'side', float(self.side))
		object.__setattr__(self, 'data', data)

	@classmethod
	def zeros(cls, n, side=1.0):
		return cls(n, side, np.zeros((n, n), dtype=np.complex128))

	@property
	def cell(self):
		return self.side / self.n

	@property
	def cell_area(self):
		return self.cell ** 2

	@property
	def shape(self):
		return self.data.shape

	def with_data(self, data, spectral=None):
		return GridField(self.n, self.side, data, self.spectral if spectral is None else spectral)

	def lattice(self):
		return FreqLattice(self.n, self.side)

	def coordinates(self):
		'''Sample positions (x₁, x₂) as two n×n arrays.'''
		axis = np.arange(self.n) * self.cell
		return np.meshgrid(axis, axis, indexing='ij')

	def is_real(self, tolerance=1e-10):
		scale = max(1.0, float(np.abs(self.data).max(initial=0.0)))
		return float(np.abs(self.data.imag).max(initial=0.0)) <= tolerance * scale

	def l2(self):
		'''Discrete ℓ² norm without cell-area scaling (the Parseval norm).'''
		return float(np.sqrt(np.sum(np.abs(self.data) ** 2)))

	def mean(self):
		return complex(self.data.mean())

	def __repr__(self):
		domain = 'spectral' if self.spectral else 'spatial'
		return f"GridField(n={self.n}, side={self.side!r}, {domain})"


@dataclass(frozen=True)
class FreqLattice:
	'''
		Derived view of the index space of an n×n field: integer frequencies,
		physical frequencies ξ, modulus |ξ| and angle θ(ξ) in turns.
		θ is undefined at ξ = 0; `theta` stores 0 there and `zero` masks it.
	'''
	n: int
	side: float

	@cached_property
	def k(self):
		centred = np.fft.fftfreq(self.n, d=1.0 / self.n)
		return np.meshgrid(centred, centred, indexing='ij')

	@cached_property
	def xi(self):
		k1, k2 = self.k
		scale = 2 * np.pi / self.side
		return k1 * scale, k2 * scale

	@cached_property
	def modulus(self):
		xi1, xi2 = self.xi
		return np.hypot(xi1, xi2)

	@cached_property
	def zero(self):
		mask = np.zeros((self.n, self.n), dtype=bool)
		mask[0, 0] = True
		return mask

	@cached_property
	def theta(self):
		k1, k2 = self.k
		turns = np.arctan2(k2, k1) / (2 * np.pi)
		turns = np.where(turns < 0, turns + 1.0, turns)
		# -tiny + 1 rounds to 1.0
		turns = np.where(turns >= 1.0, 0.0, turns)
		turns[0, 0] = 0.0
		return turns

	def dot(self, direction):
		'''ξ·v for v = (cos 2πθ, sin 2πθ) given as a float angle in turns.'''
		xi1, xi2 = self.xi
		angle = 2 * np.pi * float(direction)
		return xi1 * np.cos(angle) + xi2 * np.sin(angle)

	@cached_property
	def nyquist(self):
		'''Mask of the self-conjugate lines k₁ = −n/2 or k₂ = −n/2, where ξ and −ξ share a bin.'''
		k1, k2 = self.k
		half = self.n // 2
		return (k1 == -half) | (k2 == -half)

	def on_line(self, direction, tolerance=1e-9):
		'''Mask of the lattice line ξ·v = 0 (relative tolerance in index units).'''
		k1, k2 = self.k
		angle = 2 * np.pi * float(direction)
		projection = k1 * np.cos(angle) + k2 * np.sin(angle)
		return np.abs(projection) <= tolerance * np.maximum(1.0, np.hypot(k1, k2))
