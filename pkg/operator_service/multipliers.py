'''
	One-dimensional multiplier symbols and the smooth profiles behind the
	Littlewood–Paley pieces and the smooth cones.
'''
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


def _flat(t):
	'''exp(−1/t) for t > 0, else 0.'''
	t = np.asarray(t, dtype=float)
	positive = t > 0
	safe = np.where(positive, t, 1.0)
	return np.where(positive, np.exp(-1.0 / safe), 0.0)


def smooth_step(t):
	'''C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1.'''
	rising, falling = _flat(t), _flat(1.0 - np.asarray(t, dtype=float))
	return rising / (rising + falling)


def dyadic_bump(u):
	'''s(u + 1) − s(u): supported in [−1, 1], integer translates sum to 1.'''
	u = np.asarray(u, dtype=float)
	return smooth_step(u + 1.0) - smooth_step(u)


def annulus_profile(r):
	'''
		Φ(r) = φ(log₂ r): supported in [1/2, 2], with Σ_k Φ(2^{−k} r) = 1 for r > 0
		and Φ(0) = 0.
	'''
	r = np.asarray(r, dtype=float)
	positive = r > 0
	logs = np.log2(np.where(positive, r, 1.0))
	return np.where(positive, dyadic_bump(logs), 0.0)


def cone_window(t):
	'''β(t) = s(t + 1/2) − s(t − 1/2): supported in [−1/2, 3/2], Σ_ℓ β(t − ℓ) = 1.'''
	t = np.asarray(t, dtype=float)
	return smooth_step(t + 0.5) - smooth_step(t - 0.5)


@dataclass(frozen=True)
class MultiplierSpec:
	'''
		A bounded symbol m of one real variable, applied as m(ξ·v).
		kind is 'sign', 'hilbert' (m(t) = −i·sign t, the symbol of the
		principal-value line integral), 'annulus_bump' (m(t) = Φ(2^{−k}|t|)) or 'custom'.
		sign and hilbert are odd; custom symbols declare it with `odd`.
	'''
	kind: str
	k: int = 0
	function: Optional[Callable] = None
	bound: Optional[float] = None
	zero_value: complex = 0
	odd: bool = False

	def __post_init__(self):
		if self.kind not in ('sign', 'hilbert', 'annulus_bump', 'custom'):
			raise ValueError(f"unknown multiplier kind '{self.kind}'")
		if self.kind in ('sign', 'hilbert') and self.zero_value != 0:
			raise ValueError(f"the {self.kind} symbol has zero_value 0")
		if self.kind == 'custom' and (self.function is None or self.bound is None):
			raise ValueError("custom symbols need a function and a declared bound")

	@classmethod
	def sign(cls):
		return cls('sign')

	@classmethod
	def hilbert(cls):
		return cls('hilbert')

	@classmethod
	def annulus_bump(cls, k):
		return cls('annulus_bump', k=int(k))

	@classmethod
	def custom(cls, function, bound, zero_value=0, odd=False):
		return cls('custom', function=function, bound=float(bound), zero_value=zero_value, odd=odd)

	@classmethod
	def parse(cls, name):
		'''"sign", "hilbert" or "annulus_bump:k".'''
		if name in ('sign', 'hilbert'):
			return cls(name)
		if name.startswith('annulus_bump'):
			_, _, k = name.partition(':')
			return cls.annulus_bump(int(k or 0))
		raise ValueError(f"unknown multiplier '{name}'")

	@property
	def name(self):
		if self.kind == 'annulus_bump':
			return f"annulus_bump:{self.k}"
		return self.kind

	def __call__(self, t):
		t = np.asarray(t, dtype=float)
		if self.kind == 'sign':
			return np.sign(t)
		if self.kind == 'hilbert':
			return -1j * np.sign(t)
		if self.kind == 'annulus_bump':
			return annulus_profile(np.abs(t) * 2.0 ** (-self.k))
		values = np.asarray(self.function(t), dtype=np.complex128)
		if not np.all(np.isfinite(values)) or np.abs(values).max(initial=0.0) > self.bound * (1 + 1e-12):
			raise ValueError("invalid symbol")
		return values

	@property
	def is_odd(self):
		return self.kind in ('sign', 'hilbert') or self.odd

	def conjugate(self):
		'''Symbol of the adjoint operator.'''
		if self.kind == 'hilbert':
			return MultiplierSpec.custom(lambda t: 1j * np.sign(t), 1, odd=True)
		if self.kind != 'custom':
			return self
		function = self.function
		return MultiplierSpec.custom(lambda t: np.conj(function(t)), self.bound, np.conj(self.zero_value), self.odd)


def directional_symbol(lattice, angle, m: MultiplierSpec):
	'''
		σ(ξ) = m(ξ·v), with m's declared zero value on the whole lattice line
		ξ·v = 0 (which contains ξ = 0). Odd symbols vanish on the Nyquist lines
		(ξ and −ξ share those bins). With m = −i·sign, H_v H_v = −P_v.
	'''
	values = np.asarray(m(lattice.dot(angle)), dtype=np.complex128)
	values = np.broadcast_to(values, (lattice.n, lattice.n)).copy()
	values[lattice.on_line(angle)] = m.zero_value
	if m.is_odd:
		values[lattice.nyquist] = 0
	return values
