'''
	Lower-bound certificates ‖Tf‖_p / ‖f‖_p for the discrete operators.

	Norms are ℓ^p sums scaled by the cell area h², so ratios are comparable
	across resolutions. A certificate carries the SHA-256 of its witness; it
	only ever bounds the discrete operator norm from below.
'''
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from spectral_service.converters import field_digest
from spectral_service.grid import GridField

logger = logging.getLogger(__name__)


def extremizer_ball(n, side=1.0, radius=None, remove_mean=False) -> GridField:
	'''
		Indicator of the disk of the given radius (default side/16) centred in
		the torus. Radii beyond side/8 are refused.
	'''
	side = float(side)
	radius = side / 16 if radius is None else float(radius)
	if radius > side / 8:
		raise ValueError("radius too large")
	if radius <= 0:
		raise ValueError(f"radius must be positive, got {radius}")
	axis = np.arange(n) * (side / n) - side / 2
	x, y = np.meshgrid(axis, axis, indexing='ij')
	data = (x ** 2 + y ** 2 < radius ** 2).astype(float)
	f = GridField(n, side, data)
	if remove_mean:
		f = f.with_data(data - data.mean())
	return f


def ball_area_bound(n, side=1.0, radius=None) -> float:
	'''|‖1_B‖₁ − πr²| ≤ 2√2·π·r·h: only cells within h/√2 of the circle can disagree.'''
	side = float(side)
	radius = side / 16 if radius is None else float(radius)
	return 2 * math.sqrt(2) * math.pi * radius * side / n


def lp_norm(f: GridField, p) -> float:
	values = np.abs(f.data)
	if math.isinf(p):
		return float(values.max(initial=0.0))
	if p < 1:
		raise ValueError(f"p must be at least 1, got {p}")
	return float(np.sum(values ** p) * f.cell_area) ** (1 / p)


def weak_lp_norm(f: GridField, p) -> float:
	'''‖f‖_{p,∞} = sup_λ λ·|{|f| > λ}|^{1/p}, attained in the limit λ ↑ k-th largest value.'''
	values = np.sort(np.abs(f.data).ravel())[::-1]
	measures = np.arange(1, values.size + 1) * f.cell_area
	return float(np.max(values * measures ** (1 / p)))


@dataclass
class NormCertificate:
	operator: dict
	p: float
	ratio: float
	numerator: float
	denominator: float
	witness_hash: str
	grid: dict
	weak: bool = False
	witness_path: Optional[str] = None
	converged: bool = True
	history: list = field(default_factory=list)
	witness: Optional[GridField] = field(default=None, repr=False, compare=False)

	def as_dict(self):
		return {
			'operator': self.operator,
			'p': self.p,
			'weak': self.weak,
			'ratio': self.ratio,
			'numerator': self.numerator,
			'denominator': self.denominator,
			'witness_hash': self.witness_hash,
			'witness_path': self.witness_path,
			'grid': self.grid,
			'converged': self.converged,
			'history': self.history,
		}

	def verify(self, op, f: GridField = None, workers=1, tolerance=1e-8) -> bool:
		'''Recompute the ratio from the witness (the stored one when f is omitted).'''
		f = self.witness if f is None else f
		if field_digest(f) != self.witness_hash:
			return False
		again = lower_bound_certificate(op, f, self.p, self.weak, workers=workers)
		return abs(again.ratio - self.ratio) <= tolerance * max(1.0, abs(self.ratio))


def lower_bound_certificate(op, f: GridField, p, weak=False, workers=1) -> NormCertificate:
	'''
		‖op(f)‖_p / ‖f‖_p, or with weak=True ‖op(f)‖_{p,∞} / ‖f‖_p. `op` is an
		OperatorSpec or any callable GridField -> GridField with a
		`descriptor()`.
	'''
	denominator = lp_norm(f, p)
	if denominator == 0:
		raise ValueError("zero input")
	image = op(f, workers=workers)
	numerator = weak_lp_norm(image, p) if weak else lp_norm(image, p)
	descriptor = op.descriptor() if hasattr(op, 'descriptor') else {'op': getattr(op, '__name__', 'custom')}
	return NormCertificate(
		operator=descriptor,
		p=float(p),
		ratio=numerator / denominator,
		numerator=numerator,
		denominator=denominator,
		witness_hash=field_digest(f),
		grid={'n': f.n, 'side': f.side},
		weak=weak,
		witness=f,
	)
