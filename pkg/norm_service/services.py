'''
	Operator-norm experiments: alternating maximization for the maximal
	multipliers, growth scans across N with model fits and the grid
	refinement gate.
'''
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from django.conf import settings

from core_service.helpers import seeded_rng
from direction_service.directions import DirectionSet
from direction_service.services import gen_cantor, gen_lacunary, gen_uniform
from operator_service.multipliers import MultiplierSpec
from operator_service.services import (
	OperatorSpec, maximal_directional, selected_directional, selected_directional_adjoint
)
from spectral_service.grid import GridField

from .certificates import NormCertificate, extremizer_ball, lower_bound_certificate, lp_norm

logger = logging.getLogger(__name__)

FAMILIES = ('uniform', 'lacunary', 'cantor')
OPERATORS = {
	'hilbert': 'maximal_hilbert',
	'sign': 'maximal_directional',
	'average': 'maximal_avg_directional',
}
# basis functions x(N, p) of the fitted models a·x + b
MODELS = {
	'log': lambda N, p: math.log(N),
	'sqrt_log': lambda N, p: math.sqrt(math.log(N)),
	'power': lambda N, p: N ** (1 / p),
}
WINNER_MARGIN = 0.02
REFINEMENT_THRESHOLD = 0.1


def direction_family(family, N) -> DirectionSet:
	if family == 'uniform':
		return gen_uniform(N)
	if family == 'lacunary':
		return gen_lacunary(Fraction(1, 2), N)
	if family == 'cantor':
		if N < 2 or N & (N - 1):
			raise ValueError(f"cantor sets have 2^n directions, got N={N}")
		return gen_cantor(3, N.bit_length() - 1)
	raise ValueError(f"unknown direction family '{family}'")


def maximal_operator(kind, V: DirectionSet) -> OperatorSpec:
	if kind not in OPERATORS:
		raise ValueError(f"unknown operator '{kind}'")
	return OperatorSpec(OPERATORS[kind], directions=V)


def _power_iterate(g: GridField, V, m, selection, workers=1):
	'''
		Power iteration on S*S for the selected operator S. Returns the last
		unit iterate, the estimate of ‖S‖² and whether the relative change
		fell below DIRLAB_POWER_TOLERANCE within DIRLAB_POWER_ITERATIONS steps.
	'''
	tolerance = settings.DIRLAB_POWER_TOLERANCE
	g = g.with_data(g.data / lp_norm(g, 2))
	estimate = 0.0
	for _ in range(settings.DIRLAB_POWER_ITERATIONS):
		image = selected_directional_adjoint(selected_directional(g, V, m, selection, workers), V, m, selection)
		value = lp_norm(image, 2)
		if value == 0:
			return g, 0.0, True
		g = image.with_data(image.data / value)
		if abs(value - estimate) <= tolerance * value:
			return g, value, True
		estimate = value
	return g, estimate, False


def alternating_maximization(V: DirectionSet, m: MultiplierSpec, p=2, n=256, iterations=3, seed=0, side=1.0, initial=None, workers=1) -> NormCertificate:
	'''
		Lower bound for ‖T_V‖_{2→2} by coordinate ascent: fix f and take the
		argmax direction field v(x), then fix v(x) and power-iterate the
		linear operator f ↦ T_{v(x)} f. The ratio never decreases from one
		outer iteration to the next. Starts from `initial`, or from a real
		Gaussian field drawn with the seed.
	'''
	if p != 2:
		raise ValueError("alternating maximization needs p = 2")
	if iterations < 1:
		raise ValueError(f"iterations must be at least 1, got {iterations}")
	if initial is None:
		f = GridField(n, side, seeded_rng(seed).standard_normal((n, n)))
	else:
		f = initial
	op = OperatorSpec('maximal_hilbert' if m.kind == 'hilbert' else 'maximal_directional', multiplier=m, directions=V)

	values, selection = maximal_directional(f, V, m, return_argmax=True, workers=workers)
	best, best_f = lp_norm(values, 2) / lp_norm(f, 2), f
	history = [best]
	converged = True
	for outer in range(iterations):
		g, _, inner_converged = _power_iterate(f, V, m, selection, workers)
		converged = converged and inner_converged
		values, next_selection = maximal_directional(g, V, m, return_argmax=True, workers=workers)
		ratio = lp_norm(values, 2) / lp_norm(g, 2)
		history.append(ratio)
		logger.debug(f"Outer iteration {outer + 1}: ratio {ratio:.6g}")
		if ratio < best - 1e-9 * best:
			logger.warning(f"Ratio dropped from {best:.12g} to {ratio:.12g}; keeping the previous witness")
			break
		if ratio >= best:
			best, best_f = ratio, g
		f, selection = g, next_selection
	if not converged:
		logger.warning(f"Power iteration reached its cap of {settings.DIRLAB_POWER_ITERATIONS} steps; returning the best iterate")

	certificate = lower_bound_certificate(op, best_f, 2, workers=workers)
	certificate.converged = converged
	certificate.history = history
	return certificate


def _fit(x, y):
	if len(x) < 2:
		return {'a': None, 'b': None, 'r2': None, 'residual': None}
	A = np.column_stack([x, np.ones(len(x))])
	(a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
	residual = float(np.sum((y - A @ np.array([a, b])) ** 2))
	total = float(np.sum((y - y.mean()) ** 2))
	return {'a': float(a), 'b': float(b), 'r2': 1 - residual / total if total > 0 else None, 'residual': residual}


def fit_growth_models(Ns, ratios, p) -> dict:
	'''Least-squares fits ratio ≈ a·x(N) + b for every model, with R² (None when undefined).'''
	y = np.asarray(ratios, dtype=float)
	return {name: _fit(np.array([basis(N, p) for N in Ns], dtype=float), y) for name, basis in MODELS.items()}


def select_model(fits) -> str:
	'''Best R² when it beats the runner-up by WINNER_MARGIN, else "inconclusive".'''
	ranked = sorted(
		((fit['r2'], name) for name, fit in fits.items() if fit['r2'] is not None),
		key=lambda item: -item[0],
	)
	if not ranked:
		return 'undefined'
	if len(ranked) == 1 or ranked[0][0] - ranked[1][0] >= WINNER_MARGIN:
		return ranked[0][1]
	return 'inconclusive'


def loglog_slope(Ns, ratios) -> Optional[float]:
	if len(Ns) < 2 or min(ratios) <= 0:
		return None
	return float(np.polyfit(np.log(Ns), np.log(ratios), 1)[0])


@dataclass
class ScanPoint:
	N: int
	directions: DirectionSet
	certificate: NormCertificate


@dataclass
class GrowthScan:
	family: str
	operator: str
	p: float
	n: int
	points: list = field(default_factory=list)
	skipped: list = field(default_factory=list)
	fits: dict = field(default_factory=dict)
	winner: str = 'undefined'
	loglog_slope: Optional[float] = None

	@property
	def N_list(self):
		return [point.N for point in self.points]

	@property
	def ratios(self):
		return [point.certificate.ratio for point in self.points]

	def rows(self):
		return [
			{
				'family': self.family,
				'N': point.N,
				'p': self.p,
				'operator': self.operator,
				'ratio': point.certificate.ratio,
				'witness_hash': point.certificate.witness_hash,
				'grid_n': self.n,
			}
			for point in self.points
		]

	def as_dict(self):
		return {
			'family': self.family,
			'operator': self.operator,
			'p': self.p,
			'grid_n': self.n,
			'N': self.N_list,
			'ratios': self.ratios,
			'skipped': self.skipped,
			'fits': self.fits,
			'winner': self.winner,
			'loglog_slope': self.loglog_slope,
			'certificates': [point.certificate.as_dict() for point in self.points],
		}


def growth_scan(family, N_list, p=2, operator='hilbert', n=512, seed=0, iterations=2, side=1.0, workers=1) -> GrowthScan:
	'''
		One certificate per N from the ball extremizer and, for p = 2 and the
		multiplier operators, alternating maximization; the best is kept. When
		the previous direction set is contained in the current one its witness
		is tried too, so certificates of nested families never decrease. N
		above n/4 cannot be resolved on the grid and is skipped.
	'''
	N_list = [int(N) for N in N_list]
	if not N_list:
		raise ValueError("empty N-list")
	if any(b <= a for a, b in zip(N_list, N_list[1:])):
		raise ValueError("N-list must be strictly increasing")
	if family not in FAMILIES:
		raise ValueError(f"unknown direction family '{family}'")
	p = float(p)
	scan = GrowthScan(family, operator, p, n)
	ball = extremizer_ball(n, side)
	previous = None
	for N in N_list:
		if N > n // 4:
			logger.warning(f"N = {N} exceeds n/4 = {n // 4}; skipped")
			scan.skipped.append({'N': N, 'reason': f"N > n/4 = {n // 4}"})
			continue
		V = direction_family(family, N)
		op = maximal_operator(operator, V)
		starts = [ball]
		if previous is not None and set(previous.directions.angles) <= set(V.angles):
			starts.append(previous.certificate.witness)
		candidates = [lower_bound_certificate(op, start, p, workers=workers) for start in starts]
		if p == 2 and operator != 'average' and iterations > 0:
			initial = max(candidates, key=lambda entry: entry.ratio).witness
			candidates.append(alternating_maximization(
				V, op.multiplier, 2, n, iterations, seed, side, initial=initial, workers=workers
			))
		best = max(candidates, key=lambda entry: entry.ratio)
		logger.debug(f"{family} N = {N}: ratio {best.ratio:.6g}")
		previous = ScanPoint(N, V, best)
		scan.points.append(previous)

	scan.fits = fit_growth_models(scan.N_list, scan.ratios, p)
	scan.winner = select_model(scan.fits)
	scan.loglog_slope = loglog_slope(scan.N_list, scan.ratios)
	logger.info(f"Growth scan {family}/{operator} p={p:g}: {len(scan.points)} point(s), winner {scan.winner}")
	return scan


@dataclass
class RefinementGate:
	family: str
	N: int
	n: int
	coarse: float
	fine: float
	difference: float
	passed: bool

	def as_dict(self):
		return asdict(self)


def refinement_gate(family, N, n, p=2, operator='hilbert', side=1.0, threshold=REFINEMENT_THRESHOLD, workers=1) -> RefinementGate:
	'''Ball certificates at n and 2n; a relative difference of `threshold` or more flags the configuration.'''
	op = maximal_operator(operator, direction_family(family, N))
	coarse = lower_bound_certificate(op, extremizer_ball(n, side), p, workers=workers).ratio
	fine = lower_bound_certificate(op, extremizer_ball(2 * n, side), p, workers=workers).ratio
	difference = abs(fine - coarse) / coarse
	passed = difference < threshold
	if not passed:
		logger.warning(f"Refinement gate failed for {family} N={N}: {coarse:.6g} at n={n}, {fine:.6g} at n={2 * n}")
	return RefinementGate(family, N, n, coarse, fine, difference, passed)
