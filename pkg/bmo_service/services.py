'''
	Product-BMO machinery: shadows, the size functional, the rectangle square
	function SB, wave-packet sums B_R and their level-set profiles.
'''
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from django.conf import settings

from spectral_service.grid import GridField

from .rectangles import DyadicRect, Raster, exact_union_area, integer_boxes, union_area

logger = logging.getLogger(__name__)

MAX_ENTRIES = 2 ** 14
LAMBDA_POINTS = 64


@dataclass
class ProductCoefficients:
	'''
		Complex coefficients b_R on distinct dyadic rectangles. `bounds`
		(x0, x1, y0, y1) is the declared bounding box; `raster` the default
		raster for rasterized outputs.
	'''
	entries: list
	bounds: Optional[tuple] = None
	raster: Optional[Raster] = None

	def __post_init__(self):
		self.entries = [(rect, complex(value)) for rect, value in self.entries]
		if len(self.entries) > MAX_ENTRIES:
			raise ValueError(f"at most {MAX_ENTRIES} rectangles are supported")
		boxes = [rect.box for rect, _ in self.entries]
		if len(set(boxes)) != len(boxes):
			raise ValueError("duplicate rectangle")
		if self.bounds is not None:
			self.bounds = tuple(Fraction(value) for value in self.bounds)
			x0, x1, y0, y1 = self.bounds
			for box in boxes:
				if box[0] < x0 or box[1] > x1 or box[2] < y0 or box[3] > y1:
					raise ValueError("rectangle outside the declared bounding box")

	@property
	def rects(self):
		return [rect for rect, _ in self.entries]

	@property
	def values(self):
		return np.array([value for _, value in self.entries], dtype=np.complex128)

	def __len__(self):
		return len(self.entries)

	def scaled(self, factor):
		return ProductCoefficients([(rect, value * factor) for rect, value in self.entries], self.bounds, self.raster)

	def subfamily(self, indices):
		return ProductCoefficients([self.entries[index] for index in indices], self.bounds, self.raster)

	def default_raster(self):
		return self.raster or Raster.covering(self.rects)


@dataclass
class SizeEstimate:
	value: float
	exact: bool
	witness: tuple = field(default_factory=tuple)
	shadow: Fraction = Fraction(0)

	def as_dict(self):
		return {
			'size': self.value,
			'exact': self.exact,
			'lower_bound': not self.exact,
			'witness': list(self.witness),
			'witness_shadow': [str(self.shadow.numerator), str(self.shadow.denominator)],
		}


def shadow_area(C: ProductCoefficients, subset=None) -> Fraction:
	'''|∪ R| over the subset (all entries by default), exact.'''
	indices = range(len(C)) if subset is None else subset
	return exact_union_area([C.entries[index][0].box for index in indices])


def _candidate_subsets(rects):
	'''The full family, every singleton and every down-set {R′ ⊆ R}.'''
	count = len(rects)
	candidates = {tuple(range(count))}
	for index, rect in enumerate(rects):
		candidates.add((index,))
		candidates.add(tuple(other for other in range(count) if rect.contains(rects[other])))
	return sorted(candidates)


def product_size(C: ProductCoefficients, exhaustive_limit=None) -> SizeEstimate:
	'''
		sup over subfamilies R′ of (Σ_{R′} |b_R|² / |sh(R′)|)^{1/2}. Exact by
		subset enumeration up to `exhaustive_limit` entries, otherwise the
		maximum over the candidate family, which is a lower bound.
	'''
	limit = settings.DIRLAB_EXHAUSTIVE_LIMIT if exhaustive_limit is None else exhaustive_limit
	count = len(C)
	if count == 0:
		return SizeEstimate(0.0, True)
	boxes, denominator = integer_boxes([rect.box for rect in C.rects])
	energy = np.abs(C.values) ** 2
	exact = count <= limit
	if exact:
		subsets = (
			tuple(index for index in range(count) if mask >> index & 1)
			for mask in range(1, 2 ** count)
		)
	else:
		subsets = _candidate_subsets(C.rects)

	best, witness, best_area = -1.0, (), 0
	for subset in subsets:
		area = union_area([boxes[index] for index in subset])
		ratio = float(energy[list(subset)].sum()) * denominator ** 2 / area
		if ratio > best:
			best, witness, best_area = ratio, subset, area
	if not exact:
		logger.info(f"Size of {count} rectangles estimated from candidate subfamilies (lower bound)")
	return SizeEstimate(math.sqrt(best), exact, witness, Fraction(best_area, denominator ** 2))


def sb_square_function(C: ProductCoefficients, raster: Raster = None) -> GridField:
	'''SB(x) = (Σ |b_R|²/|R| 1_R(x))^{1/2} sampled on the raster cells.'''
	raster = raster or C.default_raster()
	total = np.zeros((raster.n, raster.n))
	for rect, value in C.entries:
		i0, i1, j0, j1 = raster.cells(rect)
		total[i0:i1, j0:j1] += abs(value) ** 2 / float(rect.area)
	return GridField(raster.n, float(raster.side), np.sqrt(total))


def shadow_mask(C: ProductCoefficients, raster: Raster) -> np.ndarray:
	mask = np.zeros((raster.n, raster.n), dtype=bool)
	for rect in C.rects:
		i0, i1, j0, j1 = raster.cells(rect)
		mask[i0:i1, j0:j1] = True
	return mask


def packet_profile(cells, cell):
	'''
		Mean-zero bump on `cells` cells, exp(−1/(t(1−t)))·sin 2πt sampled at
		cell centres, with ∫ φ² = 1 at cell length `cell`.
	'''
	if cells < 2:
		raise ValueError("rectangle narrower than two raster cells")
	t = (np.arange(cells) + 0.5) / cells
	values = np.exp(-1.0 / (t * (1 - t))) * np.sin(2 * np.pi * t)
	values = values - values.mean()
	return values / np.sqrt(np.sum(values ** 2) * cell)


def wave_packet_sum(C: ProductCoefficients, raster: Raster = None) -> GridField:
	'''B_R(x) = Σ b_R ψ_R(x) with ψ_R = φ_I ⊗ φ_J supported in R.'''
	raster = raster or C.default_raster()
	cell = float(raster.cell)
	total = np.zeros((raster.n, raster.n), dtype=np.complex128)
	for rect, value in C.entries:
		i0, i1, j0, j1 = raster.cells(rect)
		total[i0:i1, j0:j1] += value * np.outer(packet_profile(i1 - i0, cell), packet_profile(j1 - j0, cell))
	return GridField(raster.n, float(raster.side), total)


def rectangle_maximal(f: GridField, rects, raster: Raster) -> GridField:
	'''M_R f(x) = sup over rectangles R ∋ x of the average of |f| over R; 0 off the shadow.'''
	if raster.n != f.n:
		raise ValueError("misaligned raster")
	values = np.abs(f.data)
	result = np.zeros(values.shape)
	for rect in rects:
		i0, i1, j0, j1 = raster.cells(rect)
		if i1 > i0 and j1 > j0:
			average = values[i0:i1, j0:j1].mean()
			np.maximum(result[i0:i1, j0:j1], average, out=result[i0:i1, j0:j1])
	return f.with_data(result)


@dataclass
class JNProfile:
	lambdas: np.ndarray
	fractions: np.ndarray
	size: float
	size_exact: bool
	sqrt_rate: Optional[float]
	sqrt_intercept: Optional[float]
	linear_rate: Optional[float]
	linear_intercept: Optional[float]

	def rows(self):
		return [{'lambda': float(a), 'fraction': float(b)} for a, b in zip(self.lambdas, self.fractions)]

	def summary(self):
		return {
			'size': self.size,
			'size_exact': self.size_exact,
			'sqrt_rate': self.sqrt_rate,
			'sqrt_intercept': self.sqrt_intercept,
			'linear_rate': self.linear_rate,
			'linear_intercept': self.linear_intercept,
		}


def _decay_fit(coordinates, fractions):
	'''Least-squares fit log(fraction) ≈ a − c·coordinate over the positive fractions.'''
	positive = fractions > 0
	if np.count_nonzero(positive) < 2 or np.ptp(coordinates[positive]) == 0:
		return None, None
	slope, intercept = np.polyfit(coordinates[positive], np.log(fractions[positive]), 1)
	return float(-slope), float(intercept)


def jn_level_set_profile(C: ProductCoefficients, raster: Raster = None, points=LAMBDA_POINTS) -> JNProfile:
	'''
		|{x ∈ sh : |B_R(x)| > λ}| / |sh| on λ = λ_max·k/points, k = 1..points,
		with exponential decay rates fitted against √(λ/size) and against λ/size.
	'''
	raster = raster or C.default_raster()
	values = np.abs(wave_packet_sum(C, raster).data)[shadow_mask(C, raster)]
	estimate = product_size(C)
	peak = float(values.max(initial=0.0))
	if peak == 0 or estimate.value == 0:
		lambdas = np.linspace(0, 1, points + 1)[1:]
		return JNProfile(lambdas, np.zeros(points), estimate.value, estimate.exact, None, None, None, None)
	lambdas = peak * np.arange(1, points + 1) / points
	fractions = np.array([np.count_nonzero(values > level) for level in lambdas]) / values.size
	sqrt_rate, sqrt_intercept = _decay_fit(np.sqrt(lambdas / estimate.value), fractions)
	linear_rate, linear_intercept = _decay_fit(lambdas / estimate.value, fractions)
	logger.debug(f"Level-set profile of {len(C)} rectangles: size {estimate.value:.4g}, √λ-rate {sqrt_rate}")
	return JNProfile(
		lambdas, fractions, estimate.value, estimate.exact, sqrt_rate, sqrt_intercept, linear_rate, linear_intercept
	)


def random_coefficients(rng, count, depth=4, shifts=(0,)) -> ProductCoefficients:
	'''
		`count` distinct rectangles inside [0, 1)² from the given grids, scales
		2^{−depth}..1 per parameter, complex Gaussian coefficients.
	'''
	chosen = {}
	for _ in range(100 * count + 100):
		if len(chosen) == count:
			break
		shift = int(rng.choice(shifts))
		j1, j2 = (-int(value) for value in rng.integers(0, depth + 1, size=2))
		l1 = int(rng.integers(0, 2 ** -j1))
		l2 = int(rng.integers(0, 2 ** -j2))
		rect = DyadicRect(shift, j1, l1, j2, l2)
		x0, x1, y0, y1 = rect.box
		if shift and not (0 <= x0 and x1 <= 1 and 0 <= y0 and y1 <= 1):
			continue
		chosen.setdefault(rect.box, rect)
	if len(chosen) < count:
		raise ValueError(f"could not draw {count} distinct rectangles at depth {depth}")
	rects = sorted(chosen.values())
	values = rng.standard_normal(count) + 1j * rng.standard_normal(count)
	return ProductCoefficients(list(zip(rects, values)))
