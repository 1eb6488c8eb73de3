'''
	Generators and structural analysis of finite direction sets.

	Everything here is exact: angles are Fractions and distances are compared
	as integers over a common denominator.
'''
import logging
import math
from bisect import bisect_left
from fractions import Fraction
from itertools import combinations

from .directions import Direction, DirectionSet, LacunaryCertificate, circular_distance

logger = logging.getLogger(__name__)

CANTOR_LIMIT = 2 ** 20
BUCKETS = 8


def gen_uniform(N) -> DirectionSet:
	if N < 1:
		raise ValueError(f"N must be positive, got {N}")
	return DirectionSet(tuple(Direction(Fraction(j, N)) for j in range(N)), 'uniform', {'N': N})


def gen_lacunary(ratio, N, node=0) -> DirectionSet:
	'''Angles node + ratio^j (mod 1) for j = 1..N.'''
	ratio, node = Fraction(ratio), Fraction(node) % 1
	if not 0 < ratio <= Fraction(1, 2):
		raise ValueError(f"ratio must lie in (0, 1/2], got {ratio}")
	if N < 1:
		raise ValueError(f"N must be positive, got {N}")
	angles = [node + ratio ** j for j in range(1, N + 1)]
	return DirectionSet.from_angles(angles, 'lacunary', ratio=ratio, N=N, node=node)


def gen_cantor(q, n) -> DirectionSet:
	'''All sums Σ_{j=1..n} a_j q^{−j} with a_j ∈ {0, q − 1}.'''
	if q < 3:
		raise ValueError(f"q must be at least 3, got {q}")
	if n < 1:
		raise ValueError(f"n must be positive, got {n}")
	if 2 ** n > CANTOR_LIMIT:
		raise ValueError("size overflow")
	sums = [Fraction(0)]
	for j in range(1, n + 1):
		step = Fraction(q - 1, q ** j)
		sums = [value + digit for value in sums for digit in (0, step)]
	return DirectionSet.from_angles(sums, 'cantor', q=q, n=n)


def is_lacunary_with_node(seq, node) -> bool:
	'''|v_{j+1} − v∞| ≤ ½|v_j − v∞| for every consecutive pair.'''
	angles = [entry.angle if isinstance(entry, Direction) else Fraction(entry) for entry in seq]
	distances = [circular_distance(angle, node) for angle in angles]
	return all(2 * after <= before for before, after in zip(distances, distances[1:]))


def _densest_semicircle(angles):
	'''Start index i maximizing #{a ∈ [a_i, a_i + 1/2)}; ties go to the lowest i.'''
	doubled = angles + [angle + 1 for angle in angles]
	best, best_count = 0, 0
	for start, angle in enumerate(angles):
		count = bisect_left(doubled, angle + Fraction(1, 2)) - start
		if count > best_count:
			best, best_count = start, count
	return best, best_count


def _extract(points):
	'''
		points: (u, index) sorted by u inside an interval shorter than 1/2.
		Returns (sequence of points, node u).
	'''
	if len(points) <= 2:
		if len(points) == 1:
			return list(points), points[0][0]
		return [points[0], points[-1]], points[-1][0]

	low, high = points[0][0], points[-1][0]
	width = high - low
	buckets = [[] for _ in range(BUCKETS)]
	for point in points:
		position = min(BUCKETS - 1, math.floor(BUCKETS * (point[0] - low) / width))
		buckets[position].append(point)
	chosen = max(range(BUCKETS), key=lambda position: (len(buckets[position]), -position))
	if len(buckets[chosen]) < 2:
		return [points[0], points[-1]], points[-1][0]

	sequence, node = _extract(buckets[chosen])
	# The far endpoint sits at least width/2 from the bucket, the bucket is width/8 wide.
	far = points[-1] if chosen < BUCKETS // 2 else points[0]
	return [far] + sequence, node


def extract_lacunary_subsequence(V: DirectionSet) -> LacunaryCertificate:
	'''
		Constructive pigeonhole extraction: restrict to the densest half circle,
		rescale to [0, 1], split into 8 buckets, recurse into the fullest bucket
		and prepend the endpoint on the far side. Length ≥ max(2, ⌊log₂N/3⌋).
	'''
	if V.N < 2:
		raise ValueError("extraction needs at least two directions")
	angles = V.angles
	start, count = _densest_semicircle(angles)
	if count < 2:
		# two antipodal directions
		return LacunaryCertificate((0, 1), angles[1])

	origin = angles[start]
	points = sorted(
		((angles[(start + offset) % V.N] - origin) % 1, (start + offset) % V.N)
		for offset in range(count)
	)
	sequence, node = _extract(points)
	certificate = LacunaryCertificate(tuple(index for _, index in sequence), (origin + node) % 1)
	if not certificate.is_valid(V):
		raise RuntimeError(f"extracted sequence failed the lacunarity check: {certificate}")
	logger.debug(f"Extracted lacunary subsequence of length {len(certificate)} from N={V.N}")
	return certificate


def candidate_nodes(V: DirectionSet, resolution, extra=()):
	'''Elements, midpoints of circular neighbours, the grid j/resolution, and `extra`.'''
	angles = V.angles
	nodes = set(angles)
	for current, following in zip(angles, angles[1:] + [angles[0] + 1]):
		nodes.add(((current + following) / 2) % 1)
	nodes.update(Fraction(j, resolution) for j in range(resolution))
	nodes.update(Fraction(node) % 1 for node in extra)
	return sorted(nodes)


def _chain_for_node(numerators, denominator, node_numerator):
	'''
		Longest chain under the halving constraint for one node. With the
		elements sorted by decreasing distance, taking the largest admissible
		distance at each step is optimal: it leaves the largest admissible set
		for the remainder.
	'''
	distances = []
	for index, numerator in enumerate(numerators):
		gap = abs(numerator - node_numerator) % denominator
		distances.append((min(gap, denominator - gap), index))
	distances.sort(key=lambda entry: (-entry[0], entry[1]))
	chain, last = [], None
	for distance, index in distances:
		if last is None or 2 * distance <= last:
			chain.append(index)
			last = distance
	return chain


def longest_lacunary_estimate(V: DirectionSet, node_grid_resolution=64, extra_nodes=()):
	'''
		Certified lower bound for the longest lacunary subset of V: the best
		chain over all candidate nodes. Returns (length, certificate).
	'''
	if V.N > 2 ** 14:
		raise ValueError("N too large for the node-candidate search")
	nodes = candidate_nodes(V, node_grid_resolution, extra_nodes)
	denominator = math.lcm(*(value.denominator for value in V.angles + nodes))
	numerators = [int(angle * denominator) for angle in V.angles]

	best_chain, best_node = [], None
	for node in nodes:
		chain = _chain_for_node(numerators, denominator, int(node * denominator))
		if len(chain) > len(best_chain):
			best_chain, best_node = chain, node
	certificate = LacunaryCertificate(tuple(best_chain), best_node)
	logger.debug(f"Longest lacunary estimate {len(certificate)} over {len(nodes)} nodes (N={V.N})")
	return len(certificate), certificate


def exhaustive_longest_lacunary(V: DirectionSet, nodes):
	'''Subset enumeration over the given nodes (oracle, N ≤ 12).'''
	if V.N > 12:
		raise ValueError("exhaustive search is limited to N ≤ 12")
	best = (0, None)
	for node in sorted(Fraction(node) % 1 for node in nodes):
		distances = [circular_distance(entry.angle, node) for entry in V]
		# indices by decreasing distance, so every subset below comes out ordered
		ranked = sorted(range(V.N), key=lambda index: (-distances[index], index))
		for size in range(V.N, best[0], -1):
			found = None
			for subset in combinations(ranked, size):
				if all(2 * distances[b] <= distances[a] for a, b in zip(subset, subset[1:])):
					found = list(subset)
					break
			if found:
				best = (size, LacunaryCertificate(tuple(found), node))
				break
	return best


def vargas_constant_estimate(V: DirectionSet, node_grid_resolution=64) -> Fraction:
	'''Longest lacunary estimate divided by log₂N (exact when N is a power of two).'''
	if V.N < 2:
		raise ValueError("the Vargas constant needs N ≥ 2")
	length, _ = longest_lacunary_estimate(V, node_grid_resolution)
	if V.N & (V.N - 1) == 0:
		return Fraction(length, V.N.bit_length() - 1)
	return Fraction(length) / Fraction(math.log2(V.N))
