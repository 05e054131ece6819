"""Polynomial-time approximation for the densest quotient problem.

Pipeline: pick the right partition first by greedily maximizing the capped
coverage welfare sum of min(k1, distinct left neighbors of part), then pick
the left partition either by independent uniform sampling or by the method
of conditional expectations.  The expected quotient count of a uniform left
partition has a closed form, the derandomized partition never falls below
it, and degree-based caps give certified upper bounds for the ratio.
"""

from __future__ import annotations

import heapq
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import DeterministicChannel, channel_graph
from .errors import BadParametersError, InvariantViolationError, SideMismatchError
from .exact import Code, code_from_partitions
from .graphs import BipartiteGraph, Partition, quotient_edge_count, singleton_partition

DEFAULT_NUM_SAMPLES = 64
DEFAULT_GREEDY_RESTARTS = 4


@dataclass(frozen=True)
class WelfareInstance:
    """Coverage welfare: split right vertices among k2 bidders who all value
    a bundle at min(k1, number of distinct left neighbors)."""

    graph: BipartiteGraph
    k1: int
    k2: int

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise BadParametersError("need k1 >= 1 and k2 >= 1")


@dataclass
class ApproxResult:
    p1: Partition
    p2: Partition
    value: int
    upper_bound: int
    ratio_certificate: float
    rng_seed: int
    samples_used: int


def _part_neighbor_masks(g: BipartiteGraph, p2: Partition) -> list[int]:
    if p2.ground_size != g.right_size:
        raise SideMismatchError(
            f"partition covers {p2.ground_size} vertices, right side has {g.right_size}")
    masks = [0] * p2.num_parts
    for v, mask in enumerate(g.left_masks):
        masks[p2.assignment[v]] |= mask
    return masks


def upper_bound_right(g: BipartiteGraph, k1: int, p2: Partition) -> int:
    """Cap each right part's quotient degree at k1: an upper bound on the
    quotient edges achievable against any left partition into k1 parts."""
    if k1 < 1:
        raise BadParametersError("k1 must be >= 1")
    return sum(min(k1, m.bit_count()) for m in _part_neighbor_masks(g, p2))


def left_degree_bound(g: BipartiteGraph, k1: int, k2: int) -> int:
    """min(k1 k2, sum over left vertices of min(k2, degree))."""
    return min(k1 * k2, sum(min(k2, g.degree_left(u)) for u in range(g.left_size)))


def degree_upper_bound(g: BipartiteGraph, k1: int, k2: int) -> int:
    """Two-sided degree cap bounding the optimal quotient edge count."""
    right = min(k1 * k2, sum(min(k1, g.degree_right(v)) for v in range(g.right_size)))
    return min(left_degree_bound(g, k1, k2), right)


def random_left_partition(g: BipartiteGraph, num_parts: int, rng) -> Partition:
    """Assign each left vertex independently and uniformly to a part."""
    if num_parts < 1:
        raise BadParametersError("num_parts must be >= 1")
    rng = np.random.default_rng(rng)
    assignment = rng.integers(0, num_parts, size=g.left_size)
    return Partition(g.left_size, num_parts, tuple(int(a) for a in assignment))


def exact_expected_edges(g: BipartiteGraph, l1: int, p2: Partition) -> float:
    """Expected quotient edges of a uniform random left partition into l1 parts.

    Each right part with d distinct left neighbors hits a given left part
    with probability 1 - (1 - 1/l1)^d, and expectation is linear over parts.
    """
    if l1 < 1:
        raise BadParametersError("l1 must be >= 1")
    miss = 1.0 - 1.0 / l1
    return float(l1 * sum(1.0 - miss ** m.bit_count()
                          for m in _part_neighbor_masks(g, p2)))


def derandomize_left(g: BipartiteGraph, l1: int, p2: Partition) -> Partition:
    """Method of conditional expectations over the left vertices in order.

    The returned partition's quotient count is at least the uniform-sampling
    expectation, because every step picks a branch at or above the running
    conditional mean.
    """
    if l1 < 1:
        raise BadParametersError("l1 must be >= 1")
    part_masks = _part_neighbor_masks(g, p2)
    parts_of = [[] for _ in range(g.left_size)]
    for i, mask in enumerate(part_masks):
        while mask:
            low = mask & -mask
            parts_of[low.bit_length() - 1].append(i)
            mask ^= low
    hit = [0] * len(part_masks)
    unassigned = [m.bit_count() for m in part_masks]
    miss = 1.0 - 1.0 / l1
    assignment = []
    for u in range(g.left_size):
        relevant = parts_of[u]
        if not relevant:
            assignment.append(0)
            continue
        best_c, best_score = 0, -np.inf
        for c in range(l1):
            bit = 1 << c
            score = 0.0
            for i in relevant:
                hitc = (hit[i] | bit).bit_count()
                score += hitc + (l1 - hitc) * (1.0 - miss ** (unassigned[i] - 1))
            if score > best_score:
                best_c, best_score = c, score
        assignment.append(best_c)
        bit = 1 << best_c
        for i in relevant:
            hit[i] |= bit
            unassigned[i] -= 1
    return Partition(g.left_size, l1, tuple(assignment))


def greedy_welfare(instance: WelfareInstance, item_order=None) -> Partition:
    """Lazy greedy for the coverage welfare problem: repeatedly hand the
    (bidder, item) pair of largest marginal gain its item.

    Ties resolve to the lowest bidder index, then the earliest item in the
    given order (natural order by default).  Gains only shrink as bundles
    grow, so a popped entry whose recomputed gain is unchanged is optimal.
    """
    g, k1, k2 = instance.graph, instance.k1, instance.k2
    order = tuple(range(g.right_size)) if item_order is None else tuple(item_order)
    if sorted(order) != list(range(g.right_size)):
        raise BadParametersError("item_order must be a permutation of the right side")

    def value(mask: int) -> int:
        return min(k1, mask.bit_count())

    bundles = [0] * k2
    assignment = [-1] * g.right_size
    heap = []
    for pos, item in enumerate(order):
        gain = value(g.left_masks[item])
        for b in range(k2):
            heap.append((-gain, b, pos))
    heapq.heapify(heap)
    remaining = g.right_size
    while remaining:
        neg_gain, b, pos = heapq.heappop(heap)
        item = order[pos]
        if assignment[item] >= 0:
            continue
        gain = value(bundles[b] | g.left_masks[item]) - value(bundles[b])
        if gain == -neg_gain:
            assignment[item] = b
            bundles[b] |= g.left_masks[item]
            remaining -= 1
        else:
            heapq.heappush(heap, (-gain, b, pos))
    return Partition(g.right_size, k2, tuple(assignment))


def _sample_chunk(args):
    g, num_parts, p2, seeds = args
    out = []
    for seed in seeds:
        p1 = random_left_partition(g, num_parts, np.random.default_rng(seed))
        out.append((quotient_edge_count(g, p1, p2), p1.assignment))
    return out


def approximate_dqg(g: BipartiteGraph, k1: int, k2: int, seed: int = 0,
                    num_samples: int = DEFAULT_NUM_SAMPLES,
                    greedy_restarts: int = DEFAULT_GREEDY_RESTARTS,
                    workers: int = 1) -> ApproxResult:
    """Approximate the densest quotient with certified bounds.

    The right partition is the best of several greedy welfare runs over
    shuffled item orders; the left partition is the best of the
    conditional-expectation rounding and num_samples uniform draws.  The
    reported ratio certificate compares against a degree-based upper bound
    on the true optimum, never against the heuristic value itself.
    """
    if k1 < 1 or k2 < 1:
        raise BadParametersError("need k1 >= 1 and k2 >= 1")
    root = np.random.SeedSequence(seed)
    order_seed, sample_seed = root.spawn(2)

    if k2 >= g.right_size:
        p2 = singleton_partition(g.right_size, k2)
    else:
        instance = WelfareInstance(g, k1, k2)
        candidates = [greedy_welfare(instance)]
        order_rng = np.random.default_rng(order_seed)
        for _ in range(max(0, greedy_restarts - 1)):
            shuffled = order_rng.permutation(g.right_size)
            candidates.append(greedy_welfare(instance, tuple(int(v) for v in shuffled)))
        p2, best_welfare = None, -1
        for cand in candidates:
            welfare = upper_bound_right(g, k1, cand)
            if welfare > best_welfare:
                p2, best_welfare = cand, welfare

    samples_used = 0
    if k1 >= g.left_size:
        p1 = singleton_partition(g.left_size, k1)
    else:
        p1 = derandomize_left(g, k1, p2)
        best_val = quotient_edge_count(g, p1, p2)
        seeds = sample_seed.spawn(num_samples)
        samples_used = num_samples
        if workers > 1 and num_samples:
            splits = np.array_split(np.arange(num_samples), workers)
            chunks = [(g, k1, p2, [seeds[i] for i in part]) for part in splits if len(part)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = [item for chunk in pool.map(_sample_chunk, chunks)
                           for item in chunk]
        else:
            results = _sample_chunk((g, k1, p2, seeds))
        for val, assignment in results:
            if val > best_val:
                best_val = val
                p1 = Partition(g.left_size, k1, assignment)

    value = quotient_edge_count(g, p1, p2)
    upper = degree_upper_bound(g, k1, k2)
    if value > upper:
        raise InvariantViolationError(f"value {value} above certified bound {upper}")
    ratio = value / upper if upper > 0 else 1.0
    return ApproxResult(p1, p2, value, upper, ratio, seed, samples_used)


def approximate_detbcc(dc: DeterministicChannel, k1: int, k2: int, seed: int = 0,
                       num_samples: int = DEFAULT_NUM_SAMPLES,
                       workers: int = 1) -> tuple[Code, float]:
    """Approximation for deterministic channels via their output-pair graph."""
    g = channel_graph(dc)
    res = approximate_dqg(g, k1, k2, seed=seed, num_samples=num_samples,
                          workers=workers)
    code = code_from_partitions(dc, res.p1, res.p2)
    return code, res.value / (k1 * k2)
