"""Regular bipartite expanders and the deterministic DAG built from them.

Graphs are sampled with the configuration model (a uniform matching on
half-edges via Fisher-Yates), verified by brute-force subset enumeration,
and concatenated into a layered DAG whose widths follow an ExpanderSchedule:
width-preserving levels copy one graph's edges, doubling levels copy them
twice side by side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._rng import Stream, mix64
from .core import (
    ConfigurationError,
    ExpanderSchedule,
    LayeredDag,
    SearchExhaustedError,
    SizeGuardError,
    as_delta,
)

_SUBSET_GUARD = 10**8
_SEARCH_GUARD = 10**7


@dataclass
class BipartiteRegularGraph:
    """d-regular bipartite multigraph on n+n vertices; edges stored as the
    multiset of left parents of each right vertex."""

    n: int
    d: int
    edges: np.ndarray  # shape (n, d), left indices per right vertex

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64)
        if self.edges.shape != (self.n, self.d):
            raise ValueError("edges must have shape (n, d)")
        if self.edges.size and (self.edges.min() < 0 or self.edges.max() >= self.n):
            raise ValueError("left index out of range")

    def left_degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def is_biregular(self) -> bool:
        return bool((self.left_degrees() == self.d).all())

    def left_neighbor_masks(self):
        """Bitmask of distinct right neighbors for every left vertex."""
        masks = [0] * self.n
        for v in range(self.n):
            for u in self.edges[v]:
                masks[u] |= 1 << v
        return masks

    def __eq__(self, other):
        if not isinstance(other, BipartiteRegularGraph):
            return NotImplemented
        return self.n == other.n and self.d == other.d and np.array_equal(self.edges, other.edges)


@dataclass(frozen=True)
class ExpansionCertificate:
    subset_size: int
    min_neighborhood: int
    required: int

    @property
    def passed(self) -> bool:
        return self.min_neighborhood >= self.required


def sample_regular_bipartite(n: int, d: int, seed: int, stream: int = 0) -> BipartiteRegularGraph:
    """Configuration model: a uniform permutation matches the d*n left
    half-edges to the right ones; half-edge h belongs to vertex h // d."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    rng = Stream(seed, stream)
    perm = list(range(n * d))
    rng.shuffle(perm)
    edges = (np.array(perm, dtype=np.int64) // d).reshape(n, d)
    return BipartiteRegularGraph(n, d, edges)


def verify_expansion(graph: BipartiteRegularGraph, s: int,
                     beta_required: int) -> ExpansionCertificate:
    """Exhaustively check every size-s left subset's distinct neighborhood."""
    if not 1 <= s <= graph.n:
        raise ValueError("subset size must lie in 1..n")
    n_subsets = math.comb(graph.n, s)
    if n_subsets > _SUBSET_GUARD:
        raise SizeGuardError(f"C({graph.n},{s}) = {n_subsets} exceeds guard {_SUBSET_GUARD}")
    masks = graph.left_neighbor_masks()
    best = graph.n + 1
    for subset in itertools.combinations(range(graph.n), s):
        m = 0
        for u in subset:
            m |= masks[u]
        c = bin(m).count("1")
        if c < best:
            best = c
    return ExpansionCertificate(s, best, beta_required)


def _assignments(capacity, start_left, d):
    """Sorted d-multisets from remaining capacity, ascending, from start_left."""
    n = len(capacity)

    def rec(lo, need):
        if need == 0:
            yield ()
            return
        for u in range(lo, n):
            if capacity[u] > 0:
                capacity[u] -= 1
                for rest in rec(u, need - 1):
                    yield (u,) + rest
                capacity[u] += 1

    yield from rec(start_left, d)


def count_regular_bipartite(n: int, d: int) -> int:
    """Number of labeled d-regular bipartite multigraphs: (nd)! / (d!)^n."""
    return math.factorial(n * d) // math.factorial(d) ** n


def deterministic_search(n: int, d: int, s: int, beta_required: int) -> BipartiteRegularGraph:
    """First d-regular bipartite graph, in lexicographic order of its sorted
    per-right-vertex parent tuples, whose size-s subsets all reach the
    required neighborhood size.  Tiny instances only."""
    total = count_regular_bipartite(n, d)
    if total > _SEARCH_GUARD:
        raise SizeGuardError(f"{total} candidate graphs exceed guard {_SEARCH_GUARD}")

    capacity = [d] * n
    rows = []

    def rec(v):
        if v == n:
            g = BipartiteRegularGraph(n, d, np.array(rows, dtype=np.int64))
            if verify_expansion(g, s, beta_required).passed:
                return g
            return None
        # the suspended generator holds the capacity decrements for `tup`
        for tup in _assignments(capacity, 0, d):
            rows.append(tup)
            hit = rec(v + 1)
            rows.pop()
            if hit is not None:
                return hit
        return None

    found = rec(0)
    if found is None:
        raise SearchExhaustedError(
            f"no ({n},{d})-graph with s={s} expansion >= {beta_required} exists")
    return found


def min_degree_for_noise(delta) -> int:
    """Smallest odd degree satisfying the one-step contraction inequality
    8/d^(1/5) + d^(6/5) exp(-(1-2*delta)^2 (d-4)^2 / (8d)) <= 1/2.

    The first term alone forces d > 16^5, so the scan starts at the first odd
    degree above; far-supercritical noise needs a doubling bracket plus
    bisection because the exponential term decays slowly there.
    """
    dd = as_delta(delta)

    def lhs_ok(d: int) -> bool:
        t1 = 8.0 / d**0.2
        log_t2 = 1.2 * math.log(d) - (1.0 - 2.0 * dd) ** 2 * (d - 4.0) ** 2 / (8.0 * d)
        t2 = math.exp(log_t2) if log_t2 < 700.0 else math.inf
        return t1 + t2 <= 0.5

    lo = 16**5 + 1  # first odd degree with 8/d^(1/5) < 1/2
    if lhs_ok(lo):
        return lo
    hi = lo
    while not lhs_ok(hi):
        hi = 2 * hi + 1
    # smallest satisfying odd degree in (lo, hi]; the predicate is monotone
    # on this bracket (the exponential term is decreasing past its peak)
    a, b = lo, hi
    while b - a > 2:
        mid = a + ((b - a) // 4) * 2  # stay on odd degrees
        if lhs_ok(mid):
            b = mid
        else:
            a = mid
    return b


class GraphProvider:
    """Supplies the per-width constituent graphs of the layered construction."""

    def graph(self, n: int) -> BipartiteRegularGraph:
        raise NotImplementedError


class SampledProvider(GraphProvider):
    """One sampled graph per width, stream-keyed by the width itself."""

    def __init__(self, d: int, seed: int):
        self.d = d
        self.seed = seed
        self._cache = {}

    def graph(self, n: int) -> BipartiteRegularGraph:
        if n not in self._cache:
            self._cache[n] = sample_regular_bipartite(n, self.d, self.seed, stream=mix64(n))
        return self._cache[n]


class InjectedProvider(GraphProvider):
    """Caller-supplied graphs keyed by width; raises on a missing width."""

    def __init__(self, graphs: dict):
        self._graphs = dict(graphs)

    def graph(self, n: int) -> BipartiteRegularGraph:
        if n not in self._graphs:
            raise KeyError(f"no constituent graph provided for width {n}")
        return self._graphs[n]


class SearchedProvider(GraphProvider):
    """Deterministic-search graphs (tiny widths only)."""

    def __init__(self, d: int, s: int, beta_required: int):
        self.d = d
        self.s = s
        self.beta_required = beta_required
        self._cache = {}

    def graph(self, n: int) -> BipartiteRegularGraph:
        if n not in self._cache:
            self._cache[n] = deterministic_search(n, self.d, self.s, self.beta_required)
        return self._cache[n]


def assemble_expander_dag(N: int, d: int, depth: int, provider: GraphProvider,
                          schedule: ExpanderSchedule = None) -> LayeredDag:
    """Concatenate per-width bipartite graphs into the layered construction.

    Level 1 hangs every vertex off the root; width-preserving steps wire
    level k to k+1 with the width's graph; doubling steps use it twice, once
    per half.  Non-root outdegrees stay <= 2d by construction (the root fans
    out to all N level-1 vertices).
    """
    if schedule is None:
        schedule = ExpanderSchedule(N, d)
    elif schedule.base_width != N:
        raise ValueError("schedule base width disagrees with N")
    sizes = [schedule.size(k) for k in range(depth + 1)]
    parents = [np.zeros((sizes[1], 1), dtype=np.int64)]
    for k in range(2, depth + 1):
        prev_w, w = sizes[k - 1], sizes[k]
        if w == prev_w:
            g = provider.graph(prev_w)
            block = g.edges
        elif w == 2 * prev_w:
            g = provider.graph(prev_w)
            block = np.vstack([g.edges, g.edges])
        else:
            raise ConfigurationError(
                f"level {k}: width {w} is neither equal to nor double {prev_w}")
        if g.n != prev_w or g.d != d:
            raise ValueError(f"provider returned a ({g.n},{g.d}) graph for width {prev_w}")
        parents.append(block.copy())
    return LayeredDag(sizes, parents)


def success_probability_bound(N: int, d: int, m: int = 0):
    """Lower bound on all sampled constituent graphs expanding, and the width
    threshold below which the bound is vacuous.

    The geometric series over the m+1 widths is already summed, so the bound
    does not depend on m.
    """
    del m
    alpha = d ** (-1.2)
    denom = (2.0 - math.sqrt(2.0)) * math.pi * math.sqrt(alpha * (1.0 - alpha) * N)
    bound = 1.0 - math.e / denom
    threshold = math.e**2 / ((6.0 - 4.0 * math.sqrt(2.0)) * math.pi**2 * alpha * (1.0 - alpha))
    return bound, bound > 0.0, threshold


# ---------------------------------------------------------------------------
# Bipartite graph text serialization: header "n d", one right vertex per line


def graph_to_text(graph: BipartiteRegularGraph) -> str:
    lines = [f"{graph.n} {graph.d}"]
    for row in graph.edges:
        lines.append(" ".join(str(int(u)) for u in row))
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> BipartiteRegularGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("header must be 'n d'")
    n, d = int(head[0]), int(head[1])
    if len(lines) - 1 != n:
        raise ValueError(f"expected {n} edge lines, found {len(lines) - 1}")
    edges = [[int(x) for x in ln.split()] for ln in lines[1:]]
    if any(len(row) != d for row in edges):
        raise ValueError("every right vertex needs exactly d parents")
    return BipartiteRegularGraph(n, d, np.array(edges, dtype=np.int64))


def write_graph(graph: BipartiteRegularGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(graph_to_text(graph))


def read_graph(path) -> BipartiteRegularGraph:
    with open(path) as fh:
        return graph_from_text(fh.read())
