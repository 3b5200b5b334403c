"""Exact distribution dynamics of the fraction-of-ones statistic.

Averaged over the random wiring, the fraction of ones at each level is a
Markov chain whose transition is binomial with a success probability given by
the level's mean map.  This module evolves that chain exactly (O(width^2) per
level), and computes total variation distances and decoder error
probabilities from the resulting pair of conditional laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import binom

from . import maps
from .core import LayerSchedule, as_delta

_PMF_FLOOR = 1e-300
_RENORM_TOL = 1e-9


class FamilyKind(Enum):
    MAJORITY = "majority"
    ANDOR = "andor"
    UNBOUNDED_MAJORITY = "unbounded"


@dataclass(frozen=True)
class ChainFamily:
    """A chain model: which gates, which layer schedule, which noise level.

    The AND/OR family applies the AND map into even levels and the OR map
    into odd levels.  The unbounded family connects every vertex to all of
    the previous level and takes a majority with ties resolved to 1.
    """

    kind: FamilyKind
    schedule: LayerSchedule
    delta: float
    d: int = None

    def __post_init__(self):
        object.__setattr__(self, "delta", as_delta(self.delta))
        if self.kind is FamilyKind.MAJORITY:
            if self.d is None or self.d < 1:
                raise ValueError("majority family needs an indegree d >= 1")
        elif self.d is not None:
            raise ValueError("only the majority family takes an indegree")

    def success_probability(self, sigma: float, target_level: int, prev_width: int) -> float:
        """P(a vertex at `target_level` is 1 | previous fraction = sigma)."""
        if self.kind is FamilyKind.MAJORITY:
            return maps.majority_map(sigma, self.delta, self.d)
        if self.kind is FamilyKind.ANDOR:
            if target_level % 2 == 0:
                return maps.and_map(sigma, self.delta)
            return maps.or_map(sigma, self.delta)
        return unbounded_transition(sigma, self.delta, prev_width)


def majority_family(d: int, delta, schedule: LayerSchedule) -> ChainFamily:
    return ChainFamily(FamilyKind.MAJORITY, schedule, delta, d)


def andor_family(delta, schedule: LayerSchedule) -> ChainFamily:
    return ChainFamily(FamilyKind.ANDOR, schedule, delta)


def unbounded_family(delta, schedule: LayerSchedule) -> ChainFamily:
    return ChainFamily(FamilyKind.UNBOUNDED_MAJORITY, schedule, delta)


@dataclass
class SigmaDistribution:
    """Distribution of the fraction of ones at one level (support m/size)."""

    level: int
    size: int
    probs: np.ndarray

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.shape != (self.size + 1,):
            raise ValueError("probs must have length size + 1")
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError("probs must sum to 1 within 1e-12")
        if (self.probs < 0).any():
            raise ValueError("probs must be nonnegative")

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.size + 1) / self.size if self.size else np.array([0.0])

    def mean(self) -> float:
        return float(self.probs @ self.support)

    @classmethod
    def point_mass(cls, level: int, size: int, value: float) -> "SigmaDistribution":
        m = round(value * size)
        if abs(value * size - m) > 1e-9:
            raise ValueError("point mass must sit on the support grid")
        probs = np.zeros(size + 1)
        probs[m] = 1.0
        return cls(level, size, probs)


def unbounded_transition(sigma: float, delta, prev_width: int) -> float:
    """P(vertex = 1) when wired to the entire previous level of width
    `prev_width` with fraction of ones sigma, majority with ties to 1.

    Exact: convolve the pmf of ones-surviving-noise with zeros-flipped-up.
    """
    dd = as_delta(delta)
    if prev_width < 1:
        raise ValueError("previous width must be >= 1")
    c = round(sigma * prev_width)
    if abs(sigma * prev_width - c) > 1e-9:
        raise ValueError("sigma * prev_width must be an integer count")
    ks = np.arange(prev_width + 1)
    pmf_ones = binom.pmf(np.arange(c + 1), c, 1.0 - dd)
    pmf_zeros = binom.pmf(np.arange(prev_width - c + 1), prev_width - c, dd)
    total = np.convolve(pmf_ones, pmf_zeros)
    return float(total[ks >= prev_width / 2.0].sum())


def _binom_row(n: int, p: float) -> np.ndarray:
    row = binom.pmf(np.arange(n + 1), n, p)
    row[row < _PMF_FLOOR] = 0.0
    s = row.sum()
    if abs(s - 1.0) > _RENORM_TOL:
        raise AssertionError(f"binomial row drifted by {abs(s - 1.0):.3g}")
    return row / s


def step(dist: SigmaDistribution, family: ChainFamily) -> SigmaDistribution:
    """Advance the exact distribution one level."""
    k_next = dist.level + 1
    size_next = family.schedule.size(k_next)
    out = np.zeros(size_next + 1)
    for m, pr in enumerate(dist.probs):
        if pr == 0.0:
            continue
        sigma = m / dist.size if dist.size else float(m)
        p = family.success_probability(sigma, k_next, dist.size)
        out += pr * _binom_row(size_next, p)
    s = out.sum()
    if abs(s - 1.0) > _RENORM_TOL:
        raise AssertionError(f"step drifted by {abs(s - 1.0):.3g}")
    return SigmaDistribution(k_next, size_next, out / s)


def _transition_matrix(family: ChainFamily, level_from: int, size_from: int,
                       size_to: int) -> np.ndarray:
    T = np.empty((size_from + 1, size_to + 1))
    ks = np.arange(size_to + 1)
    for m in range(size_from + 1):
        sigma = m / size_from if size_from else float(m)
        p = family.success_probability(sigma, level_from + 1, size_from)
        row = binom.pmf(ks, size_to, p)
        row[row < _PMF_FLOOR] = 0.0
        T[m] = row / row.sum()
    return T


def evolve_pair_levels(family: ChainFamily, depth: int):
    """Yield (level, law given root 1, law given root 0) for levels 0..depth.

    Constant-width stretches reuse a cached transition matrix, so a depth-200
    evolution costs two matrix builds rather than 400.
    """
    plus = SigmaDistribution.point_mass(0, 1, 1.0)
    minus = SigmaDistribution.point_mass(0, 1, 0.0)
    yield 0, plus, minus
    cache = {}
    for k in range(1, depth + 1):
        size_from, size_to = plus.size, family.schedule.size(k)
        parity = k % 2 if family.kind is FamilyKind.ANDOR else 0
        key = (size_from, size_to, parity)
        T = cache.get(key)
        if T is None:
            T = _transition_matrix(family, k - 1, size_from, size_to)
            cache[key] = T
        pp = plus.probs @ T
        qq = minus.probs @ T
        plus = SigmaDistribution(k, size_to, pp / pp.sum())
        minus = SigmaDistribution(k, size_to, qq / qq.sum())
        yield k, plus, minus


def evolve_pair(family: ChainFamily, depth: int):
    """Conditional laws of the level-`depth` fraction given root 1 / root 0."""
    for k, plus, minus in evolve_pair_levels(family, depth):
        pass
    return plus, minus


def tv_distance(p: SigmaDistribution, q: SigmaDistribution) -> float:
    if p.size != q.size:
        raise ValueError("distributions live on different supports")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def decoder_error(pair, threshold: float) -> float:
    """Error of the rule "decide 1 iff fraction >= threshold", balanced root."""
    plus, minus = pair
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    sup = plus.support
    return 0.5 * float(plus.probs[sup < threshold].sum()) + \
        0.5 * float(minus.probs[sup >= threshold].sum())


def ml_error_on_sigma(pair) -> float:
    """Minimum error of any decision based on the fraction: (1 - TV)/2."""
    plus, minus = pair
    return 0.5 * (1.0 - tv_distance(plus, minus))


def sample_chain_path(family: ChainFamily, depth: int, seed: int, root: int = 1):
    """One trajectory of the fraction-of-ones chain, reproducible by seed."""
    if root not in (0, 1):
        raise ValueError("root must be a bit")
    rng = np.random.default_rng(np.random.Philox(key=seed))
    sigma = float(root)
    prev_width = 1
    path = [sigma]
    for k in range(1, depth + 1):
        width = family.schedule.size(k)
        p = family.success_probability(sigma, k, prev_width)
        sigma = rng.binomial(width, p) / width
        path.append(sigma)
        prev_width = width
    return path
