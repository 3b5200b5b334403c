"""Closed-form impossibility machinery: information decay, percolation
thresholds and recursions, slow-growth limits, and exact mutual information."""

from __future__ import annotations

import math

import numpy as np

from .core import as_delta

LN2 = math.log(2.0)


def es_mi_bound(width: int, delta, d: int, k: int) -> float:
    """Path-counting bound on the root-to-level-k mutual information, in bits:
    width * ((1-2*delta)^2 * d)^k."""
    dd = as_delta(delta)
    return width * ((1.0 - 2.0 * dd) ** 2 * d) ** k


def es_threshold(d: int) -> float:
    """Noise above which information decays for any sub-exponential widths."""
    if d < 2:
        raise ValueError("need d >= 2")
    return 0.5 - 0.5 / math.sqrt(d)


def bond_threshold(d: int) -> float:
    """Weaker bond-percolation analogue of es_threshold."""
    if d < 2:
        raise ValueError("need d >= 2")
    return 0.5 - 1.0 / (2.0 * d)


def site_recursion(lam: float, delta, d: int) -> float:
    """Conditional mean of the open-connected fraction after one level."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    dd = as_delta(delta)
    return (1.0 - 2.0 * dd) ** 2 * (1.0 - (1.0 - lam) ** d)


def site_recursion_iterate(delta, d: int, k: int, lam0: float = 1.0) -> float:
    lam = lam0
    for _ in range(k):
        lam = site_recursion(lam, delta, d)
    return lam


def site_critical_envelope(delta, d: int, k: int) -> float:
    """Envelope dominating the mean open-connected fraction.

    Exactly at criticality ((1-2*delta)^2 d = 1) the geometric bound is
    vacuous and the 2/((d-1)k) envelope applies; anywhere else only the
    geometric bound is claimed.
    """
    dd = as_delta(delta)
    rho = (1.0 - 2.0 * dd) ** 2 * d
    if k == 0:
        return 1.0
    if abs(rho - 1.0) < 1e-12:
        return min(1.0, 2.0 / ((d - 1.0) * k))
    return min(1.0, rho**k)


def site_critical_noise(d: int) -> float:
    """Noise with (1-2*delta)^2 d = 1; coincides with es_threshold."""
    return es_threshold(d)


def slow_growth_limit(delta, d: int, k: int) -> float:
    """Width at/below which the all-edges-fresh event at level k has
    probability at least 1/k: log(k) / (d log(1/(2*delta)))."""
    dd = as_delta(delta)
    if k < 2:
        raise ValueError("need k >= 2")
    return math.log(k) / (d * math.log(1.0 / (2.0 * dd)))


def schedule_is_slow_growth(schedule, delta, d: int, k_from: int, k_to: int) -> bool:
    """True iff the schedule stays at/below the slow-growth limit on the range."""
    return all(schedule.size(k) <= slow_growth_limit(delta, d, k)
               for k in range(max(2, k_from), k_to + 1))


def unbounded_constants(delta):
    """(A, B): the sqrt(log) level-size constants of the fully connected model."""
    dd = as_delta(delta)
    A = 256.0 / (21.0 * (1.0 - 2.0 * dd))
    B = 1.0 / math.sqrt(math.log(1.0 / (2.0 * dd)))
    return A, B


def unbounded_constant_general(eps: float, delta) -> float:
    """A(eps, delta) = 2 / ((1-2*delta) * eps * sqrt(1-2*eps)), eps in (0, 1/4)."""
    dd = as_delta(delta)
    if not 0.0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    return 2.0 / ((1.0 - 2.0 * dd) * eps * math.sqrt(1.0 - 2.0 * eps))


def exact_mutual_information(joint: np.ndarray) -> float:
    """Mutual information (bits) of a normalized joint law over two finite
    alphabets; 0*log(0) terms contribute nothing."""
    joint = np.asarray(joint, dtype=np.float64)
    if joint.ndim != 2:
        raise ValueError("joint must be a 2-D array")
    if (joint < 0).any() or abs(joint.sum() - 1.0) > 1e-9:
        raise ValueError("joint must be a normalized probability table")
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    mi = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            p = joint[i, j]
            if p > 0.0:
                mi += p * math.log2(p / (px[i] * py[j]))
    return max(mi, 0.0)


def pinsker_tv_bound(mi_bits: float) -> float:
    """TV bound between the two conditionals of a binary uniform source with
    mutual information mi_bits: sqrt(2 ln2 * mi_bits).

    Via the midpoint: TV(P,Q) = TV(P,M) + TV(Q,M) <= sqrt(KL(P||M)/2) +
    sqrt(KL(Q||M)/2) <= sqrt(KL(P||M) + KL(Q||M)) = sqrt(2 * MI nats).
    """
    return math.sqrt(2.0 * LN2 * max(mi_bits, 0.0))


def binary_entropy(p: float) -> float:
    """Shannon entropy of a bit, in bits."""
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)
