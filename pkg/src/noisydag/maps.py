"""Level-to-level mean maps, their critical noise levels and fixed points.

Everything here is a scalar function of the fraction of ones at one level:
`majority_map` gives the expected fraction after a majority level,
`and_map`/`or_map` the AND/OR analogues, and `von_neumann_map` the classical
noisy-gate error recursion that shares the same fixed-point structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .core import as_delta, bsc_convolve


def _binom_tail_ge(d: int, j0: int, p: float) -> float:
    """P(Binomial(d, p) >= j0); direct sum for d <= 64, log-space beyond."""
    if j0 > d:
        return 0.0
    if j0 <= 0:
        return 1.0
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return 1.0
    if d <= 64:
        q = 1.0 - p
        return sum(comb(d, j) * p**j * q ** (d - j) for j in range(j0, d + 1))
    logp, logq = math.log(p), math.log1p(-p)
    terms = []
    for j in range(j0, d + 1):
        terms.append(math.lgamma(d + 1) - math.lgamma(j + 1) - math.lgamma(d - j + 1)
                     + j * logp + (d - j) * logq)
    m = max(terms)
    return math.exp(m) * sum(math.exp(t - m) for t in terms)


def _binom_pmf(d: int, j: int, p: float) -> float:
    if not 0 <= j <= d:
        return 0.0
    if p <= 0.0:
        return 1.0 if j == 0 else 0.0
    if p >= 1.0:
        return 1.0 if j == d else 0.0
    if d <= 64:
        return comb(d, j) * p**j * (1.0 - p) ** (d - j)
    return math.exp(math.lgamma(d + 1) - math.lgamma(j + 1) - math.lgamma(d - j + 1)
                    + j * math.log(p) + (d - j) * math.log1p(-p))


def noiseless_majority(sigma: float, d: int) -> float:
    """P(majority of d iid Bernoulli(sigma) inputs is 1), random even-d ties."""
    if d % 2:
        return _binom_tail_ge(d, (d + 1) // 2, sigma)
    return _binom_tail_ge(d, d // 2 + 1, sigma) + 0.5 * _binom_pmf(d, d // 2, sigma)


def majority_map(sigma: float, delta, d: int) -> float:
    """Expected fraction of ones after one majority level at noise delta."""
    if d < 1:
        raise ValueError("need d >= 1")
    return noiseless_majority(bsc_convolve(sigma, delta), d)


def majority_map_deriv(sigma: float, delta, d: int) -> float:
    """Closed-form derivative of majority_map in sigma (Margulis-Russo form)."""
    dd = as_delta(delta)
    p = bsc_convolve(sigma, dd)
    pq = p * (1.0 - p)
    if d % 2:
        return (1.0 - 2.0 * dd) * ((d + 1) / 2.0) * comb(d, (d + 1) // 2) * pq ** ((d - 1) // 2)
    return (1.0 - 2.0 * dd) * (d / 4.0) * comb(d, d // 2) * pq ** (d // 2 - 1)


def majority_lipschitz(delta, d: int) -> float:
    """Maximum slope of majority_map over [0,1]; attained at sigma = 1/2."""
    dd = as_delta(delta)
    c = math.ceil(d / 2)
    return (1.0 - 2.0 * dd) * 0.5 ** (d - 1) * c * comb(d, c)


def majority_critical_noise_fraction(d: int) -> Fraction:
    """Exact rational critical noise for d-input majority."""
    if d < 3:
        raise ValueError("majority threshold defined for d >= 3")
    c = math.ceil(d / 2)
    return Fraction(1, 2) - Fraction(2 ** (d - 2), c * comb(d, c))


def majority_critical_noise(d: int) -> float:
    return float(majority_critical_noise_fraction(d))


@dataclass(frozen=True)
class FixedPointReport:
    """Fixed points of a mean map, sorted ascending, with stability flags."""

    points: tuple
    derivatives: tuple
    stable: tuple

    def __len__(self) -> int:
        return len(self.points)

    @property
    def largest(self) -> float:
        return self.points[-1]

    @property
    def middle(self) -> float:
        return self.points[len(self.points) // 2]


def _bisect_root(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fm = f(mid)
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def majority_fixed_points(delta, d: int, tol: float = 1e-12) -> FixedPointReport:
    """Fixed points of the majority mean map.

    Three points {1-s, 1/2, s} below the critical noise, one at 1/2 at or
    above it.  The outer point is found by bisection on [1/2, 1], which is
    safe because the map is concave there.
    """
    dd = as_delta(delta)
    if d < 3:
        raise ValueError("need d >= 3")

    def centered(x):
        return majority_map(x, dd, d) - x

    three = majority_lipschitz(dd, d) > 1.0
    if three:
        # bracket: centered > 0 just above 1/2, < 0 at 1
        lo = None
        step = 0.25
        while step > 1e-15:
            if centered(0.5 + step) > 0.0:
                lo = 0.5 + step
                break
            step /= 4.0
        if lo is None:
            three = False
    if not three:
        points = (0.5,)
    else:
        # centered(1) < 0 for any positive noise, so [lo, 1] brackets the root
        s = _bisect_root(centered, lo, 1.0, tol)
        points = (1.0 - s, 0.5, s)
    derivs = tuple(majority_map_deriv(x, dd, d) for x in points)
    return FixedPointReport(points, derivs, tuple(abs(g) < 1.0 for g in derivs))


# ---------------------------------------------------------------------------
# AND/OR alternating maps (indegree 2)


def and_map(sigma: float, delta) -> float:
    """Expected fraction after an AND level: (sigma conv delta)^2."""
    p = bsc_convolve(sigma, delta)
    return p * p


def or_map(sigma: float, delta) -> float:
    """Expected fraction after an OR level: 1 - (1 - sigma conv delta)^2."""
    p = bsc_convolve(sigma, delta)
    return 1.0 - (1.0 - p) * (1.0 - p)


def andor_map(sigma: float, delta) -> float:
    """Two-level composition: OR then AND (even-level to even-level mean)."""
    return and_map(or_map(sigma, delta), delta)


def and_map_deriv(sigma: float, delta) -> float:
    dd = as_delta(delta)
    return 2.0 * (1.0 - 2.0 * dd) * bsc_convolve(sigma, dd)


def or_map_deriv(sigma: float, delta) -> float:
    dd = as_delta(delta)
    return 2.0 * (1.0 - 2.0 * dd) * (1.0 - bsc_convolve(sigma, dd))


def andor_map_deriv(sigma: float, delta) -> float:
    return and_map_deriv(or_map(sigma, delta), delta) * or_map_deriv(sigma, delta)


_ANDOR_BREAK = (9.0 - math.sqrt(33.0)) / 12.0


def andor_lipschitz(delta) -> float:
    """Maximum slope of andor_map over [0,1].

    The slope peaks at an interior point for delta <= (9-sqrt(33))/12 and at
    sigma = 0 beyond that.
    """
    dd = as_delta(delta)
    if dd <= _ANDOR_BREAK:
        return (4.0 * (1.0 - dd) * (1.0 - 2.0 * dd) / 3.0) ** 1.5
    return 4.0 * dd * (1.0 - dd) ** 2 * (1.0 - 2.0 * dd) ** 2 * (3.0 - 2.0 * dd)


def andor_critical_noise() -> float:
    return (3.0 - math.sqrt(7.0)) / 4.0


def andor_fixed_points(delta, tol: float = 1e-12) -> FixedPointReport:
    """Fixed points of andor_map, in closed form.

    Three points 0 < t0 < t < t1 < 1 below the critical noise, a single
    point t at or above it.
    """
    dd = as_delta(delta)
    den = 2.0 * (1.0 - 2.0 * dd) ** 2
    a = 4.0 * (1.0 - dd) * (1.0 - 2.0 * dd)
    t = (a / 2.0 + 1.0 - math.sqrt(a + 1.0)) / den
    if dd < andor_critical_noise():
        r = math.sqrt(a - 3.0)
        t0 = (a / 2.0 - 1.0 - r) / den
        t1 = (a / 2.0 - 1.0 + r) / den
        if not (0.0 <= t0 < t < t1 <= 1.0):
            raise AssertionError("fixed-point ordering violated")
        points = (t0, t, t1)
    else:
        points = (t,)
    derivs = tuple(andor_map_deriv(x, dd) for x in points)
    return FixedPointReport(points, derivs, tuple(abs(g) < 1.0 for g in derivs))


def andor_top_slope(delta) -> float:
    """Slope of andor_map at its largest fixed point: 4*delta*(3-2*delta)."""
    dd = as_delta(delta)
    return 4.0 * dd * (3.0 - 2.0 * dd)


# ---------------------------------------------------------------------------
# Noisy-gate (von Neumann) recursion


def von_neumann_map(sigma: float, delta, d: int) -> float:
    """Error recursion of a d-input noisy majority gate: conv after majority."""
    if d % 2 == 0 or d < 3:
        raise ValueError("noisy-gate recursion needs odd d >= 3")
    return bsc_convolve(noiseless_majority(sigma, d), delta)


def von_neumann_iterate(delta, d: int, k: int, x0: float = 0.0) -> float:
    """k-fold composition of von_neumann_map starting at x0."""
    x = x0
    for _ in range(k):
        x = von_neumann_map(x, delta, d)
    return x


def majority_map_iterate(delta, d: int, k: int, x0: float = 0.0) -> float:
    """k-fold composition of majority_map starting at x0."""
    x = x0
    for _ in range(k):
        x = majority_map(x, delta, d)
    return x


# ---------------------------------------------------------------------------
# Layer-size constants of the achievability arguments


def majority_log_constant(delta, d: int, eps: float) -> float:
    """1/gamma(eps)^2 with gamma(eps) = map(s-eps) - (s-eps), s the top fixed
    point.  The caller chooses eps; gamma must be positive for it to be valid."""
    dd = as_delta(delta)
    report = majority_fixed_points(dd, d)
    if len(report) != 3:
        raise ValueError("no stable upper fixed point at this noise level")
    x = report.largest - eps
    if not 0.5 < x < report.largest:
        raise ValueError("eps must lie in (0, s - 1/2)")
    gamma = majority_map(x, dd, d) - x
    if gamma <= 0.0:
        raise ValueError(f"gamma(eps) = {gamma:.3g} must be positive")
    return 1.0 / gamma**2


def andor_log_constant(delta, eps: float) -> float:
    """16/gamma(eps)^2 for the AND/OR composition, gamma at t1 - eps."""
    dd = as_delta(delta)
    report = andor_fixed_points(dd)
    if len(report) != 3:
        raise ValueError("no stable upper fixed point at this noise level")
    t1 = report.largest
    x = t1 - eps
    if not report.middle < x < t1:
        raise ValueError("eps must lie in (0, t1 - t)")
    gamma = andor_map(x, dd) - x
    if gamma <= 0.0:
        raise ValueError(f"gamma(eps) = {gamma:.3g} must be positive")
    return 16.0 / gamma**2
