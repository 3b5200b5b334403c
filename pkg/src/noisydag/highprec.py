"""High-precision (50+ digit) twins of the closed forms, for golden tests.

Probabilities elsewhere are double precision; these mpmath versions give the
threshold and fixed-point golden tests headroom well beyond 1e-12.
"""

import mpmath as mp

mp.mp.dps = 50


def andor_critical_noise() -> mp.mpf:
    return (3 - mp.sqrt(7)) / 4


def evans_schulman_threshold(d: int) -> mp.mpf:
    return mp.mpf(1) / 2 - 1 / (2 * mp.sqrt(d))


def majority_top_fixed_point_d3(delta) -> mp.mpf:
    """Largest fixed point of the 3-input majority map, closed form."""
    de = mp.mpf(delta)
    return (1 + mp.sqrt((1 - 6 * de) / (1 - 2 * de) ** 3)) / 2


def andor_fixed_points(delta):
    """(t0, t, t1) of the AND/OR composition; t0, t1 only below threshold."""
    de = mp.mpf(delta)
    den = 2 * (1 - 2 * de) ** 2
    a = 4 * (1 - de) * (1 - 2 * de)
    t = (a / 2 + 1 - mp.sqrt(a + 1)) / den
    if de < andor_critical_noise():
        r = mp.sqrt(a - 3)
        return ((a / 2 - 1 - r) / den, t, (a / 2 - 1 + r) / den)
    return (t,)


def andor_lipschitz(delta) -> mp.mpf:
    de = mp.mpf(delta)
    brk = (9 - mp.sqrt(33)) / 12
    if de <= brk:
        return (4 * (1 - de) * (1 - 2 * de) / 3) ** mp.mpf("1.5")
    return 4 * de * (1 - de) ** 2 * (1 - 2 * de) ** 2 * (3 - 2 * de)
