"""Map between the 1D contact coupling g and the trapped-pair ground energy.

For two bosons with a delta interaction in one harmonic trap (natural
units hbar = m = omega = 1) the ground-state energy E_g of the pair and
the coupling constant g are linked by

    g = -2 * sqrt(2) * Gamma(1 - E_g/2) / Gamma((1 - E_g)/2).

The repulsive branch covers E_g in [1, 2): E_g = 1 is the non-interacting
pair, E_g -> 2 the hard-core (Tonks-Girardeau) limit where g diverges.
Only this branch is supported.
"""

from __future__ import annotations

from scipy.optimize import brentq
from scipy.special import gamma

_SQRT8 = 2.0 * 2.0**0.5


def g_from_eg(e_g: float) -> float:
    """Coupling constant for a pair ground-state energy e_g in [1, 2).

    e_g = 1 is treated as an explicit special case (the Gamma pole in the
    denominator makes g exactly 0 there).
    """
    if not 1.0 <= e_g < 2.0:
        raise ValueError(f"pair energy must lie in [1, 2), got {e_g}")
    if e_g == 1.0:
        return 0.0
    return -_SQRT8 * gamma(1.0 - e_g / 2.0) / gamma((1.0 - e_g) / 2.0)


def eg_from_g(g: float) -> float:
    """Pair ground-state energy for a repulsive coupling g >= 0.

    Numerical inverse of g_from_eg: bracketed root search on (1, 2)
    followed by a Newton polish, accurate to ~1e-12 in e_g.
    """
    if g < 0.0:
        raise ValueError(f"coupling must be non-negative, got {g}")
    if g == 0.0:
        return 1.0
    # Bracket: g_from_eg is strictly increasing, 0 at 1, +inf at 2.
    lo, hi = 1.0 + 1e-15, 2.0 - 1e-13
    e = brentq(lambda e: g_from_eg(e) - g, lo, hi, xtol=1e-14, rtol=8.9e-16)
    # One Newton step on a centered finite-difference slope tightens the
    # residual in g without risking escape from the bracket.
    h = 1e-7
    if lo + h < e < hi - h:
        slope = (g_from_eg(e + h) - g_from_eg(e - h)) / (2.0 * h)
        if slope > 0.0:
            e_polished = e - (g_from_eg(e) - g) / slope
            if lo < e_polished < hi:
                e = e_polished
    return e
