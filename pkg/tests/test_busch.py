"""Coupling-constant <-> pair-energy map."""

import numpy as np
import pytest

from sapsim import eg_from_g, g_from_eg

# Reference values from a 50-digit mpmath evaluation of
# -2*sqrt(2)*gamma(1 - E/2)/gamma((1 - E)/2), frozen before the module
# was written.
GAMMA_ORACLE = {
    1.2: 0.5870984569417223877501,
    1.4: 1.453567929176137409239,
    1.6: 3.000996926842138154589,
    1.8: 7.227613022522133453702,
    1.95: 31.35771173400789378859,
}
EG_AT_G100 = 1.984123511167397100485  # same oracle, bisected on (1, 2)


def test_noninteracting_limit_is_exact():
    assert g_from_eg(1.0) == 0.0


@pytest.mark.parametrize("e_g, expected", sorted(GAMMA_ORACLE.items()))
def test_matches_high_precision_oracle(e_g, expected):
    assert g_from_eg(e_g) == pytest.approx(expected, rel=1e-12)


def test_diverges_toward_hard_core_limit():
    assert g_from_eg(1.999) > 1e3


def test_strictly_increasing():
    es = np.linspace(1.001, 1.95, 400)
    gs = np.array([g_from_eg(e) for e in es])
    assert np.all(np.diff(gs) > 0)
    assert np.all(gs >= 0)


@pytest.mark.parametrize("e_g", [1.0, 1.4])
def test_domain_errors(e_g):
    with pytest.raises(ValueError):
        g_from_eg(0.999)
    with pytest.raises(ValueError):
        g_from_eg(2.0)
    with pytest.raises(ValueError):
        eg_from_g(-0.1)


def test_inverse_of_zero_coupling():
    assert eg_from_g(0.0) == 1.0


def test_inverse_of_strong_coupling():
    e = eg_from_g(100.0)
    assert 1.9 < e < 2.0
    assert e == pytest.approx(EG_AT_G100, abs=1e-10)


def test_round_trip_through_g():
    assert eg_from_g(g_from_eg(1.4)) == pytest.approx(1.4, abs=1e-10)


def test_round_trip_across_branch():
    for e in np.linspace(1.001, 1.95, 200):
        assert eg_from_g(g_from_eg(e)) == pytest.approx(e, abs=1e-8)


def test_round_trip_in_g():
    for g in (1e-3, 0.5, 2.0, 10.0, 300.0):
        assert g_from_eg(eg_from_g(g)) == pytest.approx(g, rel=1e-10)
