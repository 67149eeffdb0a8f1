import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quenchgap.errors import InvalidParamsError
from quenchgap.lrk import LrkParams, kac_norm, lrk_fields, lrk_gap, lrk_modes
from quenchgap.tfim import TfimParams, tfim_modes

# 30-digit mpmath sums
KAC_15_40 = 4.341364142887200
GAP_MU0_N8 = 1.118224621768922


def test_kac_norm_values():
    assert kac_norm(2.0, 4) == pytest.approx(2.5, abs=1e-15)
    assert kac_norm(1.5, 40) == pytest.approx(KAC_15_40, abs=1e-13)


@pytest.mark.parametrize("gamma", [1.0, 0.5, -2.0])
def test_kac_norm_needs_gamma_above_one(gamma):
    with pytest.raises(InvalidParamsError):
        kac_norm(gamma, 10)


def test_gap_mu_zero_against_brute_force():
    assert lrk_gap(LrkParams(mu=0.0, N=8)) == pytest.approx(GAP_MU0_N8, abs=1e-13)


def test_gap_is_grid_minimum():
    p = LrkParams(mu=1.3, N=30, alpha=3.0, beta=1.7)
    eps = [m.epsilon for m in lrk_modes(p)]
    assert lrk_gap(p) == pytest.approx(2 * min(eps), rel=1e-14)


@pytest.mark.parametrize("N", [20, 60, 100])
def test_short_range_limit_maps_onto_ising(N):
    # large exponents leave only the nearest-neighbour term; energies are halved, g = mu / 2J
    mu = 1.4
    lk = lrk_modes(LrkParams(mu=mu, N=N, alpha=50.0, beta=50.0))
    tf = tfim_modes(TfimParams(g=mu / 2, N=N))
    for a, b in zip(lk, tf):
        assert 2 * a.epsilon == pytest.approx(b.epsilon, rel=1e-3)
        assert abs(math.sin(2 * a.theta)) == pytest.approx(abs(math.sin(2 * b.theta)), rel=1e-3, abs=1e-9)


def test_short_range_gap_closes_as_inverse_size():
    g = [lrk_gap(LrkParams(mu=2.0, N=n, alpha=50.0, beta=50.0)) for n in (40, 80)]
    assert g[0] * 40 == pytest.approx(g[1] * 80, rel=1e-2)


def test_critical_gap_closes_with_exponent_half():
    sizes = np.array([40, 80, 160, 320])
    gaps = [lrk_gap(LrkParams(mu=2.0, N=int(n))) for n in sizes]
    slope = np.polyfit(np.log(sizes), np.log(gaps), 1)[0]
    assert -slope == pytest.approx(0.5, abs=0.02)


@given(N=st.integers(4, 200).map(lambda n: 2 * n))
def test_kac_extensivity(N):
    _, h_z, h_x = lrk_fields(LrkParams(mu=0.0, N=N))
    assert np.max(np.abs(h_z)) <= 1.0 + 1e-12
    assert np.max(np.abs(h_x)) <= 1.0 + 1e-12


def test_rejects_bad_exponents():
    with pytest.raises(InvalidParamsError):
        LrkParams(mu=2.0, N=10, alpha=0.9)
    with pytest.raises(InvalidParamsError):
        LrkParams(mu=2.0, N=9)
