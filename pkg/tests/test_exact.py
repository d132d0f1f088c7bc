import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from flatband import exact, wkb
from flatband.model import ModelParams, Parity, Regime

SECTORS = [
    (Regime.NEG_RATIO, -1.0),
    (Regime.NEG_RATIO, -0.3),
    (Regime.NEG_RATIO, -3.0),
    (Regime.POS_INTERVAL, 0.1),
    (Regime.POS_INTERVAL, 1.5),
    (Regime.POS_INTERVAL, -5.0),
    (Regime.POS_WHOLE, 0.5),
    (Regime.POS_WHOLE, -1.0),
]


@pytest.fixture(scope="module", params=SECTORS, ids=lambda s: f"{s[0].value}{s[1]:+g}")
def spectrum(request):
    regime, alpha = request.param
    p = ModelParams(alpha)
    return p, regime, exact.find_all_parities(p, regime, n_max=10)


def test_roots_are_valid(spectrum):
    p, regime, levels = spectrum
    for parity, states in levels.items():
        assert states
        f = exact.EnergyEquation(p, regime, parity)
        for s in states:
            assert abs(s.residual) <= 1e-9
            assert abs(f(s.energy)) <= 1e-9
            h = 1e-9 * p.m
            assert f(s.energy - h) * f(s.energy + h) < 0


def test_levels_follow_wkb_index(spectrum):
    p, regime, levels = spectrum
    for parity, states in levels.items():
        ns = [s.n for s in states]
        assert ns == list(range(ns[0], ns[0] + len(ns)))
        for s in states:
            assert abs(wkb.wkb_index(regime, s.energy, p.alpha, parity, p.m) - s.n) < 0.75


def test_levels_sit_in_their_window(spectrum):
    p, regime, levels = spectrum
    for states in levels.values():
        for s in states:
            if regime is Regime.NEG_RATIO:
                assert 0 < s.energy < p.m
            else:
                assert 0 < s.energy / p.alpha and abs(s.energy) < p.m


def test_unnormalized_residual_vanishes_too():
    p = ModelParams(-1.0)
    for s in exact.find_bound_states(p, Regime.NEG_RATIO, Parity.EVEN, n_max=4):
        raw = exact.residual(p, s.energy, Regime.NEG_RATIO, Parity.EVEN)
        scale = abs(exact.residual(p, s.energy * 0.999, Regime.NEG_RATIO, Parity.EVEN))
        assert abs(raw) <= 1e-8 * max(scale, 1e-300)


def test_zero_strength_has_no_levels():
    for regime in Regime:
        for parity in Parity:
            assert exact.find_bound_states(ModelParams(0.0), regime, parity) == []


def test_wrong_sign_has_no_levels():
    assert exact.find_bound_states(ModelParams(1.0), Regime.NEG_RATIO, Parity.ODD) == []
    assert exact.find_bound_states(ModelParams(1.0), Regime.POS_INTERVAL, Parity.ODD,
                                   energy_sign=-1) == []


def test_window_guard():
    with pytest.raises(exact.WindowError):
        exact.residual(ModelParams(-1.0), 1.0, Regime.NEG_RATIO, Parity.ODD)
    with pytest.raises(exact.WindowError):
        exact.residual(ModelParams(1.0), -0.5, Regime.POS_INTERVAL, Parity.ODD)


@settings(max_examples=12, deadline=None)
@given(a1=st.floats(0.05, 1.8), a2=st.floats(0.05, 1.8))
def test_positive_ratio_levels_rise_with_strength(a1, a2):
    # below the first critical strength of each sector n = 1 exists and E_1 grows with alpha
    lo, hi = sorted((a1, a2))
    if hi - lo < 1e-3:
        return
    for parity, cap in ((Parity.ODD, 1.9), (Parity.EVEN, 1.2)):
        if hi >= cap:
            continue
        e_lo = exact.find_level(ModelParams(lo), Regime.POS_INTERVAL, parity, 1).energy
        e_hi = exact.find_level(ModelParams(hi), Regime.POS_INTERVAL, parity, 1).energy
        assert e_hi > e_lo


@settings(max_examples=10, deadline=None)
@given(a1=st.floats(-3, -0.1), a2=st.floats(-3, -0.1))
def test_neg_ratio_levels_deepen_with_strength(a1, a2):
    weak, strong = sorted((a1, a2), reverse=True)
    if weak - strong < 1e-3:
        return
    for n in (1, 2, 3):
        e_w = exact.find_level(ModelParams(weak), Regime.NEG_RATIO, Parity.ODD, n).energy
        e_s = exact.find_level(ModelParams(strong), Regime.NEG_RATIO, Parity.ODD, n).energy
        assert e_s < e_w


def test_level_enters_at_the_critical_strength():
    ac = exact.critical_alpha_exact(Regime.POS_INTERVAL, Parity.ODD, 1)
    below = exact.find_bound_states(ModelParams(ac * 0.99), Regime.POS_INTERVAL, Parity.ODD,
                                    n_max=2)
    above = exact.find_bound_states(ModelParams(ac * 1.01), Regime.POS_INTERVAL, Parity.ODD,
                                    n_max=2)
    assert below[0].n == 1 and below[0].energy > 0.9
    assert above[0].n == 2
    assert exact.levels_lost(Regime.POS_INTERVAL, Parity.ODD, ac * 1.01) == 1


def test_critical_values():
    assert exact.critical_alpha_exact(Regime.POS_INTERVAL, Parity.ODD, 1) == pytest.approx(
        1.9158529851, abs=1e-9)
    assert exact.critical_alpha_exact(Regime.POS_WHOLE, Parity.ODD, 1) == pytest.approx(
        1.0985706630, abs=1e-9)
    assert exact.critical_alpha_exact(Regime.POS_WHOLE, Parity.EVEN, 1) == pytest.approx(
        0.4467884832, abs=1e-9)
    for k in range(1, 5):
        a = exact.critical_alpha_exact(Regime.POS_INTERVAL, Parity.EVEN, k)
        assert abs(a * special.jv(2, 2 * a) - special.jv(1, 2 * a)) < 1e-12
        assert a == pytest.approx(exact.critical_alpha_asymptotic(
            Regime.POS_INTERVAL, Parity.EVEN, k), rel=0.05)


@pytest.mark.parametrize("regime,parity", [
    (Regime.POS_INTERVAL, Parity.ODD), (Regime.POS_INTERVAL, Parity.EVEN),
    (Regime.POS_WHOLE, Parity.ODD), (Regime.POS_WHOLE, Parity.EVEN)])
def test_asymptotic_critical_converges(regime, parity):
    d = [exact.critical_strength(regime, parity, k).rel_diff for k in range(1, 7)]
    assert all(x > y for x, y in zip(d, d[1:]))


def test_critical_only_for_positive_ratio():
    with pytest.raises(ValueError):
        exact.critical_alpha_exact(Regime.NEG_RATIO, Parity.ODD, 1)


def test_scan_ordering_and_parallel_determinism():
    grid = np.linspace(-2, -0.2, 5)
    serial = exact.scan_alpha(ModelParams(-1.0), grid, Regime.NEG_RATIO, Parity.ODD, n_max=4)
    parallel = exact.scan_alpha(ModelParams(-1.0), grid, Regime.NEG_RATIO, Parity.ODD,
                                n_max=4, workers=3)
    assert serial.states == parallel.states
    keys = [(s.alpha, s.n) for s in serial.states]
    assert keys == sorted(keys)
    assert not serial.failures


def test_scan_empty_grid():
    sc = exact.scan_alpha(ModelParams(-1.0), [], Regime.NEG_RATIO, Parity.ODD)
    assert sc.states == [] and sc.alpha_grid == []


def test_find_level_missing():
    with pytest.raises(LookupError):
        exact.find_level(ModelParams(2.5), Regime.POS_INTERVAL, Parity.ODD, 1)


def test_threshold_accumulation():
    p = ModelParams(-1.0)
    counts = []
    for d in (0.1, 0.05, 0.025, 0.0125):
        counts.append(sum(len(exact.find_bound_states(p, Regime.NEG_RATIO, q,
                                                      window=(p.eps_E, 1 - d), n_max=10_000))
                          for q in Parity))
    assert all(b > a for a, b in zip(counts, counts[1:]))


def test_alpha_for_energy_inverts():
    p = ModelParams(-1.0)
    alpha = exact.alpha_for_energy(p, Regime.NEG_RATIO, Parity.ODD, 2, 0.5)
    lvl = exact.find_level(p.with_alpha(alpha), Regime.NEG_RATIO, Parity.ODD, 2)
    assert lvl.energy == pytest.approx(0.5, abs=1e-10)


def test_boundary_angle_matches_parity_condition():
    p = ModelParams(0.7)
    s_odd = exact.find_level(p, Regime.POS_WHOLE, Parity.ODD, 2)
    s_even = exact.find_level(p, Regime.POS_WHOLE, Parity.EVEN, 3)
    th = exact.boundary_angle(p, s_odd.energy, Regime.POS_WHOLE)
    assert abs(math.sin(th)) < 1e-9
    th = exact.boundary_angle(p, s_even.energy, Regime.POS_WHOLE)
    assert abs(math.cos(th)) < 1e-9
