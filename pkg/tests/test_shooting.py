import math

import numpy as np
import pytest

from flatband import exact, shooting
from flatband.model import ModelParams, Parity, Regime, SingularityError


def test_integration_is_linear():
    p, E = ModelParams(-1.0), 0.6
    a = shooting.integrate_effective(p, E, 0.0, 5.0, 1.0, 0.0).at_end()
    b = shooting.integrate_effective(p, E, 0.0, 5.0, 0.0, 1.0).at_end()
    c = shooting.integrate_effective(p, E, 0.0, 5.0, 2.0, -3.0).at_end()
    np.testing.assert_allclose(c, 2 * np.array(a) - 3 * np.array(b), rtol=1e-8)


def test_free_solution():
    # alpha = 0: psi'' = kappa^2 psi
    p, E = ModelParams(0.0), 0.6
    k = math.sqrt(1 - E * E)
    y, dy = shooting.integrate_effective(p, E, 0.0, 3.0, 1.0, -k).at_end()
    assert y == pytest.approx(math.exp(-3 * k), rel=1e-8)
    assert dy == pytest.approx(-k * math.exp(-3 * k), rel=1e-8)


def test_wronskian_is_conserved():
    p, E = ModelParams(-1.3), 0.4
    t1 = shooting.integrate_effective(p, E, 0.0, 6.0, 1.0, 0.0, n_eval=50)
    t2 = shooting.integrate_effective(p, E, 0.0, 6.0, 0.0, 1.0, n_eval=50)
    w = t1.y * t2.dy - t1.dy * t2.y
    np.testing.assert_allclose(w, 1.0, rtol=1e-8)


def test_refuses_to_cross_singularity():
    p = ModelParams(1.0)
    with pytest.raises(SingularityError):
        shooting.integrate_effective(p, 0.5, 0.0, 2.0, 0.0, 1.0)


@pytest.mark.parametrize("branch", ["regular", "log"])
@pytest.mark.parametrize("s", [0.05, -0.05])
def test_frobenius_solves_the_ode(branch, s):
    # psi'' = (A/s - Et) psi near s = 0
    A, Et = 1.7, -0.64
    h = 1e-4
    y = [shooting.frobenius_series(A, Et, s + j * h, branch, 30)[0] for j in (-1, 0, 1)]
    d2 = (y[0] - 2 * y[1] + y[2]) / h**2
    assert d2 == pytest.approx((A / s - Et) * y[1], rel=1e-5)


def test_frobenius_derivative():
    A, Et, s, h = 0.9, -0.3, 0.1, 1e-6
    for branch in ("regular", "log"):
        yp = shooting.frobenius_series(A, Et, s + h, branch)[0]
        ym = shooting.frobenius_series(A, Et, s - h, branch)[0]
        assert shooting.frobenius_series(A, Et, s, branch)[1] == pytest.approx(
            (yp - ym) / (2 * h), rel=1e-7)


def test_frobenius_wronskian_is_constant():
    # W(y1, y2) = -1 for the normalization c0 = d0 = 1
    A, Et = 1.2, -0.5
    for s in (0.02, 0.1, -0.07):
        y1, d1 = shooting.frobenius_series(A, Et, s, "regular")
        y2, d2 = shooting.frobenius_series(A, Et, s, "log")
        assert y1 * d2 - d1 * y2 == pytest.approx(-1.0, rel=1e-10)


def test_frobenius_guards():
    with pytest.raises(SingularityError):
        shooting.frobenius_series(1.0, -0.5, 0.0, "regular")
    with pytest.raises(ValueError):
        shooting.frobenius_series(1.0, -0.5, 0.1, "other")


CASES = [
    (Regime.NEG_RATIO, -1.0),
    (Regime.POS_INTERVAL, 0.5),
    (Regime.POS_INTERVAL, -2.0),
    (Regime.POS_WHOLE, 0.5),
    (Regime.POS_WHOLE, -1.0),
]


@pytest.mark.parametrize("regime,alpha", CASES)
def test_shooting_agrees_with_exact(regime, alpha):
    p = ModelParams(alpha)
    for parity, states in exact.find_all_parities(p, regime, n_max=3).items():
        for s in states:
            Es = shooting.shoot_near(p, regime, parity, s.energy, 1e-3 * abs(s.energy))
            assert Es == pytest.approx(s.energy, abs=1e-8)


@pytest.mark.parametrize("regime,alpha", [(Regime.NEG_RATIO, -1.0), (Regime.POS_WHOLE, 0.5)])
def test_node_count_grows_with_index(regime, alpha):
    p = ModelParams(alpha)
    for parity, states in exact.find_all_parities(p, regime, n_max=5).items():
        nodes = [shooting.count_nodes(shooting.eigenfunction(p, s.energy, regime, parity))
                 for s in states]
        assert all(b == a + 1 for a, b in zip(nodes, nodes[1:]))


@pytest.mark.parametrize("regime,alpha", [(Regime.NEG_RATIO, -1.0), (Regime.POS_WHOLE, 0.5),
                                          (Regime.POS_WHOLE, -1.0)])
def test_eigenfunctions_decay(regime, alpha):
    p = ModelParams(alpha)
    for parity, states in exact.find_all_parities(p, regime, n_max=3).items():
        for s in states:
            t = shooting.eigenfunction(p, s.energy, regime, parity)
            assert abs(t.y[-1]) <= 1e-6 * np.max(np.abs(t.y))


def test_no_bracket_raises():
    p = ModelParams(-1.0)
    with pytest.raises(shooting.ShootingError):
        shooting.shoot_eigenvalue(p, Regime.NEG_RATIO, Parity.ODD, (0.80, 0.82))


def test_config_validation():
    with pytest.raises(ValueError):
        shooting.ShootingConfig(frobenius_terms=2)
