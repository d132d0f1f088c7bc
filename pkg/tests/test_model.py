import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatband import model
from flatband.model import Band, ModelParams, Parity, Regime


@given(k=st.floats(-10, 10), m=st.floats(0.1, 5))
def test_free_eigenvectors(k, m):
    h = model.free_hamiltonian(k, m)
    for band in Band:
        v = model.free_eigenvector(band, k, m)
        e = model.dispersion(band, k, m)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        np.testing.assert_allclose(h @ v, e * v, atol=1e-12 * max(1, abs(e)))


def test_flat_band_is_zero():
    assert model.dispersion(Band.FLAT, 3.0, 1.0) == 0.0
    assert model.dispersion(Band.UPPER, 0.0, 2.0) == 2.0
    assert model.dispersion(Band.LOWER, 0.0, 2.0) == -2.0


@given(alpha=st.floats(-5, 5).filter(lambda a: abs(a) > 1e-3),
       E=st.floats(-0.99, 0.99).filter(lambda e: abs(e) > 1e-3))
def test_hypergeom_args_relations(alpha, E):
    p = ModelParams(alpha)
    h = model.hypergeom_args(p, E)
    assert h.Etilde == pytest.approx(E * E - 1)
    assert h.kappa == pytest.approx(math.sqrt(1 - E * E))
    assert h.a == pytest.approx(1 + h.A / (2 * h.kappa))
    assert h.z0 == pytest.approx(-2 * h.kappa * h.x0)
    assert h.x0 == pytest.approx(alpha / (2 * E))


def test_effective_potential_shape():
    p = ModelParams(-1.0)
    E = 0.5
    A = -1.0 * 1.5**2 / 1.0
    x0 = -1.0
    for x in (0.3, -2.0, 7.0):
        assert model.effective_potential(p, E, x) == pytest.approx(A / (abs(x) - x0))


def test_effective_potential_guard():
    p = ModelParams(1.0)
    with pytest.raises(model.SingularityError):
        model.effective_potential(p, 0.5, 1.0)


def test_classify_regime():
    assert model.classify_regime(-1, 0.5) is Regime.NEG_RATIO
    assert model.classify_regime(1, 0.5) is Regime.POS_INTERVAL
    assert model.classify_regime(-1, -0.5, whole_space=True) is Regime.POS_WHOLE
    with pytest.raises(ValueError):
        model.classify_regime(0, 0.5)
    assert model.energy_sign_allowed(Regime.NEG_RATIO, -1, 0.3)
    assert not model.energy_sign_allowed(Regime.POS_INTERVAL, -1, 0.3)


def test_params_validation():
    assert ModelParams(1.0).eps_E == 1e-8
    with pytest.raises(ValueError):
        ModelParams(1.0, m=0)
    with pytest.raises(ValueError):
        ModelParams(1.0, eps_E=0.5)
    assert ModelParams(1.0, m=2).with_alpha(-3).m == 2


def test_bound_state_index_positive():
    with pytest.raises(ValueError):
        model.BoundState(0.5, 0, Parity.ODD, Regime.NEG_RATIO, model.Method.EXACT)


def test_components_from_plane_wave():
    # with V = 0 the component relations reduce to the free spinor
    p = ModelParams(1e-300)
    m, k = 1.0, 0.7
    E = math.hypot(k, m)
    x = np.array([0.4, 1.3])
    psi = np.cos(k * x)
    dpsi = -k * np.sin(k * x)
    c1, c2, c3 = model.reconstruct_components(p, E, x, psi, dpsi)
    v = model.free_eigenvector(Band.UPPER, k, m)
    np.testing.assert_allclose(c3 / c1, v[2] / v[0], rtol=1e-12)
    np.testing.assert_allclose(c1 + c3, 2 * psi, rtol=1e-12)


def test_components_guard_origin():
    with pytest.raises(model.SingularityError):
        model.reconstruct_components(ModelParams(-1.0), 0.5, [0.0], [1.0], [0.0])


@given(k=st.floats(-10, 10), m=st.floats(0.1, 5))
def test_eigenvectors_mutually_orthogonal(k, m):
    vs = np.array([model.free_eigenvector(b, k, m) for b in Band])
    np.testing.assert_allclose(vs @ vs.T, np.eye(3), atol=1e-12)


@given(E=st.floats(0.05, 0.95), alpha=st.floats(-4, -0.05), x=st.floats(0.01, 30))
def test_neg_ratio_potential_shape(E, alpha, x):
    p = ModelParams(alpha)
    A = alpha * (1 + E) ** 2 / (2 * E)
    x0 = alpha / (2 * E)
    # continuous, even, deepest at x = 0 with value -(m+E)^2
    assert model.effective_potential(p, E, x) == model.effective_potential(p, E, -x)
    assert model.effective_potential(p, E, 0.0) == pytest.approx(-(1 + E) ** 2)
    assert model.effective_potential(p, E, x) > -(1 + E) ** 2
    assert A / (x - x0) < 0
    # the effective energy sits above the bottom only for E > 0
    assert (E * E - 1) + (1 + E) ** 2 == pytest.approx(2 * E * (1 + E))


@given(E=st.floats(0.05, 0.95), alpha=st.floats(0.05, 4), t=st.floats(0.01, 3))
def test_positive_ratio_potential_sign(E, alpha, t):
    p = ModelParams(alpha)
    x0 = alpha / (2 * E)
    inside, outside = x0 * t / 3.01, x0 * (1 + t)
    assert model.effective_potential(p, E, inside) < 0
    assert model.effective_potential(p, E, -inside) < 0
    assert model.effective_potential(p, E, outside) > 0
