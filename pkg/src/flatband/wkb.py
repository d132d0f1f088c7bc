"""Quasi-classical quantization conditions and their closed-form limits."""

from __future__ import annotations

import math

from scipy import integrate, optimize

from .model import Parity, Regime


class NoSolutionError(ValueError):
    """The quantization condition has no root in the energy window."""


# offsets Delta in phase = (n + Delta) * pi, keyed by (regime, sign(E), parity)
_DELTA = {
    (Regime.NEG_RATIO, 1, Parity.ODD): -0.25,
    (Regime.NEG_RATIO, 1, Parity.EVEN): -0.75,
    (Regime.POS_INTERVAL, 1, Parity.ODD): 0.25,
    (Regime.POS_INTERVAL, 1, Parity.EVEN): -0.25,
    (Regime.POS_INTERVAL, -1, Parity.ODD): 0.0,
    (Regime.POS_INTERVAL, -1, Parity.EVEN): 0.0,
    (Regime.POS_WHOLE, 1, Parity.ODD): -0.25,
    (Regime.POS_WHOLE, 1, Parity.EVEN): -0.75,
    (Regime.POS_WHOLE, -1, Parity.ODD): -0.5,
    (Regime.POS_WHOLE, -1, Parity.EVEN): -0.5,
}


def _sign(x):
    return 1 if x > 0 else -1


def delta(regime: Regime, energy_sign: int, parity: Parity) -> float:
    try:
        return _DELTA[(Regime(regime), _sign(energy_sign), Parity(parity))]
    except KeyError:
        raise ValueError(f"no quantization rule for {regime}, E sign {energy_sign}") from None


def wkb_phase(regime: Regime, E: float, alpha: float, m: float = 1.0) -> float:
    """Left-hand side of the quantization condition, in radians."""
    regime = Regime(regime)
    if not 0 < abs(E) < m:
        raise ValueError("E must lie in the gap, 0 < |E| < m")
    if regime is Regime.NEG_RATIO:
        if not (E > 0 and alpha < 0):
            raise ValueError("alpha/E < 0 bound states have E > 0, alpha < 0")
        r = math.sqrt(E / (m - E))
        bracket = -math.sqrt(2) + (2 * r + 1 / r) * math.atan(math.sqrt(2) * r)
        return -alpha * math.sqrt(E * (E + m)) / (2 * E) * bracket
    if alpha / E <= 0:
        raise ValueError("alpha/E > 0 required for this regime")
    if E > 0:
        q = math.sqrt(m + E)
        w = math.sqrt(m - E)
        return alpha * (m + E) / (2 * E) * (math.sqrt(2 * E) / q + q / w * math.asin(w / q))
    return alpha * (m + E) ** 1.5 * math.pi / (4 * E * math.sqrt(m - E))


def wkb_target(regime: Regime, energy_sign: int, parity: Parity, n: int) -> float:
    return (n + delta(regime, energy_sign, parity)) * math.pi


def wkb_index(regime, E, alpha, parity, m=1.0) -> float:
    """Continuous quantum number n implied by the phase at energy E."""
    return wkb_phase(regime, E, alpha, m) / math.pi - delta(regime, _sign(E), parity)


def energy_window(regime: Regime, energy_sign: int, m: float = 1.0, eps_E: float | None = None):
    eps = 1e-8 * m if eps_E is None else eps_E
    if energy_sign > 0:
        return eps, m - eps
    if regime is Regime.NEG_RATIO:
        raise ValueError("alpha/E < 0 has no E < 0 bound states")
    return -m + eps, -eps


def wkb_energy(regime: Regime, energy_sign: int, parity: Parity, n: int, alpha: float,
               m: float = 1.0, eps_E: float | None = None) -> float:
    """Energy solving phase(E) = (n + Delta) pi by bracketed bisection."""
    if n < 1:
        raise ValueError("n >= 1")
    target = wkb_target(regime, energy_sign, parity, n)
    lo, hi = energy_window(regime, energy_sign, m, eps_E)
    f = lambda E: wkb_phase(regime, E, alpha, m) - target
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise NoSolutionError(f"no WKB level n={n} for alpha={alpha} in {regime.value}")
    return optimize.brentq(f, lo, hi, xtol=1e-14 * m, rtol=1e-15, maxiter=500)


def rydberg_energy(n: int, parity: Parity, alpha: float, m: float = 1.0) -> float:
    """Hydrogen-like levels near the upper threshold, m [1 - alpha^2 / (2 (n+Delta)^2)]."""
    d = delta(Regime.NEG_RATIO, 1, parity)
    return m * (1 - alpha**2 / (2 * (n + d) ** 2))


def flatband_energy(n: int, parity: Parity, alpha: float, m: float = 1.0,
                    regime: Regime = Regime.POS_INTERVAL) -> float:
    """1/n levels next to the flat band, m alpha / (4 (n + Delta))."""
    d = delta(regime, 1, parity)
    return m * alpha / (4 * (n + d))


def numerical_action(regime: Regime, E: float, alpha: float, m: float = 1.0) -> float:
    """Integral of sqrt(Et - Vt) over the classically allowed part of x > 0.

    Independent check of the closed-form phases.
    """
    regime = Regime(regime)
    Et = E * E - m * m
    A = alpha * (m + E) ** 2 / (2 * E)
    x0 = alpha / (2 * E)

    def p(x):
        return math.sqrt(max(Et - A / (x - x0), 0.0))

    if regime is Regime.NEG_RATIO:
        xt = x0 + A / Et
        return integrate.quad(p, 0.0, xt, limit=400, epsabs=0, epsrel=1e-10)[0]
    if E > 0:
        return integrate.quad(p, 0.0, x0, limit=400, epsabs=0, epsrel=1e-10)[0]
    xt = x0 + A / Et
    return integrate.quad(p, max(xt, 0.0), x0, limit=400, epsabs=0, epsrel=1e-10)[0]
