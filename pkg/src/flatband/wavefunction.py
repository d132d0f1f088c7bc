"""Closed-form eigenfunctions on the whole line and their spinor components.

For x > 0, with s = x - x0 and z = 2 kappa s,

    psi = s e^{-kappa s} F(z),
    psi' = e^{-kappa s} [(1 - kappa s) F + 2 kappa s F'(z)],

F = U(a,2,z) (alpha/E < 0), M(a,2,z) on 0 < x < x0 (interval) or
Re U(a,2,z) (whole line).  Parity extends psi to x < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import exact, specfun
from .model import ModelParams, Parity, Regime, hypergeom_args, reconstruct_components
from .shooting import outer_turning_point


class NotEigenstateError(ValueError):
    """(alpha, E) does not solve the energy equation of the sector."""


def _F_and_dF(regime: Regime, a: float, z: float):
    """(F, dF/dz) up to the sector's common positive factor."""
    if regime is Regime.POS_INTERVAL:
        return specfun.kummer_m(a, 2, z), 0.5 * a * specfun.kummer_m(a + 1, 3, z)
    scaling = "reflect" if regime is Regime.NEG_RATIO else "gamma"
    # U' = -a U(a+1, 3, z); both carry the same Gamma factor
    u2 = specfun.tricomi_u_scaled(a, 2, z, scaling, want_im=False).re
    u3 = specfun.tricomi_u_scaled(a + 1, 3, z, scaling, want_im=False).re
    return u2, -a * u3


def psi_right(p: ModelParams, E: float, regime: Regime, x: float):
    """(psi, psi') at x > 0, unnormalized."""
    regime = Regime(regime)
    h = hypergeom_args(p, E)
    if regime is Regime.POS_INTERVAL and x >= h.x0:
        return 0.0, 0.0
    s = x - h.x0
    z = 2 * h.kappa * s
    if z == 0:
        if regime is Regime.POS_WHOLE:
            # s Gamma(a-1) U(a,2,2 kappa s) -> 1/(2 kappa (a-1))
            return 1.0 / (2 * h.kappa * (h.a - 1)), math.nan
        return 0.0, 1.0
    F, dF = _F_and_dF(regime, h.a, z)
    e = math.exp(-h.kappa * s)
    return s * e * F, e * ((1 - h.kappa * s) * F + 2 * h.kappa * s * dF)


def psi_line(p: ModelParams, E: float, regime: Regime, parity: Parity, x):
    """psi and psi' on arbitrary x via parity: psi(-x) = +-psi(x)."""
    sgn = -1.0 if Parity(parity) is Parity.ODD else 1.0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    psi = np.empty_like(xs)
    dpsi = np.empty_like(xs)
    for i, xv in enumerate(xs):
        if xv == 0:
            # parity pins one of the two values at the origin
            y, dy = psi_right(p, E, regime, 0.0)
            psi[i], dpsi[i] = (0.0, dy) if sgn < 0 else (y, 0.0)
            continue
        y, dy = psi_right(p, E, regime, abs(xv))
        if xv > 0:
            psi[i], dpsi[i] = y, dy
        else:
            psi[i], dpsi[i] = sgn * y, -sgn * dy
    return psi, dpsi


@dataclass
class WaveSample:
    regime: Regime
    parity: Parity
    alpha: float
    E: float
    n: int | None
    x: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    psi1: np.ndarray
    psi2_imag: np.ndarray
    psi3: np.ndarray

    def rows(self):
        for i in range(self.x.size):
            yield (self.regime.value, self.parity.value, self.alpha, self.E, float(self.x[i]),
                   float(self.psi[i]), float(self.psi1[i]), float(self.psi2_imag[i]),
                   float(self.psi3[i]))


def extent(p: ModelParams, E: float, regime: Regime) -> float:
    """Half-width of the sampled window."""
    h = hypergeom_args(p, E)
    if Regime(regime) is Regime.POS_INTERVAL:
        return h.x0
    reach = max(outer_turning_point(p, E), h.x0, 0.0)
    return reach + 12.0 / h.kappa


def check_eigenpair(p: ModelParams, E: float, regime: Regime, parity: Parity,
                    tol: float = 1e-9) -> float:
    """Return E itself, or the nearby root if E is only accurate to ~1e-7 relative."""
    f = exact.EnergyEquation(p, Regime(regime), Parity(parity))
    if abs(f(E)) <= tol:
        return E
    w = 1e-7 * max(abs(E), p.m * 1e-3)
    lo, hi = E - w, E + w
    if f(lo) * f(hi) < 0:
        E2 = optimize.brentq(f, lo, hi, xtol=1e-15 * p.m, rtol=1e-15)
        if abs(f(E2)) <= tol:
            return E2
    raise NotEigenstateError(f"alpha={p.alpha}, E={E} is not a {Regime(regime).value} "
                             f"{Parity(parity).value} eigenpair (residual {f(E):.3g})")


def sample(p: ModelParams, E: float, regime: Regime, parity: Parity, n_points: int = 401,
           n: int | None = None, half_width: float | None = None) -> WaveSample:
    """psi and components on a symmetric grid that avoids x = 0 and |x| = x0.

    Normalized so that max |psi| = 1, with psi'(0) > 0 (odd) or psi(0) > 0 (even).
    """
    regime, parity = Regime(regime), Parity(parity)
    E = check_eigenpair(p, E, regime, parity)
    X = extent(p, E, regime) if half_width is None else half_width
    k = n_points // 2
    # half-integer offsets keep x = 0 off the grid
    xr = (np.arange(k) + 0.5) * (X / k)
    x0 = hypergeom_args(p, E).x0
    if x0 > 0:
        gap = 1e-6 * x0
        xr = np.where(np.abs(xr - x0) < gap, x0 - gap, xr)
    x = np.concatenate([-xr[::-1], xr])
    psi, dpsi = psi_line(p, E, regime, parity, x)
    y0, dy0 = psi_line(p, E, regime, parity, [0.0])
    ref = dy0[0] if parity is Parity.ODD else y0[0]
    scale = np.max(np.abs(psi)) * (1.0 if ref >= 0 else -1.0)
    psi, dpsi = psi / scale, dpsi / scale
    psi1, psi2_imag, psi3 = reconstruct_components(p, E, x, psi, dpsi)
    return WaveSample(regime, parity, p.alpha, E, n, x, psi, dpsi, psi1, psi2_imag, psi3)


def component_residual(p: ModelParams, ws: WaveSample, h: float | None = None) -> float:
    """Largest scaled residual of the three first-order component equations.

    Derivatives are 5-point central differences of the reconstructed
    components, with steps shrinking toward x = 0 and |x| = x0; points
    closer than 1e-3 of the window to those are skipped.  Each line is
    scaled by its largest right-hand side.
    """
    E, m, alpha = ws.E, p.m, p.alpha
    x0 = alpha / (2 * E)
    X = np.max(np.abs(ws.x))
    ax = np.abs(ws.x)
    # distance to the nearest point where a component is not smooth
    dist = ax.copy()
    if x0 > 0:
        dist = np.minimum(dist, np.abs(ax - x0))
    keep = dist > 1e-3 * X
    if ws.regime is Regime.POS_INTERVAL:
        keep &= ax < x0
    xs = ws.x[keep]
    step = np.minimum(1e-4 * X if h is None else h, 0.01 * dist[keep])
    offsets = np.array([-2, -1, 1, 2])
    weights = np.array([1, -8, 8, -1]) / 12.0

    # the equations are linear, so the normalization of psi drops out
    def comps(xv):
        psi, dpsi = psi_line(p, E, ws.regime, ws.parity, xv)
        return reconstruct_components(p, E, xv, psi, dpsi)

    c1, c2, c3 = comps(xs)
    d2 = np.zeros_like(xs)
    d13 = np.zeros_like(xs)
    for off, w in zip(offsets, weights):
        a1, a2, a3 = comps(xs + off * step)
        d2 += w * a2 / step
        d13 += w * (a1 + a3) / step
    v = alpha / np.abs(xs)
    lhs = d2 / math.sqrt(2)
    r1 = lhs - (E - m - v) * c1
    r2 = -d13 / math.sqrt(2) - E * c2
    r3 = lhs - (E + m) * c3
    out = 0.0
    for r, rhs in ((r1, (E - m - v) * c1), (r2, E * c2), (r3, (E + m) * c3)):
        out = max(out, float(np.max(np.abs(r)) / max(np.max(np.abs(rhs)), 1e-300)))
    return out


# the four reference states at E = m/2: sector and level index
FIGURE_STATES = (
    (Regime.NEG_RATIO, Parity.ODD, 1),
    (Regime.NEG_RATIO, Parity.EVEN, 1),
    (Regime.POS_INTERVAL, Parity.EVEN, 1),
    (Regime.POS_WHOLE, Parity.EVEN, 1),
)


def figure_states(p_template: ModelParams | None = None, E_over_m: float = 0.5,
                  n_points: int = 401) -> list[WaveSample]:
    """Eigenfunctions sharing one energy, each with its own strength alpha."""
    pt = p_template or ModelParams(alpha=-1.0)
    E = E_over_m * pt.m
    out = []
    for regime, parity, n in FIGURE_STATES:
        alpha = exact.alpha_for_energy(pt, regime, parity, n, E)
        out.append(sample(pt.with_alpha(alpha), E, regime, parity, n_points, n=n))
    return out
