"""Direct integration of the effective equation, used to cross-check the spectrum.

psi'' = (Vt(x) - Et) psi with Vt = A/(|x| - x0).  Everything is done on
x >= 0; parity fixes psi(0) = 0 (odd) or psi'(0) = 0 (even).

Near the singular point s = x - x0 -> 0 (alpha/E > 0) two Frobenius
solutions exist:

  regular:  y1 = sum_k c_k s^(k+1),  c_0 = 1,
            (k+1) k c_k = A c_{k-1} - Et c_{k-2}
  log:      y2 = A y1 ln|s| + sum_k d_k s^k,  d_0 = 1, d_1 = 0,
            k (k-1) d_k = A d_{k-1} - Et d_{k-2} - A (2k-1) c_{k-1}

The interval regime keeps only y1 on 0 < x < x0.  The whole-space regime
continues C y1 + D y2 through x0 with the same (C, D) on both sides, i.e.
with ln|s|; this is the real-part prescription of the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .model import ModelParams, Parity, Regime, SingularityError


class ShootingError(RuntimeError):
    """Integration failed or the bracket does not contain a sign change."""


@dataclass(frozen=True)
class ShootingConfig:
    step_init: float | None = None
    tol_local: float = 1e-10
    x_far: float | None = None  # absolute override
    x_far_kappa: float = 40.0  # default x_far in units of 1/kappa
    frobenius_terms: int = 24
    frobenius_eps_rel: float = 1e-6  # start offset, relative to x0

    def __post_init__(self):
        if self.frobenius_terms < 4:
            raise ValueError("frobenius_terms >= 4")
        if not 0 < self.tol_local < 1e-3:
            raise ValueError("tol_local out of range")
        if not 0 < self.frobenius_eps_rel < 1e-2:
            raise ValueError("frobenius_eps_rel out of range")


DEFAULT_SHOOTING = ShootingConfig()


@dataclass(frozen=True)
class _Coeffs:
    A: float
    x0: float
    Et: float
    kappa: float


def _coeffs(p: ModelParams, E: float) -> _Coeffs:
    if E == 0 or abs(E) >= p.m:
        raise ValueError("need 0 < |E| < m")
    m = p.m
    return _Coeffs(A=p.alpha * (m + E) ** 2 / (2 * E), x0=p.alpha / (2 * E),
                   Et=-(m - E) * (m + E), kappa=math.sqrt((m - E) * (m + E)))


@dataclass
class Trajectory:
    x: np.ndarray
    y: np.ndarray
    dy: np.ndarray

    def at_end(self):
        return float(self.y[-1]), float(self.dy[-1])


def _rhs(c: _Coeffs):
    if c.A == 0:
        # alpha = 0 also puts x0 at the origin
        return lambda x, u: (u[1], -c.Et * u[0])

    def f(x, u):
        return (u[1], (c.A / (abs(x) - c.x0) - c.Et) * u[0])
    return f


def _segment(c, x_start, x_end, y0, dy0, cfg, dense):
    span = abs(x_end - x_start)
    first = cfg.step_init
    if first is None and c.x0 > 0:
        # resolve the 1/s growth when starting next to the singular point
        first = max(min(0.1 * abs(abs(x_start) - c.x0), span / 10), 1e-300)
    kw = {"first_step": first} if first else {}
    atol = 1e-3 * cfg.tol_local * max(abs(y0), abs(dy0) / c.kappa)
    sol = integrate.solve_ivp(_rhs(c), (x_start, x_end), [y0, dy0], method="DOP853",
                              rtol=cfg.tol_local, atol=atol, dense_output=dense, **kw)
    if not sol.success:
        raise ShootingError(f"integration failed: {sol.message}")
    return sol


def integrate_effective(p: ModelParams, E: float, x_start: float, x_end: float,
                        y0: float, dy0: float, cfg: ShootingConfig = DEFAULT_SHOOTING,
                        n_eval: int = 0) -> Trajectory:
    """Integrate from x_start to x_end; splits at x = 0 where |x| has a kink.

    ``n_eval`` > 0 returns that many evenly spaced samples per segment,
    otherwise only the solver's own steps.
    """
    c = _coeffs(p, E)
    lo, hi = min(x_start, x_end), max(x_start, x_end)
    if c.x0 > 0:
        for xs in (c.x0, -c.x0):
            if lo < xs < hi:
                raise SingularityError(f"|x| = x0 = {c.x0} lies inside the interval")
        if min(abs(abs(x_start) - c.x0), abs(abs(x_end) - c.x0)) == 0:
            raise SingularityError("cannot start or end on the singular point")
    cuts = [x_start]
    if lo < 0 < hi:
        cuts.append(0.0)
    cuts.append(x_end)
    xs, ys, dys = [], [], []
    y, dy = y0, dy0
    for a, b in zip(cuts[:-1], cuts[1:]):
        sol = _segment(c, a, b, y, dy, cfg, dense=n_eval > 0)
        if n_eval > 0:
            grid = np.linspace(a, b, n_eval)
            u = sol.sol(grid)
            xs.append(grid), ys.append(u[0]), dys.append(u[1])
        else:
            xs.append(sol.t), ys.append(sol.y[0]), dys.append(sol.y[1])
        y, dy = sol.y[0, -1], sol.y[1, -1]
    return Trajectory(np.concatenate(xs), np.concatenate(ys), np.concatenate(dys))


# ---------------------------------------------------------------------------
# Frobenius data at the singular point


def frobenius_coefficients(A: float, Et: float, terms: int):
    c = np.zeros(terms)
    d = np.zeros(terms)
    c[0] = 1.0
    if terms > 1:
        c[1] = A * c[0] / 2
    for k in range(2, terms):
        c[k] = (A * c[k - 1] - Et * c[k - 2]) / (k * (k + 1))
    d[0] = 1.0
    for k in range(2, terms):
        d[k] = (A * d[k - 1] - Et * d[k - 2] - A * (2 * k - 1) * c[k - 1]) / (k * (k - 1))
    return c, d


def frobenius_series(A: float, Et: float, s: float, branch: str, terms: int = 24):
    """(y, dy/ds) of the regular or logarithmic solution at offset s."""
    if s == 0:
        raise SingularityError("s = 0 is the singular point")
    c, d = frobenius_coefficients(A, Et, terms)
    k = np.arange(terms)
    y1 = float(np.sum(c * s ** (k + 1)))
    dy1 = float(np.sum(c * (k + 1) * s ** k))
    if branch == "regular":
        last = abs(c[-1] * s ** terms)
        if last > 1e-15 * max(abs(y1), 1e-300):
            raise ValueError("offset too large for the series radius")
        return y1, dy1
    if branch != "log":
        raise ValueError("branch is 'regular' or 'log'")
    ls = math.log(abs(s))
    kk = k[1:]
    y = A * y1 * ls + float(np.sum(d * s ** k))
    dy = A * (dy1 * ls + y1 / s) + float(np.sum(d[1:] * kk * s ** (kk - 1)))
    return y, dy


def frobenius_start(p: ModelParams, E: float, side: int, branch: str,
                    cfg: ShootingConfig = DEFAULT_SHOOTING):
    """(x, y, dy) at x0 + side * eps for the chosen branch."""
    c = _coeffs(p, E)
    if not c.x0 > 0:
        raise ValueError("no singular point on x > 0 unless alpha/E > 0")
    if side not in (-1, 1):
        raise ValueError("side is -1 or +1")
    eps = cfg.frobenius_eps_rel * c.x0
    y, dy = frobenius_series(c.A, c.Et, side * eps, branch, cfg.frobenius_terms)
    return c.x0 + side * eps, y, dy


# ---------------------------------------------------------------------------
# shooting


def outer_turning_point(p: ModelParams, E: float) -> float:
    c = _coeffs(p, E)
    # Et = A/(x - x0) on the outer branch
    return max(c.x0 + c.A / c.Et, 0.0)


def far_point(p: ModelParams, E: float, cfg: ShootingConfig = DEFAULT_SHOOTING) -> float:
    if cfg.x_far is not None:
        return cfg.x_far
    c = _coeffs(p, E)
    base = max(c.x0, outer_turning_point(p, E), 0.0)
    return max(cfg.x_far_kappa / c.kappa, base + 30.0 / c.kappa)


def _decaying_tail(c: _Coeffs, x: float):
    # y ~ e^{-kappa s} s^{-A/(2 kappa)}, s = x - x0
    s = x - c.x0
    return 1.0, -c.kappa - c.A / (2 * c.kappa * s)


def _from_infinity(p, E, x_stop, cfg, n_eval=0):
    c = _coeffs(p, E)
    xf = far_point(p, E, cfg)
    y, dy = _decaying_tail(c, xf)
    return integrate_effective(p, E, xf, x_stop, y, dy, cfg, n_eval=n_eval)


def solution_at_origin(p: ModelParams, E: float, regime: Regime,
                       cfg: ShootingConfig = DEFAULT_SHOOTING):
    """(psi(0), psi'(0)) of the solution obeying the outer boundary condition.

    Not available for alpha/E < 0, which has no singular point; see
    ``mismatch`` for that case.
    """
    regime = Regime(regime)
    c = _coeffs(p, E)
    if regime is Regime.POS_INTERVAL:
        x, y, dy = frobenius_start(p, E, -1, "regular", cfg)
        return integrate_effective(p, E, x, 0.0, y, dy, cfg).at_end()
    if regime is Regime.POS_WHOLE:
        xr, _, _ = frobenius_start(p, E, 1, "regular", cfg)
        yo, dyo = _from_infinity(p, E, xr, cfg).at_end()
        s = xr - c.x0
        y1, dy1 = frobenius_series(c.A, c.Et, s, "regular", cfg.frobenius_terms)
        y2, dy2 = frobenius_series(c.A, c.Et, s, "log", cfg.frobenius_terms)
        C, D = np.linalg.solve([[y1, y2], [dy1, dy2]], [yo, dyo])
        y1, dy1 = frobenius_series(c.A, c.Et, -s, "regular", cfg.frobenius_terms)
        y2, dy2 = frobenius_series(c.A, c.Et, -s, "log", cfg.frobenius_terms)
        return integrate_effective(p, E, c.x0 - s, 0.0, C * y1 + D * y2,
                                   C * dy1 + D * dy2, cfg).at_end()
    raise ValueError("use mismatch() for alpha/E < 0")


def mismatch(p: ModelParams, E: float, regime: Regime, parity: Parity,
             cfg: ShootingConfig = DEFAULT_SHOOTING) -> float:
    """Bounded shooting function; changes sign at eigenvalues."""
    regime, parity = Regime(regime), Parity(parity)
    k = math.sqrt(2 * abs(E) * (p.m + E))
    if regime.positive_ratio:
        if not p.alpha / E > 0:
            raise ValueError("alpha/E > 0 required")
        y, dy = solution_at_origin(p, E, regime, cfg)
        q = dy / k
        r = math.hypot(y, q)
        return (y if parity is Parity.ODD else q) / r
    if not (p.alpha < 0 < E):
        raise ValueError("alpha/E < 0 needs alpha < 0 < E")
    xt = outer_turning_point(p, E)
    xm = 0.5 * xt if xt > 0 else 1.0 / _coeffs(p, E).kappa
    y0, dy0 = (0.0, 1.0) if parity is Parity.ODD else (1.0, 0.0)
    yl, dyl = integrate_effective(p, E, 0.0, xm, y0, dy0, cfg).at_end()
    yr, dyr = _from_infinity(p, E, xm, cfg).at_end()
    # normalized Wronskian of the inner and outer solutions
    w = yl * dyr - yr * dyl
    return w / (k * math.hypot(yl, dyl / k) * math.hypot(yr, dyr / k))


def shoot_eigenvalue(p: ModelParams, regime: Regime, parity: Parity,
                     bracket: tuple[float, float],
                     cfg: ShootingConfig = DEFAULT_SHOOTING) -> float:
    lo, hi = bracket
    f = lambda E: mismatch(p, E, regime, parity, cfg)
    flo, fhi = f(lo), f(hi)
    if not flo * fhi < 0:
        raise ShootingError(f"no sign change of the shooting function on [{lo}, {hi}]")
    return optimize.brentq(f, lo, hi, xtol=1e-13 * p.m, rtol=1e-15, maxiter=200)


def shoot_near(p: ModelParams, regime: Regime, parity: Parity, E_guess: float,
               half_width: float, cfg: ShootingConfig = DEFAULT_SHOOTING, steps: int = 16):
    """Scan a small window around a guess for the sign change closest to it."""
    lo = max(E_guess - half_width, -p.m + p.eps_E) if E_guess < 0 else max(E_guess - half_width, p.eps_E)
    hi = min(E_guess + half_width, -p.eps_E) if E_guess < 0 else min(E_guess + half_width, p.m - p.eps_E)
    grid = np.linspace(lo, hi, steps + 1)
    vals = [mismatch(p, e, regime, parity, cfg) for e in grid]
    best = None
    for i in range(steps):
        if vals[i] * vals[i + 1] < 0:
            mid = 0.5 * (grid[i] + grid[i + 1])
            if best is None or abs(mid - E_guess) < abs(0.5 * sum(best) - E_guess):
                best = (grid[i], grid[i + 1])
    if best is None:
        raise ShootingError(f"no eigenvalue within {half_width} of {E_guess}")
    return shoot_eigenvalue(p, regime, parity, best, cfg)


# ---------------------------------------------------------------------------
# eigenfunction diagnostics


def eigenfunction(p: ModelParams, E: float, regime: Regime, parity: Parity,
                  cfg: ShootingConfig = DEFAULT_SHOOTING, n_eval: int = 2000) -> Trajectory:
    """psi on x >= 0 from the outer boundary condition (not normalized).

    The interval regime stops at x0; the others extend to x_far.
    """
    regime = Regime(regime)
    c = _coeffs(p, E)
    if regime is Regime.POS_INTERVAL:
        x, y, dy = frobenius_start(p, E, -1, "regular", cfg)
        t = integrate_effective(p, E, x, 0.0, y, dy, cfg, n_eval=n_eval)
        return Trajectory(t.x[::-1], t.y[::-1], t.dy[::-1])
    if regime is Regime.POS_WHOLE:
        xr, _, _ = frobenius_start(p, E, 1, "regular", cfg)
        outer = _from_infinity(p, E, xr, cfg, n_eval=n_eval)
        s = xr - c.x0
        y1, dy1 = frobenius_series(c.A, c.Et, s, "regular", cfg.frobenius_terms)
        y2, dy2 = frobenius_series(c.A, c.Et, s, "log", cfg.frobenius_terms)
        C, D = np.linalg.solve([[y1, y2], [dy1, dy2]], outer.at_end())
        y1, dy1 = frobenius_series(c.A, c.Et, -s, "regular", cfg.frobenius_terms)
        y2, dy2 = frobenius_series(c.A, c.Et, -s, "log", cfg.frobenius_terms)
        inner = integrate_effective(p, E, c.x0 - s, 0.0, C * y1 + D * y2,
                                    C * dy1 + D * dy2, cfg, n_eval=n_eval)
        return Trajectory(np.concatenate([inner.x[::-1], outer.x[::-1]]),
                          np.concatenate([inner.y[::-1], outer.y[::-1]]),
                          np.concatenate([inner.dy[::-1], outer.dy[::-1]]))
    xt = outer_turning_point(p, E)
    xm = 0.5 * xt if xt > 0 else 1.0 / c.kappa
    outer = _from_infinity(p, E, xm, cfg, n_eval=n_eval)
    # scale the inward solution to continue the outward one at xm
    y0, dy0 = (0.0, 1.0) if Parity(parity) is Parity.ODD else (1.0, 0.0)
    inner = integrate_effective(p, E, 0.0, xm, y0, dy0, cfg, n_eval=n_eval)
    ym = inner.y[-1]
    scale = ym / outer.y[-1] if outer.y[-1] != 0 else 1.0
    return Trajectory(np.concatenate([inner.x, outer.x[::-1][1:]]),
                      np.concatenate([inner.y, scale * outer.y[::-1][1:]]),
                      np.concatenate([inner.dy, scale * outer.dy[::-1][1:]]))


def count_nodes(t: Trajectory, x_min: float = 0.0, rel: float = 1e-8) -> int:
    """Sign changes of psi on x > x_min, ignoring samples below rel * max|psi|."""
    y = t.y[t.x > x_min]
    big = np.abs(y) > rel * np.max(np.abs(t.y))
    s = np.sign(y[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))
