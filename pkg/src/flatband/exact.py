"""Exact bound-state energies from the confluent hypergeometric solutions.

Each regime/parity pair gives a transcendental equation in E.  The raw
expressions (``residual_*``) are the textbook forms up to a positive,
pole-free factor.  Root finding uses a bounded angle built from
psi(0) and psi'(0) instead, since the raw forms span many decades.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import specfun, wkb
from .model import BoundState, Method, ModelParams, Parity, Regime, hypergeom_args

log = logging.getLogger(__name__)

# grid points per radian of WKB phase
DEFAULT_GRID_DENSITY = 3.0
_ROOT_ACCEPT = 1e-6
_PHASE_FLOOR = 0.05
_MAX_SQRT_AZ = 150.0


class WindowError(ValueError):
    """Energy outside the guarded search window."""


def _check_window(p: ModelParams, E: float, regime: Regime):
    if not p.eps_E <= abs(E) <= p.m - p.eps_E:
        raise WindowError(f"E={E} outside the guarded gap window")
    if regime is Regime.NEG_RATIO and not (p.alpha < 0 < E):
        raise WindowError("alpha/E < 0 needs alpha < 0 < E")
    if regime.positive_ratio and not p.alpha / E > 0:
        raise WindowError("alpha/E > 0 required")


def _boundary_values(p: ModelParams, E: float, regime: Regime):
    """(psi(0), psi'(0), odd_expr, even_expr), all sharing positive factors.

    psi = s e^{-kappa s} F(2 kappa s), s = x - x0.  For F = U the derivative
    at the origin is e^{-kappa s0} [(1 - z0/2) U(a,2,z0) + z0 U'(a,2,z0)],
    which equals e^{-kappa s0}/2 times U(a-1,0,z0) - 2 U(a-1,1,z0).
    """
    h = hypergeom_args(p, E)
    a, z0, x0 = h.a, h.z0, h.x0
    if regime is Regime.POS_INTERVAL:
        m2 = specfun.kummer_m(a, 2, z0)
        m3 = specfun.kummer_m(a + 1, 3, z0)
        kappa, alpha, m = h.kappa, p.alpha, p.m
        even = -4 * E * (2 * E + alpha * kappa) * m2 + alpha * (4 * E * kappa + alpha * (m + E) ** 2) * m3
        return -x0 * m2, -even / (8 * E * E), m2, even
    # U(a,2,.) and U(a-1,1,.) carry the same Gamma factor under either scaling
    scaling = "reflect" if regime is Regime.NEG_RATIO else "gamma"
    u2 = specfun.tricomi_u_scaled(a, 2, z0, scaling, want_im=False).re
    u1 = specfun.tricomi_u_scaled(a - 1, 1, z0, scaling, want_im=False).re
    even = z0 * u2 - 2 * u1  # U(a-1,0,z) = z U(a,2,z)
    return -x0 * u2, even / 2, u2, even


def residual_negratio(p: ModelParams, E: float, parity: Parity) -> float:
    """U(a,2,z0) (odd) or U(a-1,0,z0) - 2U(a-1,1,z0) (even), divided by Gamma(2-a)."""
    _check_window(p, E, Regime.NEG_RATIO)
    _, _, odd, even = _boundary_values(p, E, Regime.NEG_RATIO)
    return odd if Parity(parity) is Parity.ODD else even


def residual_interval(p: ModelParams, E: float, parity: Parity) -> float:
    """M(a,2,z0) (odd) or the two-term M(a,2,z0), M(a+1,3,z0) combination (even)."""
    _check_window(p, E, Regime.POS_INTERVAL)
    _, _, odd, even = _boundary_values(p, E, Regime.POS_INTERVAL)
    return odd if Parity(parity) is Parity.ODD else even


def residual_wholespace(p: ModelParams, E: float, parity: Parity) -> float:
    """Real parts of the U expressions, times Gamma(a-1) > 0."""
    _check_window(p, E, Regime.POS_WHOLE)
    _, _, odd, even = _boundary_values(p, E, Regime.POS_WHOLE)
    return odd if Parity(parity) is Parity.ODD else even


RESIDUALS = {
    Regime.NEG_RATIO: residual_negratio,
    Regime.POS_INTERVAL: residual_interval,
    Regime.POS_WHOLE: residual_wholespace,
}


def residual(p: ModelParams, E: float, regime: Regime, parity: Parity) -> float:
    return RESIDUALS[Regime(regime)](p, E, parity)


def normalized_residual(p: ModelParams, E: float, regime: Regime, parity: Parity) -> float:
    """Sine or cosine of the boundary angle of (psi(0), psi'(0)/k) at x = 0.

    Bounded by 1, free of poles, and zero exactly where the raw residual is.
    """
    regime = Regime(regime)
    _check_window(p, E, regime)
    P, Q, _, _ = _boundary_values(p, E, regime)
    q = Q / math.sqrt(2 * abs(E) * (p.m + E))
    r = math.hypot(P, q)
    if not math.isfinite(r) or r == 0:
        # rescale when the components overflow
        s = max(abs(P), abs(q))
        if not math.isfinite(s) or s == 0:
            return math.nan
        P, q = P / s, q / s
        r = math.hypot(P, q)
    return (P if Parity(parity) is Parity.ODD else q) / r


@dataclass(frozen=True)
class EnergyEquation:
    """Residual of one regime/parity sector at fixed parameters."""

    params: ModelParams
    regime: Regime
    parity: Parity
    normalized: bool = True

    def __call__(self, E: float) -> float:
        if self.normalized:
            return normalized_residual(self.params, E, self.regime, self.parity)
        return residual(self.params, E, self.regime, self.parity)


# ---------------------------------------------------------------------------
# critical strengths


@dataclass(frozen=True)
class CriticalStrength:
    regime: Regime
    parity: Parity
    k: int
    alpha_c_exact: float
    alpha_c_asymptotic: float

    @property
    def rel_diff(self) -> float:
        return abs(self.alpha_c_exact - self.alpha_c_asymptotic) / self.alpha_c_exact


def _interval_even_condition(alpha: float) -> float:
    return alpha * specfun.bessel_j(2, 2 * alpha) - specfun.bessel_j(1, 2 * alpha)


def critical_alpha_exact(regime: Regime, parity: Parity, k: int) -> float:
    """k-th strength at which a level of the sector touches E = m."""
    regime, parity = Regime(regime), Parity(parity)
    if k < 1:
        raise ValueError("k must be >= 1")
    if regime is Regime.POS_INTERVAL:
        if parity is Parity.ODD:
            return specfun.bessel_zero("J", 1, k) / 2
        f = _interval_even_condition
        step, lo, found = 0.02, 1e-3, 0
        flo = f(lo)
        while True:
            hi = lo + step
            fhi = f(hi)
            if flo * fhi < 0:
                found += 1
                if found == k:
                    return optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)
            lo, flo = hi, fhi
    if regime is Regime.POS_WHOLE:
        return specfun.bessel_zero("Y", 1 if parity is Parity.ODD else 0, k) / 2
    raise ValueError("critical strengths exist for alpha/E > 0 only")


_CRIT_OFFSET = {
    (Regime.POS_INTERVAL, Parity.ODD): 0.25,
    (Regime.POS_INTERVAL, Parity.EVEN): -0.25,
    (Regime.POS_WHOLE, Parity.ODD): -0.25,
    (Regime.POS_WHOLE, Parity.EVEN): -0.75,
}


def critical_alpha_asymptotic(regime: Regime, parity: Parity, n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    try:
        d = _CRIT_OFFSET[(Regime(regime), Parity(parity))]
    except KeyError:
        raise ValueError("critical strengths exist for alpha/E > 0 only") from None
    return (n + d) * math.pi / 2


def critical_strength(regime: Regime, parity: Parity, k: int) -> CriticalStrength:
    return CriticalStrength(Regime(regime), Parity(parity), k,
                            critical_alpha_exact(regime, parity, k),
                            critical_alpha_asymptotic(regime, parity, k))


def levels_lost(regime: Regime, parity: Parity, alpha: float) -> int:
    """Number of E > 0 levels already pushed past E = m at strength alpha."""
    if not Regime(regime).positive_ratio or alpha <= 0:
        return 0
    k = 0
    while critical_alpha_exact(regime, parity, k + 1) < alpha:
        k += 1
    return k


# ---------------------------------------------------------------------------
# root search


def _energy_sign(regime: Regime, alpha: float) -> int:
    if regime is Regime.NEG_RATIO:
        return 1
    return 1 if alpha > 0 else -1


def _phase_grid(p: ModelParams, regime: Regime, sign: int, n_max: int, density: float,
                window):
    """Energies spaced uniformly in WKB phase, up to the level n_max + 1."""
    m, alpha = p.m, p.alpha
    lo, hi = wkb.energy_window(regime, sign, m, p.eps_E)
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    if not lo < hi:
        return np.empty(0)
    # levels accumulate at E = m (alpha/E < 0) or at E = 0 (alpha/E > 0)
    acc = m if regime is Regime.NEG_RATIO else 0.0
    d = np.geomspace(min(abs(acc - lo), abs(acc - hi)), max(abs(acc - lo), abs(acc - hi)), 4000)
    E = np.clip(acc - d if acc >= hi else acc + d, lo, hi)
    phase = np.array([wkb.wkb_phase(regime, e, alpha, m) for e in E])
    order = np.argsort(phase)
    phase, E = phase[order], E[order]
    ph_max = min(phase[-1], (n_max + 1.5) * math.pi)
    ph_min = phase[0]
    if regime is Regime.NEG_RATIO:
        # no level sits this low, and as E -> 0+ the U series cancels like e^{|alpha|/E}
        e_floor = abs(alpha) / (2 * _MAX_SQRT_AZ)
        ph_min = max(ph_min, _PHASE_FLOOR, float(np.interp(e_floor, E, phase)))
    npts = max(int(math.ceil((ph_max - ph_min) * density)), 16)
    grid = np.interp(np.linspace(ph_min, ph_max, npts + 1), phase, E)
    return np.unique(np.clip(grid, lo, hi))


def boundary_angle(p: ModelParams, E: float, regime: Regime) -> float:
    """Angle of (psi(0), psi'(0)/k); odd levels sit at 0 mod pi, even at pi/2 mod pi."""
    regime = Regime(regime)
    _check_window(p, E, regime)
    P, Q, _, _ = _boundary_values(p, E, regime)
    return math.atan2(P, Q / math.sqrt(2 * abs(E) * (p.m + E)))


def _wrap(d):
    return (d + math.pi) % (2 * math.pi) - math.pi


class _AngleScan:
    """Boundary angle on an energy grid, refined until adjacent samples are close."""

    max_step = math.pi / 3
    max_depth = 12

    def __init__(self, p, regime, grid):
        self.p, self.regime = p, regime
        self.cache = {}
        E = [float(e) for e in grid]
        th = [self.angle(e) for e in E]
        out_E, out_th = [E[0]], [th[0]]
        for i in range(len(E) - 1):
            self._fill(E[i], th[i], E[i + 1], th[i + 1], 0, out_E, out_th)
        self.E, self.theta = out_E, out_th

    def angle(self, E):
        v = self.cache.get(E)
        if v is None:
            try:
                v = boundary_angle(self.p, E, self.regime)
            except (specfun.ConvergenceError, OverflowError, ValueError) as exc:
                log.warning("angle evaluation failed at E=%.12g: %s", E, exc)
                v = math.nan
            self.cache[E] = v
        return v

    def _fill(self, a, ta, b, tb, depth, out_E, out_th):
        jump = abs(_wrap(tb - ta))
        if depth < self.max_depth and math.isfinite(jump) and jump > self.max_step:
            c = 0.5 * (a + b)
            tc = self.angle(c)
            self._fill(a, ta, c, tc, depth + 1, out_E, out_th)
            self._fill(c, tc, b, tb, depth + 1, out_E, out_th)
            return
        out_E.append(b)
        out_th.append(tb)

    def roots(self, parity: Parity, m: float):
        f = EnergyEquation(self.p, self.regime, parity)
        g = (math.sin if parity is Parity.ODD else math.cos)
        vals = [g(t) for t in self.theta]
        found = []
        for i in range(len(self.E) - 1):
            va, vb = vals[i], vals[i + 1]
            if not (math.isfinite(va) and math.isfinite(vb)):
                continue
            if va == 0:
                found.append((self.E[i], 0.0))
            elif va * vb < 0:
                E = optimize.brentq(f, self.E[i], self.E[i + 1], xtol=1e-15 * m,
                                    rtol=4 * np.finfo(float).eps, maxiter=200)
                E, r = _polish(f, E)
                if abs(r) <= _ROOT_ACCEPT:
                    found.append((E, r))
                else:
                    # jump of the angle, not a zero
                    log.warning("rejected bracket [%.12g, %.12g]: residual %.3g",
                                self.E[i], self.E[i + 1], r)
        return found


def _polish(f, E, ulps=4):
    """Best float neighbour of a bracketed root; matters where dE/dphase is tiny."""
    r = f(E)
    if abs(r) <= 1e-11:
        return E, r
    best = (abs(r), E, r)
    for direction in (-np.inf, np.inf):
        e = E
        for _ in range(ulps):
            e = float(np.nextafter(e, direction))
            v = f(e)
            if abs(v) < best[0]:
                best = (abs(v), e, v)
    return best[1], best[2]


def find_all_parities(p: ModelParams, regime: Regime,
                      window: tuple[float, float] | None = None,
                      grid_density: float = DEFAULT_GRID_DENSITY, n_max: int = 10,
                      energy_sign: int | None = None,
                      parities=(Parity.ODD, Parity.EVEN)) -> dict[Parity, list[BoundState]]:
    """Levels of both parity sectors from one shared angle scan."""
    regime = Regime(regime)
    parities = [Parity(q) for q in parities]
    empty = {q: [] for q in parities}
    if p.alpha == 0 or n_max < 1:
        return empty
    if regime is Regime.NEG_RATIO and p.alpha > 0:
        return empty
    sign = _energy_sign(regime, p.alpha) if energy_sign is None else energy_sign
    if regime.positive_ratio and sign * p.alpha < 0:
        return empty
    grid = _phase_grid(p, regime, sign, n_max, grid_density, window)
    if grid.size < 2:
        return empty
    scan = _AngleScan(p, regime, grid)
    return {q: _label(p, regime, q, sign, scan.roots(q, p.m), n_max) for q in parities}


def find_bound_states(p: ModelParams, regime: Regime, parity: Parity,
                      window: tuple[float, float] | None = None,
                      grid_density: float = DEFAULT_GRID_DENSITY,
                      n_max: int = 10, energy_sign: int | None = None) -> list[BoundState]:
    """All levels of one sector with index n <= n_max, sorted by n."""
    parity = Parity(parity)
    return find_all_parities(p, regime, window, grid_density, n_max, energy_sign,
                             parities=(parity,))[parity]


def _label(p, regime, parity, sign, roots, n_max):
    """Assign n by counting from the low-phase end of the window."""
    if regime is Regime.NEG_RATIO or sign < 0:
        roots.sort(key=lambda t: t[0])
        offset = 0
    else:
        roots.sort(key=lambda t: -t[0])
        offset = levels_lost(regime, parity, p.alpha)
    states = []
    for i, (E, r) in enumerate(roots):
        n = offset + i + 1
        if n > n_max:
            break
        n_wkb = wkb.wkb_index(regime, E, p.alpha, parity, p.m)
        if abs(n_wkb - n) > 0.75:
            log.warning("level %d at E=%.10g has WKB index %.2f; suspected missed root",
                        n, E, n_wkb)
        states.append(BoundState(energy=float(E), n=n, parity=parity, regime=regime,
                                 method=Method.EXACT, alpha=p.alpha, residual=float(r)))
    return states



def find_level(p: ModelParams, regime: Regime, parity: Parity, n: int, **kw) -> BoundState:
    for s in find_bound_states(p, regime, parity, n_max=n, **kw):
        if s.n == n:
            return s
    raise LookupError(f"no level n={n} ({Regime(regime).value}, {Parity(parity).value}) "
                      f"at alpha={p.alpha}")


# ---------------------------------------------------------------------------
# alpha scans


@dataclass
class SpectrumScan:
    alpha_grid: list[float]
    states: list[BoundState]
    window: tuple[float, float]
    failures: dict[float, str] = field(default_factory=dict)


def _scan_point(args):
    p, regime, parity, n_max, density = args
    try:
        return find_bound_states(p, regime, parity, n_max=n_max, grid_density=density), None
    except Exception as exc:  # recorded per point, scan continues
        return [], f"{type(exc).__name__}: {exc}"


def scan_alpha(p_template: ModelParams, alpha_grid, regime: Regime, parity: Parity,
               n_max: int = 10, grid_density: float = DEFAULT_GRID_DENSITY,
               workers: int = 1) -> SpectrumScan:
    regime, parity = Regime(regime), Parity(parity)
    alphas = [float(a) for a in alpha_grid]
    jobs = [(p_template.with_alpha(a), regime, parity, n_max, grid_density) for a in alphas]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_point, jobs))
    else:
        results = [_scan_point(j) for j in jobs]
    states, failures = [], {}
    for a, (st, err) in zip(alphas, results):
        if err is not None:
            failures[a] = err
        states.extend(st)
    states.sort(key=lambda s: (s.alpha, s.n))
    eps, m = p_template.eps_E, p_template.m
    window = (eps, m - eps) if regime is Regime.NEG_RATIO else (-m + eps, m - eps)
    return SpectrumScan(alphas, states, window, failures)


# ---------------------------------------------------------------------------
# inverse problem: strength for a prescribed energy


def alpha_for_energy(p_template: ModelParams, regime: Regime, parity: Parity, n: int,
                     E: float) -> float:
    """Strength alpha whose n-th level of the sector sits at energy E.

    At fixed E the WKB phase is linear in alpha, which seeds a bracket.
    """
    regime, parity = Regime(regime), Parity(parity)
    if regime is Regime.NEG_RATIO and E <= 0:
        raise ValueError("alpha/E < 0 levels have E > 0")
    sgn = -1.0 if regime is Regime.NEG_RATIO else math.copysign(1.0, E)
    g = wkb.wkb_phase(regime, E, sgn, p_template.m)  # phase per unit |alpha|
    target = wkb.wkb_target(regime, 1 if E > 0 else -1, parity, n)
    lo_ph = max(target - 0.6 * math.pi, 0.02 * math.pi)
    hi_ph = target + 0.6 * math.pi
    al = np.linspace(lo_ph / g, hi_ph / g, 241)

    def f(x):
        return normalized_residual(p_template.with_alpha(sgn * x), E, regime, parity)

    vals = np.array([f(x) for x in al])
    best = None
    for i in range(al.size - 1):
        if vals[i] * vals[i + 1] < 0:
            x = optimize.brentq(f, al[i], al[i + 1], xtol=1e-15, rtol=1e-15)
            if abs(f(x)) > _ROOT_ACCEPT:
                continue
            cand = sgn * x
            lvl = find_bound_states(p_template.with_alpha(cand), regime, parity,
                                    n_max=n + 1)
            if any(s.n == n and abs(s.energy - E) < 1e-8 * p_template.m for s in lvl):
                best = cand
                break
    if best is None:
        raise LookupError(f"no strength puts level n={n} at E={E}")
    return best
