"""Invariant and acceptance checks with measured discrepancies.

Each check returns a ``CheckResult``; ``run_all`` times them and is what
``flatband verify`` prints.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np
from scipy import special

from . import exact, shooting, specfun, wavefunction, wkb
from .model import ModelParams, Parity, Regime


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_dict(self):
        d = asdict(self)
        d["measured"] = _finite_or_str(self.measured)
        return d


def _finite_or_str(v):
    return v if isinstance(v, (int, float)) and math.isfinite(v) else str(v)


def _rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------
# special functions


def check_specfun_identities(seed: int = 7) -> CheckResult:
    # M(1,2,z) = (e^z - 1)/z on 200 points avoiding z = 0
    zs = np.linspace(-20, 20, 201)
    zs = zs[zs != 0][:200]
    e_m = max(_rel(specfun.kummer_m(1, 2, z), math.expm1(z) / z) for z in zs)
    # x U(1,2,x) = 1
    xs = np.linspace(0.1, 50, 200)
    e_u = max(abs(x * specfun.tricomi_u(1, 2, x).re - 1) for x in xs)
    # Im U(a,2,z+i0) = pi M(a,2,z) / Gamma(a-1), Im U from mpmath as the oracle
    rng = np.random.default_rng(seed)
    e_im = 0.0
    for _ in range(100):
        a = float(rng.uniform(1.2, 8.0))
        z = -float(rng.uniform(0.2, 20.0))
        with mpmath.workprec(120):
            u = mpmath.hyperu(a, 2, mpmath.mpc(z, mpmath.mpf(2) ** -100))
            ref_im = float(mpmath.im(u))
            scale = float(abs(u))
        ours = math.pi * specfun.kummer_m(a, 2, z) / math.gamma(a - 1)
        e_im = max(e_im, abs(ours - ref_im) / max(scale, 1e-300))
    passed = e_m <= 1e-10 and e_u <= 1e-9 and e_im <= 1e-9
    ratio = max(e_m / 1e-10, e_u / 1e-9, e_im / 1e-9)
    return CheckResult("specfun_identities", passed, ratio, 1.0,
                       {"M(1,2,z) rel err": e_m, "x U(1,2,x) - 1": e_u, "Im U relation": e_im,
                        "note": "measured is the worst error over its own tolerance"})


def check_bessel_limit() -> CheckResult:
    z = 4.0
    target = math.gamma(2) * z ** -0.5 * special.jv(1, 2 * math.sqrt(z))
    errs = {}
    for a in (1e1, 1e2, 1e3, 1e4):
        errs[a] = abs(specfun.kummer_m(a, 2, -z / a) - target)
    seq = list(errs.values())
    decreasing = all(x > y for x, y in zip(seq, seq[1:]))
    passed = errs[1e4] <= 1e-3 and decreasing
    return CheckResult("bessel_limit", passed, errs[1e4], 1e-3,
                       {"errors": {f"{k:g}": v for k, v in errs.items()}, "decreasing": decreasing})


# ---------------------------------------------------------------------------
# critical strengths


CRITICAL_REFERENCE = {
    (Regime.POS_INTERVAL, Parity.ODD): 1.9158529851,
    (Regime.POS_WHOLE, Parity.ODD): 1.0985706630,
    (Regime.POS_WHOLE, Parity.EVEN): 0.4467884832,
}


def check_critical_strengths() -> CheckResult:
    detail = {}
    worst = 0.0
    ok = True
    oracle = {
        (Regime.POS_INTERVAL, Parity.ODD): lambda k: special.jn_zeros(1, k)[-1] / 2,
        (Regime.POS_WHOLE, Parity.ODD): lambda k: special.yn_zeros(1, k)[-1] / 2,
        (Regime.POS_WHOLE, Parity.EVEN): lambda k: special.yn_zeros(0, k)[-1] / 2,
    }
    for key, ref in CRITICAL_REFERENCE.items():
        regime, parity = key
        ex = exact.critical_alpha_exact(regime, parity, 1)
        err = max(abs(ex - ref), abs(ex - oracle[key](1)))
        worst = max(worst, err)
        r1 = exact.critical_strength(regime, parity, 1).rel_diff
        r4 = exact.critical_strength(regime, parity, 4).rel_diff
        ok &= err <= 1e-8 and r1 <= 0.30 and r4 <= 0.05
        detail[f"{regime.value}-{parity.value}"] = {"alpha_c": ex, "abs_err": err,
                                                    "rel_diff_n1": r1, "rel_diff_n4": r4}
    return CheckResult("critical_strengths", ok, worst, 1e-8, detail)


# ---------------------------------------------------------------------------
# spectrum tails


def check_hydrogen_tail(alpha: float = -1.0, ns=range(8, 16), m: float = 1.0) -> CheckResult:
    p = ModelParams(alpha, m)
    states = {s.n: s for s in exact.find_bound_states(p, Regime.NEG_RATIO, Parity.ODD,
                                                      n_max=max(ns))}
    dev = {}
    for n in ns:
        E = states[n].energy
        dev[n] = abs((m - E) * 2 * (n - 0.25) ** 2 / (m * alpha**2) - 1)
    worst = max(dev.values())
    return CheckResult("hydrogen_tail", worst <= 0.05, worst, 0.05, {"deviation_by_n": dev})


def check_flatband_law(alpha: float = 0.1, ns=range(5, 13), m: float = 1.0) -> CheckResult:
    p = ModelParams(alpha, m)
    dev = {}
    for parity in Parity:
        d = wkb.delta(Regime.POS_INTERVAL, 1, parity)
        states = {s.n: s for s in exact.find_bound_states(p, Regime.POS_INTERVAL, parity,
                                                          n_max=max(ns))}
        for n in ns:
            dev[f"{parity.value}-{n}"] = abs(states[n].energy * 4 * (n + d) / (m * alpha) - 1)
    worst = max(dev.values())
    return CheckResult("flatband_1_over_n", worst <= 0.1, worst, 0.1, {"deviation": dev})


def check_linear_onset(alphas=(0.02, 0.01, 0.005)) -> CheckResult:
    slopes = {}
    for a in alphas:
        E = exact.find_level(ModelParams(a), Regime.POS_INTERVAL, Parity.EVEN, 1).energy
        slopes[a] = E / a
    v = list(slopes.values())
    spread = (max(v) - min(v)) / np.mean(v)
    return CheckResult("linear_onset", spread <= 0.02, spread, 0.02, {"E_over_alpha": slopes})


# alpha ranges of the reference spectrum plots, one per regime and energy sign
SPECTRUM_GRIDS = (
    (Regime.NEG_RATIO, (-3.0, -0.05)),
    (Regime.POS_INTERVAL, (0.05, 3.0)),
    (Regime.POS_INTERVAL, (-3.0, -0.05)),
    (Regime.POS_WHOLE, (0.05, 2.0)),
    (Regime.POS_WHOLE, (-3.0, -0.05)),
)


def check_wkb_overlay(steps: int = 12, n_max: int = 6, m: float = 1.0) -> CheckResult:
    worst = 0.0
    where = None
    per_grid = {}
    for regime, (lo, hi) in SPECTRUM_GRIDS:
        gw = 0.0
        for a in np.linspace(lo, hi, steps):
            a = float(a)
            levels = exact.find_all_parities(ModelParams(a, m), regime, n_max=n_max)
            for parity, states in levels.items():
                for s in states:
                    if s.n < 2:
                        continue
                    sign = 1 if s.energy > 0 else -1
                    Ew = wkb.wkb_energy(regime, sign, parity, s.n, a, m)
                    d = abs(Ew - s.energy) / m
                    gw = max(gw, d)
                    if d > worst:
                        worst, where = d, {"alpha": a, "parity": parity.value, "n": s.n,
                                           "E_exact": s.energy, "E_wkb": Ew}
        per_grid[f"{regime.value} [{lo}, {hi}]"] = gw
    return CheckResult("wkb_overlay", worst <= 0.05, worst, 0.05,
                       {"worst_state": where, "per_grid": per_grid})


def check_parity_degeneracy(alpha: float = -5.0, pairs: int = 3, m: float = 1.0) -> CheckResult:
    p = ModelParams(alpha, m)
    lv = exact.find_all_parities(p, Regime.POS_INTERVAL, n_max=pairs)
    diffs = {}
    for n in range(1, pairs + 1):
        eo = next(s.energy for s in lv[Parity.ODD] if s.n == n)
        ee = next(s.energy for s in lv[Parity.EVEN] if s.n == n)
        diffs[n] = {"odd": eo, "even": ee, "diff": abs(eo - ee) / m}
    worst = max(d["diff"] for d in diffs.values())
    return CheckResult("parity_degeneracy", worst <= 1e-3, worst, 1e-3, {"pairs": diffs})


def check_threshold_accumulation(alpha: float = -1.0, deltas=(0.1, 0.05, 0.025),
                                 m: float = 1.0) -> CheckResult:
    """Levels below m - delta, both parities; grows as delta halves iff no shell is empty."""
    p = ModelParams(alpha, m)
    counts = {}
    for d in deltas:
        total = 0
        for parity in Parity:
            total += len(exact.find_bound_states(p, Regime.NEG_RATIO, parity,
                                                 window=(p.eps_E, m - d), n_max=10_000))
        counts[d] = total
    seq = [counts[d] for d in deltas]
    increasing = all(b > a for a, b in zip(seq, seq[1:]))
    shells = [b - a for a, b in zip(seq, seq[1:])]
    return CheckResult("threshold_accumulation", increasing, float(min(shells)), 1.0,
                       {"levels_below_m_minus_delta": counts, "new_levels_per_halving": shells})


# ---------------------------------------------------------------------------
# oracles


ORACLE_CASES = (
    (Regime.NEG_RATIO, -1.0, 3),
    (Regime.POS_INTERVAL, 0.5, 3),
    (Regime.POS_WHOLE, 0.5, 4),
)


def check_oracle_equivalence(m: float = 1.0) -> CheckResult:
    worst = 0.0
    counts = {}
    rows = []
    for regime, alpha, n_max in ORACLE_CASES:
        p = ModelParams(alpha, m)
        counts[regime.value] = 0
        for parity, states in exact.find_all_parities(p, regime, n_max=n_max).items():
            for s in states:
                Es = shooting.shoot_near(p, regime, parity, s.energy, 1e-3 * abs(s.energy))
                d = abs(Es - s.energy) / m
                worst = max(worst, d)
                counts[regime.value] += d <= 1e-5
                rows.append({"regime": regime.value, "parity": parity.value, "n": s.n,
                             "E_exact": s.energy, "E_shoot": Es, "diff": d})
    enough = all(c >= 5 for c in counts.values())
    return CheckResult("oracle_equivalence", enough and worst <= 1e-5, worst, 1e-5,
                       {"agreeing_states": counts, "states": rows})


def check_wavefunctions(m: float = 1.0) -> CheckResult:
    detail = {}
    worst_res = 0.0
    ok = True
    for ws in wavefunction.figure_states(ModelParams(-1.0, m)):
        p = ModelParams(ws.alpha, m)
        sgn = -1.0 if ws.parity is Parity.ODD else 1.0
        # sampled grid is symmetric, so psi[::-1] is psi(-x)
        sym = float(np.max(np.abs(ws.psi - sgn * ws.psi[::-1])))
        res = wavefunction.component_residual(p, ws)
        entry = {"alpha": ws.alpha, "E": ws.E, "component_residual": res, "parity_error": sym}
        good = res <= 1e-7 and sym <= 1e-9
        if ws.regime is Regime.POS_WHOLE:
            x0 = ws.alpha / (2 * ws.E)
            psi_x0, _ = wavefunction.psi_line(p, ws.E, ws.regime, ws.parity, [x0, -x0])
            entry["psi_at_x0"] = [float(v) for v in psi_x0]
            good &= bool(np.all(np.isfinite(psi_x0)) and np.all(np.abs(psi_x0) > 0))
        ok &= good
        worst_res = max(worst_res, res)
        detail[f"{ws.regime.value}-{ws.parity.value}-n{ws.n}"] = entry
    return CheckResult("wavefunctions", ok, worst_res, 1e-7, detail)


CHECKS = (
    ("1", check_specfun_identities),
    ("2", check_bessel_limit),
    ("3", check_critical_strengths),
    ("4", check_hydrogen_tail),
    ("5", check_flatband_law),
    ("6", check_linear_onset),
    ("7", check_wkb_overlay),
    ("8", check_oracle_equivalence),
    ("9", check_parity_degeneracy),
    ("10", check_threshold_accumulation),
    ("11", check_wavefunctions),
)


def run_check(fn) -> CheckResult:
    t = time.perf_counter()
    try:
        res = fn()
    except Exception as exc:  # a crashing check is a failed check
        res = CheckResult(fn.__name__.removeprefix("check_"), False, math.nan, math.nan,
                          {"error": f"{type(exc).__name__}: {exc}"})
    res.seconds = time.perf_counter() - t
    return res


def run_all(only=None) -> list[CheckResult]:
    out = []
    for key, fn in CHECKS:
        if only and key not in only and fn.__name__.removeprefix("check_") not in only:
            continue
        out.append(run_check(fn))
    return out
