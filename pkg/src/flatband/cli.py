"""Command-line front end: ``flatband spectrum|scan|critical|wkb|wavefunction|verify``.

Every command writes a table (CSV or JSON) to ``--out`` or stdout.  Exit
codes: 0 success, 1 usage error, 2 computation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import exact, verify, wavefunction, wkb
from .model import ModelParams, Parity, Regime

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

SCAN_COLUMNS = ("alpha", "n", "parity", "regime", "E_exact_over_m", "E_wkb_over_m",
                "residual", "status")
CRITICAL_COLUMNS = ("regime", "parity", "k", "alpha_c_exact", "alpha_c_asymptotic", "rel_diff")
WKB_COLUMNS = ("alpha", "n", "parity", "regime", "E_wkb_over_m", "E_exact_over_m",
               "diff_over_m")
WAVE_COLUMNS = ("regime", "parity", "alpha", "E", "x", "psi", "psi1", "psi2_imag", "psi3")

# built-in values for options that a config file may also set
DEFAULTS = {
    "m": 1.0,
    "regime": "neg",
    "parity": "both",
    "n_max": 10,
    "alpha_steps": 31,
    "k_max": 5,
    "energy": None,
    "n": 1,
    "n_points": 401,
    "grid_density": exact.DEFAULT_GRID_DENSITY,
    "workers": 1,
    "format": "csv",
    "out": "-",
    "alpha": None,
    "alpha_min": None,
    "alpha_max": None,
    "only": None,
}

# per-command departures from DEFAULTS
COMMAND_DEFAULTS = {
    "critical": {"regime": "both"},
    "wavefunction": {"regime": None, "parity": None},
}

RESIDUAL_BOUND = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(sp: argparse.ArgumentParser, *, grid=False, single=False):
    sp.add_argument("--config", help="key = value file; flags given on the command line win")
    sp.add_argument("--m", type=float, help="gap parameter (default 1)")
    sp.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    sp.add_argument("--out", help="output path, '-' for stdout (default)")
    sp.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    if single or grid:
        sp.add_argument("--regime", choices=[r.value for r in Regime],
                        help="neg: alpha/E < 0; interval / whole: alpha/E > 0 (default neg)")
        sp.add_argument("--parity", choices=("odd", "even", "both"), help="default both")
        sp.add_argument("--n-max", type=int, help="largest level index (default 10)")
        sp.add_argument("--grid-density", type=float,
                        help="angle-scan points per radian of WKB phase (default 3)")
    if single:
        sp.add_argument("--alpha", type=float, help="potential strength")
    if grid:
        sp.add_argument("--alpha-min", type=float, help="first grid value")
        sp.add_argument("--alpha-max", type=float, help="last grid value")
        sp.add_argument("--alpha-steps", type=int, help="grid points (default 31, 0 allowed)")
        sp.add_argument("--workers", type=int, help="processes for the scan (default 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flatband",
                 description="Bound states of a three-band flat-band model with a 1D Coulomb "
                             "impurity: exact spectra, WKB levels, critical strengths and "
                             "eigenfunctions.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sp = sub.add_parser("spectrum", help="levels at one alpha")
    _common(sp, single=True)

    sp = sub.add_parser("scan", help="levels over an alpha grid")
    _common(sp, grid=True)

    sp = sub.add_parser("critical", help="critical strengths, exact and asymptotic")
    _common(sp)
    sp.add_argument("--regime", choices=("interval", "whole", "both"),
                    help="default both")
    sp.add_argument("--parity", choices=("odd", "even", "both"), help="default both")
    sp.add_argument("--k-max", type=int, help="number of thresholds per sector (default 5)")

    sp = sub.add_parser("wkb", help="WKB levels against the exact ones at one alpha")
    _common(sp, single=True)

    sp = sub.add_parser("wavefunction", help="sampled eigenfunctions and spinor components")
    _common(sp)
    sp.add_argument("--regime", choices=[r.value for r in Regime])
    sp.add_argument("--parity", choices=("odd", "even"))
    sp.add_argument("--alpha", type=float, help="strength; checked against --energy")
    sp.add_argument("--energy", type=float,
                    help="energy; without --alpha the strength is solved for level --n")
    sp.add_argument("--n", type=int, help="level index when solving for alpha (default 1)")
    sp.add_argument("--n-points", type=int, help="samples per curve (default 401)")

    sp = sub.add_parser("verify", help="run the invariant suite, JSON report")
    _common(sp)
    sp.add_argument("--only", help="comma-separated check numbers or names")
    return ap


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment, keys use - or _."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = val
    return out


def _coerce(key, val):
    ref = DEFAULTS[key]
    if val is None or not isinstance(val, str):
        return val
    if key in ("alpha", "alpha_min", "alpha_max", "energy") or isinstance(ref, float):
        return float(val)
    if isinstance(ref, int):
        return int(val)
    return val


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Command line, then config file, then built-in defaults."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    for key, default in defaults.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            try:
                setattr(args, key, _coerce(key, cfg.get(key, default)))
            except ValueError as exc:
                raise UsageError(f"config value for {key}: {exc}") from None
    for key, allowed in _CHOICES.items():
        if getattr(args, key, None) not in allowed:
            raise UsageError(f"invalid {key}: {getattr(args, key)!r}")
    return args


_CHOICES = {
    "regime": {None, "neg", "interval", "whole", "both"},
    "parity": {None, "odd", "even", "both"},
    "format": {None, "csv", "json"},
}


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, float) or isinstance(v, np.floating):
        return "%.12g" % v
    if v is None:
        return ""
    return str(v)


def render(rows, columns, fmt: str) -> str:
    if fmt == "json":
        recs = [dict(zip(columns, r)) for r in rows]
        return json.dumps(recs, indent=1, default=_json_default, allow_nan=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, (Parity, Regime)):
        return o.value
    raise TypeError(type(o).__name__)


def emit(text: str, out: str):
    if out in ("-", ""):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# commands


def _params(args, alpha=None) -> ModelParams:
    if not args.m > 0:
        raise UsageError("--m must be positive")
    return ModelParams(alpha=0.0 if alpha is None else alpha, m=args.m)


def _parities(choice):
    return (Parity.ODD, Parity.EVEN) if choice == "both" else (Parity(choice),)


def _check_alpha(regime: Regime, alpha: float, flag="--alpha"):
    if regime is Regime.NEG_RATIO and alpha > 0:
        raise UsageError(f"{flag}={alpha}: regime neg needs alpha <= 0 (E > 0)")


def _state_rows(p, regime, states):
    rows = []
    for s in states:
        sign = 1 if s.energy > 0 else -1
        try:
            Ew = wkb.wkb_energy(regime, sign, s.parity, s.n, s.alpha, p.m) / p.m
        except wkb.NoSolutionError:
            Ew = math.nan
        status = "ok" if abs(s.residual) <= RESIDUAL_BOUND else "loose_residual"
        rows.append((s.alpha, s.n, s.parity.value, regime.value, s.energy / p.m, Ew,
                     s.residual, status))
    return rows


def _sorted_states(levels):
    states = [s for sts in levels for s in sts]
    order = {Parity.ODD: 0, Parity.EVEN: 1}
    return sorted(states, key=lambda s: (s.alpha, s.n, order[s.parity]))


def cmd_spectrum(args):
    regime = Regime(args.regime)
    if args.alpha is None:
        raise UsageError("--alpha is required")
    _check_alpha(regime, args.alpha)
    p = _params(args, args.alpha)
    levels = exact.find_all_parities(p, regime, n_max=args.n_max,
                                     grid_density=args.grid_density,
                                     parities=_parities(args.parity))
    return render(_state_rows(p, regime, _sorted_states(levels.values())), SCAN_COLUMNS,
                  args.format), EXIT_OK


def alpha_grid(args) -> np.ndarray:
    if args.alpha_steps < 0:
        raise UsageError("--alpha-steps must be >= 0")
    if args.alpha_steps == 0:
        return np.empty(0)
    if args.alpha_min is None or args.alpha_max is None:
        raise UsageError("--alpha-min and --alpha-max are required")
    if args.alpha_min > args.alpha_max:
        raise UsageError("--alpha-min exceeds --alpha-max")
    return np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)


def cmd_scan(args):
    regime = Regime(args.regime)
    grid = alpha_grid(args)
    if grid.size:
        _check_alpha(regime, float(grid.max()), "--alpha-max")
    p = _params(args)
    rows, failures = [], {}
    per_parity = []
    for parity in _parities(args.parity):
        sc = exact.scan_alpha(p, grid, regime, parity, n_max=args.n_max,
                              grid_density=args.grid_density, workers=args.workers)
        per_parity.append(sc.states)
        failures.update(sc.failures)
    rows = _state_rows(p, regime, _sorted_states(per_parity))
    for a, err in sorted(failures.items()):
        log.warning("alpha=%g failed: %s", a, err)
        rows.append((a, None, None, regime.value, math.nan, math.nan, math.nan, f"error: {err}"))
    rows.sort(key=lambda r: (r[0], r[1] if r[1] is not None else 0, r[2] or ""))
    code = EXIT_FAIL if grid.size and len(failures) == len(set(grid.tolist())) else EXIT_OK
    return render(rows, SCAN_COLUMNS, args.format), code


def cmd_critical(args):
    if args.k_max < 1:
        raise UsageError("--k-max must be >= 1")
    regimes = ((Regime.POS_INTERVAL, Regime.POS_WHOLE) if args.regime == "both"
               else (Regime(args.regime),))
    rows = []
    for regime in regimes:
        for parity in _parities(args.parity):
            for k in range(1, args.k_max + 1):
                c = exact.critical_strength(regime, parity, k)
                rows.append((regime.value, parity.value, k, c.alpha_c_exact,
                             c.alpha_c_asymptotic, c.rel_diff))
    return render(rows, CRITICAL_COLUMNS, args.format), EXIT_OK


def cmd_wkb(args):
    regime = Regime(args.regime)
    if args.alpha is None:
        raise UsageError("--alpha is required")
    _check_alpha(regime, args.alpha)
    p = _params(args, args.alpha)
    levels = exact.find_all_parities(p, regime, n_max=args.n_max,
                                     grid_density=args.grid_density,
                                     parities=_parities(args.parity))
    rows = []
    for s in _sorted_states(levels.values()):
        sign = 1 if s.energy > 0 else -1
        try:
            Ew = wkb.wkb_energy(regime, sign, s.parity, s.n, s.alpha, p.m) / p.m
        except wkb.NoSolutionError:
            Ew = math.nan
        rows.append((s.alpha, s.n, s.parity.value, regime.value, Ew, s.energy / p.m,
                     abs(Ew - s.energy / p.m)))
    return render(rows, WKB_COLUMNS, args.format), EXIT_OK


def cmd_wavefunction(args):
    p = _params(args, -1.0)
    if args.regime is None and args.parity is None and args.alpha is None:
        E_over_m = 0.5 if args.energy is None else args.energy / args.m
        samples = wavefunction.figure_states(p, E_over_m, args.n_points)
    else:
        if args.regime is None or args.parity is None or args.energy is None:
            raise UsageError("--regime, --parity and --energy select one curve")
        regime, parity = Regime(args.regime), Parity(args.parity)
        if args.alpha is None:
            alpha = exact.alpha_for_energy(p, regime, parity, args.n, args.energy)
            n = args.n
        else:
            alpha, n = args.alpha, None
        samples = [wavefunction.sample(p.with_alpha(alpha), args.energy, regime, parity,
                                       args.n_points, n=n)]
    rows = [r for ws in samples for r in ws.rows()]
    return render(rows, WAVE_COLUMNS, args.format), EXIT_OK


def cmd_verify(args):
    only = set(args.only.split(",")) if args.only else None
    results = verify.run_all(only)
    report = {"passed": all(r.passed for r in results), "m": args.m,
              "checks": [r.as_dict() for r in results]}
    text = json.dumps(report, indent=1, default=_json_default) + "\n"
    return text, EXIT_OK if report["passed"] else EXIT_FAIL


COMMANDS = {
    "spectrum": cmd_spectrum,
    "scan": cmd_scan,
    "critical": cmd_critical,
    "wkb": cmd_wkb,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = resolve(args)
        if args.m != 1.0 and args.command == "verify":
            raise UsageError("verify runs at m = 1")
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"flatband: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except wavefunction.NotEigenstateError as exc:
        print(f"flatband: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ArithmeticError, ValueError, LookupError, RuntimeError) as exc:
        print(f"flatband: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
