"""Plot template for flatband CSV output (matplotlib is not a package dependency).

    flatband scan --regime neg --alpha-min -3 --alpha-max -0.05 --alpha-steps 60 \
        --n-max 6 --out neg.csv
    python3 scripts/plot_template.py spectrum neg.csv

    flatband wavefunction --out wave.csv
    python3 scripts/plot_template.py wavefunction wave.csv
"""

import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def spectrum(rows, ax):
    # one solid exact curve and one dashed WKB curve per (parity, n)
    curves = defaultdict(list)
    for r in rows:
        if r["status"] != "ok":
            continue
        curves[(r["parity"], int(r["n"]))].append(
            (float(r["alpha"]), float(r["E_exact_over_m"]), float(r["E_wkb_over_m"])))
    for (parity, n), pts in sorted(curves.items()):
        a, e, w = zip(*sorted(pts))
        color = "C0" if parity == "odd" else "C3"
        ax.plot(a, e, "-", color=color, lw=1)
        ax.plot(a, w, "--", color=color, lw=0.8)
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel(r"$E/m$")


def wavefunction(rows, ax):
    curves = defaultdict(list)
    for r in rows:
        key = (r["regime"], r["parity"], float(r["alpha"]))
        curves[key].append((float(r["x"]), float(r["psi"])))
    for (regime, parity, alpha), pts in curves.items():
        x, y = zip(*pts)
        ax.plot(x, y, label=f"{regime} {parity}, alpha={alpha:.4g}")
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\psi$")
    ax.legend()


if __name__ == "__main__":
    kind, path = sys.argv[1], sys.argv[2]
    fig, ax = plt.subplots(figsize=(6, 4))
    {"spectrum": spectrum, "wavefunction": wavefunction}[kind](read(path), ax)
    fig.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=150)
    print(out)
