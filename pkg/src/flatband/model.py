"""Spin-1 flat-band Dirac model with a Coulomb-like potential on component |1>.

Units hbar = v_F = 1.  The three-component problem reduces to an
effective Schroedinger equation for psi = (E - V/2)/(E + m) * psi_1,

    psi'' + [Et - A/(|x| - x0)] psi = 0,
    Et = E^2 - m^2,  A = alpha (m+E)^2 / (2E),  x0 = alpha / (2E).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Band(str, Enum):
    LOWER = "lower"
    FLAT = "flat"
    UPPER = "upper"


class Parity(str, Enum):
    ODD = "odd"
    EVEN = "even"


class Regime(str, Enum):
    NEG_RATIO = "neg"  # alpha/E < 0, whole line
    POS_INTERVAL = "interval"  # alpha/E > 0, psi(+-x0) = 0
    POS_WHOLE = "whole"  # alpha/E > 0, psi(+-x0) finite

    @property
    def positive_ratio(self) -> bool:
        return self is not Regime.NEG_RATIO


class Method(str, Enum):
    EXACT = "exact"
    WKB = "wkb"
    CLOSED_FORM = "closed_form"


class SingularityError(ValueError):
    """Evaluation point too close to the singular points |x| = x0."""


@dataclass(frozen=True)
class ModelParams:
    alpha: float
    m: float = 1.0
    eps_E: float | None = None
    eps_x: float = 1e-10

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("gap m must be positive")
        if self.eps_E is None:
            object.__setattr__(self, "eps_E", 1e-8 * self.m)
        if not 0 < self.eps_E < 1e-2 * self.m:
            raise ValueError("eps_E must satisfy 0 < eps_E << m")
        if not self.eps_x > 0:
            raise ValueError("eps_x must be positive")

    def with_alpha(self, alpha: float) -> "ModelParams":
        return ModelParams(alpha=alpha, m=self.m, eps_E=self.eps_E, eps_x=self.eps_x)


@dataclass(frozen=True)
class BoundState:
    energy: float
    n: int
    parity: Parity
    regime: Regime
    method: Method
    alpha: float = math.nan
    residual: float = math.nan

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n is a positive integer")


@dataclass(frozen=True)
class HypergeomArgs:
    """Parameters of the confluent hypergeometric solution at energy E.

    z(x) = 2 kappa (x - x0); z0 is its value at the origin.
    """

    a: float
    b: int
    A: float
    x0: float
    Etilde: float
    kappa: float
    z0: float

    def z(self, x: float) -> float:
        return 2.0 * self.kappa * (x - self.x0)


def hypergeom_args(p: ModelParams, E: float) -> HypergeomArgs:
    if E == 0:
        raise ValueError("E = 0 (flat band) is excluded")
    if abs(E) >= p.m:
        raise ValueError("bound states need |E| < m")
    m, alpha = p.m, p.alpha
    # (m-E)(m+E) keeps full precision near the thresholds
    Et = -(m - E) * (m + E)
    kappa = math.sqrt(-Et)
    A = alpha * (m + E) ** 2 / (2.0 * E)
    x0 = alpha / (2.0 * E)
    a = 1.0 + A / (2.0 * kappa)
    return HypergeomArgs(a=a, b=2, A=A, x0=x0, Etilde=Et, kappa=kappa, z0=-2.0 * kappa * x0)


def dispersion(band: Band, k: float, m: float) -> float:
    if band is Band.FLAT:
        return 0.0
    e = math.hypot(k, m)
    return e if band is Band.UPPER else -e


def free_eigenvector(band: Band, k: float, m: float) -> np.ndarray:
    """Normalized spinor of H0(k) = k S_x + m S_z (plane-wave factor dropped)."""
    e = math.hypot(k, m)
    if e == 0:
        raise ValueError("k^2 + m^2 must be positive")
    if band is Band.FLAT:
        return np.array([-k, math.sqrt(2) * m, k]) / math.sqrt(2 * (k * k + m * m))
    if band is Band.UPPER:
        return np.array([e + m, math.sqrt(2) * k, e - m]) / (2 * e)
    return np.array([e - m, -math.sqrt(2) * k, e + m]) / (2 * e)


S_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float) / math.sqrt(2)
S_Z = np.diag([1.0, 0.0, -1.0])


def free_hamiltonian(k: float, m: float) -> np.ndarray:
    """Bloch matrix of -i S_x d/dx + m S_z acting on e^{ikx}."""
    return k * S_X + m * S_Z


def coulomb_v11(p: ModelParams, x):
    return p.alpha / np.abs(x)


def effective_potential(p: ModelParams, E: float, x: float) -> float:
    """Shifted Coulomb potential A / (|x| - x0)."""
    if E == 0:
        raise ValueError("E = 0 is excluded")
    A = p.alpha * (p.m + E) ** 2 / (2 * E)
    x0 = p.alpha / (2 * E)
    d = abs(x) - x0
    if x0 > 0 and abs(d) < p.eps_x:
        raise SingularityError(f"|x| within eps_x of x0 = {x0}")
    return A / d


def classify_regime(alpha: float, E: float, whole_space: bool = False) -> Regime:
    if E == 0 or alpha == 0:
        raise ValueError("regime needs nonzero alpha and E")
    if alpha / E < 0:
        return Regime.NEG_RATIO
    return Regime.POS_WHOLE if whole_space else Regime.POS_INTERVAL


def energy_sign_allowed(regime: Regime, alpha: float, E: float) -> bool:
    ratio = alpha / E
    return ratio < 0 if regime is Regime.NEG_RATIO else ratio > 0


def reconstruct_components(p: ModelParams, E: float, x, psi, dpsi):
    """Spinor components from the effective wavefunction psi and psi'.

    From the three first-order equations with V = V11(x):
      psi1 = (E+m) psi / (E - V/2)            (definition of psi)
      psi3 = (E-m-V) psi1 / (E+m)              (lines 1 and 3 share d psi2)
           = (E-m-V) psi / (E - V/2)
      psi1 + psi3 = 2 psi, so line 2 gives psi2 = -i sqrt(2) psi' / E.
    psi2 is purely imaginary for real psi; the returned value is Im psi2.
    """
    x = np.asarray(x, dtype=float)
    if E == 0:
        raise ValueError("E = 0 is excluded")
    if np.any(x == 0):
        raise SingularityError("x = 0 is the Coulomb singularity")
    v = p.alpha / np.abs(x)
    den = E - v / 2
    if np.any(np.abs(den) < p.eps_x * max(1.0, abs(E))):
        raise SingularityError("E - V/2 vanishes at |x| = x0")
    psi1 = (E + p.m) * psi / den
    psi3 = (E - p.m - v) * psi / den
    psi2_imag = -math.sqrt(2) * np.asarray(dpsi) / E
    return psi1, psi2_imag, psi3
