"""Bound states of a spin-1 flat-band Dirac model with a Coulomb-like impurity."""

from .model import (
    Band,
    BoundState,
    Method,
    ModelParams,
    Parity,
    Regime,
    SingularityError,
    classify_regime,
    hypergeom_args,
)

__all__ = [
    "Band",
    "BoundState",
    "Method",
    "ModelParams",
    "Parity",
    "Regime",
    "SingularityError",
    "classify_regime",
    "hypergeom_args",
]

__version__ = "0.1.0"
