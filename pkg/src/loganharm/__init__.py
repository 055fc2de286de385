"""Spectra of the log-anharmonic oscillator and related one-dimensional wells.

The package pairs a leading-order large-N estimate (harmonic expansion about
the potential minimum) with a grid-converged finite-difference eigensolver
that checks it.
"""

from .eigensolver import (
    ConvergenceError,
    EigenResult,
    GridError,
    GridSpec,
    converge,
    default_grid,
    overlap,
    parity_splittings,
    solve_lowest,
)
from .largen import (
    Regime,
    approximant_overlap,
    centrifugal_exact,
    estimate_spectrum,
    validity_report,
)
from .potentials import (
    Centrifugal,
    DomainError,
    LogAnharmonic,
    LogPower,
    NoMinimumError,
    PowerLaw,
    QuadLogWell,
    Quadratic,
    locate_minimum,
    map_powerlaw_to_log,
)

__version__ = "0.1.0"

__all__ = [
    "Centrifugal",
    "ConvergenceError",
    "DomainError",
    "EigenResult",
    "GridError",
    "GridSpec",
    "LogAnharmonic",
    "LogPower",
    "NoMinimumError",
    "PowerLaw",
    "QuadLogWell",
    "Quadratic",
    "Regime",
    "approximant_overlap",
    "centrifugal_exact",
    "converge",
    "default_grid",
    "estimate_spectrum",
    "locate_minimum",
    "map_powerlaw_to_log",
    "overlap",
    "parity_splittings",
    "solve_lowest",
    "validity_report",
]
