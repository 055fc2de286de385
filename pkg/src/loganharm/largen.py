"""Leading-order large-N (1/R) expansion.

Around a deep minimum at x = R the potential is replaced by its quadratic
Taylor truncation ``V(R) + V''(R)/2 (x - R)^2``, whose levels are
``V(R) + (2n + 1) sqrt(V''(R)/2)``. For the log-anharmonic oscillator that is
``V(R) + sqrt(2) (2n + 1) omega``; for the centrifugal oscillator it is
``2 R^2 + 2 (2n + 1)``, to be compared with the exact ``4n + 2N + 3``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .potentials import Centrifugal, LogAnharmonic, locate_minimum

TAIL_EXPONENT = 19.0
"""Gaussian exponent at the lower window edge; exp(-19) < 1e-8."""

WINDOW_FRACTION = 0.2
"""The safe window must close before ``WINDOW_FRACTION * R``."""

GAP_SPACINGS = 10.0
"""Required barrier clearance above the level, in units of the level spacing."""

UNDERFLOW_LOG = -700.0


class Regime(str, enum.Enum):
    SUPPRESSED = "suppressed"
    SPLIT = "split"
    INVISIBLE = "invisible"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class LargeNEstimate:
    R: float
    offset: float
    spacing: float
    levels: tuple

    @property
    def energies(self):
        return tuple(self.offset + e for e in self.levels)


@dataclass(frozen=True)
class ValidityReport:
    R: float
    ratio_g_sqrtomega: float
    xi_lower: float
    xi_upper: float
    barrier_gap: float
    spacing: float
    regime: Regime


def estimate_spectrum(spec, n_max):
    """Harmonic levels about the relevant minimum for ``n = 0 .. n_max``.

    Raises ``NoMinimumError`` for potentials without an interior minimum.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    info = locate_minimum(spec)
    quantum = math.sqrt(info.curvature / 2)
    levels = tuple((2 * n + 1) * quantum for n in range(n_max + 1))
    return LargeNEstimate(R=info.R, offset=info.depth, spacing=2 * quantum, levels=levels)


def centrifugal_exact(N, n_max):
    """Exact levels ``4n + 2N + 3`` of ``-d^2/dx^2 + x^2 + N(N+1)/x^2`` on x > 0."""
    if not N > 0:
        raise ValueError("N must be positive")
    return [4 * n + 2 * N + 3 for n in range(n_max + 1)]


def validity_report(spec, n_of_interest=0, tail_exponent=TAIL_EXPONENT):
    """Turn the qualitative applicability conditions into a regime call.

    The low edge of the window is where the ground-state Gaussian
    ``exp(-sqrt(2) omega xi^2 / 2)`` has fallen to ``exp(-tail_exponent)``.
    The barrier gap is the height at x = 0 where the left and right harmonic
    approximants cross, measured from the estimated level ``n_of_interest``.

    Rules, checked in order: ``invisible`` if the gap is not positive (the
    level sits above the crossing, so the well structure is not felt);
    ``suppressed`` if the window closes before ``0.2 R`` and the gap exceeds
    ten level spacings; ``split`` otherwise.
    """
    if not isinstance(spec, LogAnharmonic):
        raise TypeError("validity_report needs a LogAnharmonic spec")
    w, g = spec.omega, spec.g
    R = g / w
    quantum = math.sqrt(2) * w
    xi_lower = math.sqrt(2 * tail_exponent / quantum)
    gap = 2 * w**2 * R**2 - quantum * (2 * n_of_interest + 1)
    spacing = 2 * quantum
    if gap <= 0:
        regime = Regime.INVISIBLE
    elif xi_lower < WINDOW_FRACTION * R and gap > GAP_SPACINGS * spacing:
        regime = Regime.SUPPRESSED
    else:
        regime = Regime.SPLIT
    return ValidityReport(
        R=R,
        ratio_g_sqrtomega=g / math.sqrt(w),
        xi_lower=xi_lower,
        xi_upper=R,
        barrier_gap=gap,
        spacing=spacing,
        regime=regime,
    )


def log_approximant_overlap(spec):
    """Natural log of the left/right Gaussian overlap, ``-sqrt(2) omega R^2``."""
    return -math.sqrt(2) * spec.omega * (spec.g / spec.omega) ** 2


def approximant_overlap(spec):
    """Overlap of unit Gaussians ``exp(-a (x -+ R)^2 / 2)``, ``a = sqrt(2) omega``.

    Returns 0.0 once the exact value drops below ``exp(-700)``; use
    :func:`log_approximant_overlap` for the magnitude.
    """
    log_value = log_approximant_overlap(spec)
    return 0.0 if log_value < UNDERFLOW_LOG else math.exp(log_value)


def gaussian_approximant(x, center, omega):
    """Unit-normalized harmonic ground state of ``-d^2 + 2 omega^2 (x - center)^2``."""
    a = math.sqrt(2) * omega
    return (a / math.pi) ** 0.25 * np.exp(-a * (np.asarray(x, dtype=float) - center) ** 2 / 2)


def centrifugal_offset_error(N):
    """Exact minus estimated ground level, ``2N + 1 - 2 sqrt(N(N+1))``, without cancellation."""
    return 1.0 / (2 * N + 1 + 2 * math.sqrt(N * (N + 1)))


def centrifugal_comparison(N, n_max):
    """Rows of (n, estimate, exact) for the centrifugal benchmark."""
    est = estimate_spectrum(Centrifugal(N), n_max)
    exact = centrifugal_exact(N, n_max)
    return [(n, e, x) for n, (e, x) in enumerate(zip(est.energies, exact))]
