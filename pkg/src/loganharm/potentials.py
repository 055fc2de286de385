"""Analytic potential families and the location of their relevant minimum.

Every family is a frozen dataclass exposing ``value``, ``derivatives`` and
``cell_average``; the module-level functions :func:`evaluate`,
:func:`derivatives` and :func:`locate_minimum` are the public entry points.

Conventions: the kinetic term is ``-d^2/dx^2`` (units with hbar = 1, m = 1/2),
so a harmonic well ``V(R) + k (x - R)^2`` has levels ``V(R) + (2n+1) sqrt(k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

__all__ = [
    "DomainError",
    "NoMinimumError",
    "Quadratic",
    "LogAnharmonic",
    "PowerLaw",
    "LogPower",
    "Centrifugal",
    "QuadLogWell",
    "PotentialSpec",
    "MinimumInfo",
    "LogMapping",
    "evaluate",
    "derivatives",
    "locate_minimum",
    "map_powerlaw_to_log",
    "is_even",
    "is_half_line",
    "ROOT_TOL",
]

ROOT_TOL = 1e-12
"""Default absolute tolerance on ``|V'(R)|``."""

SMALL_ALPHA = 0.1
"""Exponents above this magnitude are flagged as outside the small-alpha regime."""


class DomainError(ValueError):
    """Coordinate outside the domain of a potential (singular point or x <= 0)."""


class NoMinimumError(ValueError):
    """The potential has no positive-curvature minimum at x > 0."""


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive")


def _as_array(x):
    return np.asarray(x, dtype=float)


def _finish(out, x):
    return float(out) if np.ndim(x) == 0 else out


def _check_nonzero(x, family):
    if np.any(x == 0):
        raise DomainError(f"{family} is singular at x = 0")


def _check_positive(x, family):
    if np.any(x <= 0):
        raise DomainError(f"{family} is defined on x > 0 only")


def _check_order(order):
    if order not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2 or 3")


@dataclass(frozen=True)
class Quadratic:
    """Harmonic oscillator ``omega^2 x^2``."""

    omega: float

    def __post_init__(self):
        _positive("omega", self.omega)

    def value(self, x):
        x = _as_array(x)
        return _finish(self.omega**2 * x**2, x)

    def derivatives(self, x, order=2):
        _check_order(order)
        x = _as_array(x)
        w2 = self.omega**2
        d = [2 * w2 * x, np.full_like(x, 2 * w2), np.zeros_like(x)]
        return tuple(_finish(v, x) for v in d[:order])

    def cell_average(self, a, b):
        a, b = _as_array(a), _as_array(b)
        return self.omega**2 * (a * a + a * b + b * b) / 3.0


@dataclass(frozen=True)
class LogAnharmonic:
    """Harmonic oscillator with a soft logarithmic spike, ``omega^2 x^2 - 2 g^2 ln|x|``."""

    omega: float
    g: float

    def __post_init__(self):
        _positive("omega", self.omega)
        _positive("g", self.g)

    @property
    def R(self):
        return self.g / self.omega

    def value(self, x):
        x = _as_array(x)
        _check_nonzero(x, "LogAnharmonic")
        return _finish(self.omega**2 * x**2 - 2 * self.g**2 * np.log(np.abs(x)), x)

    def derivatives(self, x, order=2):
        _check_order(order)
        x = _as_array(x)
        _check_nonzero(x, "LogAnharmonic")
        w2, g2 = self.omega**2, self.g**2
        d = [2 * w2 * x - 2 * g2 / x, 2 * w2 + 2 * g2 / x**2, -4 * g2 / x**3]
        return tuple(_finish(v, x) for v in d[:order])

    def cell_average(self, a, b):
        a, b = _as_array(a), _as_array(b)
        quad = self.omega**2 * (a * a + a * b + b * b) / 3.0
        return quad - 2 * self.g**2 * _mean_log_abs(a, b)


@dataclass(frozen=True)
class PowerLaw:
    """Power-law anharmonic oscillator ``omega^2 x^2 + lam |x|^alpha``."""

    omega: float
    lam: float
    alpha: float

    def __post_init__(self):
        _positive("omega", self.omega)
        if not (math.isfinite(self.lam) and math.isfinite(self.alpha)):
            raise ValueError("lambda and alpha must be finite")

    def _abs_pow(self, x):
        ax = np.abs(x)
        if self.alpha <= 0:
            _check_nonzero(x, "PowerLaw with alpha <= 0")
            return np.exp(self.alpha * np.log(ax))
        with np.errstate(divide="ignore"):
            return np.where(ax > 0, np.exp(self.alpha * np.log(np.where(ax > 0, ax, 1.0))), 0.0)

    def value(self, x):
        x = _as_array(x)
        return _finish(self.omega**2 * x**2 + self.lam * self._abs_pow(x), x)

    def derivatives(self, x, order=2):
        _check_order(order)
        x = _as_array(x)
        if np.any(x == 0) and self.alpha < order:
            raise DomainError("PowerLaw derivative is singular at x = 0")
        w2, lam, a = self.omega**2, self.lam, self.alpha
        xs = np.where(x == 0, 1.0, x)
        p = self._abs_pow(xs)
        zero = x == 0
        d = [
            2 * w2 * x + np.where(zero, 0.0, lam * a * p / xs),
            2 * w2 + np.where(zero, 0.0, lam * a * (a - 1) * p / xs**2),
            np.where(zero, 0.0, lam * a * (a - 1) * (a - 2) * p / xs**3),
        ]
        return tuple(_finish(v, x) for v in d[:order])

    def cell_average(self, a, b):
        if self.alpha <= -1:
            return None
        a, b = _as_array(a), _as_array(b)
        quad = self.omega**2 * (a * a + a * b + b * b) / 3.0
        return quad + self.lam * _mean_abs_pow(a, b, self.alpha)


@dataclass(frozen=True)
class LogPower:
    """Half-line oscillator with a power of the logarithm, ``omega^2 x^2 - 2 g^2 (ln x)^p``."""

    omega: float
    g: float
    p: int

    def __post_init__(self):
        _positive("omega", self.omega)
        _positive("g", self.g)
        if isinstance(self.p, bool) or int(self.p) != self.p or self.p < 1:
            raise ValueError("p must be a positive integer")
        object.__setattr__(self, "p", int(self.p))

    def value(self, x):
        x = _as_array(x)
        _check_positive(x, "LogPower")
        return _finish(self.omega**2 * x**2 - 2 * self.g**2 * np.log(x) ** self.p, x)

    def derivatives(self, x, order=2):
        _check_order(order)
        x = _as_array(x)
        _check_positive(x, "LogPower")
        w2, g2, p = self.omega**2, self.g**2, self.p
        L = np.log(x)

        def lp(k):
            # the coefficient multiplying a negative power is always zero
            return L**k if k >= 0 else np.zeros_like(L)

        d1 = 2 * w2 * x - 2 * p * g2 * lp(p - 1) / x
        d2 = 2 * w2 - 2 * p * (p - 1) * g2 * lp(p - 2) / x**2 + 2 * p * g2 * lp(p - 1) / x**2
        d3 = (
            -2 * p * g2 * ((p - 1) * (p - 2) * lp(p - 3) - 3 * (p - 1) * lp(p - 2) + 2 * lp(p - 1))
            / x**3
        )
        return tuple(_finish(v, x) for v in (d1, d2, d3)[:order])

    def cell_average(self, a, b):
        a, b = _as_array(a), _as_array(b)
        if np.any(a < 0):
            raise DomainError("LogPower is defined on x > 0 only")
        quad = self.omega**2 * (a * a + a * b + b * b) / 3.0

        def prim(t):
            # integral of (ln t)^p: t * sum_k (-1)^(p-k) p!/k! (ln t)^k, zero at t = 0
            safe = np.where(t > 0, t, 1.0)
            L = np.log(safe)
            acc = np.zeros_like(safe)
            for k in range(self.p + 1):
                acc += (-1) ** (self.p - k) * math.factorial(self.p) / math.factorial(k) * L**k
            return np.where(t > 0, safe * acc, 0.0)

        return quad - 2 * self.g**2 * (prim(b) - prim(a)) / (b - a)


@dataclass(frozen=True)
class Centrifugal:
    """Half-line harmonic oscillator with a centrifugal wall, ``x^2 + N(N+1)/x^2``."""

    N: float

    def __post_init__(self):
        _positive("N", self.N)

    @property
    def strength(self):
        return self.N * (self.N + 1)

    def value(self, x):
        x = _as_array(x)
        _check_positive(x, "Centrifugal")
        return _finish(x**2 + self.strength / x**2, x)

    def derivatives(self, x, order=2):
        _check_order(order)
        x = _as_array(x)
        _check_positive(x, "Centrifugal")
        s = self.strength
        d = [2 * x - 2 * s / x**3, 2 + 6 * s / x**4, -24 * s / x**5]
        return tuple(_finish(v, x) for v in d[:order])

    def cell_average(self, a, b):
        # the wall is not integrable at the origin
        return None


@dataclass(frozen=True)
class QuadLogWell:
    """Symmetric double well ``x^2 (ln|x| - c)``, continued evenly to x < 0."""

    c: float

    def __post_init__(self):
        if not math.isfinite(self.c):
            raise ValueError("c must be finite")

    def value(self, x):
        x = _as_array(x)
        ax = np.abs(x)
        safe = np.where(ax > 0, ax, 1.0)
        return _finish(np.where(ax > 0, ax**2 * (np.log(safe) - self.c), 0.0), x)

    def derivatives(self, x, order=2):
        _check_order(order)
        x = _as_array(x)
        if order >= 2:
            _check_nonzero(x, "QuadLogWell curvature")
        ax = np.abs(x)
        L = np.log(np.where(ax > 0, ax, 1.0))
        d1 = np.where(ax > 0, x * (2 * L - 2 * self.c + 1), 0.0)
        d2 = 2 * L - 2 * self.c + 3
        d3 = 2 / np.where(ax > 0, x, 1.0)
        return tuple(_finish(v, x) for v in (d1, d2, d3)[:order])

    def cell_average(self, a, b):
        a, b = _as_array(a), _as_array(b)

        def prim(t):
            # odd antiderivative of x^2 (ln|x| - c)
            at = np.abs(t)
            L = np.log(np.where(at > 0, at, 1.0))
            return np.where(at > 0, t**3 * (L / 3 - 1 / 9 - self.c / 3), 0.0)

        return (prim(b) - prim(a)) / (b - a)


PotentialSpec = Union[Quadratic, LogAnharmonic, PowerLaw, LogPower, Centrifugal, QuadLogWell]

_EVEN = (Quadratic, LogAnharmonic, PowerLaw, QuadLogWell)
_HALF_LINE = (LogPower, Centrifugal)


def is_even(spec):
    return isinstance(spec, _EVEN)


def is_half_line(spec):
    return isinstance(spec, _HALF_LINE)


def is_singular_at_origin(spec):
    """True when V itself diverges at x = 0."""
    if isinstance(spec, (LogAnharmonic, LogPower, Centrifugal)):
        return True
    return isinstance(spec, PowerLaw) and spec.alpha <= 0


def _mean_log_abs(a, b):
    """Mean of ln|x| over each cell [a, b], computed without catastrophic cancellation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    h = b - a
    out = np.empty(np.broadcast(a, b).shape)
    pos = a > 0
    neg = b < 0
    mid = ~(pos | neg)
    # for 0 < a < b: ln b + (a/h) ln(1 + h/a) - 1
    lo = np.where(pos, a, np.where(neg, -b, 1.0))
    hi = np.where(pos, b, np.where(neg, -a, 1.0))
    side = pos | neg
    out[side] = (np.log(hi) + (lo / h) * np.log1p(h / lo) - 1.0)[side]
    if np.any(mid):
        am, bm = -a[mid], b[mid]
        xlx = lambda t: np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0)
        out[mid] = (xlx(am) + xlx(bm)) / (am + bm) - 1.0
    return out


def _mean_abs_pow(a, b, alpha):
    """Mean of |x|^alpha over each cell [a, b] (alpha > -1)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = alpha + 1.0
    h = b - a
    out = np.empty(np.broadcast(a, b).shape)
    side = (a >= 0) | (b <= 0)
    lo = np.where(a >= 0, a, np.where(b <= 0, -b, 1.0))
    hi = np.where(a >= 0, b, np.where(b <= 0, -a, 1.0))
    touches = side & (lo == 0)
    inner = side & (lo > 0)
    # hi^s - lo^s = -hi^s * expm1(-s * log1p(h / lo)), free of cancellation
    if np.any(inner):
        l, u, w = lo[inner], hi[inner], h[inner]
        out[inner] = -(u**s) * np.expm1(-s * np.log1p(w / l)) / (s * w)
    out[touches] = hi[touches] ** s / (s * h[touches])
    mid = ~side
    if np.any(mid):
        out[mid] = ((-a[mid]) ** s + b[mid] ** s) / (s * h[mid])
    return out


def evaluate(spec, x):
    """Closed-form value of the potential at ``x`` (scalar or array)."""
    return spec.value(x)


def derivatives(spec, x, order=2):
    """Return ``(V', V'', V''')[:order]`` at ``x``."""
    return spec.derivatives(x, order)


class MinimumInfo(NamedTuple):
    R: float
    depth: float
    curvature: float
    residual: float


def _bisect(f, lo, hi, rtol=1e-13, max_iter=400):
    flo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= rtol * abs(mid):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    # return the endpoint with the smaller residual
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


def _maximal_minimum(slope, x_start, x_stop, n_scan=4000):
    """Largest x in (x_start, x_stop] where ``slope`` changes sign from - to +."""
    xs = np.geomspace(x_start, x_stop, n_scan)
    s = np.array([slope(x) for x in xs])
    up = np.nonzero((s[:-1] < 0) & (s[1:] >= 0))[0]
    if up.size == 0:
        return None
    i = up[-1]
    if s[i + 1] == 0:
        return float(xs[i + 1])
    return _bisect(slope, float(xs[i]), float(xs[i + 1]))


def scan_limit(spec):
    """Upper end of the geometric sign-change scan used for implicit minima."""
    if isinstance(spec, LogPower):
        ratio = spec.g / spec.omega
        return 10 * (math.sqrt(spec.p) * ratio) * max(1.0, math.log(ratio)) ** ((spec.p - 1) / 2)
    if isinstance(spec, PowerLaw):
        guess = abs(spec.lam * spec.alpha) / (2 * spec.omega**2)
        if spec.alpha != 2:
            guess = guess ** (1 / (2 - spec.alpha)) if guess > 0 else 1.0
        return 10 * max(guess, 1.0)
    raise TypeError(f"no scan range for {type(spec).__name__}")


def locate_minimum(spec, tol=ROOT_TOL):
    """Locate the relevant (rightmost) positive-curvature minimum at x > 0.

    Closed forms are used for ``LogAnharmonic`` (R = g/omega), ``Centrifugal``
    (R = [N(N+1)]^(1/4)), ``QuadLogWell`` (R = exp(c - 1/2)) and ``LogPower``
    with p = 1. ``LogPower`` with p >= 2 and ``PowerLaw`` are bracketed by a
    geometric scan of V' followed by bisection, and the maximal root is kept.

    Raises
    ------
    NoMinimumError
        If no sign change of V' is found, or the curvature there is not positive.
    """
    if isinstance(spec, Quadratic):
        raise NoMinimumError("Quadratic has no interior minimum (V' vanishes only at x = 0)")

    if isinstance(spec, LogAnharmonic) or (isinstance(spec, LogPower) and spec.p == 1):
        w, g = spec.omega, spec.g
        R = g / w
        depth = (-2 * math.log(g) + 1 + 2 * math.log(w)) * g**2
        curvature = 4 * w**2
    elif isinstance(spec, Centrifugal):
        R = spec.strength**0.25
        depth = 2 * math.sqrt(spec.strength)
        curvature = 8.0
    elif isinstance(spec, QuadLogWell):
        R = math.exp(spec.c - 0.5)
        depth = -0.5 * R**2
        curvature = 2.0
    else:
        slope = lambda x: float(spec.derivatives(x, 1)[0])
        if isinstance(spec, LogPower):
            start = 1.0 + 1e-9
        else:
            if spec.lam * spec.alpha >= 0 and spec.alpha < 2:
                raise NoMinimumError("PowerLaw needs lambda * alpha < 0 for an interior minimum")
            start = 1e-8 * scan_limit(spec)
        R = _maximal_minimum(slope, start, scan_limit(spec))
        if R is None:
            raise NoMinimumError(f"no sign change of V' found for {spec!r}")
        depth = float(spec.value(R))
        curvature = float(spec.derivatives(R, 2)[1])

    residual = abs(float(spec.derivatives(R, 1)[0]))
    if not curvature > 0:
        raise NoMinimumError(f"stationary point at R={R} is not a minimum")
    if residual > tol:
        raise NoMinimumError(f"|V'(R)| = {residual:.3e} exceeds tolerance {tol:.1e}")
    return MinimumInfo(R=R, depth=depth, curvature=curvature, residual=residual)


class LogMapping(NamedTuple):
    spec: LogAnharmonic
    energy_offset: float
    alpha_small: bool


def map_powerlaw_to_log(omega, lam, alpha):
    """Linearize ``lam |x|^alpha`` in alpha.

    ``lam |x|^alpha = lam + lam*alpha ln|x| + O(alpha^2)``, so with
    ``g^2 = -lam*alpha/2`` the power-law oscillator becomes the log-anharmonic
    one shifted by ``lam``.
    """
    if lam * alpha >= 0:
        raise ValueError("mapping requires lambda * alpha < 0 (g^2 would not be positive)")
    g = math.sqrt(-lam * alpha / 2)
    return LogMapping(LogAnharmonic(omega, g), float(lam), abs(alpha) <= SMALL_ALPHA)
