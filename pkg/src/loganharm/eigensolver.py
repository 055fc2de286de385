"""Finite-difference reference solver for ``-psi'' + V psi = E psi``.

The Laplacian is the second-order three-point stencil with Dirichlet walls.
On staggered grids (nodes at ``x_lo + (j + 1/2) h``) the walls sit on cell
faces, so a node never lands on x = 0. The potential enters as its cell
average whenever the family provides one; this keeps the integrable
logarithmic spike from degrading the scheme to first order.

Symmetric staggered grids for even potentials are split into even and odd
blocks, each a half-size tridiagonal matrix. This is exact (the reflection
commutes with the discrete Hamiltonian) and it separates doublets whose
splitting lies far below rounding, which inverse iteration on the full
matrix could not.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import trapezoid as _trapezoid

from . import tridiagonal
from .potentials import (
    NoMinimumError,
    Quadratic,
    PowerLaw,
    LogPower,
    is_even,
    is_half_line,
    is_singular_at_origin,
    locate_minimum,
)

CSV_VERSION = "# loganharm-lab v1"
PARITY_MIN = 0.99


class GridError(ValueError):
    """Grid incompatible with the potential's domain or singularity."""


class ConvergenceError(RuntimeError):
    """Grid refinement did not reach the requested tolerance.

    The best available estimate is kept on the exception.
    """

    def __init__(self, message, best=None, achieved_tol=None, grid=None):
        super().__init__(message)
        self.best = best
        self.achieved_tol = achieved_tol
        self.grid = grid


@dataclass(frozen=True)
class GridSpec:
    x_lo: float
    x_hi: float
    n_points: int
    staggered: bool = True

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise GridError("x_lo must be below x_hi")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise GridError("n_points must be an integer >= 16")

    @property
    def h(self):
        span = self.x_hi - self.x_lo
        return span / self.n_points if self.staggered else span / (self.n_points + 1)

    @property
    def nodes(self):
        j = np.arange(self.n_points)
        if self.staggered:
            return self.x_lo + (j + 0.5) * self.h
        return self.x_lo + (j + 1) * self.h

    @property
    def symmetric(self):
        return self.x_lo == -self.x_hi

    def refined(self):
        """Same domain, step halved."""
        n = 2 * self.n_points if self.staggered else 2 * self.n_points + 1
        return GridSpec(self.x_lo, self.x_hi, n, self.staggered)

    def widened(self, factor):
        """Domain enlarged by about ``factor`` about its anchor, step kept exactly."""
        h = self.h
        extra = int(math.ceil((factor - 1) * self.n_points))
        extra += extra % 2
        if self.x_lo == 0:
            lo, hi = 0.0, self.x_hi + extra * h
        else:
            lo, hi = self.x_lo - extra * h / 2, self.x_hi + extra * h / 2
        return GridSpec(lo, hi, self.n_points + extra, self.staggered)

    def check(self, spec):
        """Raise :class:`GridError` if ``spec`` cannot be discretized on this grid."""
        if is_half_line(spec) and self.x_lo < 0:
            raise GridError(f"{type(spec).__name__} lives on x > 0; x_lo must be >= 0")
        if is_singular_at_origin(spec) and self.x_lo < 0 < self.x_hi:
            if self.symmetric and not (self.staggered and self.n_points % 2 == 0):
                raise GridError("symmetric grid across a singular origin must be staggered with even n_points")
            if np.any(np.abs(self.nodes) <= 1e-12 * self.h):
                raise GridError("a grid node coincides with the singular point x = 0")


class EigenResult(NamedTuple):
    energies: np.ndarray
    wavefunctions: np.ndarray  # (n_points, k), trapezoid-normalized
    x: np.ndarray
    parities: tuple
    residuals: np.ndarray
    converged: np.ndarray
    grid: GridSpec


def potential_samples(spec, grid):
    """Cell-averaged potential on the grid cells, or point values if no average exists."""
    x = grid.nodes
    h = grid.h
    avg = spec.cell_average(x - h / 2, x + h / 2)
    if avg is None:
        return np.asarray(spec.value(x), dtype=float)
    return np.asarray(avg, dtype=float)


def assemble(spec, grid, parity=None):
    """Diagonal and off-diagonal of the discrete Hamiltonian.

    With ``parity`` in ``{"even", "odd"}`` the block acting on the right half
    of a symmetric staggered grid is returned instead of the full matrix.
    """
    grid.check(spec)
    h2 = grid.h**2
    v = potential_samples(spec, grid)
    diag = 2.0 / h2 + v
    if grid.staggered:
        # wall on the cell face: ghost value is minus the first interior value
        diag[0] += 1.0 / h2
        diag[-1] += 1.0 / h2
    if parity is not None:
        if not _reducible(spec, grid):
            raise GridError("parity blocks need an even potential on a symmetric staggered grid")
        half = grid.n_points // 2
        diag = diag[half:].copy()
        # mirror ghost at x = 0: +psi_0 for even states, -psi_0 for odd ones
        diag[0] = 2.0 / h2 + v[half] + (-1.0 if parity == "even" else 1.0) / h2
    off = np.full(diag.size - 1, -1.0 / h2)
    return diag, off


def _reducible(spec, grid):
    return is_even(spec) and grid.symmetric and grid.staggered and grid.n_points % 2 == 0


def overlap(psi_a, psi_b, x):
    """Trapezoidal inner product of two real wavefunctions sampled on nodes ``x``."""
    psi_a = np.asarray(psi_a, dtype=float)
    psi_b = np.asarray(psi_b, dtype=float)
    x = np.asarray(x, dtype=float)
    if psi_a.shape != psi_b.shape or psi_a.shape != x.shape:
        raise GridError("wavefunctions must be sampled on the same grid")
    return float(_trapezoid(psi_a * psi_b, x))


def _normalize(psi, x):
    psi = psi / math.sqrt(_trapezoid(psi * psi, x))
    i = int(np.argmax(np.abs(psi)))
    return psi if psi[i] > 0 else -psi


def _parity_label(psi, grid):
    if not grid.symmetric:
        return "none"
    s = overlap(psi, psi[::-1], grid.nodes)
    if s > PARITY_MIN:
        return "even"
    if s < -PARITY_MIN:
        return "odd"
    return "none"


def solve_lowest(spec, grid, k, parity=None, rtol=tridiagonal.RTOL):
    """Lowest ``k`` eigenpairs of the discretized Hamiltonian.

    Parameters
    ----------
    parity : {None, "even", "odd"}
        Restrict to one parity class (even potentials on symmetric staggered
        grids only). ``None`` returns the lowest states of both classes merged.
    """
    grid.check(spec)
    if k < 1 or k > grid.n_points // 4:
        raise ValueError(f"k must be between 1 and n_points/4 = {grid.n_points // 4}")
    if parity not in (None, "even", "odd"):
        raise ValueError("parity must be None, 'even' or 'odd'")
    x = grid.nodes
    full_diag, full_off = assemble(spec, grid)

    if _reducible(spec, grid):
        classes = (parity,) if parity else ("even", "odd")
        found = []
        for cls in classes:
            d, e = assemble(spec, grid, cls)
            ev = tridiagonal.lowest_eigenvalues(d, e, k, rtol=rtol)
            vec, _ = tridiagonal.inverse_iteration(d, e, ev)
            sign = 1.0 if cls == "even" else -1.0
            for lam, v in zip(ev, vec.T):
                found.append((lam, np.concatenate([sign * v[::-1], v]) / math.sqrt(2.0)))
        found.sort(key=lambda t: t[0])
        found = found[:k]
        energies = np.array([f[0] for f in found])
        vectors = np.column_stack([f[1] for f in found])
    elif parity is not None:
        raise GridError("parity blocks need an even potential on a symmetric staggered grid")
    else:
        energies = tridiagonal.lowest_eigenvalues(full_diag, full_off, k, rtol=rtol)
        vectors, _ = tridiagonal.inverse_iteration(full_diag, full_off, energies)

    norm = tridiagonal.matrix_norm(full_diag, full_off)
    residuals = np.array(
        [
            np.linalg.norm(tridiagonal.matvec(full_diag, full_off, v) - lam * v)
            for lam, v in zip(energies, vectors.T)
        ]
    )
    converged = residuals <= 1e-10 * max(norm, 1.0)
    psi = np.column_stack([_normalize(v, x) for v in vectors.T])
    parities = tuple(_parity_label(p, grid) for p in psi.T)
    return EigenResult(energies, psi, x, parities, residuals, converged, grid)


def default_grid(spec, width=12.0, points_per_length=8, min_points=16):
    """Starting grid sized from the harmonic approximation at the relevant minimum.

    The domain extends ``width`` oscillator lengths beyond the minimum; the
    step is ``1/points_per_length`` of an oscillator length.
    """
    try:
        info = locate_minimum(spec)
        R, freq = info.R, math.sqrt(info.curvature / 2)
    except NoMinimumError:
        R = 0.0
        freq = spec.omega if isinstance(spec, (Quadratic, PowerLaw, LogPower)) else 1.0
    length = 1.0 / math.sqrt(freq)
    reach = R + width * length
    if is_half_line(spec):
        lo, hi = 0.0, reach
    else:
        lo, hi = -reach, reach
    n = int(math.ceil((hi - lo) * points_per_length / length))
    n = max(n + n % 2, min_points + min_points % 2, 16)
    return GridSpec(lo, hi, n, staggered=True)


class Converged(NamedTuple):
    energies: np.ndarray
    achieved_tol: float
    grid: GridSpec
    result: EigenResult


def _check_domain(levels_on, grid, tol, max_widenings=4):
    base = levels_on(grid)
    for _ in range(max_widenings):
        wide = grid.widened(1.5)
        if np.max(np.abs(levels_on(wide) - base)) <= 0.1 * tol:
            return grid
        grid = grid.widened(2.0)
        base = levels_on(grid)
    raise ConvergenceError("domain truncation error does not settle", grid=grid)


def richardson(coarse, fine):
    """Extrapolate a second-order quantity from steps h and h/2."""
    return (4.0 * np.asarray(fine) - np.asarray(coarse)) / 3.0


def _refine(levels_on, grid, tol, max_refinements, max_points):
    """Halve the step until successive Richardson extrapolants agree within ``tol``."""
    prev_raw = levels_on(grid)
    prev_ext = None
    diff = math.inf
    for _ in range(max_refinements):
        if grid.refined().n_points > max_points:
            break
        grid = grid.refined()
        raw = levels_on(grid)
        ext = richardson(prev_raw, raw)
        if prev_ext is not None:
            diff = float(np.max(np.abs(ext - prev_ext)))
            if diff < tol:
                return ext, diff, grid
        prev_raw, prev_ext = raw, ext
    best = prev_ext if prev_ext is not None else prev_raw
    raise ConvergenceError(
        f"Richardson extrapolants still differ by {diff:.2e} > {tol:.1e}",
        best=best,
        achieved_tol=diff,
        grid=grid,
    )


def converge(
    spec,
    k,
    target_tol=1e-8,
    grid=None,
    parity=None,
    max_refinements=8,
    max_points=1 << 19,
    check_domain=True,
):
    """Grid-converged lowest ``k`` energies.

    The domain is first widened until the Dirichlet walls shift no level by
    more than a tenth of ``target_tol``. The step is then halved repeatedly,
    each pair of solves combined as ``(4 E_{h/2} - E_h) / 3``, until two
    successive extrapolants agree to ``target_tol``.

    Returns
    -------
    Converged
        ``energies`` (extrapolated), ``achieved_tol`` (last extrapolant change),
        ``grid`` (finest grid) and ``result`` (the raw solve on that grid, for
        wavefunctions and parity labels).

    Raises
    ------
    ConvergenceError
        After ``max_refinements`` halvings, carrying the best estimate.
    """
    if target_tol < 1e-10:
        raise ValueError("target_tol must be >= 1e-10")
    if grid is None:
        grid = default_grid(spec, min_points=4 * k)
    last = {}

    def levels_on(g):
        res = solve_lowest(spec, g, k, parity)
        last[g] = res
        return res.energies

    if check_domain:
        grid = _check_domain(levels_on, grid, target_tol)
    energies, achieved, grid = _refine(levels_on, grid, target_tol, max_refinements, max_points)
    result = last[grid]
    if not result.converged.all():
        bad = np.nonzero(~result.converged)[0].tolist()
        raise ConvergenceError(f"inverse iteration did not converge for states {bad}", best=energies)
    return Converged(energies, achieved, grid, result)


def parity_splittings(spec, n_pairs, tol=1e-8, grid=None, max_refinements=8):
    """Doublet splittings ``E_odd,n - E_even,n`` for an even potential.

    Both parity classes are refined on the same grid sequence so that their
    extrapolants share discretization error.
    """
    if not is_even(spec):
        raise ValueError(f"{type(spec).__name__} is not even in x")
    if grid is None:
        grid = default_grid(spec, min_points=4 * n_pairs)

    def levels_on(g):
        out = []
        for cls in ("even", "odd"):
            res = solve_lowest(spec, g, n_pairs, cls)
            want = "even" if cls == "even" else "odd"
            if any(p != want for p in res.parities):
                raise ConvergenceError(f"ambiguous parity labels {res.parities} in {cls} block")
            out.append(res.energies)
        return np.concatenate(out)

    grid = _check_domain(levels_on, grid, tol)
    levels, _, _ = _refine(levels_on, grid, tol, max_refinements, 1 << 19)
    even, odd = levels[:n_pairs], levels[n_pairs:]
    return odd - even


def write_wavefunctions_csv(result, fh, spec=None, energies=None):
    """Dump ``x, psi_0 .. psi_{k-1}`` with ``#``-prefixed metadata lines."""
    k = result.wavefunctions.shape[1]
    g = result.grid
    fh.write(CSV_VERSION + "\n")
    if spec is not None:
        fh.write(f"# spec: {spec!r}\n")
    fh.write(f"# grid: x_lo={g.x_lo!r} x_hi={g.x_hi!r} n_points={g.n_points} staggered={g.staggered}\n")
    shown = result.energies if energies is None else energies
    fh.write("# energies: " + " ".join(repr(float(e)) for e in shown) + "\n")
    fh.write("# parities: " + " ".join(result.parities) + "\n")
    fh.write("# residuals: " + " ".join(f"{r:.3e}" for r in result.residuals) + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["x"] + [f"psi_{i}" for i in range(k)])
    for xi, row in zip(result.x, result.wavefunctions):
        writer.writerow([repr(float(xi))] + [repr(float(v)) for v in row])
