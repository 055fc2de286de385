import io
import math

import numpy as np
import pytest

from loganharm.eigensolver import (
    CSV_VERSION,
    ConvergenceError,
    GridError,
    GridSpec,
    assemble,
    converge,
    default_grid,
    overlap,
    parity_splittings,
    solve_lowest,
    write_wavefunctions_csv,
)
from loganharm.largen import gaussian_approximant
from loganharm.potentials import Centrifugal, LogAnharmonic, LogPower, QuadLogWell, Quadratic, locate_minimum

TABLE_NUMERIC = (0.00141432, 0.00424309, 0.00707218, 0.00990161)
TABLE_DIFFERENCE = (-0.00000011, -0.00000045, -0.00000111, -0.00000212)


# -- grids -------------------------------------------------------------------


def test_grid_validation():
    with pytest.raises(GridError):
        GridSpec(1.0, 0.0, 100)
    with pytest.raises(GridError):
        GridSpec(0.0, 1.0, 8)


def test_staggered_nodes():
    g = GridSpec(-1.0, 1.0, 20)
    assert g.h == 0.1
    assert g.nodes[0] == pytest.approx(-0.95)
    assert not np.any(g.nodes == 0)


def test_refine_and_widen_keep_structure():
    g = GridSpec(-3.0, 3.0, 60)
    assert g.refined().h == pytest.approx(g.h / 2)
    w = g.widened(1.5)
    assert w.h == pytest.approx(g.h, rel=1e-14)
    assert w.symmetric and w.x_hi > g.x_hi
    half = GridSpec(0.0, 3.0, 30).widened(2)
    assert half.x_lo == 0.0 and half.h == pytest.approx(0.1, rel=1e-14)


def test_half_line_family_rejects_negative_domain():
    with pytest.raises(GridError):
        solve_lowest(Centrifugal(1), GridSpec(-1.0, 5.0, 100), 1)


def test_singular_origin_needs_staggered_even_grid():
    spec = LogAnharmonic(1, 1)
    with pytest.raises(GridError):
        solve_lowest(spec, GridSpec(-5.0, 5.0, 101), 1)
    with pytest.raises(GridError):
        solve_lowest(spec, GridSpec(-5.0, 5.0, 100, staggered=False), 1)


def test_staggered_assembly_is_finite():
    for spec in (LogAnharmonic(1, 1), LogAnharmonic(0.01, 3), QuadLogWell(0.5)):
        g = default_grid(spec)
        d, e = assemble(spec, g)
        assert np.all(np.isfinite(d)) and np.all(np.isfinite(e))
    d, _ = assemble(Centrifugal(5), GridSpec(0.0, 10.0, 1000))
    assert np.all(np.isfinite(d))


def test_k_too_large():
    with pytest.raises(ValueError):
        solve_lowest(Quadratic(1), GridSpec(-5, 5, 40), 11)


def test_parity_block_needs_even_potential():
    with pytest.raises(GridError):
        solve_lowest(Centrifugal(1), GridSpec(0, 8, 200), 2, parity="even")


# -- exact oracles -----------------------------------------------------------


def test_quadratic_levels():
    conv = converge(Quadratic(1), 4, 1e-9)
    assert np.allclose(conv.energies, [1, 3, 5, 7], rtol=0, atol=1e-8)
    assert conv.achieved_tol < 1e-9


def test_quadratic_ground_state_only():
    conv = converge(Quadratic(1), 1, 1e-8)
    assert abs(conv.energies[0] - 1) < 1e-8


def test_centrifugal_ground_state():
    conv = converge(Centrifugal(10), 1, 1e-8, grid=GridSpec(0.0, 12.0, 192))
    assert abs(conv.energies[0] - 23) < 1e-6


def test_quadratic_second_order():
    errors = [solve_lowest(Quadratic(1), GridSpec(-12, 12, n), 1).energies[0] - 1 for n in (192, 384)]
    assert 3.6 <= errors[0] / errors[1] <= 4.4


def test_second_order_near_log_singularity():
    # the observed ratio drifts down to 4 as h shrinks; the log term adds a
    # positive higher-order correction at coarse h
    spec = LogAnharmonic(1, 1)
    e = [solve_lowest(spec, GridSpec(-10, 10, n), 1).energies[0] for n in (800, 1600, 3200, 6400, 12800)]
    ratios = [(a - b) / (b - c) for a, b, c in zip(e, e[1:], e[2:])]
    assert all(r1 > r2 for r1, r2 in zip(ratios, ratios[1:]))
    assert 3.6 <= ratios[-1] <= 4.4


def test_variational_lower_bound():
    for spec in (LogAnharmonic(1, 1), LogAnharmonic(1, 0.1), Centrifugal(2), QuadLogWell(1)):
        res = solve_lowest(spec, default_grid(spec), 1)
        assert res.energies[0] >= locate_minimum(spec).depth


def test_logpower_half_line_runs():
    spec = LogPower(0.1, 1, 2)
    conv = converge(spec, 2, 1e-7)
    info = locate_minimum(spec)
    shifts = conv.energies - info.depth
    assert shifts[0] == pytest.approx(math.sqrt(info.curvature / 2), rel=0.05)
    assert all(p == "none" for p in conv.result.parities)


# -- table and oracle values -------------------------------------------------


@pytest.fixture(scope="module")
def table_levels():
    spec = LogAnharmonic(0.001, 1)
    return converge(spec, 4, 1e-8, parity="even").energies - locate_minimum(spec).depth


def test_table_numeric_column(table_levels):
    assert np.allclose(table_levels, TABLE_NUMERIC, rtol=0, atol=1e-7)


def test_largen_error_grows_and_matches_table(table_levels):
    est = math.sqrt(2) * 0.001 * (2 * np.arange(4) + 1)
    diff = est - table_levels
    assert np.all(diff < 0)
    assert np.all(np.diff(np.abs(diff)) > 0)
    ratio = diff / np.array(TABLE_DIFFERENCE)
    assert np.all((ratio > 0.5) & (ratio < 2))


def test_ground_doublet_against_dense_oracle(dense_oracle):
    conv = converge(LogAnharmonic(1, 1), 2, 1e-8)
    ref = dense_oracle[(1.0, 1.0)]["splittings"][0]
    gap = conv.energies[1] - conv.energies[0]
    assert gap == pytest.approx(ref, rel=0.01)
    assert gap > 1e-8
    assert conv.result.parities == ("even", "odd")


@pytest.mark.parametrize("key", [(1.0, 0.5), (0.5, 1.0), (2.0, 1.0)])
def test_splittings_against_dense_oracle(dense_oracle, key):
    omega, g = key
    got = parity_splittings(LogAnharmonic(omega, g), 3, 1e-7)
    assert np.allclose(got, dense_oracle[key]["splittings"], rtol=0.01, atol=0)


def test_splitting_properties():
    tiny = parity_splittings(LogAnharmonic(0.001, 1), 1, 1e-8)
    assert abs(tiny[0]) < 1e-9
    split = parity_splittings(LogAnharmonic(1, 1), 2, 1e-8)
    assert 0 < split[0] < split[1]


def test_quadratic_splittings_are_two():
    assert np.allclose(parity_splittings(Quadratic(1), 3, 1e-8), 2.0, atol=1e-7)


def test_splittings_need_even_potential():
    with pytest.raises(ValueError):
        parity_splittings(Centrifugal(1), 1)


# -- wavefunctions -----------------------------------------------------------


@pytest.fixture(scope="module")
def doublet():
    spec = LogAnharmonic(1, 1)
    return solve_lowest(spec, default_grid(spec), 6)


def test_normalization_and_orthogonality(doublet):
    psi, x = doublet.wavefunctions, doublet.x
    k = psi.shape[1]
    gram = np.array([[overlap(psi[:, i], psi[:, j], x) for j in range(k)] for i in range(k)])
    assert np.allclose(np.diag(gram), 1, atol=1e-12)
    assert np.max(np.abs(gram - np.diag(np.diag(gram)))) <= 1e-8


def test_parity_labels(doublet):
    psi, x = doublet.wavefunctions, doublet.x
    for p, label in zip(psi.T, doublet.parities):
        mirror = overlap(p, p[::-1], x)
        assert abs(mirror) > 0.99
        assert label == ("even" if mirror > 0 else "odd")
    assert doublet.parities[:2] == ("even", "odd")
    assert overlap(psi[:, 0], psi[:, 1], x) == pytest.approx(0, abs=1e-10)


def test_residuals_and_ordering(doublet):
    assert doublet.converged.all()
    assert np.all(np.diff(doublet.energies) > 0)


def test_gaussian_overlap_on_grid():
    x = GridSpec(-15, 15, 6000).nodes
    val = overlap(gaussian_approximant(x, -1, 1), gaussian_approximant(x, 1, 1), x)
    assert val == pytest.approx(math.exp(-math.sqrt(2)), abs=1e-6)


def test_overlap_length_mismatch():
    with pytest.raises(ValueError):
        overlap(np.ones(3), np.ones(4), np.arange(3.0))


# -- convergence control -----------------------------------------------------


def test_tolerance_floor():
    with pytest.raises(ValueError):
        converge(Quadratic(1), 1, 1e-12)


def test_nonconvergence_carries_best_estimate():
    with pytest.raises(ConvergenceError) as info:
        converge(LogAnharmonic(1, 1), 2, 1e-10, max_refinements=1)
    err = info.value
    assert err.best is not None and len(err.best) == 2
    assert err.best[1] - err.best[0] == pytest.approx(0.558, abs=1e-3)


def test_domain_widening_rescues_a_tight_box():
    conv = converge(Quadratic(1), 1, 1e-8, grid=GridSpec(-3, 3, 48))
    assert abs(conv.energies[0] - 1) < 1e-8
    assert conv.grid.x_hi > 3


def test_deterministic():
    a = converge(LogAnharmonic(1, 1), 2, 1e-8).energies
    b = converge(LogAnharmonic(1, 1), 2, 1e-8).energies
    assert np.array_equal(a, b)


def test_csv_dump():
    res = solve_lowest(Quadratic(1), GridSpec(-6, 6, 64), 2)
    buf = io.StringIO()
    write_wavefunctions_csv(res, buf, spec=Quadratic(1))
    lines = buf.getvalue().splitlines()
    assert lines[0] == CSV_VERSION
    header = next(l for l in lines if not l.startswith("#"))
    assert header == "x,psi_0,psi_1"
    data = [l for l in lines if l and not l.startswith("#")][1:]
    assert len(data) == 64
