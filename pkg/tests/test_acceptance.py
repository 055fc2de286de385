"""Acceptance criteria, one check each.

Every ``criterion_*`` function returns ``(passed, detail)``. Under pytest each
becomes a test and a PASS/FAIL line is printed in the terminal summary; run
the file directly (``python tests/test_acceptance.py``) to get the same lines
without pytest.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

from loganharm.eigensolver import GridSpec, converge, parity_splittings, solve_lowest
from loganharm.experiments import run_delta, run_sweep, run_table1
from loganharm.largen import (
    Regime,
    approximant_overlap,
    centrifugal_exact,
    estimate_spectrum,
    gaussian_approximant,
    validity_report,
)
from loganharm.potentials import (
    Centrifugal,
    LogAnharmonic,
    LogPower,
    PowerLaw,
    QuadLogWell,
    Quadratic,
    derivatives,
    locate_minimum,
)

ORACLE = Path(__file__).parent / "fixtures" / "dense_grid_oracle.json"
TABLE_NUMERIC = (0.00141432, 0.00424309, 0.00707218, 0.00990161)

RESULTS = {}


def criterion_1():
    t0 = time.perf_counter()
    rep = run_table1(1e-8)
    elapsed = time.perf_counter() - t0
    largen_ok = all(
        abs(r["largen_shift"] - math.sqrt(2) * (2 * r["n"] + 1) * 0.001) < 1e-9 for r in rep.rows
    )
    dev = max(abs(r["numeric_shift"] - p) for r, p in zip(rep.rows, TABLE_NUMERIC))
    negative = all(r["difference"] < 0 for r in rep.rows)
    ok = largen_ok and dev <= 1e-7 and negative and elapsed < 60
    return ok, f"max numeric deviation {dev:.2e}, differences negative={negative}, {elapsed:.1f}s"


def criterion_2():
    t0 = time.perf_counter()
    quad_err = np.max(np.abs(converge(Quadratic(1), 4, 1e-9).energies - [1, 3, 5, 7]))
    worst = 0.0
    for N in (1, 5, 10):
        got = converge(Centrifugal(N), 4, 1e-8).energies
        worst = max(worst, float(np.max(np.abs(got - centrifugal_exact(N, 3)))))
    elapsed = time.perf_counter() - t0
    ok = quad_err <= 1e-8 and worst <= 1e-6 and elapsed < 30
    return ok, f"quadratic err {quad_err:.1e}, centrifugal err {worst:.1e}, {elapsed:.1f}s"


def criterion_3():
    bad = []
    for N in range(1, 1025):
        est = estimate_spectrum(Centrifugal(N), 0).energies[0]
        diff = centrifugal_exact(N, 0)[0] - est
        if not 0 < diff <= 1 / (4 * N):
            bad.append(N)
    return not bad, f"{1024 - len(bad)}/1024 values of N satisfy 0 < exact - estimate <= 1/(4N)"


def criterion_4():
    oracle = {(c["omega"], c["g"]): c for c in json.loads(ORACLE.read_text())["cases"]}
    regimes = [validity_report(LogAnharmonic(w, g)).regime for w, g in ((0.001, 1), (1, 1), (1, 0.1))]
    regimes_ok = regimes == [Regime.SUPPRESSED, Regime.SPLIT, Regime.INVISIBLE]
    tol = 1e-8
    d_small = parity_splittings(LogAnharmonic(0.001, 1), 1, tol)[0]
    d_split = parity_splittings(LogAnharmonic(1, 1), 1, tol)[0]
    ref = oracle[(1.0, 1.0)]["splittings"][0]
    rel = abs(d_split - ref) / ref
    sweep = run_sweep(1.0)
    sweep_ok = sweep.checks["delta0_nondecreasing_in_omega"].passed and sweep.checks["no_solver_failures"].passed
    ok = regimes_ok and abs(d_small) < 1e-9 and d_split > tol and rel <= 0.01 and sweep_ok
    return ok, (
        f"regimes {[r.value for r in regimes]}, delta0(0.001,1)={d_small:.1e}, "
        f"delta0(1,1)={d_split:.8f} vs oracle {ref:.8f} ({100 * rel:.3f}%), sweep monotone={sweep_ok}"
    )


def criterion_5():
    rep = run_delta(1.0, -2.0, (0.04, 0.02, 0.01, 0.005))
    res = {r["alpha"]: r["residual"] for r in rep.rows}
    ratio = res[0.02] / res[0.01]
    mags = [abs(res[a]) for a in (0.04, 0.02, 0.01, 0.005)]
    monotone = all(b < a for a, b in zip(mags, mags[1:]))
    return 3 <= ratio <= 5 and monotone, f"ratio {ratio:.4f}, |residuals| {['%.2e' % m for m in mags]}"


MATRIX = [
    LogAnharmonic(0.001, 1),
    LogAnharmonic(1, 1),
    LogAnharmonic(1, 0.1),
    LogPower(1, 1, 1),
    LogPower(0.001, 1, 2),
    LogPower(0.1, 1, 2),
    LogPower(0.001, 1, 3),
    LogPower(1, 2, 3),
    Centrifugal(1),
    Centrifugal(10),
    PowerLaw(1, -2, 0.01),
    PowerLaw(1, 2, -0.5),
    QuadLogWell(-1),
    QuadLogWell(0),
    QuadLogWell(0.5),
    QuadLogWell(2),
]


def criterion_6():
    worst = 0.0
    ok = True
    for spec in MATRIX:
        info = locate_minimum(spec)
        d1, d2 = derivatives(spec, info.R)
        worst = max(worst, abs(float(d1)))
        ok &= abs(float(d1)) < 1e-12 and d2 > 0
        if isinstance(spec, QuadLogWell):
            ok &= math.isclose(info.R, math.exp(spec.c - 0.5), rel_tol=1e-15)
    return bool(ok), f"{len(MATRIX)} instances, max |V'(R)| = {worst:.1e}"


def criterion_7():
    worst = 0.0
    for omega, R in ((1, 0.5), (1, 1), (0.1, 3)):
        f = lambda x: gaussian_approximant(x, -R, omega) * gaussian_approximant(x, R, omega)
        val, _ = quad(f, -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13)
        worst = max(worst, abs(val - approximant_overlap(LogAnharmonic(omega, omega * R))))
    return worst <= 1e-10, f"max |closed form - quadrature| = {worst:.1e}"


def criterion_8():
    e = [solve_lowest(Quadratic(1), GridSpec(-12, 12, n), 1).energies[0] for n in (192, 384)]
    ratio = (e[0] - 1) / (e[1] - 1)
    return 3.6 <= ratio <= 4.4, f"error ratio h vs h/2 = {ratio:.4f}"


CRITERIA = {
    1: ("level-shift table", criterion_1),
    2: ("exact-oracle suite", criterion_2),
    3: ("centrifugal error law", criterion_3),
    4: ("regime classification and splittings", criterion_4),
    5: ("small-alpha expansion order", criterion_5),
    6: ("minimum localization", criterion_6),
    7: ("Gaussian overlap closed form", criterion_7),
    8: ("convergence order", criterion_8),
}


def _line(number, name, passed, detail):
    return f"{'PASS' if passed else 'FAIL'} criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    name, fn = CRITERIA[number]
    passed, detail = fn()
    RESULTS[number] = _line(number, name, passed, detail)
    print(RESULTS[number])
    assert passed, detail


if __name__ == "__main__":
    for number, (name, fn) in CRITERIA.items():
        print(_line(number, name, *fn()), flush=True)
