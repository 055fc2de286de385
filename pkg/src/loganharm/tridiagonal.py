"""Lowest eigenpairs of a real symmetric tridiagonal matrix.

Eigenvalues come from Sturm-sequence counts (the number of negative pivots of
``T - s I``) with interval multisection; eigenvectors from shifted inverse
iteration. Only the ``k`` lowest pairs are ever formed, so the cost is
O(n) per Sturm pass regardless of matrix size.
"""

import numpy as np
from scipy.linalg import solve_banded

RTOL = 1e-13
ATOL = 1e-15
_SECTIONS = 63


def gershgorin_bounds(diag, off):
    diag = np.asarray(diag, dtype=float)
    radius = np.zeros_like(diag)
    a = np.abs(np.asarray(off, dtype=float))
    radius[:-1] += a
    radius[1:] += a
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def sturm_count(diag, off, shifts):
    """Number of eigenvalues strictly below each shift.

    Parameters
    ----------
    diag : (n,) array
    off : (n-1,) array
        Sub/super-diagonal.
    shifts : array_like
        Any number of shifts, all processed in one O(n) sweep.

    Notes
    -----
    A zero pivot becomes an infinite next term and is counted correctly under
    IEEE arithmetic, so no pivot guard is needed as long as no off-diagonal
    entry vanishes (zeros are bumped to the smallest normal number).
    """
    diag = np.asarray(diag, dtype=float)
    off2 = np.maximum(np.asarray(off, dtype=float) ** 2, np.finfo(float).tiny)
    s = np.atleast_1d(np.asarray(shifts, dtype=float))
    dms = np.subtract.outer(diag, s)
    neg = np.empty(dms.shape, dtype=bool)
    q = dms[0].copy()
    tmp = np.empty_like(q)
    np.less(q, 0, out=neg[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(1, diag.size):
            np.divide(off2[i - 1], q, out=tmp)
            np.subtract(dms[i], tmp, out=q)
            np.less(q, 0, out=neg[i])
    return neg.sum(axis=0)


def lowest_eigenvalues(diag, off, k, rtol=RTOL, atol=ATOL):
    """The ``k`` lowest eigenvalues in ascending order, by Sturm multisection.

    Each eigenvalue is bracketed until its interval is narrower than
    ``rtol * |lambda| + atol`` or can no longer be split in floating point.
    """
    diag = np.asarray(diag, dtype=float)
    n = diag.size
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    lo, hi = gershgorin_bounds(diag, off)
    pad = 2 * np.finfo(float).eps * max(abs(lo), abs(hi)) + atol
    lo -= pad
    hi += pad
    a = np.full(k, lo)
    b = np.full(k, hi)
    index = np.arange(k)
    frac = np.arange(1, _SECTIONS + 1) / (_SECTIONS + 1)
    for _ in range(200):
        width = b - a
        active = (width > rtol * np.maximum(np.abs(a), np.abs(b)) + atol) & (
            0.5 * (a + b) != a
        ) & (0.5 * (a + b) != b)
        if not active.any():
            break
        act = np.nonzero(active)[0]
        pts = a[act, None] + width[act, None] * frac[None, :]
        counts = sturm_count(diag, off, pts.ravel()).reshape(pts.shape)
        for row, i in enumerate(act):
            c = counts[row]
            # eigenvalue number i lies where the count first exceeds i
            above = np.nonzero(c > index[i])[0]
            j = above[0] if above.size else _SECTIONS
            if j > 0:
                a[i] = pts[row, j - 1]
            if j < _SECTIONS:
                b[i] = pts[row, j]
    return 0.5 * (a + b)


def inverse_iteration(diag, off, eigenvalues, max_iter=6, seed=0):
    """Unit eigenvectors for (accurate) ``eigenvalues`` by shifted inverse iteration.

    Vectors of eigenvalues closer than ``1e-3 * ||T||`` are re-orthogonalized
    against each other, so clustered pairs come out orthonormal.

    Returns
    -------
    vectors : (n, k) array
    residuals : (k,) array
        ``||T v - lambda v||_2`` for each unit vector ``v``.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.size
    norm = max(float(np.max(np.abs(diag)) + 2 * np.max(np.abs(off), initial=0.0)), 1.0)
    eps = np.finfo(float).eps
    rng = np.random.default_rng(seed)
    vecs = np.zeros((n, len(eigenvalues)))
    res = np.zeros(len(eigenvalues))
    cluster_gap = 1e-3 * norm
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[2, :-1] = off
    for j, lam in enumerate(eigenvalues):
        shift = lam
        ab[1] = diag - shift
        v = rng.uniform(-1, 1, n)
        v /= np.linalg.norm(v)
        close = [i for i in range(j) if abs(eigenvalues[i] - lam) < cluster_gap]
        for _ in range(max_iter):
            try:
                w = solve_banded((1, 1), ab, v, check_finite=False)
            except np.linalg.LinAlgError:
                # exactly singular: nudge the shift off the eigenvalue
                shift = lam + 10 * eps * norm
                ab[1] = diag - shift
                continue
            for i in close:
                w -= (vecs[:, i] @ w) * vecs[:, i]
            v = w / np.linalg.norm(w)
            r = matvec(diag, off, v) - lam * v
            res[j] = np.linalg.norm(r)
            if res[j] <= 10 * eps * norm * np.sqrt(n):
                break
        vecs[:, j] = v
    return vecs, res


def matvec(diag, off, v):
    """Product of the tridiagonal matrix with a vector."""
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out


def matrix_norm(diag, off):
    """Infinity norm of the tridiagonal matrix."""
    diag = np.abs(np.asarray(diag, dtype=float))
    a = np.abs(np.asarray(off, dtype=float))
    rows = diag.copy()
    rows[:-1] += a
    rows[1:] += a
    return float(rows.max())
