"""Dense O(n^3) kernels, numpy implementation.

Fallback backend for :mod:`oqeig.kernels`; the compiled extension
``_kernels_cy`` provides the same four entry points with identical
semantics.  Everything works on complex128 and returns fresh arrays.
"""

import numpy as np

from .errors import ExactlySingular, NotPositiveDefinite


def _as_square_complex(a):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix, got shape %r" % (a.shape,))
    return a


def jacobi_eigh(a, tol=1e-13, max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending and unitary ``v`` whose
    columns are the eigenvectors.  Iterates sweeps until the largest
    off-diagonal magnitude is at most ``tol * max|A|``.
    """
    a = _as_square_complex(a).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if n == 1:
        return a.real.reshape(1).copy(), v
    scale = np.abs(a).max()
    if scale == 0.0:
        return np.zeros(n), v
    stop = tol * scale
    skip = 0.01 * stop
    for _ in range(max_sweeps):
        off = _offdiag_max(a)
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                absb = abs(apq)
                if absb <= skip:
                    continue
                phase = apq / absb
                tau = (a[q, q].real - a[p, p].real) / (2.0 * absb)
                if tau >= 0.0:
                    t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                sphc = s * np.conj(phase)
                sph = s * phase
                # A <- U^H A U restricted to rows/columns p, q
                rowp = c * a[p, :] + sph * a[q, :]
                rowq = -sphc * a[p, :] + c * a[q, :]
                a[p, :] = rowp
                a[q, :] = rowq
                colp = c * a[:, p] + sphc * a[:, q]
                colq = -sph * a[:, p] + c * a[:, q]
                a[:, p] = colp
                a[:, q] = colq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                colp = c * v[:, p] + sphc * v[:, q]
                colq = -sph * v[:, p] + c * v[:, q]
                v[:, p] = colp
                v[:, q] = colq
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order])


def _offdiag_max(a):
    d = np.abs(a).copy()
    np.fill_diagonal(d, 0.0)
    return d.max()


def cholesky(a, pivot_rtol=1e-14):
    """Lower Cholesky factor of a Hermitian positive definite matrix.

    Raises :class:`NotPositiveDefinite` when a pivot falls at or below
    ``pivot_rtol * max(diag(A))``.
    """
    a = _as_square_complex(a).copy()
    n = a.shape[0]
    maxdiag = a.diagonal().real.max() if n else 0.0
    if n and maxdiag <= 0.0:
        raise NotPositiveDefinite("no positive diagonal entry")
    for j in range(n):
        d = a[j, j].real
        if d <= pivot_rtol * maxdiag:
            raise NotPositiveDefinite("pivot %g at column %d" % (d, j))
        ljj = np.sqrt(d)
        a[j, j] = ljj
        if j + 1 < n:
            col = a[j + 1:, j] / ljj
            a[j + 1:, j] = col
            a[j + 1:, j + 1:] -= np.outer(col, np.conj(col))
    return np.tril(a)


def lu_factor(a, singular_tol=1e-300):
    """Partially pivoted LU factorization, LAPACK-style packed output.

    Returns ``(lu, piv)`` where ``lu`` holds the unit-lower and upper
    factors and ``piv[j]`` is the row swapped with row ``j`` at step ``j``.
    Raises :class:`ExactlySingular` when the best available pivot magnitude
    drops below ``singular_tol``.
    """
    a = _as_square_complex(a).copy()
    n = a.shape[0]
    piv = np.arange(n, dtype=np.int64)
    for j in range(n):
        p = j + int(np.argmax(np.abs(a[j:, j])))
        if abs(a[p, j]) < singular_tol:
            raise ExactlySingular("pivot %g at column %d" % (abs(a[p, j]), j))
        piv[j] = p
        if p != j:
            a[[j, p], :] = a[[p, j], :]
        a[j + 1:, j] /= a[j, j]
        if j + 1 < n:
            a[j + 1:, j + 1:] -= np.outer(a[j + 1:, j], a[j, j + 1:])
    return a, piv


def solve_triangular(t, b, lower, unit_diagonal=False):
    """Solve ``T x = b`` for triangular ``T``; ``b`` may be a vector or matrix."""
    t = _as_square_complex(t)
    n = t.shape[0]
    x = np.array(b, dtype=np.complex128, copy=True)
    if x.shape[0] != n:
        raise ValueError("dimension mismatch in triangular solve")
    if lower:
        for i in range(n):
            if i:
                x[i] -= t[i, :i] @ x[:i]
            if not unit_diagonal:
                x[i] /= t[i, i]
    else:
        for i in range(n - 1, -1, -1):
            if i + 1 < n:
                x[i] -= t[i, i + 1:] @ x[i + 1:]
            if not unit_diagonal:
                x[i] /= t[i, i]
    return x
