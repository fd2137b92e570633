# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Dense O(n^3) kernels, compiled twin of ``_kernels_py``.

Same four entry points, same semantics; scalar inner loops run in C.
"""

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport sqrt

from .errors import ExactlySingular, NotPositiveDefinite

cnp.import_array()

ctypedef double complex zcomplex


cdef inline double _cabs(zcomplex z) nogil:
    cdef double re = z.real
    cdef double im = z.imag
    return sqrt(re * re + im * im)


def _as_square_complex(a):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix, got shape %r" % (a.shape,))
    return a


def jacobi_eigh(a, double tol=1e-13, int max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns ``(w, v)`` with eigenvalues ascending and unitary ``v`` whose
    columns are the eigenvectors.  Iterates sweeps until the largest
    off-diagonal magnitude is at most ``tol * max|A|``.
    """
    a = _as_square_complex(a).copy()
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.complex128)
    if n == 1:
        return a.real.reshape(1).copy(), v_arr
    cdef zcomplex[:, ::1] A = a
    cdef zcomplex[:, ::1] V = v_arr
    cdef double scale = np.abs(a).max()
    if scale == 0.0:
        return np.zeros(n), v_arr
    cdef double stop = tol * scale
    cdef double skip = 0.01 * stop
    cdef Py_ssize_t p, q, i, sweep
    cdef double absb, tau, t, c, s, off
    cdef zcomplex apq, phase, sph, sphc, xp, xq
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q and _cabs(A[p, q]) > off:
                    off = _cabs(A[p, q])
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                absb = _cabs(apq)
                if absb <= skip:
                    continue
                phase = apq / absb
                tau = (A[q, q].real - A[p, p].real) / (2.0 * absb)
                if tau >= 0.0:
                    t = -1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                sph = s * phase
                sphc = s * phase.conjugate()
                for i in range(n):
                    xp = A[p, i]
                    xq = A[q, i]
                    A[p, i] = c * xp + sph * xq
                    A[q, i] = -sphc * xp + c * xq
                for i in range(n):
                    xp = A[i, p]
                    xq = A[i, q]
                    A[i, p] = c * xp + sphc * xq
                    A[i, q] = -sph * xp + c * xq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                for i in range(n):
                    xp = V[i, p]
                    xq = V[i, q]
                    V[i, p] = c * xp + sphc * xq
                    V[i, q] = -sph * xp + c * xq
    w = a.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(v_arr[:, order])


def cholesky(a, double pivot_rtol=1e-14):
    """Lower Cholesky factor of a Hermitian positive definite matrix.

    Raises :class:`NotPositiveDefinite` when a pivot falls at or below
    ``pivot_rtol * max(diag(A))``.
    """
    a = _as_square_complex(a).copy()
    cdef Py_ssize_t n = a.shape[0]
    cdef zcomplex[:, ::1] A = a
    cdef double maxdiag = 0.0
    cdef Py_ssize_t i, j, k
    cdef double d, ljj
    cdef zcomplex lij
    if n:
        maxdiag = A[0, 0].real
        for i in range(1, n):
            if A[i, i].real > maxdiag:
                maxdiag = A[i, i].real
        if maxdiag <= 0.0:
            raise NotPositiveDefinite("no positive diagonal entry")
    for j in range(n):
        d = A[j, j].real
        if d <= pivot_rtol * maxdiag:
            raise NotPositiveDefinite("pivot %g at column %d" % (d, j))
        ljj = sqrt(d)
        A[j, j] = ljj
        for i in range(j + 1, n):
            A[i, j] = A[i, j] / ljj
        for k in range(j + 1, n):
            lij = A[k, j].conjugate()
            for i in range(k, n):
                A[i, k] = A[i, k] - A[i, j] * lij
    return np.tril(a)


def lu_factor(a, double singular_tol=1e-300):
    """Partially pivoted LU factorization, LAPACK-style packed output.

    Returns ``(lu, piv)`` where ``lu`` holds the unit-lower and upper
    factors and ``piv[j]`` is the row swapped with row ``j`` at step ``j``.
    Raises :class:`ExactlySingular` when the best available pivot magnitude
    drops below ``singular_tol``.
    """
    a = _as_square_complex(a).copy()
    cdef Py_ssize_t n = a.shape[0]
    piv_arr = np.arange(n, dtype=np.int64)
    cdef zcomplex[:, ::1] A = a
    cdef cnp.int64_t[::1] piv = piv_arr
    cdef Py_ssize_t i, j, k, p
    cdef double best, mag
    cdef zcomplex tmp, mult
    for j in range(n):
        p = j
        best = _cabs(A[j, j])
        for i in range(j + 1, n):
            mag = _cabs(A[i, j])
            if mag > best:
                best = mag
                p = i
        if best < singular_tol:
            raise ExactlySingular("pivot %g at column %d" % (best, j))
        piv[j] = p
        if p != j:
            for k in range(n):
                tmp = A[j, k]
                A[j, k] = A[p, k]
                A[p, k] = tmp
        for i in range(j + 1, n):
            A[i, j] = A[i, j] / A[j, j]
        for i in range(j + 1, n):
            mult = A[i, j]
            for k in range(j + 1, n):
                A[i, k] = A[i, k] - mult * A[j, k]
    return a, piv_arr


def solve_triangular(t, b, lower, unit_diagonal=False):
    """Solve ``T x = b`` for triangular ``T``; ``b`` may be a vector or matrix."""
    t = _as_square_complex(t)
    cdef Py_ssize_t n = t.shape[0]
    x = np.array(b, dtype=np.complex128, copy=True, order="C")
    if x.shape[0] != n:
        raise ValueError("dimension mismatch in triangular solve")
    vec = x.ndim == 1
    if vec:
        x = x.reshape(n, 1)
    cdef zcomplex[:, ::1] T = t
    cdef zcomplex[:, ::1] X = x
    cdef Py_ssize_t nrhs = x.shape[1]
    cdef bint low = bool(lower)
    cdef bint unit = bool(unit_diagonal)
    cdef Py_ssize_t i, j, r
    cdef zcomplex tij
    if low:
        for i in range(n):
            for j in range(i):
                tij = T[i, j]
                if tij != 0:
                    for r in range(nrhs):
                        X[i, r] = X[i, r] - tij * X[j, r]
            if not unit:
                tij = T[i, i]
                for r in range(nrhs):
                    X[i, r] = X[i, r] / tij
    else:
        for i in range(n - 1, -1, -1):
            for j in range(i + 1, n):
                tij = T[i, j]
                if tij != 0:
                    for r in range(nrhs):
                        X[i, r] = X[i, r] - tij * X[j, r]
            if not unit:
                tij = T[i, i]
                for r in range(nrhs):
                    X[i, r] = X[i, r] / tij
    return x.reshape(n) if vec else x
