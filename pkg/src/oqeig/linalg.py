"""Dense linear algebra layer: pencils, P-inner products, factorizations,
and the Jacobi-backed eigenvalue oracle used to verify everything else.

All matrices are numpy arrays, promoted to complex128.  The P-inner product
follows the convention ``(x, y)_P = y^H P x`` (linear in ``x``, conjugate
linear in ``y``).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    DimensionMismatch,
    ExactlySingular,
    NotHermitian,
    NotPositiveDefinite,
    NotSelfAdjoint,
    SingularMatrix,
    SingularPencilFamily,
)

_EPS_LADDER = (1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0)


def as_matrix(a):
    """Promote to a square complex128 matrix."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch("expected a square matrix, got %r" % (a.shape,))
    return a


def as_vector(x, n=None):
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    if n is not None and x.shape[0] != n:
        raise DimensionMismatch("expected a vector of length %d, got %d"
                                % (n, x.shape[0]))
    return x


def hermitian_defect(a):
    """max|A - A^H| / max|A| (0 for the zero matrix)."""
    a = as_matrix(a)
    scale = np.abs(a).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(a - a.conj().T).max() / scale)


def is_hermitian(a, tol=1e-12):
    return hermitian_defect(a) <= tol


@dataclass(frozen=True)
class Pencil:
    """The matrix pair (M, N) of the eigenvalue problem M x = lambda N x."""

    M: np.ndarray
    N: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", as_matrix(self.M))
        object.__setattr__(self, "N", as_matrix(self.N))
        if self.M.shape != self.N.shape:
            raise DimensionMismatch("M is %r but N is %r"
                                    % (self.M.shape, self.N.shape))

    @property
    def n(self):
        return self.M.shape[0]

    def shifted(self, mu):
        """The pair (M - mu*N, N)."""
        return Pencil(self.M - mu * self.N, self.N)

    def swapped(self):
        """The pair (N, M)."""
        return Pencil(self.N, self.M)


class CholeskyFactor:
    """Lower-triangular L with A = L L^H, usable as a solve handle for A."""

    def __init__(self, lower):
        self.lower = np.asarray(lower, dtype=np.complex128)
        self.n = self.lower.shape[0]

    def solve(self, b):
        y = kernels.solve_triangular(self.lower, b, lower=True)
        return kernels.solve_triangular(self.lower.conj().T, y, lower=False)

    solve_adjoint = solve  # A is Hermitian


class LUFactor:
    """Packed partially pivoted LU of a general square matrix."""

    def __init__(self, lu, piv):
        self.lu = lu
        self.piv = piv
        self.n = lu.shape[0]
        diag = np.abs(np.diagonal(lu))
        self.max_pivot = float(diag.max()) if self.n else 0.0
        self.min_pivot = float(diag.min()) if self.n else 0.0
        # crude condition estimate; flags the inverse-iteration regime
        self.near_singular = bool(
            self.min_pivot <= 1e-14 * max(self.max_pivot, 1e-300))

    def _permute(self, b, reverse=False):
        x = np.array(b, dtype=np.complex128, copy=True)
        steps = range(self.n - 1, -1, -1) if reverse else range(self.n)
        for j in steps:
            p = self.piv[j]
            if p != j:
                x[[j, p]] = x[[p, j]]
        return x

    def solve(self, b):
        """Solve A x = b (b may be a vector or matrix)."""
        y = self._permute(b)
        y = kernels.solve_triangular(self.lu, y, lower=True, unit_diagonal=True)
        return kernels.solve_triangular(self.lu, y, lower=False)

    def solve_adjoint(self, b):
        """Solve A^H x = b."""
        y = kernels.solve_triangular(self.lu.conj().T, b, lower=True)
        y = kernels.solve_triangular(self.lu.conj().T, y, lower=False,
                                     unit_diagonal=True)
        return self._permute(y, reverse=True)


def cholesky_spd(a, pivot_rtol=1e-14, hermitian_tol=1e-12):
    """Cholesky factor of a Hermitian positive definite matrix."""
    a = as_matrix(a)
    if not is_hermitian(a, hermitian_tol):
        raise NotHermitian("Hermitian defect %g" % hermitian_defect(a))
    return CholeskyFactor(kernels.cholesky(a, pivot_rtol=pivot_rtol))


def lu_factorize(a):
    """Partially pivoted LU handle; ``near_singular`` flags tiny pivot ratios."""
    a = as_matrix(a)
    lu, piv = kernels.lu_factor(a)
    return LUFactor(lu, piv)


def lu_solve(a, b):
    """Solve A x = b by partially pivoted LU."""
    return lu_factorize(a).solve(b)


class InnerProduct:
    """Handle for the inner product (x, y)_P = y^H P x with P positive definite.

    Three kinds: ``identity``, ``explicit`` (a dense SPD matrix) and
    ``inverse`` (P = A^{-1} applied through a Cholesky solve, A never
    inverted explicitly).  Positivity is spot-checked on random vectors at
    construction.
    """

    def __init__(self, kind, n, matrix=None, factor=None, check=True):
        self.kind = kind
        self.n = n
        self._matrix = matrix
        self._factor = factor
        if check and kind != "identity":
            self._spot_check()

    @classmethod
    def identity(cls, n):
        return cls("identity", n)

    @classmethod
    def from_matrix(cls, p, hermitian_tol=1e-12):
        p = as_matrix(p)
        if not is_hermitian(p, hermitian_tol):
            raise NotHermitian("P has Hermitian defect %g" % hermitian_defect(p))
        return cls("explicit", p.shape[0], matrix=p)

    @classmethod
    def inverse_of(cls, a, hermitian_tol=1e-12):
        """P = A^{-1} for SPD A, realized as a factor-backed solve."""
        factor = cholesky_spd(a, hermitian_tol=hermitian_tol)
        return cls("inverse", factor.n, factor=factor)

    def _spot_check(self, k=4, tol=1e-10):
        rng = np.random.default_rng(20230817)
        for _ in range(k):
            x = rng.standard_normal(self.n) + 1j * rng.standard_normal(self.n)
            q = np.vdot(x, self.apply(x))
            if q.real <= 0.0 or abs(q.imag) > tol * abs(q.real):
                raise NotPositiveDefinite(
                    "inner product failed positivity spot check: (Px,x)=%r" % q)

    def apply(self, x):
        """P x for a vector or matrix argument."""
        x = np.asarray(x, dtype=np.complex128)
        if x.shape[0] != self.n:
            raise DimensionMismatch("operand has leading dimension %d, "
                                    "expected %d" % (x.shape[0], self.n))
        if self.kind == "identity":
            return x
        if self.kind == "explicit":
            return self._matrix @ x
        return self._factor.solve(x)

    def inner(self, x, y):
        """(x, y)_P = y^H P x."""
        x = as_vector(x, self.n)
        y = as_vector(y, self.n)
        return complex(np.vdot(y, self.apply(x)))

    def norm(self, x):
        q = self.inner(x, x)
        return float(np.sqrt(max(q.real, 0.0)))

    def matrix(self):
        """Dense P (assembles the inverse kind column by column)."""
        if self.kind == "identity":
            return np.eye(self.n, dtype=np.complex128)
        if self.kind == "explicit":
            return self._matrix.copy()
        p = self._factor.solve(np.eye(self.n, dtype=np.complex128))
        return (p + p.conj().T) / 2.0


class IdentityOperator:
    """Z = I."""

    def __init__(self, n):
        self.n = n

    def apply(self, x):
        return np.asarray(x, dtype=np.complex128)

    apply_adjoint = apply


class MatrixOperator:
    """Z given as an explicit dense matrix."""

    def __init__(self, a):
        self.a = as_matrix(a)
        self.n = self.a.shape[0]

    def apply(self, x):
        return self.a @ np.asarray(x, dtype=np.complex128)

    def apply_adjoint(self, x):
        return self.a.conj().T @ np.asarray(x, dtype=np.complex128)


class SolveOperator:
    """Z = A^{-1} applied through a Cholesky or LU factor of A."""

    def __init__(self, factor):
        self.factor = factor
        self.n = factor.n

    def apply(self, x):
        return self.factor.solve(np.asarray(x, dtype=np.complex128))

    def apply_adjoint(self, x):
        return self.factor.solve_adjoint(np.asarray(x, dtype=np.complex128))


def as_operator(z, n):
    """Coerce None/"identity", a matrix, a factor, or an operator to a handle."""
    if z is None or (isinstance(z, str) and z == "identity"):
        return IdentityOperator(n)
    if isinstance(z, (CholeskyFactor, LUFactor)):
        return SolveOperator(z)
    if hasattr(z, "apply") and hasattr(z, "apply_adjoint"):
        return z
    return MatrixOperator(z)


def hermitian_definite_eigs(h, g):
    """Solve H v = lambda G v for Hermitian H and SPD G by congruence.

    Returns ascending eigenvalues and eigenvectors with v^H G v = I.
    Used for projected subproblems and the verification identities.
    """
    h = as_matrix(h)
    g = as_matrix(g)
    factor = CholeskyFactor(kernels.cholesky((g + g.conj().T) / 2.0,
                                             pivot_rtol=1e-13))
    llow = factor.lower
    b = kernels.solve_triangular(llow, (h + h.conj().T) / 2.0, lower=True)
    s = kernels.solve_triangular(llow, b.conj().T, lower=True)
    w, u = kernels.jacobi_eigh((s + s.conj().T) / 2.0)
    v = kernels.solve_triangular(llow.conj().T, u, lower=False)
    return w, v


def p_inner(p, x, y):
    """(x, y)_P = y^H P x; conjugate symmetric in its vector arguments."""
    return p.inner(x, y)


def p_norm(p, x):
    return p.norm(x)


def hermitian_eigs(a, hermitian_tol=1e-12, tol=1e-13):
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix.

    Backed by cyclic Jacobi rotations so the result is independent of the
    iterative solvers this package exists to test.
    """
    a = as_matrix(a)
    if not is_hermitian(a, hermitian_tol):
        raise NotHermitian("Hermitian defect %g" % hermitian_defect(a))
    return kernels.jacobi_eigh((a + a.conj().T) / 2.0, tol=tol)


@dataclass
class SpectrumOracle:
    """Full eigendecomposition of a desk-scale pencil, for verification only.

    ``eigenvalues`` ascend; eigenvector columns satisfy
    (N v_i, N v_j)_P = delta_ij.  ``n_infinite`` counts modes dropped when a
    singular N forced the epsilon-substitution N := N + eps*M.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n_infinite: int = 0
    epsilon: float = 0.0

    def nearest(self, mu):
        """(eigenvalue, index) closest to mu."""
        k = int(np.argmin(np.abs(self.eigenvalues - mu)))
        return float(self.eigenvalues[k]), k


def self_adjoint_residual(pencil, p):
    """Relative Hermitian defect of N^H P M."""
    h = pencil.N.conj().T @ p.apply(pencil.M)
    return hermitian_defect(h), h


def pencil_eigs_oracle(pencil, p, self_adjoint_tol=1e-8):
    """Spectrum of a self-adjoint pencil via Hermitian-definite reduction.

    Forms G = N^H P N (SPD) and H = N^H P M (Hermitian), reduces
    H v = lambda G v by Cholesky congruence and solves with the Jacobi
    eigensolver.  A singular N is replaced by N + eps*M with the smallest
    workable eps, and the eigenvalues are mapped back through
    lambda = lambda' / (1 - eps*lambda').
    """
    resid, h = self_adjoint_residual(pencil, p)
    if resid > self_adjoint_tol:
        raise NotSelfAdjoint("N^H P M has Hermitian defect %g" % resid)

    def reduce(nmat, hmat):
        g = nmat.conj().T @ p.apply(nmat)
        return hermitian_definite_eigs(hmat, g)

    try:
        w, v = reduce(pencil.N, h)
        return SpectrumOracle(w, v)
    except NotPositiveDefinite:
        pass

    scale_m = max(np.abs(pencil.M).max(), 1e-300)
    scale_n = np.abs(pencil.N).max()
    for eps_rel in _EPS_LADDER:
        eps = eps_rel * max(scale_n / scale_m, 1e-300) if scale_n else eps_rel
        nmat = pencil.N + eps * pencil.M
        hmat = nmat.conj().T @ p.apply(pencil.M)
        try:
            wp, v = reduce(nmat, hmat)
        except NotPositiveDefinite:
            continue
        denom = 1.0 - eps * wp
        finite = np.abs(denom) > 1e-8 * np.maximum(1.0, np.abs(eps * wp))
        w = wp[finite] / denom[finite]
        order = np.argsort(w, kind="stable")
        return SpectrumOracle(w[order], v[:, finite][:, order],
                              n_infinite=int((~finite).sum()), epsilon=eps)

    probe_failures = 0
    probes = (pencil.N, pencil.M, pencil.N + pencil.M, pencil.N - pencil.M,
              pencil.N + 1j * pencil.M)
    for combo in probes:
        try:
            if lu_factorize(combo).near_singular:
                probe_failures += 1
        except ExactlySingular:
            probe_failures += 1
    if probe_failures == len(probes):
        raise SingularPencilFamily(
            "no probed linear combination of M and N is invertible")
    raise NotPositiveDefinite(
        "could not build an SPD Gram matrix for the oracle reduction")


def normalizing_inner_product(x_mat):
    """Inner product making X Lambda X^{-1} normal: P = (X X^H)^{-1}.

    ``x_mat`` is the (invertible) eigenvector matrix of a diagonalizable
    matrix.  The construction is self-checked: a canonical
    M = X diag(1..n) X^{-1} must commute with its P-adjoint.
    """
    x_mat = as_matrix(x_mat)
    n = x_mat.shape[0]
    try:
        lu = lu_factorize(x_mat)
    except ExactlySingular as exc:
        raise SingularMatrix("eigenvector matrix is singular") from exc
    if lu.near_singular:
        raise SingularMatrix("eigenvector matrix is numerically singular")
    g = x_mat @ x_mat.conj().T
    factor = cholesky_spd((g + g.conj().T) / 2.0)
    pmat = factor.solve(np.eye(n, dtype=np.complex128))
    pmat = (pmat + pmat.conj().T) / 2.0
    p = InnerProduct.from_matrix(pmat)

    lam = np.arange(1, n + 1, dtype=np.complex128)
    m = (x_mat * lam) @ lu.solve(np.eye(n, dtype=np.complex128))
    adj = lu_solve(pmat, m.conj().T @ pmat)
    comm = m @ adj - adj @ m
    scale = max(np.abs(m).max() ** 2, 1e-300)
    if np.abs(comm).max() > 1e-8 * scale:
        raise NotPositiveDefinite(
            "normalizing construction failed its commutator self-check")
    return p
