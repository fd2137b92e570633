"""Cayley-transform identities for self-adjoint pencils, finite-dimensional.

These are global statements about infima of ratio norms, so they are
evaluated exactly through Hermitian-definite eigensolves rather than by
sampling.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ExactlySingular, NotPositiveDefinite, SingularMatrix
from .linalg import hermitian_definite_eigs, lu_factorize, pencil_eigs_oracle


@dataclass
class CayleyData:
    """U = (M + iN)(M - iN)^{-1} and T = N (M - iN)^{-1}.

    For self-adjoint pencils U is P-unitary and T is a normal contraction.
    """

    u: np.ndarray
    t: np.ndarray


def cayley_transform(pencil, p=None):
    """Assemble the Cayley pair (U, T) of the pencil."""
    minus = pencil.M - 1j * pencil.N
    try:
        factor = lu_factorize(minus)
    except ExactlySingular as exc:
        raise SingularMatrix("M - iN is singular") from exc
    inv = factor.solve(np.eye(pencil.n, dtype=np.complex128))
    return CayleyData(u=(pencil.M + 1j * pencil.N) @ inv, t=pencil.N @ inv)


def cayley_norm_identity(pencil, p):
    """Both sides of inf ||Mx||_P/||Nx||_P = sqrt(1/||N(M-iN)^{-1}||_P^2 - 1).

    The left side is the square root of the smallest eigenvalue of
    (M^H P M, N^H P N); the right side uses the P-operator norm of T,
    computed from the largest eigenvalue of (T^H P T, P).
    """
    data = cayley_transform(pencil, p)
    m, n = pencil.M, pencil.N
    w_lhs, _ = hermitian_definite_eigs(m.conj().T @ p.apply(m),
                                       n.conj().T @ p.apply(n))
    lhs = float(np.sqrt(max(w_lhs[0], 0.0)))
    pmat = p.matrix()
    w_t, _ = hermitian_definite_eigs(data.t.conj().T @ p.apply(data.t), pmat)
    t_norm2 = max(float(w_t[-1]), 1e-300)
    rhs = float(np.sqrt(max(1.0 / t_norm2 - 1.0, 0.0)))
    return lhs, rhs


def distance_principle(pencil, p, s):
    """inf ||(M - sN)x||_P/||Nx||_P against the oracle distance of s.

    Returns ``(inf_value, oracle_distance)``; for a self-adjoint pencil
    with invertible N the two agree, locating the eigenvalue nearest s.
    """
    shifted = pencil.M - s * pencil.N
    n = pencil.N
    try:
        w, _ = hermitian_definite_eigs(shifted.conj().T @ p.apply(shifted),
                                       n.conj().T @ p.apply(n))
    except NotPositiveDefinite as exc:
        raise SingularMatrix("N^H P N is not positive definite; "
                             "N is singular") from exc
    inf_value = float(np.sqrt(max(w[0], 0.0)))
    oracle = pencil_eigs_oracle(pencil, p)
    oracle_distance = float(np.min(np.abs(oracle.eigenvalues - s)))
    return inf_value, oracle_distance
