"""Quotient iterations and their convergence monitor.

The driver loops share one skeleton: monitor the second singular value of a
normalized two-column array, build the optimal right-hand side z from the
two normalized images, pick a shift, solve the shifted system, renormalize.
They differ only in which pair is monitored and how the shift is produced.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ExactlySingular,
    NInKernel,
    NonConvergence,
    PhaseUndefined,
    ZeroVector,
)
from .linalg import as_vector, hermitian_defect, lu_factorize
from .midpoint import midpoint_refine
from .quotients import rayleigh_quotient

_TINY = 1e-300


def sigma2(p, a, b):
    """Second singular value, in the P metric, of the P-normalized pair [a b].

    Equal to sqrt(1 - |g|) for the normalized Gram off-diagonal g, but
    evaluated through the orthogonal residual of one normalized column
    against the other, which stays accurate down to machine level where the
    Gram eigenvalue difference 1 - |g| has already rounded away.
    """
    na = p.norm(a)
    nb = p.norm(b)
    if na <= _TINY or nb <= _TINY:
        raise ZeroVector("sigma2 needs two nonzero columns")
    ahat = np.asarray(a, dtype=np.complex128) / na
    bhat = np.asarray(b, dtype=np.complex128) / nb
    c = p.inner(bhat, ahat)
    r = bhat - c * ahat
    return float(p.norm(r) / np.sqrt(1.0 + abs(c)))


def sigma2_raw(p, a, b):
    """Second singular value of the unnormalized pair [a b] in the P metric."""
    na2 = p.inner(a, a).real
    nb2 = p.inner(b, b).real
    if na2 <= _TINY or nb2 <= _TINY:
        raise ZeroVector("sigma2 needs two nonzero columns")
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    c = p.inner(b, a)
    r = b - (c / na2) * a
    det = na2 * p.inner(r, r).real  # Gram determinant
    tr = na2 + nb2
    disc = max(tr * tr - 4.0 * det, 0.0)
    lam_min = 2.0 * det / (tr + np.sqrt(disc))
    return float(np.sqrt(max(lam_min, 0.0)))


def optimal_z(p, w1, w2):
    """The unit combination of w1, w2 maximizing |(z,w1)_P|^2 + |(z,w2)_P|^2.

    For P-orthogonal inputs the phase factor degenerates; the convention is
    then z = (w1 + w2)/sqrt(2).
    """
    w1 = np.asarray(w1, dtype=np.complex128)
    w2 = np.asarray(w2, dtype=np.complex128)
    g = p.inner(w2, w1)
    absg = abs(g)
    if absg <= _TINY:
        return (w1 + w2) / np.sqrt(2.0)
    return ((g / absg) * w1 + w2) / np.sqrt(2.0 + 2.0 * absg)


@dataclass
class IterationConfig:
    """Knobs of the quotient iterations.

    ``mu`` is the midpoint shift and is mandatory for the extreme-eigenvalue
    iteration.  ``epsilon`` stops the loop once the monitored pair has
    second singular value at or below it.  ``raw_sigma2`` switches the
    monitor to the unnormalized columns, for fidelity experiments only.
    """

    epsilon: float = 1e-10
    max_iters: int = 50
    mu: float | None = None
    singular_shift_bump: float = 1e-12
    raw_sigma2: bool = False

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class IterationStep:
    k: int
    shift: complex
    sigma2: float
    quotient_estimate: complex
    solve_near_singular: bool


@dataclass
class IterationLog:
    """Per-iteration records plus the final eigenpair estimate."""

    method: str
    mu: float | None
    steps: list = field(default_factory=list)
    x: np.ndarray | None = None
    eigenvalue: complex | None = None
    sigma2_final: float | None = None
    rq_final: complex | None = None
    converged: bool = False

    @property
    def iterations(self):
        return len(self.steps)

    def sigma2_trajectory(self):
        return [s.sigma2 for s in self.steps] + (
            [self.sigma2_final] if self.sigma2_final is not None else [])


def _solve_shifted(a_mat, b_mat, l, rhs, bump):
    """Solve (A - l B) xhat = rhs; one retry with a bumped shift on pivot collapse."""
    try:
        factor = lu_factorize(a_mat - l * b_mat)
    except ExactlySingular:
        l = l + bump * (1.0 + abs(l))
        factor = lu_factorize(a_mat - l * b_mat)
    return factor.solve(rhs), factor.near_singular, l


def _run_quotient_loop(method, a_mat, b_mat, p, x0, config, shift_fn,
                       rhs_fn, mu_offset):
    """Shared driver: monitor sigma2([Ax Bx]), solve (A - l B) xhat = rhs."""
    x = as_vector(x0)
    nx0 = p.norm(b_mat @ x)
    if nx0 <= _TINY:
        raise NInKernel("Bx0 = 0")
    x = x / p.norm(x)
    monitor = sigma2_raw if config.raw_sigma2 else sigma2
    log = IterationLog(method=method, mu=config.mu)
    converged = False
    for k in range(config.max_iters):
        ax = a_mat @ x
        bx = b_mat @ x
        s2 = monitor(p, ax, bx)
        if s2 <= config.epsilon:
            converged = True
            break
        w1 = ax / p.norm(ax)
        w2 = bx / p.norm(bx)
        z = optimal_z(p, w1, w2)
        l = shift_fn(x, ax, bx)
        rhs = rhs_fn(x, bx, z)
        xhat, near_sing, l_used = _solve_shifted(a_mat, b_mat, l, rhs,
                                                 config.singular_shift_bump)
        nxhat = p.norm(xhat)
        if nxhat <= _TINY:
            raise ZeroVector("shifted solve returned a zero vector")
        x = xhat / nxhat
        log.steps.append(IterationStep(k=k, shift=l_used, sigma2=s2,
                                       quotient_estimate=l_used + mu_offset,
                                       solve_near_singular=near_sing))
    else:
        ax = a_mat @ x
        bx = b_mat @ x
        s2 = monitor(p, ax, bx)
        converged = s2 <= config.epsilon
    log.x = x
    log.sigma2_final = s2
    log.converged = converged
    final_shift = shift_fn(x, a_mat @ x, b_mat @ x)
    log.eigenvalue = final_shift + mu_offset
    if not converged:
        raise NonConvergence(
            "sigma2 = %g > %g after %d iterations"
            % (s2, config.epsilon, config.max_iters), result=log)
    return log


def optimal_quotient_iteration(pencil, p, x0, config):
    """Extreme-eigenvalue quotient iteration with a midpoint shift.

    Works on A = M - mu N, B = N; the per-step shift is the optimal
    quotient of (A, B) at the current x and the reported eigenvalue is the
    final shift plus mu.  Requires ``config.mu``.
    """
    if config.mu is None:
        raise ValueError("config.mu (midpoint estimate) is required")
    a_mat = pencil.M - config.mu * pencil.N
    b_mat = pencil.N

    def shift_fn(x, ax, bx):
        ip = p.inner(ax, bx)
        if abs(ip) <= _TINY:
            raise PhaseUndefined(
                "(Ax, Bx)_P = 0 at the current iterate; restart the "
                "iteration from a different starting vector")
        return (ip / abs(ip)) * p.norm(ax) / p.norm(bx)

    try:
        log = _run_quotient_loop("optimal_quotient", a_mat, b_mat, p, x0,
                                 config, shift_fn, lambda x, bx, z: z,
                                 config.mu)
    except NonConvergence as exc:
        if exc.result is not None:
            exc.result.rq_final = rayleigh_quotient(pencil, p, exc.result.x)
        raise
    log.rq_final = rayleigh_quotient(pencil, p, log.x)
    return log


def smallest_pd_iteration(pencil, p, x0, config):
    """Smallest-eigenvalue iteration for a positive definite pencil.

    Monitors sigma2([Mx Nx]); each shift is the reciprocal of the midpoint
    refinement run on the swapped pair (N, M) at the current iterate.
    """
    swapped = pencil.swapped()

    def shift_fn(x, ax, bx):
        state = midpoint_refine(swapped, p, x)
        if not state.alpha > 0:
            raise PhaseUndefined(
                "midpoint refinement returned alpha <= 0; pencil not "
                "positive definite at the iterate")
        return 1.0 / state.alpha

    try:
        log = _run_quotient_loop("smallest_pd", pencil.M, pencil.N, p, x0,
                                 config, shift_fn, lambda x, bx, z: z, 0.0)
    except NonConvergence as exc:
        if exc.result is not None:
            exc.result.rq_final = rayleigh_quotient(pencil, p, exc.result.x)
        raise
    log.rq_final = rayleigh_quotient(pencil, p, log.x)
    return log


def rayleigh_quotient_iteration(pencil, p, x0, config):
    """Classical shift-with-rq baseline used by the comparison driver.

    Same monitor and solve structure; the right-hand side is Nx and the
    shift is the Rayleigh quotient at the current iterate.
    """

    def shift_fn(x, ax, bx):
        return p.inner(ax, bx) / (p.norm(bx) ** 2)

    log = _run_quotient_loop("rayleigh", pencil.M, pencil.N, p, x0, config,
                             shift_fn, lambda x, bx, z: bx, 0.0)
    log.rq_final = log.eigenvalue
    return log


def hermitian_system_check(pencil, p, l):
    """Relative Hermitian defect of N^H P (M - l N).

    Zero (to roundoff) for real shifts on self-adjoint pencils; O(1) on
    non-self-adjoint ones.
    """
    shifted = pencil.M - l * pencil.N
    return hermitian_defect(pencil.N.conj().T @ p.apply(shifted))
