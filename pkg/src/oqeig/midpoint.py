"""Midpoint-of-spectrum estimation and pencil reformulations.

The scalar refinement loop alternates "evaluate a shifted quotient" with
"halve it into a new midpoint guess"; for positive semidefinite problems the
resulting sequence increases monotonically toward the largest eigenvalue.
Reformulations retarget interior or smallest eigenvalues as extreme ones.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ExactlySingular, InfiniteEigenvalue, NInKernel, OqeigError, SingularShift
from .linalg import Pencil, as_vector, lu_factorize
from .quotients import optimal_quotient, quotient_function, rayleigh_quotient

_TINY = 1e-300


@dataclass
class MidpointState:
    """Result of the midpoint refinement loop."""

    mu: float
    alpha: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list, repr=False)


def midpoint_refine(pencil, p, x, max_iters=100, rel_tol=1e-12):
    """Refine an estimate of the largest eigenvalue of a PSD pencil at x.

    Literal loop: v = Mx, w = Nx, l = ||Nx||_P, mu = ||v||_P / (2l), then
    alpha = ||v - mu w||_P / l + mu and mu = alpha / 2 until the alpha
    change falls below ``rel_tol`` or ``max_iters`` is hit (the state is
    then returned with ``converged=False`` rather than raising).
    """
    x = as_vector(x, pencil.n)
    v = pencil.M @ x
    w = pencil.N @ x
    l = p.norm(w)
    if l <= _TINY:
        raise NInKernel("Nx = 0")
    mu = p.norm(v) / (2.0 * l)
    alpha = None
    history = []
    for k in range(max_iters):
        alpha_new = p.norm(v - mu * w) / l + mu
        history.append(alpha_new)
        if alpha is not None and abs(alpha_new - alpha) <= rel_tol * abs(alpha):
            return MidpointState(mu=mu, alpha=alpha_new, iterations=k + 1,
                                 converged=True, history=history)
        alpha = alpha_new
        mu = alpha / 2.0
    return MidpointState(mu=mu, alpha=alpha, iterations=max_iters,
                         converged=False, history=history)


def psd_largest_estimate(pencil, p, x, chain_slack=1e-12):
    """Largest-eigenvalue estimate chain rq <= oq <= qf(oq/2) <= alpha.

    Returns ``(alpha, chain)`` where ``chain`` is the tuple
    (rq, oq, qf, alpha).  The ordering is verified up to ``chain_slack``
    (relative); a violation means the pencil was not positive semidefinite.
    """
    rq = rayleigh_quotient(pencil, p, x).real
    oq = optimal_quotient(pencil, p, x).real
    qf = quotient_function(pencil, p, x, oq / 2.0).real
    state = midpoint_refine(pencil, p, x)
    chain = (rq, oq, qf, state.alpha)
    slack = chain_slack * max(1.0, abs(state.alpha))
    for lo, hi in zip(chain, chain[1:]):
        if lo > hi + slack:
            raise OqeigError(
                "estimate chain not ordered (%r); pencil not PSD at x?"
                % (chain,))
    return state.alpha, chain


def random_rq_midpoint(pencil, p, k, seed):
    """Midpoint guess from k seeded Gaussian trial vectors.

    Takes the average of the smallest and largest Rayleigh quotients.
    Vectors that land in the kernel of N are resampled, up to 3k draws.
    """
    if k < 2:
        raise ValueError("need at least two samples, got k=%d" % k)
    rng = np.random.default_rng(seed)
    values = []
    attempts = 0
    while len(values) < k and attempts < 3 * k:
        attempts += 1
        x = rng.standard_normal(pencil.n) + 1j * rng.standard_normal(pencil.n)
        try:
            values.append(rayleigh_quotient(pencil, p, x).real)
        except NInKernel:
            continue
    if len(values) < k:
        raise NInKernel("could not draw %d usable samples in %d attempts"
                        % (k, attempts))
    return (min(values) + max(values)) / 2.0


@dataclass(frozen=True)
class Reformulation:
    """A spectrum-remapping rewrite of the pencil.

    ``map_back`` carries eigenvalues of the transformed pencil to
    eigenvalues of the original one; eigenvectors are shared.
    """

    kind: str
    original: Pencil
    transformed: Pencil
    parameter: complex

    def map_back(self, lam):
        lam = np.asarray(lam)
        if self.kind == "shift-invert":
            if np.any(np.abs(lam) <= _TINY):
                raise InfiniteEigenvalue(
                    "zero eigenvalue of the shift-inverted pencil")
            out = 1.0 / lam + self.parameter
        elif self.kind == "negated-shift":
            out = self.parameter - lam
        else:
            raise ValueError("unknown reformulation kind %r" % self.kind)
        return complex(out) if out.ndim == 0 else out

    def map_forward(self, lam):
        lam = np.asarray(lam)
        if self.kind == "shift-invert":
            if np.any(np.abs(lam - self.parameter) <= _TINY):
                raise SingularShift("lambda equals the shift")
            out = 1.0 / (lam - self.parameter)
        elif self.kind == "negated-shift":
            out = self.parameter - lam
        else:
            raise ValueError("unknown reformulation kind %r" % self.kind)
        return complex(out) if out.ndim == 0 else out


def shift_invert_reformulate(pencil, zeta):
    """Rewrite M x = lambda N x as N x = lambda' (M - zeta N) x.

    Eigenvalues near zeta become extreme in modulus; lambda = 1/lambda' +
    zeta maps back.  Raises :class:`SingularShift` when zeta is an
    eigenvalue (M - zeta N exactly singular).
    """
    shifted = pencil.M - zeta * pencil.N
    try:
        lu_factorize(shifted)
    except ExactlySingular as exc:
        raise SingularShift("M - zeta N is singular at zeta=%r" % zeta) from exc
    return Reformulation(kind="shift-invert", original=pencil,
                         transformed=Pencil(pencil.N, shifted),
                         parameter=complex(zeta))


def negated_shift_reformulate(pencil, r):
    """Rewrite M x = lambda N x as -(M - r N) x = lambda' N x (r > 0).

    Turns the eigenvalue nearest the origin into the largest one of the
    transformed problem when r dominates the spectrum; lambda = r - lambda'.
    """
    if not r > 0:
        raise ValueError("r must be positive, got %r" % r)
    return Reformulation(kind="negated-shift", original=pencil,
                         transformed=Pencil(-(pencil.M - r * pencil.N),
                                            pencil.N),
                         parameter=complex(r))
