"""Variational generation of starting vectors, with preconditioning and
deflation.

The objective ||(M - mu N) x||_P^2 / ||N x||_P^2 is minimized over a
two-dimensional subspace spanned by the iterate and its (preconditioned)
gradient; its minimizer is an eigenvector of the eigenvalue nearest mu.
Deflation keeps iterates orthogonal, in the shifted image metric, to
eigenvectors already found.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DeflationCollapse,
    DirectionNegligible,
    NInKernel,
    ZeroVector,
)
from .linalg import (
    Pencil,
    as_operator,
    as_vector,
    hermitian_definite_eigs,
    lu_factorize,
)

_TINY = 1e-300


@dataclass
class DescentConfig:
    """Inputs of the preconditioned descent run.

    ``preconditioner`` accepts anything :func:`oqeig.linalg.as_operator`
    does: None/"identity", a dense matrix, or a factor handle applying
    Z = A^{-1}.
    """

    mu: float = 0.0
    preconditioner: object = None
    max_steps: int = 10
    direction_tol: float = 1e-13
    accumulate: bool = False


class HatPencil:
    """Operator pair (M_hat, N_hat) = ((M - mu N) Z, N Z), applied by matvecs."""

    def __init__(self, pencil, mu, z_op):
        self.shifted = pencil.M - mu * pencil.N
        self.nmat = pencil.N
        self.z = z_op
        self.n = pencil.n

    def m_apply(self, x):
        return self.shifted @ self.z.apply(x)

    def m_apply_adjoint(self, y):
        return self.z.apply_adjoint(self.shifted.conj().T @ y)

    def n_apply(self, x):
        return self.nmat @ self.z.apply(x)

    def n_apply_adjoint(self, y):
        return self.z.apply_adjoint(self.nmat.conj().T @ y)


def _as_hat(pencil_hat):
    """Accept either a dense Pencil or a HatPencil operator pair."""
    if isinstance(pencil_hat, HatPencil):
        return pencil_hat
    if isinstance(pencil_hat, Pencil):
        return _DensePair(pencil_hat)
    raise TypeError("expected Pencil or HatPencil, got %r" % type(pencil_hat))


class _DensePair:
    def __init__(self, pencil):
        self.m = pencil.M
        self.nmat = pencil.N
        self.n = pencil.n

    def m_apply(self, x):
        return self.m @ x

    def m_apply_adjoint(self, y):
        return self.m.conj().T @ y

    def n_apply(self, x):
        return self.nmat @ x

    def n_apply_adjoint(self, y):
        return self.nmat.conj().T @ y


def descent_direction(pencil, p, x, mu):
    """Gradient direction of the shifted ratio objective at x.

    (M - mu N)^H P (M - mu N) x - (||(M - mu N)x||_P^2 / ||Nx||_P^2) N^H P N x
    """
    x = as_vector(x, pencil.n)
    shifted = pencil.M - mu * pencil.N
    sx = shifted @ x
    nx = pencil.N @ x
    nn = p.norm(nx)
    if nn <= _TINY:
        raise NInKernel("Nx = 0")
    ratio = (p.norm(sx) / nn) ** 2
    return shifted.conj().T @ p.apply(sx) - ratio * (pencil.N.conj().T
                                                     @ p.apply(nx))


def _hat_direction(hat, p, x):
    mx = hat.m_apply(x)
    nx = hat.n_apply(x)
    nn = p.norm(nx)
    if nn <= _TINY:
        raise NInKernel("N_hat x = 0")
    ratio = (p.norm(mx) / nn) ** 2
    d = hat.m_apply_adjoint(p.apply(mx)) - ratio * hat.n_apply_adjoint(
        p.apply(nx))
    return d, ratio


def _orthogonalize(p, d, basis):
    """Two-pass P-orthogonalization of d against unit basis vectors."""
    for _ in range(2):
        for q in basis:
            d = d - p.inner(d, q) * q
    return d


def _smallest_2x2(gm, gn):
    """Smallest eigenpair of the 2x2 Hermitian-definite pencil (gm, gn).

    Closed form from the quadratic characteristic polynomial; the
    discriminant is clamped at zero so clustered roots cannot produce a
    complex eigenvalue.
    """
    a = (gn[0, 0] * gn[1, 1] - gn[0, 1] * gn[1, 0]).real
    c = (gm[0, 0] * gm[1, 1] - gm[0, 1] * gm[1, 0]).real
    b = (gm[0, 0] * gn[1, 1] + gm[1, 1] * gn[0, 0]
         - gm[0, 1] * gn[1, 0] - gm[1, 0] * gn[0, 1]).real
    disc = max(b * b - 4.0 * a * c, 0.0)
    root = np.sqrt(disc)
    if b > 0.0:
        lam = 2.0 * c / (b + root)
    else:
        lam = (b - root) / (2.0 * a)
    r0 = np.array([gm[0, 0] - lam * gn[0, 0], gm[0, 1] - lam * gn[0, 1]])
    r1 = np.array([gm[1, 0] - lam * gn[1, 0], gm[1, 1] - lam * gn[1, 1]])
    row = r0 if np.linalg.norm(r0) >= np.linalg.norm(r1) else r1
    if np.linalg.norm(row) <= _TINY:
        v = np.array([1.0 + 0.0j, 0.0j])
    else:
        v = np.array([row[1], -row[0]])
        v = v / np.linalg.norm(v)
    return float(lam), v


def descent_step(pencil_hat, p, x, direction_tol=1e-13):
    """One step of the two-dimensional variational descent.

    Orthogonalizes the gradient against x, minimizes the ratio objective
    over span{x, direction} through the projected 2x2 pencil, and returns
    (x_next, smallest_value).  Raises :class:`DirectionNegligible` at a
    stationary point.
    """
    hat = _as_hat(pencil_hat)
    x = as_vector(x, hat.n)
    xnorm = p.norm(x)
    if xnorm <= _TINY:
        raise ZeroVector("x = 0")
    x = x / xnorm
    d, _ = _hat_direction(hat, p, x)
    d = _orthogonalize(p, d, [x])
    dnorm = p.norm(d)
    if dnorm <= direction_tol:
        raise DirectionNegligible("orthogonalized direction has P-norm %g"
                                  % dnorm)
    xh = d / dnorm
    cols = [x, xh]
    mv = [hat.m_apply(c) for c in cols]
    nv = [hat.n_apply(c) for c in cols]
    gm = np.array([[p.inner(mv[j], mv[i]) for j in range(2)]
                   for i in range(2)])
    gn = np.array([[p.inner(nv[j], nv[i]) for j in range(2)]
                   for i in range(2)])
    lam, v = _smallest_2x2(gm, gn)
    x_next = v[0] * x + v[1] * xh
    x_next = x_next / p.norm(x_next)
    return x_next, lam


class DeflationSet:
    """Converged eigenvectors with M x_j and N x_j cached.

    Vectors added here are assumed to be eigenvectors of distinct
    eigenvalues of a self-adjoint pencil, so their (M - mu N)-images are
    mutually P-orthogonal for every real mu; ``validate`` checks that
    premise.  ``mu`` is only the default shift for validation; deflation
    itself builds images at whatever shift the caller is descending with,
    since mixing two shifts would break the orthogonality identity.
    """

    def __init__(self, pencil, p, mu=0.0):
        self.pencil = pencil
        self.p = p
        self.mu = mu
        self.vectors = []
        self._mx = []
        self._nx = []

    def __len__(self):
        return len(self.vectors)

    def add(self, x):
        x = as_vector(x, self.pencil.n)
        self.vectors.append(x)
        self._mx.append(self.pencil.M @ x)
        self._nx.append(self.pencil.N @ x)
        if self.p.norm(self.images(self.mu)[-1]) <= _TINY:
            raise ZeroVector("shifted image of the deflation vector is zero")

    def images(self, mu):
        """[(M - mu N) x_j] for the stored vectors."""
        return [mx - mu * nx for mx, nx in zip(self._mx, self._nx)]

    def validate(self, tol=1e-8, mu=None):
        """Largest normalized pairwise inner product of the shifted images."""
        mu = self.mu if mu is None else mu
        images = self.images(mu)
        norms = [self.p.norm(img) for img in images]
        worst = 0.0
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                val = abs(self.p.inner(images[i], images[j]))
                val /= max(norms[i] * norms[j], _TINY)
                worst = max(worst, val)
        return worst, worst <= tol


def deflate_vector(x, deflation, pencil, p, mu, max_passes=3, tol=1e-10):
    """Remove the components of x along the deflation set.

    Subtracts sum_j ((M - mu N)x, (M - mu N)x_j)_P / ||(M - mu N)x_j||_P^2
    * x_j, with every image taken at the same shift mu, repeating the sweep
    until the shifted image of the result is P-orthogonal to every stored
    image within ``tol``.
    """
    x = as_vector(x, pencil.n)
    if deflation is None or len(deflation) == 0:
        return x.copy()
    shifted = pencil.M - mu * pencil.N
    images = deflation.images(mu)
    norms2 = [max(p.inner(img, img).real, _TINY) for img in images]
    xnorm0 = p.norm(x)
    for _ in range(max_passes):
        sx = shifted @ x
        coeffs = [p.inner(sx, img) / n2 for img, n2 in zip(images, norms2)]
        for c, vec in zip(coeffs, deflation.vectors):
            x = x - c * vec
        if p.norm(x) <= 1e-13 * max(xnorm0, 1.0):
            raise DeflationCollapse(
                "vector lies in the span of the deflation set")
        sx = shifted @ x
        sxn = p.norm(sx)
        ok = all(
            abs(p.inner(sx, img)) <= tol * sxn * np.sqrt(n2)
            for img, n2 in zip(images, norms2))
        if ok:
            break
    return x


@dataclass
class DescentStepRecord:
    k: int
    objective: float
    rq_at_x: complex
    rq_at_zx: complex


@dataclass
class DescentLog:
    steps: list = field(default_factory=list)
    stationary: bool = False

    @property
    def objectives(self):
        return [s.objective for s in self.steps]


def preconditioned_descent(pencil, p, config, x0, deflation=None):
    """Run the descent on ((M - mu N) Z, N Z), deflating after every update.

    Returns ``(x, log)`` with x already mapped back through Z and
    P-normalized.  Quotients at both the iterate and its Z-image are logged
    each step.  With ``config.accumulate`` the whole direction history is
    kept and the projected problem grows instead of staying 2x2.
    """
    from .quotients import rayleigh_quotient  # local import, cycle break

    z_op = as_operator(config.preconditioner, pencil.n)
    hat = HatPencil(pencil, config.mu, z_op)
    x = as_vector(x0, pencil.n)
    if deflation is not None and len(deflation):
        x = deflate_vector(x, deflation, pencil, p, config.mu)
    xn = p.norm(x)
    if xn <= _TINY:
        raise ZeroVector("starting vector is zero")
    x = x / xn
    log = DescentLog()
    if config.accumulate:
        res = accumulate_subspace(hat, p, x,
                                  min(config.max_steps + 1, pencil.n))
        x = res.minimizer
        if deflation is not None and len(deflation):
            x = deflate_vector(x, deflation, pencil, p, config.mu)
            x = x / p.norm(x)
        log.stationary = res.breakdown
        log.steps.append(DescentStepRecord(
            k=0, objective=res.value,
            rq_at_x=rayleigh_quotient(pencil, p, x),
            rq_at_zx=rayleigh_quotient(pencil, p, z_op.apply(x))))
    else:
        for k in range(config.max_steps):
            try:
                x, value = descent_step(hat, p, x,
                                        direction_tol=config.direction_tol)
            except DirectionNegligible:
                log.stationary = True
                break
            if deflation is not None and len(deflation):
                x = deflate_vector(x, deflation, pencil, p, config.mu)
                x = x / p.norm(x)
            zx = z_op.apply(x)
            log.steps.append(DescentStepRecord(
                k=k, objective=value,
                rq_at_x=rayleigh_quotient(pencil, p, x),
                rq_at_zx=rayleigh_quotient(pencil, p, zx)))
    x_out = z_op.apply(x)
    x_out = x_out / p.norm(x_out)
    return x_out, log


def refine_shift_descent(pencil, p, x0, mu, deflation=None, rounds=2,
                         backoff=None, first_steps=8, refine_steps=12):
    """Descent whose target shift is re-centred on the iterate's quotient.

    Needed when the wanted eigenvalue sits a hair below a cluster: one
    descent pass cannot tell the neighbors apart, but its Rayleigh quotient
    already locates the cluster to about the cluster width.  Each round
    re-shifts to just below that estimate (``backoff``, default
    3e-4 * (1 + |estimate|)) and descends with the correspondingly shifted
    solve preconditioner, which then separates the target from the cluster.

    Returns ``(x, logs)`` with one descent log per stage.
    """
    from .quotients import rayleigh_quotient  # local import, cycle break

    def stage(x, shift, steps):
        cfg = DescentConfig(mu=shift,
                            preconditioner=lu_factorize(
                                pencil.M - shift * pencil.N),
                            max_steps=steps)
        return preconditioned_descent(pencil, p, cfg, x, deflation)

    x, log = stage(as_vector(x0, pencil.n), mu, first_steps)
    logs = [log]
    for _ in range(rounds):
        rough = rayleigh_quotient(pencil, p, x).real
        off = backoff if backoff is not None else 3e-4 * (1.0 + abs(rough))
        x, log = stage(x, rough - off, refine_steps)
        logs.append(log)
    return x, logs


@dataclass
class SubspaceResult:
    basis: np.ndarray
    minimizer: np.ndarray
    value: float
    breakdown: bool = False


def accumulate_subspace(pencil_hat, p, x0, k):
    """Descent with memory: keep every orthonormalized direction.

    Runs k - 1 gradient steps, collecting the P-orthonormal basis V_k, and
    minimizes the ratio objective over its span through the projected
    Hermitian-definite problem.  Early basis breakdown returns the basis
    found so far with ``breakdown=True``.
    """
    hat = _as_hat(pencil_hat)
    if not 1 <= k <= hat.n:
        raise ValueError("need 1 <= k <= n, got k=%d" % k)
    x = as_vector(x0, hat.n)
    x = x / p.norm(x)
    basis = [x]
    mv = [hat.m_apply(x)]
    nv = [hat.n_apply(x)]
    breakdown = False
    value = None
    for _ in range(k - 1):
        d, _ratio = _hat_direction(hat, p, x)
        d = _orthogonalize(p, d, basis)
        dn = p.norm(d)
        if dn <= 1e-13:
            breakdown = True
            break
        q = d / dn
        basis.append(q)
        mv.append(hat.m_apply(q))
        nv.append(hat.n_apply(q))
        j = len(basis)
        gm = np.array([[p.inner(mv[col], mv[row]) for col in range(j)]
                       for row in range(j)])
        gn = np.array([[p.inner(nv[col], nv[row]) for col in range(j)]
                       for row in range(j)])
        w, vecs = hermitian_definite_eigs(gm, gn)
        value = float(w[0])
        x = sum(vecs[i, 0] * basis[i] for i in range(j))
        x = x / p.norm(x)
    if value is None:
        mx = mv[0]
        nx = nv[0]
        value = (p.norm(mx) / p.norm(nx)) ** 2
    return SubspaceResult(basis=np.column_stack(basis), minimizer=x,
                          value=value, breakdown=breakdown)
