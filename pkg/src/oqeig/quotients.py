"""Pointwise eigenvalue estimators at a fixed approximate eigenvector.

Rayleigh quotient, optimal quotient, the quotient function over shifts mu,
its image disc (an inclusion region for normal problems), and the
self-adjointness diagnostic that decides whether inclusion intervals may be
reported.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AtDiscontinuity,
    NInKernel,
    NotPositiveDefinite,
    PhaseUndefined,
)
from .linalg import as_vector, hermitian_defect, hermitian_eigs

_TINY = 1e-300


def _images(pencil, p, x):
    """(Mx, Nx, ||Nx||_P); raises NInKernel when Nx vanishes."""
    x = as_vector(x, pencil.n)
    mx = pencil.M @ x
    nx = pencil.N @ x
    nn = p.norm(nx)
    if nn <= _TINY:
        raise NInKernel("Nx = 0, quotients undefined")
    return mx, nx, nn


def rayleigh_quotient(pencil, p, x):
    """rq(x) = (Mx, Nx)_P / (Nx, Nx)_P."""
    mx, nx, nn = _images(pencil, p, x)
    return p.inner(mx, nx) / (nn * nn)


def optimal_quotient(pencil, p, x):
    """oq(x) = phase((Mx, Nx)_P) * ||Mx||_P / ||Nx||_P."""
    mx, nx, nn = _images(pencil, p, x)
    ip = p.inner(mx, nx)
    if abs(ip) <= _TINY:
        raise PhaseUndefined("(Mx, Nx)_P = 0; no phase factor exists")
    return (ip / abs(ip)) * p.norm(mx) / nn


def image_disc(pencil, p, x):
    """Center (= rq) and radius of the closure of the quotient-function image."""
    mx, nx, nn = _images(pencil, p, x)
    rq = p.inner(mx, nx) / (nn * nn)
    radius = p.norm(mx - rq * nx) / nn
    return rq, float(radius)


def quotient_function(pencil, p, x, mu):
    """oq of the shifted pair (M - mu N, N) at x, plus mu.

    Evaluated through the closed form in terms of the disc radius and
    mu - rq, which stays accurate near the discontinuity at rq where the
    direct expression cancels catastrophically.
    """
    center, radius = image_disc(pencil, p, x)
    mu = complex(mu)
    muhat = mu - center
    if abs(muhat) <= 1e-12 * (1.0 + abs(center)):
        raise AtDiscontinuity(
            "mu coincides with rq = %s; use quotient_limits" % center)
    return -(muhat / abs(muhat)) * np.sqrt(radius * radius
                                           + abs(muhat) ** 2) + center + muhat


def quotient_limits(pencil, p, x):
    """One-sided limits of the quotient function at rq and the limit at infinity.

    Returns (left_limit, right_limit, limit_at_infinity) =
    (rq + radius, rq - radius, rq).  An eigenvector input gives three equal
    values.
    """
    center, radius = image_disc(pencil, p, x)
    mx, _, nn = _images(pencil, p, x)
    scale = max(p.norm(mx) / nn, abs(center), 1.0)
    if radius <= 1e-13 * scale:
        return center, center, center
    return center + radius, center - radius, center


@dataclass(frozen=True)
class SelfAdjointnessCheck:
    """Relative Hermitian defect of N^H P M and the pass/fail verdict."""

    residual: float
    passed: bool
    tolerance: float


def check_self_adjoint(pencil, p, tol=1e-10):
    """Measure how far N^H P M is from Hermitian, relative to its magnitude."""
    h = pencil.N.conj().T @ p.apply(pencil.M)
    residual = hermitian_defect(h)
    return SelfAdjointnessCheck(residual=residual, passed=residual <= tol,
                                tolerance=tol)


def lepo_bound(pencil, p, x, mu):
    """sqrt(|rq - mu|^2 + |oq|^2 - |rq|^2).

    Upper bound on dist(mu, spectrum) for normal problems.  The radicand is
    clamped at zero (with a warning) when roundoff drives it negative.
    """
    mx, nx, nn = _images(pencil, p, x)
    rq = p.inner(mx, nx) / (nn * nn)
    oq_mag = p.norm(mx) / nn
    radicand = abs(rq - mu) ** 2 + oq_mag * oq_mag - abs(rq) ** 2
    if radicand < 0.0:
        warnings.warn("lepo_bound radicand %g clamped to 0" % radicand,
                      stacklevel=2)
        radicand = 0.0
    return float(np.sqrt(radicand))


def arnoldi_disc_check(m, x):
    """Gershgorin disc of the first Arnoldi column of M started at x.

    Standard problem only (N = I, P = I).  Returns (h11, h21), which must
    coincide with the image disc of (M, I).
    """
    m = np.asarray(m, dtype=np.complex128)
    x = as_vector(x, m.shape[0])
    q1 = x / np.linalg.norm(x)
    mq = m @ q1
    h11 = complex(np.vdot(q1, mq))
    w = mq - h11 * q1
    return h11, float(np.linalg.norm(w))


def sqrt_identity_check(m_spd, x):
    """For positive definite M: rq_{M,I}(x) against oq_{M^{1/2},I}(x)^2.

    The square root is built from the Jacobi eigendecomposition.  Returns
    the pair (rq, oq(M^{1/2})^2); the two must agree.
    """
    m_spd = np.asarray(m_spd, dtype=np.complex128)
    w, v = hermitian_eigs(m_spd)
    if w[0] <= 0.0:
        raise NotPositiveDefinite("smallest eigenvalue %g" % w[0])
    root = (v * np.sqrt(w)) @ v.conj().T
    x = as_vector(x, m_spd.shape[0])
    nx2 = float(np.vdot(x, x).real)
    if nx2 <= _TINY:
        raise NInKernel("x = 0")
    rq = complex(np.vdot(x, m_spd @ x)) / nx2
    rx = root @ x
    ip = complex(np.vdot(x, rx))
    if abs(ip) <= _TINY:
        raise PhaseUndefined("(M^{1/2}x, x) = 0")
    oq_root = (ip / abs(ip)) * np.linalg.norm(rx) / np.sqrt(nx2)
    return rq, oq_root ** 2


@dataclass(frozen=True)
class QuotientReport:
    """Everything the quotient family says about one (x, mu) pair.

    ``inclusion_interval`` is populated only when the self-adjointness check
    passed; otherwise the disc is still reported but carries no guarantee.
    """

    rq: complex
    oq: complex
    mu: complex | None
    qf_value: complex | None
    disc_center: complex
    disc_radius: float
    inclusion_interval: tuple[float, float] | None
    self_adjoint: SelfAdjointnessCheck


def quotient_report(pencil, p, x, mu=None, self_adjoint_tol=1e-10):
    """Assemble a :class:`QuotientReport` at x (and optionally a shift mu)."""
    center, radius = image_disc(pencil, p, x)
    oq = optimal_quotient(pencil, p, x)
    check = check_self_adjoint(pencil, p, self_adjoint_tol)
    qf_value = None
    if mu is not None:
        qf_value = quotient_function(pencil, p, x, mu)
    interval = None
    if check.passed:
        interval = (center.real - radius, center.real + radius)
    return QuotientReport(rq=center, oq=oq,
                          mu=None if mu is None else complex(mu),
                          qf_value=qf_value, disc_center=center,
                          disc_radius=radius, inclusion_interval=interval,
                          self_adjoint=check)
