import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240229)


def random_hermitian(rng, n, scale=1.0):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (a + a.conj().T) / 2.0


def random_spd(rng, n):
    w = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    w /= np.sqrt(2.0 * n)
    return w @ w.conj().T + 0.5 * np.eye(n)


def subspace_angle(u, v):
    """Largest principal angle (radians) between the spans of u and v.

    Sine-based so that angles far below sqrt(machine eps) remain
    measurable.
    """
    u = u.reshape(-1, 1) if u.ndim == 1 else u
    v = v.reshape(-1, 1) if v.ndim == 1 else v
    qu, _ = np.linalg.qr(u)
    qv, _ = np.linalg.qr(v)
    resid = qv - qu @ (qu.conj().T @ qv)
    s = np.linalg.svd(resid, compute_uv=False)
    return float(np.arcsin(np.clip(s.max(), 0.0, 1.0)))
