"""Cayley-transform identities at finite dimension."""

import numpy as np
import pytest

from oqeig import (
    InnerProduct,
    Pencil,
    cayley_norm_identity,
    cayley_transform,
    distance_principle,
    gen_kungfood,
    gen_random_selfadjoint,
    pencil_eigs_oracle,
)

from conftest import random_hermitian


class TestCayleyNormIdentity:
    def test_diagonal_two_by_two(self):
        pen = Pencil(np.diag([1.0, 2.0]), np.eye(2))
        lhs, rhs = cayley_norm_identity(pen, InnerProduct.identity(2))
        assert lhs == pytest.approx(1.0, rel=1e-12)
        assert rhs == pytest.approx(1.0, rel=1e-9)

    def test_equal_matrices(self, rng):
        m = random_hermitian(rng, 5) + 6 * np.eye(5)
        pen = Pencil(m, m)
        lhs, rhs = cayley_norm_identity(pen, InnerProduct.identity(5))
        assert lhs == pytest.approx(1.0, rel=1e-9)
        assert rhs == pytest.approx(1.0, rel=1e-9)

    @pytest.mark.parametrize("seed", range(8))
    def test_random_self_adjoint(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(3, 20))
        b = gen_random_selfadjoint(seed + 60, n, np.sort(r.uniform(-4, 5, n)))
        lhs, rhs = cayley_norm_identity(b.pencil, b.inner_product)
        assert abs(lhs - rhs) <= 1e-6 * max(1.0, abs(rhs))

    def test_lhs_is_min_abs_eigenvalue(self):
        b = gen_random_selfadjoint(3, 8, np.linspace(-3, 6, 8))
        o = pencil_eigs_oracle(b.pencil, b.inner_product)
        lhs, _ = cayley_norm_identity(b.pencil, b.inner_product)
        assert lhs == pytest.approx(np.min(np.abs(o.eigenvalues)), rel=1e-8)


class TestCayleyUnitarity:
    @pytest.mark.parametrize("seed", range(5))
    def test_u_preserves_p_norm(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(3, 15))
        b = gen_random_selfadjoint(seed + 90, n, np.sort(r.uniform(-2, 4, n)))
        data = cayley_transform(b.pencil, b.inner_product)
        p = b.inner_product
        for _ in range(5):
            x = r.standard_normal(n) + 1j * r.standard_normal(n)
            assert p.norm(data.u @ x) == pytest.approx(p.norm(x), rel=1e-8)

    def test_pythagoras_identity(self):
        # ||(M +- iN) x||^2 = ||Mx||^2 + ||Nx||^2 for self-adjoint pencils
        for seed in range(6):
            r = np.random.default_rng(seed)
            n = int(r.integers(3, 15))
            b = gen_random_selfadjoint(seed + 130, n,
                                       np.sort(r.uniform(-3, 3, n)))
            p = b.inner_product
            m, nmat = b.pencil.M, b.pencil.N
            x = r.standard_normal(n) + 1j * r.standard_normal(n)
            for sign in (1.0, -1.0):
                lhs = p.norm((m + sign * 1j * nmat) @ x) ** 2
                rhs = p.norm(m @ x) ** 2 + p.norm(nmat @ x) ** 2
                assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_pythagoras_negative_control(self, rng):
        # fails once (Mx, x) has an imaginary part, i.e. non-self-adjoint
        m = np.triu(rng.standard_normal((4, 4)), 1) + np.eye(4)
        p = InnerProduct.identity(4)
        x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        lhs = p.norm((m + 1j * np.eye(4)) @ x) ** 2
        rhs = p.norm(m @ x) ** 2 + p.norm(x) ** 2
        assert abs(lhs - rhs) > 1e-3 * rhs


class TestDistancePrinciple:
    def test_zero_at_eigenvalue(self):
        b = gen_random_selfadjoint(8, 6, np.linspace(1, 4, 6))
        o = pencil_eigs_oracle(b.pencil, b.inner_product)
        inf_val, dist = distance_principle(b.pencil, b.inner_product,
                                           float(o.eigenvalues[2]))
        assert inf_val <= 1e-8
        assert dist <= 1e-10

    def test_benchmark_distance(self):
        b = gen_kungfood()
        inf_val, dist = distance_principle(b.pencil, b.inner_product, 2.0)
        assert dist == pytest.approx(0.4608, abs=5e-5)
        assert inf_val == pytest.approx(dist, abs=1e-8)

    def test_growth_far_away(self):
        b = gen_kungfood()
        s = 1e4
        inf_val, dist = distance_principle(b.pencil, b.inner_product, s)
        assert inf_val == pytest.approx(s, rel=1e-2)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_oracle_distance(self, seed):
        r = np.random.default_rng(seed)
        n = int(r.integers(3, 18))
        b = gen_random_selfadjoint(seed + 160, n,
                                   np.sort(r.uniform(-5, 5, n)))
        s = float(r.uniform(-6, 6))
        inf_val, dist = distance_principle(b.pencil, b.inner_product, s)
        assert abs(inf_val - dist) <= 1e-8 * max(1.0, dist)
