"""Matrix Market I/O and the problem generators."""

import numpy as np
import pytest

from oqeig import (
    ParseError,
    SingularMatrix,
    check_self_adjoint,
    gen_block_saddle,
    gen_fd_laplacian,
    gen_forward_shift,
    gen_kungfood,
    gen_random_selfadjoint,
    gen_two_bound_states,
    pencil_eigs_oracle,
    read_matrix_market,
    write_matrix_market,
)
from oqeig.ingest import read_matrix_market_triplets

from conftest import random_hermitian, random_spd


class TestMatrixMarketRead:
    def test_symmetric_mirroring(self, tmp_path):
        path = tmp_path / "sym.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real symmetric\n"
                        "% comment line\n"
                        "2 2 3\n"
                        "1 1 2.0\n"
                        "2 1 1.0\n"
                        "2 2 3.0\n")
        a = read_matrix_market(path)
        np.testing.assert_allclose(a.real, [[2.0, 1.0], [1.0, 3.0]])

    def test_pattern_rejected(self, tmp_path):
        path = tmp_path / "pat.mtx"
        path.write_text("%%MatrixMarket matrix coordinate pattern general\n"
                        "2 2 1\n1 1\n")
        with pytest.raises(ParseError, match="pattern unsupported"):
            read_matrix_market(path)

    def test_duplicates_summed(self, tmp_path):
        path = tmp_path / "dup.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n"
                        "2 2 3\n1 1 1.0\n1 1 2.5\n2 2 1.0\n")
        a = read_matrix_market(path)
        assert a[0, 0].real == pytest.approx(3.5)

    def test_complex_hermitian(self, tmp_path):
        path = tmp_path / "herm.mtx"
        path.write_text("%%MatrixMarket matrix coordinate complex hermitian\n"
                        "2 2 2\n1 1 1.0 0.0\n2 1 2.0 3.0\n")
        a = read_matrix_market(path)
        assert a[0, 1] == pytest.approx(2.0 - 3.0j)
        assert a[1, 0] == pytest.approx(2.0 + 3.0j)

    def test_skew_symmetric(self, tmp_path):
        path = tmp_path / "skew.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate real skew-symmetric\n"
            "2 2 1\n2 1 4.0\n")
        a = read_matrix_market(path)
        assert a[0, 1].real == pytest.approx(-4.0)

    def test_array_format(self, tmp_path):
        path = tmp_path / "arr.mtx"
        path.write_text("%%MatrixMarket matrix array real general\n"
                        "2 2\n1.0\n2.0\n3.0\n4.0\n")
        a = read_matrix_market(path)
        np.testing.assert_allclose(a.real, [[1.0, 3.0], [2.0, 4.0]])

    def test_array_symmetric(self, tmp_path):
        path = tmp_path / "arrsym.mtx"
        path.write_text("%%MatrixMarket matrix array real symmetric\n"
                        "2 2\n1.0\n2.0\n3.0\n")
        a = read_matrix_market(path)
        np.testing.assert_allclose(a.real, [[1.0, 2.0], [2.0, 3.0]])

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n"
                        "2 2 2\n1 1 1.0\n9 1 1.0\n")
        with pytest.raises(ParseError, match="line 4"):
            read_matrix_market(path)

    def test_bad_banner(self, tmp_path):
        path = tmp_path / "nb.mtx"
        path.write_text("%%NotMatrixMarket stuff\n1 1 1\n1 1 1.0\n")
        with pytest.raises(ParseError, match="line 1"):
            read_matrix_market(path)

    def test_dense_cap(self, tmp_path):
        path = tmp_path / "big.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n"
                        "5000 5000 1\n1 1 1.0\n")
        with pytest.raises(OverflowError):
            read_matrix_market(path)
        header, shape, rows, cols, vals = read_matrix_market_triplets(path)
        assert shape == (5000, 5000) and len(vals) == 1

    def test_wrong_entry_count(self, tmp_path):
        path = tmp_path / "cnt.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n"
                        "2 2 2\n1 1 1.0\n")
        with pytest.raises(ParseError):
            read_matrix_market(path)


class TestMatrixMarketRoundTrip:
    def test_real_values_bit_exact(self, tmp_path, rng):
        a = rng.standard_normal((7, 7))
        a[np.abs(a) < 0.3] = 0.0
        path = tmp_path / "rt.mtx"
        write_matrix_market(path, a)
        back = read_matrix_market(path)
        assert np.array_equal(back.real, a)
        assert np.all(back.imag == 0)

    def test_symmetric_storage_round_trip(self, tmp_path, rng):
        a = rng.standard_normal((6, 6))
        a = a + a.T
        path = tmp_path / "rts.mtx"
        write_matrix_market(path, a, symmetry="symmetric")
        back = read_matrix_market(path)
        assert np.array_equal(back.real, a)

    def test_complex_round_trip(self, tmp_path, rng):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        path = tmp_path / "rtc.mtx"
        write_matrix_market(path, a)
        back = read_matrix_market(path)
        assert np.array_equal(back, a)


class TestGeneratorKungfood:
    def test_facts(self):
        b = gen_kungfood()
        np.testing.assert_allclose(b.facts["spectrum"],
                                   [1.3249, 2.4608, 5.2143], atol=5e-5)
        assert b.facts["rq_at_trial"] == pytest.approx(5.0, abs=1e-12)
        assert b.facts["disc_radius_at_trial"] == pytest.approx(
            np.sqrt(2.0 / 3.0), abs=1e-12)
        assert b.facts["positive_definite"]


class TestGeneratorForwardShift:
    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_rq_formula(self, n):
        b = gen_forward_shift(n)
        assert b.facts["rq_all_ones"] == pytest.approx(1 - 1 / n)
        assert b.facts["disc_excludes_zero"]
        np.testing.assert_allclose(b.facts["spectrum"], np.zeros(n))

    def test_diagonal_perturbation_spectrum(self):
        e = np.array([0.3, -1.0, 2.0, 0.9])
        b = gen_forward_shift(4, diag_perturbation=e)
        np.testing.assert_allclose(b.facts["spectrum"], np.sort(e))
        # triangular matrix: diagonal is the exact spectrum
        np.testing.assert_allclose(np.diag(b.pencil.M).real, e)

    def test_duplicate_diagonal_rejected(self):
        with pytest.raises(ValueError):
            gen_forward_shift(3, diag_perturbation=[1.0, 1.0, 2.0])


class TestGeneratorFdLaplacian:
    def test_small_case_matches_oracle(self):
        b = gen_fd_laplacian(30)
        o = pencil_eigs_oracle(b.pencil, b.inner_product)
        np.testing.assert_allclose(o.eigenvalues, b.facts["spectrum"],
                                   rtol=1e-10)

    def test_trial_vector_normalized(self):
        b = gen_fd_laplacian(100)
        x = b.facts["trial_vector"]
        h = b.facts["grid_spacing"]
        assert h * np.sum(np.abs(x) ** 2) == pytest.approx(1.0, rel=1e-12)

    def test_smallest_eigenvalue_approaches_pi_squared(self):
        b = gen_fd_laplacian(80)
        assert b.facts["spectrum"][0] == pytest.approx(np.pi ** 2, rel=1e-3)


class TestGeneratorBlockSaddle:
    def test_identity_scale_blocks(self):
        b = gen_block_saddle(np.eye(2), np.zeros((2, 3)), np.eye(3),
                             np.eye(3))
        assert b.facts["self_adjoint_residual"] <= 1e-14

    def test_random_blocks(self, rng):
        k, l = 5, 7
        b = gen_block_saddle(random_hermitian(rng, k),
                             rng.standard_normal((k, l)),
                             random_hermitian(rng, l),
                             random_spd(rng, l))
        assert b.facts["self_adjoint_residual"] <= 1e-10
        assert check_self_adjoint(b.pencil, b.inner_product).passed

    def test_singular_m11_rejected(self, rng):
        with pytest.raises(SingularMatrix):
            gen_block_saddle(np.zeros((2, 2)), rng.standard_normal((2, 2)),
                             np.eye(2), np.eye(2))


class TestGeneratorRandomSelfAdjoint:
    def test_prescribed_spectrum(self):
        b = gen_random_selfadjoint(0, 3, [1.0, 2.0, 3.0])
        o = pencil_eigs_oracle(b.pencil, b.inner_product)
        np.testing.assert_allclose(o.eigenvalues, [1, 2, 3], atol=1e-10)

    def test_single_dimension(self):
        b = gen_random_selfadjoint(1, 1, [4.2])
        o = pencil_eigs_oracle(b.pencil, b.inner_product)
        assert o.eigenvalues[0] == pytest.approx(4.2, rel=1e-12)

    def test_clustered_spectrum(self):
        spec = [1.0, 1.0 + 1e-8, 5.0]
        b = gen_random_selfadjoint(2, 3, spec)
        o = pencil_eigs_oracle(b.pencil, b.inner_product)
        np.testing.assert_allclose(o.eigenvalues, spec, atol=1e-9)

    def test_self_adjointness(self):
        b = gen_random_selfadjoint(9, 15, np.linspace(-1, 1, 15))
        assert check_self_adjoint(b.pencil, b.inner_product).passed


class TestGeneratorTwoBoundStates:
    def test_band_adjacency(self):
        b = gen_two_bound_states(n=40, seed=1)
        lam2 = b.facts["lambda2"]
        assert 0 < b.facts["band_edge"] - lam2 <= 1e-4
        spec = np.asarray(b.facts["spectrum"])
        assert spec[0] == b.facts["lambda1"] and spec[1] == lam2
        assert np.all(np.diff(spec) > 0)

    def test_oracle_agrees(self):
        b = gen_two_bound_states(n=30, seed=4)
        o = pencil_eigs_oracle(b.pencil, b.inner_product)
        np.testing.assert_allclose(o.eigenvalues, b.facts["spectrum"],
                                   atol=1e-9)

    def test_identity_rotation_case(self):
        b = gen_two_bound_states(n=20, seed=0, rotate=False)
        np.testing.assert_allclose(np.diag(b.pencil.M).real,
                                   b.facts["spectrum"], atol=1e-12)
        assert np.abs(b.pencil.M - np.diag(np.diag(b.pencil.M))).max() == 0

    def test_gap_cap_enforced(self):
        with pytest.raises(ValueError):
            gen_two_bound_states(n=20, gap_params={"band_gap": 1e-3})
