"""Exact KLT generation: closed form against the eigendecomposition oracle."""
import itertools

import numpy as np
import pytest

from src.klt.markov import (
    CLOSED_FORM,
    EIGEN_ORACLE,
    LITERAL_PLACEMENT,
    SAMPLE_PLACEMENT,
    autocorrelation_matrix,
    closed_form_matrix,
    dct_reference,
    exact_klt,
    exact_klt_closed_form,
    exact_klt_eigen,
    frequency_function,
    solve_frequencies,
)
from src.metrics.merit import coding_gain
from src.utils.errors import KLTError

RHO_GRID = [round(0.1 * k, 1) for k in range(1, 10)]


class TestAutocorrelation:

    def test_two_by_two(self):
        model = autocorrelation_matrix(0.5, 2)
        np.testing.assert_allclose(model.r_matrix, [[1.0, 0.5], [0.5, 1.0]])

    def test_corner_entry(self):
        model = autocorrelation_matrix(0.8, 8)
        assert model.r_matrix[0, 7] == pytest.approx(0.2097152, abs=1e-12)

    def test_symmetric_toeplitz_positive_definite(self):
        r = autocorrelation_matrix(0.9).r_matrix
        np.testing.assert_array_equal(r, r.T)
        np.testing.assert_array_equal(np.diag(r), np.ones(8))
        assert np.all(np.linalg.eigvalsh(r) > 0)

    @pytest.mark.parametrize("rho", [0.0, 1.0, -0.2, 1.2])
    def test_rejects_rho_outside_open_interval(self, rho):
        with pytest.raises(KLTError):
            autocorrelation_matrix(rho, 8)

    def test_rejects_short_block(self):
        with pytest.raises(KLTError):
            autocorrelation_matrix(0.5, 1)


class TestFrequencies:

    def test_lambdas_match_eigenvalues(self):
        model = autocorrelation_matrix(0.8)
        freqs = solve_frequencies(model)
        np.testing.assert_allclose(
            np.sort(freqs.lambdas), np.sort(np.linalg.eigvalsh(model.r_matrix)), atol=1e-8
        )

    def test_trace_conservation(self):
        freqs = solve_frequencies(autocorrelation_matrix(0.5))
        assert freqs.lambdas.sum() == pytest.approx(8.0, abs=1e-8)

    def test_roots_strictly_increasing_in_open_interval(self):
        omegas = solve_frequencies(autocorrelation_matrix(0.9)).omegas
        assert omegas.size == 8
        assert np.all(np.diff(omegas) > 0)
        assert omegas[0] > 0 and omegas[-1] < np.pi

    @pytest.mark.parametrize("rho", RHO_GRID + [0.05, 0.95, 0.999])
    def test_residuals_below_tolerance(self, rho):
        freqs = solve_frequencies(autocorrelation_matrix(rho))
        assert freqs.residuals.max() < 1e-10
        np.testing.assert_allclose(frequency_function(freqs.omegas, rho, 8), 0, atol=1e-10)

    def test_tangent_form_satisfied(self):
        rho = 0.6
        omegas = solve_frequencies(autocorrelation_matrix(rho)).omegas
        denominator = (1 + rho ** 2) * np.cos(omegas) - 2 * rho
        ok = np.abs(np.cos(8 * omegas)) > 1e-3
        lhs = np.tan(8 * omegas[ok])
        rhs = -(1 - rho ** 2) * np.sin(omegas[ok]) / denominator[ok]
        np.testing.assert_allclose(lhs, rhs, rtol=1e-6, atol=1e-7)

    def test_other_block_length(self):
        model = autocorrelation_matrix(0.7, 5)
        freqs = solve_frequencies(model)
        np.testing.assert_allclose(
            np.sort(freqs.lambdas), np.sort(np.linalg.eigvalsh(model.r_matrix)), atol=1e-8
        )


class TestClosedForm:

    @pytest.mark.parametrize("rho", RHO_GRID)
    def test_agrees_with_oracle(self, rho):
        model = autocorrelation_matrix(rho)
        closed = exact_klt_closed_form(model)
        oracle = exact_klt_eigen(model)
        assert closed.source == CLOSED_FORM
        assert oracle.source == EIGEN_ORACLE
        assert np.max(np.abs(closed.matrix - oracle.matrix)) < 1e-6

    @pytest.mark.parametrize("rho", RHO_GRID)
    def test_orthonormal_rows(self, rho):
        k = exact_klt_closed_form(autocorrelation_matrix(rho)).matrix
        np.testing.assert_allclose(k @ k.T, np.eye(8), atol=1e-10)

    def test_diagonalizes_covariance(self):
        model = autocorrelation_matrix(0.2)
        k = exact_klt_closed_form(model).matrix
        d = k @ model.r_matrix @ k.T
        off = d - np.diag(np.diag(d))
        assert np.max(np.abs(off)) < 1e-8

    @pytest.mark.parametrize("rho", [0.3, 0.8, 0.95])
    def test_descending_energy_order(self, rho):
        model = autocorrelation_matrix(rho)
        k = exact_klt(rho).matrix
        assert np.all(np.diff(np.diag(k @ model.r_matrix @ k.T)) <= 1e-12)

    def test_sign_convention(self):
        k = exact_klt(0.8).matrix
        for row in k:
            first = row[np.flatnonzero(np.abs(row) > 1e-12)[0]]
            assert first > 0

    def test_sample_placement_is_the_one_matching(self):
        model = autocorrelation_matrix(0.8)
        freqs = solve_frequencies(model)
        oracle = exact_klt_eigen(model).matrix
        assert np.max(np.abs(closed_form_matrix(freqs, SAMPLE_PLACEMENT) - oracle)) < 1e-6
        assert np.max(np.abs(closed_form_matrix(freqs, LITERAL_PLACEMENT) - oracle)) > 1e-3

    def test_memoized_matrix_is_read_only(self):
        k = exact_klt(0.5)
        assert exact_klt(0.5) is k
        with pytest.raises(ValueError):
            k.matrix[0, 0] = 0.0


class TestEigenOracle:

    def test_eigenvalues_descending_positive(self):
        model = autocorrelation_matrix(0.8)
        k = exact_klt_eigen(model).matrix
        lambdas = np.diag(k @ model.r_matrix @ k.T)
        assert np.all(lambdas > 0)
        assert np.all(np.diff(lambdas) <= 1e-12)

    def test_determinant_identity(self):
        rho = 0.5
        model = autocorrelation_matrix(rho)
        k = exact_klt_eigen(model).matrix
        lambdas = np.diag(k @ model.r_matrix @ k.T)
        assert np.prod(lambdas) == pytest.approx((1 - rho ** 2) ** 7, rel=1e-10)

    def test_coding_gain_not_beaten_by_row_permutation(self):
        model = autocorrelation_matrix(0.95, 4)
        k = exact_klt_eigen(model).matrix
        best = coding_gain(k, model)
        for perm in itertools.permutations(range(4)):
            assert coding_gain(k[list(perm)], model) <= best + 1e-12


class TestDctReference:

    def test_dc_row(self):
        np.testing.assert_allclose(dct_reference(8).matrix[0], np.full(8, 1 / np.sqrt(8)), atol=1e-12)

    def test_orthogonal(self):
        c = dct_reference(8).matrix
        np.testing.assert_allclose(c @ c.T, np.eye(8), atol=1e-12)

    def test_near_parity_with_klt_at_high_correlation(self):
        model = autocorrelation_matrix(0.95)
        assert abs(coding_gain(dct_reference(8), model) - coding_gain(exact_klt(0.95), model)) < 0.05

    def test_rejects_short_block(self):
        with pytest.raises(KLTError):
            dct_reference(1)
