"""Integer functions, expansion-factor ranges and row normalization."""
import numpy as np
import pytest

from src.approx.integer import (
    LowComplexityMatrix,
    alpha_grid,
    alpha_range,
    apply_int_function,
    INT_FUNCTIONS,
    gamma,
    is_orthogonal,
    normalize,
)
from src.fast.transforms import MATRICES, REGISTRY
from src.klt.markov import dct_reference, exact_klt
from src.utils.errors import AllZeroRowError, KLTError, OutOfAlphabetError


def scalar(func, value):
    return int(apply_int_function(func, 1.0, np.array([[value]])).entries[0, 0])


class TestIntFunctions:

    def test_scalar_definitions(self):
        assert scalar("trunc", 2.7) == 2
        assert scalar("round_afz", -1.2) == -2
        assert scalar("floor", -1.2) == -2
        assert scalar("ceil", -1.2) == -1

    def test_nearest_rounding_ties_away_from_zero(self):
        assert scalar("round", 2.5) == 3
        assert scalar("round", -2.5) == -3
        assert scalar("round", 1.49) == 1
        assert scalar("round", -0.6) == -1

    def test_sign_of_zero(self):
        t = apply_int_function("round_afz", 1.0, np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_array_equal(t.entries, [[0, 1], [1, 0]])

    @pytest.mark.parametrize("func", ["floor", "ceil", "trunc", "round_afz", "round"])
    def test_identity_on_integer_matrix(self, func):
        entries = np.array(MATRICES["T16"], dtype=float)
        t = apply_int_function(func, 1.0, entries)
        np.testing.assert_array_equal(t.entries, MATRICES["T16"])

    def test_out_of_alphabet(self):
        with pytest.raises(OutOfAlphabetError):
            apply_int_function("trunc", 10.0, exact_klt(0.5))

    def test_all_zero_row(self):
        with pytest.raises(AllZeroRowError):
            apply_int_function("trunc", 0.5, exact_klt(0.5))

    def test_rejects_non_positive_alpha(self):
        with pytest.raises(KLTError):
            apply_int_function("floor", 0.0, exact_klt(0.5))

    def test_rejects_unknown_function(self):
        with pytest.raises(KLTError):
            apply_int_function("bankers", 1.0, exact_klt(0.5))

    def test_provenance_recorded(self):
        t = apply_int_function("trunc", 3.5, exact_klt(0.1))
        assert t.provenance.func == "trunc"
        assert t.provenance.alpha == 3.5
        assert t.provenance.rho == pytest.approx(0.1)

    @pytest.mark.parametrize("func", ["floor", "trunc"])
    def test_monotone_in_alpha_on_positive_entries(self, func):
        k = exact_klt(0.6).matrix
        positive = k > 0
        previous = None
        for alpha in np.arange(0.5, 6.0, 0.25):
            current = INT_FUNCTIONS[func](alpha * k)
            if previous is not None:
                assert np.all(current[positive] >= previous[positive])
            previous = current

    def test_round_reproduces_t16_at_rho_08(self):
        klt = exact_klt(0.8)
        found = []
        for alpha in alpha_grid("round", gamma(klt), 0.01):
            try:
                t = apply_int_function("round", float(alpha), klt)
            except (OutOfAlphabetError, AllZeroRowError):
                continue
            if t == REGISTRY["T16"].t:
                found.append(float(alpha))
        assert found
        assert found[0] == pytest.approx(6.03)

    def test_round_afz_never_reaches_t16(self):
        klt = exact_klt(0.8)
        for alpha in alpha_grid("round_afz", gamma(klt), 0.01):
            try:
                t = apply_int_function("round_afz", float(alpha), klt)
            except (OutOfAlphabetError, AllZeroRowError):
                continue
            assert t != REGISTRY["T16"].t


class TestAlphaRange:

    def test_floor(self):
        assert alpha_range("floor", 0.5) == pytest.approx((2.0, 8.0))

    def test_ceil(self):
        assert alpha_range("ceil", 0.5) == pytest.approx((0.0, 6.0))

    def test_round_afz_upper_endpoint(self):
        g = gamma(exact_klt(0.8))
        assert alpha_range("round_afz", g)[1] == pytest.approx(3.0 / g)

    def test_nearest_rounding_range(self):
        assert alpha_range("round", 0.5) == pytest.approx((0.0, 7.0))

    def test_rejects_non_positive_gamma(self):
        with pytest.raises(KLTError):
            alpha_range("floor", 0.0)

    def test_grid_strictly_inside(self):
        low, high = alpha_range("trunc", 0.45)
        grid = alpha_grid("trunc", 0.45, 0.01)
        assert grid[0] > low and grid[-1] < high
        assert grid[0] == pytest.approx(np.floor(low / 0.01) * 0.01 + 0.01)
        np.testing.assert_allclose(np.diff(grid), 0.01, atol=1e-9)

    def test_grid_excludes_endpoint_on_step(self):
        # 1/0.5 = 2.0 is itself a grid multiple and must be skipped
        grid = alpha_grid("floor", 0.5, 0.5)
        np.testing.assert_allclose(grid, [2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0, 7.5])


class TestGamma:

    def test_identity(self):
        assert gamma(np.eye(8)) == 1.0

    def test_dct(self):
        assert gamma(dct_reference(8)) == pytest.approx(np.sqrt(2 / 8) * np.cos(np.pi / 16), abs=1e-6)
        assert gamma(dct_reference(8)) == pytest.approx(0.490393, abs=1e-6)

    def test_klt_below_one(self):
        assert gamma(exact_klt(0.8)) < 1.0

    def test_zero_matrix(self):
        with pytest.raises(KLTError):
            gamma(np.zeros((8, 8)))


class TestNormalize:

    def test_equal_row_norms(self):
        approx = normalize(LowComplexityMatrix(2 * np.eye(8)))
        np.testing.assert_allclose(approx.s_diag, np.full(8, 0.5))
        assert approx.orthogonal

    def test_t1_orthogonality_flag(self):
        t1 = REGISTRY["T1"].t.entries
        gram = t1 @ t1.T
        expected = not np.any(gram - np.diag(np.diag(gram)))
        assert normalize(REGISTRY["T1"].t).orthogonal == expected
        assert expected

    def test_t16_is_not_orthogonal(self):
        assert not is_orthogonal(REGISTRY["T16"].t)

    @pytest.mark.parametrize("tid", list(MATRICES))
    def test_unit_rows_and_reconstruction(self, tid):
        approx = normalize(REGISTRY[tid].t)
        np.testing.assert_allclose(np.linalg.norm(approx.k_hat, axis=1), 1.0, atol=1e-12)
        np.testing.assert_allclose(approx.k_hat / approx.s_diag[:, None], REGISTRY[tid].t.entries, atol=1e-12)

    def test_orthogonal_inverse_is_transpose(self):
        k = normalize(REGISTRY["T1"].t).k_hat
        np.testing.assert_allclose(k @ k.T, np.eye(8), atol=1e-12)
        np.testing.assert_allclose(np.linalg.inv(k), k.T, atol=1e-12)


class TestLowComplexityMatrix:

    def test_rejects_large_entries(self):
        with pytest.raises(OutOfAlphabetError):
            LowComplexityMatrix(np.array([[4, 0], [0, 1]]))

    def test_rejects_zero_row(self):
        with pytest.raises(AllZeroRowError):
            LowComplexityMatrix(np.array([[1, 0], [0, 0]]))

    def test_value_equality(self):
        a = LowComplexityMatrix(np.array(MATRICES["T3"]))
        b = LowComplexityMatrix(np.array(MATRICES["T3"], dtype=float))
        assert a == b and hash(a) == hash(b)
