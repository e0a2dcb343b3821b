"""Fast algorithms: factorization exactness, integer execution and op counts."""
import numpy as np
import pytest

from src.approx.integer import LowComplexityMatrix
from src.fast.plan import (
    A1,
    A2_DOUBLEPRIME,
    A2_PRIME,
    M,
    P,
    CheckedInt,
    OpTrace,
    a1_matrix,
    apply_fast,
    bit_growth,
    build_plan,
    count_ops,
    estimate_ops,
    plan_for,
)
from src.fast.transforms import (
    GROUP_HIGH,
    GROUP_LOW,
    MATRICES,
    REGISTRY,
    TRANSFORM_IDS,
    NamedTransform,
    get_transform,
    resolve_transform,
)
from src.klt.markov import exact_klt
from src.utils.errors import FactorizationError, KLTError, WordOverflowError

COUNTED_OPS = {
    "T1": (24, 0),
    "T3": (48, 24),
    "T13": (27, 13),
    "T16": (39, 22),
    "T17": (40, 22),
    "T18": (26, 12),
}


class TestRegistry:

    def test_ids_and_groups(self):
        assert TRANSFORM_IDS == ("T1", "T3", "T13", "T16", "T17", "T18")
        assert {tid for tid in TRANSFORM_IDS if REGISTRY[tid].group == GROUP_LOW} == {"T1", "T3", "T13"}
        assert {tid for tid in TRANSFORM_IDS if REGISTRY[tid].group == GROUP_HIGH} == {"T16", "T17", "T18"}

    def test_embedded_rows(self):
        np.testing.assert_array_equal(REGISTRY["T16"].t.entries[0], np.full(8, 2))
        np.testing.assert_array_equal(REGISTRY["T17"].t.entries[5], [2, -3, 1, 3, -3, -1, 3, -2])
        np.testing.assert_array_equal(REGISTRY["T18"].t.entries[2], [2, 1, -1, -2, -2, -1, 1, 2])
        np.testing.assert_array_equal(REGISTRY["T1"].t.entries[0], [0, 1, 1, 1, 1, 1, 1, 0])

    def test_variants_differ_in_one_row(self):
        for a, b in (("T16", "T17"), ("T13", "T18")):
            differing = np.flatnonzero(np.any(REGISTRY[a].t.entries != REGISTRY[b].t.entries, axis=1))
            assert differing.size == 1

    def test_lookup_is_case_insensitive(self):
        assert get_transform("t13").id == "T13"

    def test_unknown_id(self):
        with pytest.raises(KLTError):
            get_transform("T2")


class TestResolveTransform:

    def test_bare_klt_uses_given_rho(self):
        matrix, orthogonal = resolve_transform("klt", 0.8)
        assert matrix is exact_klt(0.8).matrix
        assert orthogonal

    def test_named_klt_matches_bare(self):
        np.testing.assert_array_equal(resolve_transform("KLT:0.8")[0], resolve_transform("klt", 0.8)[0])

    @pytest.mark.parametrize("spec, rho", [("klt", None), ("klt:abc", None), ("klt:0.5x", 0.5), ("T2", None)])
    def test_rejects(self, spec, rho):
        with pytest.raises(KLTError):
            resolve_transform(spec, rho)

    def test_approximation_is_read_only_copy(self):
        matrix, orthogonal = resolve_transform("T16")
        assert not orthogonal
        assert not matrix.flags.writeable
        with pytest.raises(ValueError):
            matrix *= 2


class TestPlan:

    @pytest.mark.parametrize("tid", TRANSFORM_IDS)
    def test_factor_product_is_exact(self, tid):
        np.testing.assert_array_equal(plan_for(tid).product(), REGISTRY[tid].t.entries)

    def test_factor_sequences(self):
        assert plan_for("T1").factors == (P, M, A1)
        assert plan_for("T3").factors == (P, M, A1)
        assert plan_for("T16").factors == (P, M, A2_PRIME, A1)
        assert plan_for("T17").factors == (P, M, A2_PRIME, A1)
        assert plan_for("T18").factors == (P, M, A2_DOUBLEPRIME, A1)

    def test_kernel_constants(self):
        assert plan_for("T1").m1_constants == (0, 1, 1, 1, 1, 1, 0, -1, 1, 0, -1, 1, 1, -1, 1, 0)
        assert plan_for("T16").m2_constants[8] == 2
        assert plan_for("T17").m2_constants[8] == 3
        assert plan_for("T13").m2_constants == plan_for("T18").m2_constants

    def test_a1_butterfly(self):
        x = np.arange(1, 9)
        np.testing.assert_array_equal(a1_matrix() @ x, [9, 9, 9, 9, -1, -3, -5, -7])

    def test_corrupted_matrix_is_rejected(self):
        entries = np.array(MATRICES["T16"])
        entries[3, 4] = -entries[3, 4]
        corrupted = NamedTransform(
            id="T16", t=LowComplexityMatrix(entries), group=GROUP_HIGH,
            interval=(0.7, 0.8), reference_rho=0.8, published_ops=(38, 22),
        )
        with pytest.raises(FactorizationError) as info:
            build_plan(corrupted)
        assert info.value.position == (3, 4)


class TestApplyFast:

    @pytest.mark.parametrize("tid", TRANSFORM_IDS)
    def test_unit_impulse_gives_first_column(self, tid):
        x = np.zeros(8, dtype=int)
        x[0] = 1
        np.testing.assert_array_equal(apply_fast(tid, x), REGISTRY[tid].t.entries[:, 0])

    def test_all_ones_t16(self):
        assert apply_fast("T16", np.ones(8, dtype=int))[0] == 16

    @pytest.mark.parametrize("tid", TRANSFORM_IDS)
    def test_random_vectors_match_direct_product(self, tid):
        rng = np.random.default_rng(20240)
        t = REGISTRY[tid].t.entries
        for x in rng.integers(-10, 11, size=(1000, 8)):
            np.testing.assert_array_equal(apply_fast(tid, x), t @ x)

    @pytest.mark.parametrize("tid", TRANSFORM_IDS)
    def test_multiplierless(self, tid):
        trace = OpTrace()
        rng = np.random.default_rng(1)
        for x in rng.integers(-10, 11, size=(50, 8)):
            apply_fast(tid, x, trace=trace)
        assert trace.multiplications == 0
        assert set(trace.counts) <= {"add", "sub", "shift", "neg"}

    @pytest.mark.parametrize("tid", TRANSFORM_IDS)
    def test_traced_ops_match_counter(self, tid):
        trace = OpTrace()
        apply_fast(tid, [3, -1, 4, -1, 5, -9, 2, -6], trace=trace)
        assert (trace.adds, trace.shifts) == count_ops(tid)

    def test_overflow_detected(self):
        with pytest.raises(WordOverflowError):
            apply_fast("T3", [100] * 8, bits=8)

    def test_input_outside_word(self):
        with pytest.raises(WordOverflowError):
            apply_fast("T1", [1 << 15] + [0] * 7, bits=16)

    def test_wide_word_accepts_large_inputs(self):
        x = [30000, -30000, 12345, -1, 0, 7, 8, -20000]
        np.testing.assert_array_equal(apply_fast("T3", x, bits=24), REGISTRY["T3"].t.entries @ np.array(x))

    def test_rejects_wrong_length(self):
        with pytest.raises(KLTError):
            apply_fast("T1", [1, 2, 3])


class TestCheckedInt:

    def test_multiplication_is_recorded(self):
        trace = OpTrace()
        value = CheckedInt(3, 16, trace) * 3
        assert int(value) == 9
        assert trace.multiplications == 1

    def test_range_limits(self):
        CheckedInt(127, 8)
        CheckedInt(-128, 8)
        with pytest.raises(WordOverflowError):
            CheckedInt(128, 8)


class TestComplexity:

    def test_t1_exact(self):
        assert count_ops("T1") == (24, 0)

    def test_t18(self):
        assert count_ops("T18") == (26, 12)

    def test_t3(self):
        assert count_ops("T3") == (48, 24)

    @pytest.mark.parametrize("tid", TRANSFORM_IDS)
    def test_against_published_counts(self, tid):
        adds, shifts = count_ops(tid)
        published_adds, published_shifts = REGISTRY[tid].published_ops
        assert shifts == published_shifts
        assert abs(adds - published_adds) <= 2
        assert (adds, shifts) == COUNTED_OPS[tid]

    def test_estimate_for_arbitrary_matrix(self):
        t = LowComplexityMatrix(np.array([[1, 2, 0], [0, 3, -1], [1, 1, 1]]))
        # rows: 1 add + 1 shift; 1 add + (1 shift + 1 add); 2 adds
        assert estimate_ops(t) == (5, 2)


class TestBitGrowth:

    def test_t1(self):
        assert bit_growth("T1") == 3

    def test_t13(self):
        assert bit_growth("T13") == 4

    def test_identity(self):
        assert bit_growth(np.eye(8, dtype=int)) == 0

    def test_plan_carries_bound(self):
        assert plan_for("T3").bit_growth == bit_growth(REGISTRY["T3"].t)
