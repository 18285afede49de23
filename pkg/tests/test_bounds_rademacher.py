import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskbounds.bounds_rademacher import (
    RademacherCIInputs,
    conditional_k_bound,
    deviation_tail,
    mixing_rademacher_ci,
    nn_generalization_ci,
    rademacher_ci,
    rademacher_ci_massart,
    single_hypothesis_tail,
)


class TestDeviationTail:
    def test_general(self):
        assert deviation_tail(2.0, 1.0) == pytest.approx(
            0.13533528323661276, abs=1e-15
        )

    def test_nonnegative_refinement(self):
        assert deviation_tail(2.0, 1.0, nonnegative=True) == pytest.approx(
            0.00033546262790251185, abs=1e-18
        )

    def test_zero_envelope_degenerate(self):
        assert deviation_tail(0.5, 0.0) == 0.0
        assert deviation_tail(0.0, 0.0) == 1.0

    def test_validation(self):
        with pytest.raises(ValueError, match="epsilon"):
            deviation_tail(-1.0, 1.0)
        with pytest.raises(ValueError, match="envelope"):
            deviation_tail(1.0, -1.0)

    @given(st.floats(0.0, 50.0), st.floats(0.01, 20.0))
    def test_nonnegative_never_looser(self, eps, env):
        assert deviation_tail(eps, env, nonnegative=True) <= deviation_tail(eps, env)

    @given(st.floats(0.01, 10.0), st.floats(0.01, 10.0))
    def test_decreasing_in_epsilon(self, eps, env):
        assert deviation_tail(eps + 0.5, env) <= deviation_tail(eps, env)


class TestSingleHypothesisTail:
    def test_reference(self):
        assert single_hypothesis_tail(3.0, 1.0) == pytest.approx(
            0.011108996538242316, abs=1e-15
        )

    def test_matches_general_family_tail(self):
        # one hypothesis is a family whose envelope is its own magnitude
        assert single_hypothesis_tail(1.7, 0.9) == deviation_tail(1.7, 0.9)


class TestConditionalKBound:
    def test_first_term(self):
        threshold, tail = conditional_k_bound(
            epsilon=math.sqrt(2.0),
            eta=0.5,
            k=5,
            n=10,
            envelope_l2_sup=1.0,
            rad=1.0,
            single_tail=0.01,
        )
        assert threshold == pytest.approx(math.sqrt(2.0) + 0.5 + 1.0, abs=1e-15)
        assert tail == pytest.approx(0.01831563888873418 + 0.01, abs=1e-15)

    def test_k_zero_only_single_tail(self):
        threshold, tail = conditional_k_bound(1.0, 0.25, 0, 10, 1.0, 5.0, 0.07)
        assert threshold == pytest.approx(1.25)
        assert tail == 0.07

    def test_k_range(self):
        with pytest.raises(ValueError, match="k must lie"):
            conditional_k_bound(1.0, 0.0, 11, 10, 1.0, 0.0, 0.0)

    @given(st.integers(1, 9), st.floats(0.1, 5.0))
    def test_tail_grows_with_k(self, k, eps):
        _, t1 = conditional_k_bound(eps, 0.0, k, 10, 1.0, 0.0, 0.0)
        _, t2 = conditional_k_bound(eps, 0.0, k + 1, 10, 1.0, 0.0, 0.0)
        assert t1 <= t2 + 1e-15


class TestRademacherCI:
    def test_reference(self):
        width = rademacher_ci(
            RademacherCIInputs(n=100, envelope_l2_sup=10.0, rad=5.0, delta=0.05)
        )
        assert width == pytest.approx(64.32406062962478, abs=1e-12)

    def test_nonnegative_family(self):
        width = rademacher_ci(
            RademacherCIInputs(
                n=100, envelope_l2_sup=10.0, rad=5.0, delta=0.05,
                nonnegative_family=True,
            )
        )
        assert width == pytest.approx(37.16203031481239, abs=1e-12)

    def test_zero_complexity(self):
        width = rademacher_ci(
            RademacherCIInputs(n=100, envelope_l2_sup=10.0, rad=0.0, delta=0.05)
        )
        assert width == pytest.approx(54.32406062962478, abs=1e-12)

    def test_input_validation(self):
        with pytest.raises(ValueError, match="n must"):
            RademacherCIInputs(n=0, envelope_l2_sup=1.0, rad=0.0, delta=0.1)
        with pytest.raises(ValueError, match="delta"):
            RademacherCIInputs(n=5, envelope_l2_sup=1.0, rad=0.0, delta=1.0)
        with pytest.raises(ValueError, match="rad"):
            RademacherCIInputs(n=5, envelope_l2_sup=1.0, rad=-0.1, delta=0.1)

    @given(
        st.floats(0.0, 20.0), st.floats(0.0, 20.0),
        st.floats(0.01, 0.4), st.floats(0.01, 0.4),
    )
    def test_monotonicity(self, env, rad, d1, d2):
        lo, hi = sorted((d1, d2))
        w_lo = rademacher_ci(RademacherCIInputs(10, env, rad, lo))
        w_hi = rademacher_ci(RademacherCIInputs(10, env, rad, hi))
        assert w_hi <= w_lo + 1e-12


class TestCoverPluginCI:
    def test_degenerates_to_zero_complexity_width(self):
        assert rademacher_ci_massart(100, 10.0, 0.05, 0.0, 0.0) == pytest.approx(
            54.32406062962478, abs=1e-12
        )

    def test_with_cover_term(self):
        msl = math.sqrt(2.0 * math.log(5.0))
        assert rademacher_ci_massart(100, 10.0, 0.05, 2.0, msl) == pytest.approx(
            94.20651218950681, abs=1e-12
        )

    def test_zero_envelope(self):
        assert rademacher_ci_massart(100, 0.0, 0.05, 3.0, 1.0) == pytest.approx(6.0)

    @given(st.floats(0.0, 20.0), st.floats(0.01, 0.5))
    def test_matches_direct_width_without_cover(self, env, delta):
        direct = rademacher_ci(RademacherCIInputs(10, env, 0.0, delta))
        assert rademacher_ci_massart(10, env, delta, 0.0, 0.0) == pytest.approx(
            direct, rel=1e-12, abs=1e-12
        )

    def test_validation(self):
        with pytest.raises(ValueError, match="nonnegative"):
            rademacher_ci_massart(10, 1.0, 0.1, -1.0, 0.0)


class TestNNGeneralizationCI:
    def test_reference(self):
        assert nn_generalization_ci(10**4, 2, 1.0, 0.05) == pytest.approx(
            0.3598347200737815, abs=1e-12
        )
        assert nn_generalization_ci(10**6, 2, 1.0, 0.05) == pytest.approx(
            0.03761976132934526, abs=1e-12
        )

    def test_improved_constant(self):
        assert nn_generalization_ci(10**4, 2, 1.0, 0.05, improved=True) == pytest.approx(
            0.25118659881453187, abs=1e-12
        )

    def test_unit_count_free(self):
        base = nn_generalization_ci(1000, 3, 2.0, 0.1)
        assert nn_generalization_ci(1000, 3, 2.0, 0.1, units=1) == base
        assert nn_generalization_ci(1000, 3, 2.0, 0.1, units=10**6) == base

    def test_small_sample_rejected(self):
        with pytest.raises(ValueError, match="n must exceed 4"):
            nn_generalization_ci(4, 1, 1.0, 0.1)

    @given(st.integers(5, 10**6), st.integers(1, 8), st.floats(0.1, 5.0))
    @settings(max_examples=30)
    def test_positive_and_improved_tighter(self, n, d, B):
        plain = nn_generalization_ci(n, d, B, 0.1)
        sharp = nn_generalization_ci(n, d, B, 0.1, improved=True)
        assert 0 < sharp < plain


class TestMixingCI:
    def test_reference(self):
        assert mixing_rademacher_ci(1000, 0.05, math.e, 10.0, 3.0) == pytest.approx(
            903.4593456978654, abs=1e-9
        )

    def test_second_reference(self):
        assert mixing_rademacher_ci(1000, 0.05, math.e, 3.0, 1.0) == pytest.approx(
            274.14907354658044, abs=1e-9
        )

    def test_degenerate_zeros(self):
        assert mixing_rademacher_ci(1000, 0.05, math.e, 0.0, 0.0) == 0.0

    def test_delta_above_admissible_range(self):
        with pytest.raises(ValueError, match="admissible"):
            mixing_rademacher_ci(2, 0.05, 1000.0, 1.0, 1.0)

    def test_delta_below_admissible_range(self):
        with pytest.raises(ValueError, match="admissible"):
            mixing_rademacher_ci(2, 1e-9, 1.01, 1.0, 1.0)

    def test_rate_validation(self):
        with pytest.raises(ValueError, match="rate_r"):
            mixing_rademacher_ci(10, 0.1, 1.0, 1.0, 1.0)

    def test_faster_mixing_gives_smaller_width(self):
        slow = mixing_rademacher_ci(1000, 0.05, 1.25, 1.0, 0.5)
        fast = mixing_rademacher_ci(1000, 0.05, 4.0, 1.0, 0.5)
        assert fast < slow
