import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from locindex import (
    StepFunction,
    distribution,
    increasing_rearrangement,
    loc_index,
    loc_refined,
    step_from_curve,
)

from oracles import loc_by_integration

finite_taus = hnp.arrays(
    dtype=np.float64,
    shape=st.integers(min_value=1, max_value=50),
    elements=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
)


class TestStepFunction:
    def test_evaluation_convention(self):
        step = StepFunction(taus=[0.1, 0.2, 0.3])
        assert step(0.0) == 0.1  # value at zero is the first piece's
        assert step(1.0 / 3.0) == 0.1
        assert step(0.34) == 0.2
        assert step(1.0) == 0.3

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(ValueError):
            StepFunction(taus=[])
        with pytest.raises(ValueError):
            StepFunction(taus=[0.1, np.nan])


class TestDistribution:
    def test_half_below(self):
        step = StepFunction(taus=[0.3, 0.7])
        assert distribution(step, 0.5) == 0.5

    def test_below_all(self):
        assert distribution(StepFunction(taus=[0.3, 0.7]), 0.1) == 0.0

    def test_at_and_above_max(self):
        step = StepFunction(taus=[0.3, 0.7])
        assert distribution(step, 0.7) == 1.0
        assert distribution(step, 2.0) == 1.0

    def test_right_continuous_and_monotone(self):
        step = StepFunction(taus=[0.2, 0.8, 0.5, 0.2])
        xs = np.linspace(-0.5, 1.5, 101)
        gs = distribution(step, xs)
        assert (np.diff(gs) >= 0).all()
        # jumps include their own level: G(tau) counts tau itself
        assert distribution(step, 0.2) == 0.5


class TestIncreasingRearrangement:
    def test_sorts(self):
        out = increasing_rearrangement(StepFunction(taus=[0.9, 0.1, 0.5]))
        assert out.taus.tolist() == [0.1, 0.5, 0.9]

    def test_sorted_input_unchanged(self):
        taus = [0.1, 0.5, 0.9]
        out = increasing_rearrangement(StepFunction(taus=taus))
        assert out.taus.tolist() == taus

    @given(finite_taus)
    @settings(max_examples=100, deadline=None)
    def test_idempotent(self, taus):
        once = increasing_rearrangement(StepFunction(taus=taus))
        twice = increasing_rearrangement(once)
        assert (once.taus == twice.taus).all()

    @given(finite_taus)
    @settings(max_examples=100, deadline=None)
    def test_quantile_of_distribution_at_midpoints(self, taus):
        step = StepFunction(taus=taus)
        rearranged = increasing_rearrangement(step)
        m = step.m
        levels = np.unique(step.taus)
        for i in range(1, m + 1):
            t = (i - 0.5) / m
            g = np.array([distribution(step, x) for x in levels])
            inf_value = levels[np.searchsorted(g, t, side="left")]
            assert inf_value == rearranged.taus[i - 1]


class TestLocIndex:
    def test_two_piece_swap(self):
        value = loc_index(StepFunction(taus=[1.0, 0.0])).value
        assert value == pytest.approx(0.25, abs=1e-15)
        assert value == pytest.approx(
            loc_by_integration(StepFunction(taus=[1.0, 0.0])), abs=1e-15
        )

    def test_three_piece_example(self):
        step = StepFunction(taus=[0.5, 0.9, 0.1])
        assert loc_index(step).value == pytest.approx(1.2 / 9.0, abs=1e-14)
        assert loc_index(step).value == pytest.approx(loc_by_integration(step), abs=1e-13)

    def test_nondecreasing_gives_exact_zero(self):
        assert loc_index(StepFunction(taus=[0.1, 0.1, 0.4, 0.9])).value == 0.0

    def test_reports_piece_count(self):
        assert loc_index(StepFunction(taus=[0.3, 0.1])).m == 2

    @given(finite_taus)
    @settings(max_examples=150, deadline=None)
    def test_nonnegative_and_zero_iff_sorted(self, taus):
        value = loc_index(StepFunction(taus=taus)).value
        assert value >= -1e-12  # float rounding of the exact non-negative sum
        if (np.diff(taus) >= 0).all():
            assert value == 0.0

    @given(finite_taus, st.floats(min_value=-1.0, max_value=1.0, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_translation_invariance(self, taus, shift):
        base = loc_index(StepFunction(taus=taus)).value
        shifted = loc_index(StepFunction(taus=taus + shift)).value
        assert shifted == pytest.approx(base, abs=1e-12)

    @given(finite_taus, st.floats(min_value=0.0, max_value=2.0, allow_nan=False))
    @settings(max_examples=100, deadline=None)
    def test_positive_homogeneity(self, taus, c):
        base = loc_index(StepFunction(taus=taus)).value
        scaled = loc_index(StepFunction(taus=c * taus)).value
        assert scaled == pytest.approx(c * base, abs=1e-12)

    def test_comonotonic_additivity(self):
        rng = np.random.default_rng(5)
        transforms = [np.square, np.exp, lambda u: np.floor(5 * u) / 5.0, lambda u: u]
        for _ in range(200):
            m = int(rng.integers(1, 80))
            driver = rng.uniform(0, 1, m)
            g = transforms[rng.integers(0, 4)](driver)
            h = transforms[rng.integers(0, 4)](driver)
            lhs = loc_index(StepFunction(taus=g + h)).value
            rhs = loc_index(StepFunction(taus=g)).value + loc_index(StepFunction(taus=h)).value
            assert lhs == pytest.approx(rhs, abs=1e-12)

    @given(finite_taus.filter(lambda t: t.size >= 2), st.data())
    @settings(max_examples=100, deadline=None)
    def test_rearrangement_contraction(self, u, data):
        v = data.draw(
            hnp.arrays(
                dtype=np.float64,
                shape=st.just(u.shape),
                elements=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
            )
        )
        lhs = np.abs(np.sort(u) - np.sort(v)).mean()
        rhs = np.abs(u - v).mean()
        assert lhs <= rhs + 1e-12

    def test_formula_equals_integration_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            m = int(rng.integers(1, 51))
            taus = rng.uniform(-2, 2, m)
            step = StepFunction(taus=taus)
            assert loc_index(step).value == pytest.approx(
                loc_by_integration(step), abs=1e-12
            )


class TestStepFromCurve:
    def test_direct_transfer(self):
        from locindex import BandwidthEstimate, FitSpec, FittedCurve, LossKind

        spec = FitSpec(
            loss=LossKind.quadratic(),
            bandwidth=BandwidthEstimate(value=0.1, method="fixed"),
            grid_size=3,
        )
        curve = FittedCurve(grid=np.array([0.0, 0.5, 1.0]), values=np.array([0.1, 0.2, 0.3]), spec=spec)
        step = step_from_curve(curve)
        assert step.m == 3
        assert step.taus.tolist() == [0.1, 0.2, 0.3]

    def test_value_multiset_preserved(self):
        from locindex import BandwidthEstimate, FitSpec, FittedCurve, LossKind

        spec = FitSpec(
            loss=LossKind.quadratic(),
            bandwidth=BandwidthEstimate(value=0.1, method="fixed"),
            grid_size=5,
        )
        values = np.array([0.3, 0.1, 0.9, 0.1, 0.5])
        curve = FittedCurve(grid=np.linspace(0, 1, 5), values=values, spec=spec)
        assert sorted(step_from_curve(curve).taus) == sorted(values)


class TestLocRefined:
    def test_identity_curve_is_zero_everywhere(self):
        result = loc_refined(lambda t: t, (10, 100, 1000), tol=1e-6)
        assert all(h.value == 0.0 for h in result.history)
        assert result.converged

    def test_decreasing_curve_converges_to_one_sixth(self):
        result = loc_refined(lambda t: 1.0 - t, (10, 100, 1000), tol=1e-3)
        assert abs(result.value - 1.0 / 6.0) < 1e-3
        assert result.converged
        assert result.m == 1000
        # reported bound dominates the actual error
        assert result.error_bound is not None
        assert abs(result.value - 1.0 / 6.0) <= result.error_bound

    def test_refinement_gaps_shrink(self):
        result = loc_refined(lambda t: np.sin(6.0 * t), (10, 100, 1000), tol=1e-3)
        gap_coarse = abs(result.history[1].value - result.history[0].value)
        gap_fine = abs(result.history[2].value - result.history[1].value)
        assert gap_fine <= gap_coarse + 1e-6

    def test_non_converged_flag(self):
        result = loc_refined(lambda t: np.sin(6.0 * t), (10, 20), tol=1e-30)
        assert not result.converged  # reported, not raised

    def test_schedule_validation(self):
        with pytest.raises(ValueError):
            loc_refined(lambda t: t, (), tol=1e-3)
        with pytest.raises(ValueError):
            loc_refined(lambda t: t, (10, 10), tol=1e-3)
        with pytest.raises(ValueError):
            loc_refined(lambda t: t, (10, 100), tol=0.0)
