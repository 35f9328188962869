import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peakonlab.errors import JumpGenerationError
from peakonlab.field import PeakedField, h1_norm_sq, sample, uniform_grid
from peakonlab.linear import (
    apply_A,
    char_X,
    h1_identity_rhs,
    jacobian_Xs,
    jacobian_Xs_peak_limits,
    linear_ode_reference,
    measured_h1_sq,
    solve_linear,
    to_csv,
)


def gauss_odd_data(half_width=20.0, n=4001):
    v = lambda y: y * np.exp(-(y**2))
    vx = lambda y: (1.0 - 2.0 * y * y) * np.exp(-(y**2))
    return sample(v, vx, vx, uniform_grid(half_width, n))


def peakon_data(half_width=20.0, n=2001):
    grid = uniform_grid(half_width, n)
    vals = np.exp(-np.abs(grid))
    sl = -np.sign(grid) * vals
    sr = sl.copy()
    sl[n // 2], sr[n // 2] = 1.0, -1.0
    return PeakedField.create(grid, vals, sl, sr)


class TestCharacteristics:
    def test_initial_condition(self):
        s = np.linspace(-20.0, 20.0, 101)
        assert np.max(np.abs(char_X(0.0, s) - s)) < 1e-14

    def test_peak_is_fixed_point(self):
        for t in (0.5, 2.0, 10.0):
            assert char_X(t, 0.0) == 0.0

    @given(
        t=st.floats(min_value=0.0, max_value=10.0, allow_nan=False),
        s=st.floats(min_value=-30.0, max_value=30.0, allow_nan=False).filter(
            lambda v: abs(v) >= 1e-6
        ),
    )
    @settings(max_examples=60, deadline=None)
    def test_characteristics_preserve_sign_and_order(self, t, s):
        x = char_X(t, s)
        assert np.sign(x) == np.sign(s)
        # the flow speed phi(X) - 1 is nonpositive, so positions drift left
        assert x <= s + 1e-12

    def test_jacobian_matches_finite_difference(self):
        t = 2.0
        for s in (-5.0, -0.3, 0.4, 7.0):
            eps = 1e-6
            fd = (char_X(t, s + eps) - char_X(t, s - eps)) / (2.0 * eps)
            assert jacobian_Xs(t, s) == pytest.approx(fd, rel=1e-8)

    def test_jacobian_peak_limits(self):
        left, right = jacobian_Xs_peak_limits(1.5)
        assert left == pytest.approx(np.exp(1.5), rel=1e-15)
        assert right == pytest.approx(np.exp(-1.5), rel=1e-15)
        with pytest.raises(ValueError):
            jacobian_Xs(1.5, 0.0)

    def test_large_label_overflow_safety(self):
        # the closed forms must stay finite far outside the double range of e^s
        x = char_X(3.0, np.array([700.0, -700.0]))
        assert np.all(np.isfinite(x))
        assert np.isfinite(jacobian_Xs(3.0, 700.0))


class TestClosedFormSolution:
    def test_matches_ode_reference(self):
        v0 = gauss_odd_data(n=1001)
        closed = solve_linear(v0, 1.0)
        ref = linear_ode_reference(v0, 1.0, 1e-3)
        for a, b in (
            (closed.X, ref.X),
            (closed.V, ref.V),
            (closed.U_left, ref.U_left),
            (closed.U_right, ref.U_right),
            (closed.W, ref.W),
        ):
            assert np.max(np.abs(a - b)) < 1e-6

    def test_trace_growth_is_exact(self):
        v0 = gauss_odd_data(n=1001)
        p = v0.peak_index
        alpha = v0.slope_right[p]
        for t in (0.3, 1.0, 2.5):
            state = solve_linear(v0, t)
            assert state.U_right[p] == pytest.approx(alpha * np.exp(t), rel=1e-12)
            assert state.U_left[p] == pytest.approx(
                v0.slope_left[p] * np.exp(-t), rel=1e-12
            )
            assert state.V[p] == 0.0
            assert state.X[p] == 0.0

    def test_rejects_nonzero_peak_value(self):
        grid = uniform_grid(10.0, 101)
        vals = np.exp(-(grid**2))
        slopes = -2.0 * grid * vals
        v0 = PeakedField.create(grid, vals, slopes, slopes.copy())
        with pytest.raises(JumpGenerationError):
            solve_linear(v0, 1.0)

    def test_csv_output_schema(self, tmp_path):
        v0 = gauss_odd_data(n=101)
        state = solve_linear(v0, 1.0)
        path = tmp_path / "linear.csv"
        to_csv(state, path)
        header = path.read_text().splitlines()[0]
        assert header == "t,s_label,X,V,U_left,U_right,W"


class TestGrowthIdentity:
    def test_measured_equals_predicted(self):
        v0 = gauss_odd_data(n=6001)
        for t in (1.0, 3.0):
            for side in ("positive", "negative"):
                state = solve_linear(v0, t)
                measured = measured_h1_sq(state, side)
                predicted = h1_identity_rhs(v0, t, side)
                assert measured == pytest.approx(predicted, rel=2e-4)

    def test_zero_time_recovers_initial_norm(self):
        v0 = gauss_odd_data(n=2001)
        state = solve_linear(v0, 0.0)
        for side in ("positive", "negative"):
            assert measured_h1_sq(state, side) == pytest.approx(
                h1_norm_sq(v0, side), rel=1e-6
            )

    def test_positive_side_grows_negative_side_decays(self):
        v0 = gauss_odd_data(n=2001)
        pos0 = h1_identity_rhs(v0, 0.0, "positive")
        neg0 = h1_identity_rhs(v0, 0.0, "negative")
        assert h1_identity_rhs(v0, 4.0, "positive") > pos0
        assert h1_identity_rhs(v0, 4.0, "negative") < neg0


class TestLinearizedOperator:
    def test_peak_jump_values(self):
        v = peakon_data()
        av_left, av_right = apply_A(v)
        p = v.peak_index
        assert av_left[p] == pytest.approx(-1.0, abs=1e-6)
        assert av_right[p] == pytest.approx(1.0, abs=1e-6)

    def test_continuous_when_peak_value_vanishes(self):
        v = gauss_odd_data(n=1001)
        av_left, av_right = apply_A(v)
        p = v.peak_index
        assert av_left[p] == pytest.approx(av_right[p], abs=1e-14)
