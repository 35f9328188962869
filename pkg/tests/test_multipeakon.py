import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peakonlab.errors import CollisionError, InputDataError
from peakonlab.field import PeakedField, energy_E, h1_norm_sq_arrays, uniform_grid
from peakonlab.multipeakon import (
    MultipeakonState,
    evaluate,
    mp_hamiltonian,
    mp_integrate,
    mp_rhs,
    reconstruct,
    trajectory_to_csv,
)


def two_peakon_state():
    return MultipeakonState.create([-1.0, 1.0], [1.0, 0.5])


class TestStateValidation:
    def test_rejects_unordered_positions(self):
        with pytest.raises(InputDataError):
            MultipeakonState.create([1.0, -1.0], [1.0, 1.0])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(InputDataError):
            MultipeakonState.create([0.0, 1.0], [1.0])


class TestHamiltonian:
    def test_single_peakon_value(self):
        assert mp_hamiltonian(MultipeakonState.create([0.0], [1.0])) == 0.5

    def test_two_peakon_value(self):
        st2 = MultipeakonState.create([-1.0, 1.0], [1.0, 1.0])
        assert mp_hamiltonian(st2) == pytest.approx(1.0 + np.exp(-2.0), rel=1e-15)

    def test_conservation_over_long_run(self):
        states = mp_integrate(two_peakon_state(), 10.0, 1e-3, record_every=100)
        h0 = mp_hamiltonian(states[0])
        for st_k in states[1:]:
            assert abs(mp_hamiltonian(st_k) - h0) < 1e-10
            assert abs(np.sum(st_k.m) - 1.5) < 1e-12 * max(1.0, st_k.t)


class TestDynamics:
    def test_single_peakon_constant_speed(self):
        c = 0.5
        states = mp_integrate(MultipeakonState.create([0.0], [c]), 10.0, 1e-2)
        final = states[-1]
        assert final.x[0] == pytest.approx(c * 10.0, abs=1e-9)
        assert final.m[0] == pytest.approx(c, abs=1e-12)

    def test_positions_move_at_local_wave_speed(self):
        st_k = two_peakon_state()
        dx, _ = mp_rhs(st_k.x, st_k.m)
        u_at_peaks = evaluate(st_k, st_k.x)
        assert np.max(np.abs(dx - u_at_peaks)) < 1e-10

    def test_same_sign_pair_stays_ordered(self):
        states = mp_integrate(two_peakon_state(), 20.0, 1e-2, record_every=50)
        for st_k in states:
            assert np.all(np.diff(st_k.x) > 0)

    def test_integrator_self_convergence(self):
        final_coarse = mp_integrate(two_peakon_state(), 20.0, 1e-2)[-1]
        final_fine = mp_integrate(two_peakon_state(), 20.0, 5e-3)[-1]
        assert np.max(np.abs(final_coarse.x - final_fine.x)) < 1e-6
        assert np.max(np.abs(final_coarse.m - final_fine.m)) < 1e-6

    def test_peakon_antipeakon_collision_detected(self):
        pair = MultipeakonState.create([-0.5, 0.5], [1.0, -1.0])
        with pytest.raises(CollisionError):
            mp_integrate(pair, 5.0, 1e-3)

    @given(
        m1=st.floats(min_value=0.1, max_value=2.0),
        m2=st.floats(min_value=0.1, max_value=2.0),
        gap=st.floats(min_value=0.5, max_value=5.0),
    )
    @settings(max_examples=20, deadline=None)
    def test_momentum_conserved_per_step(self, m1, m2, gap):
        state = MultipeakonState.create([0.0, gap], [m1, m2])
        after = mp_integrate(state, 0.1, 0.1)[-1]
        assert np.sum(after.m) == pytest.approx(m1 + m2, rel=1e-13)


class TestReconstruction:
    def test_single_unit_peakon_is_the_kernel(self):
        grid = uniform_grid(20.0, 2001)
        vals, sl, sr = reconstruct(MultipeakonState.create([0.0], [1.0]), grid)
        assert np.max(np.abs(vals - np.exp(-np.abs(grid)))) < 1e-14
        p = grid.size // 2
        assert sl[p] == 1.0
        assert sr[p] == -1.0

    def test_slope_jump_at_each_position(self):
        st_k = two_peakon_state()
        vals, sl, sr = reconstruct(st_k, st_k.x)
        assert np.allclose(sr - sl, -2.0 * st_k.m, atol=1e-14)

    def test_energy_of_scaled_peakon(self):
        c = 0.8
        grid = uniform_grid(25.0, 8001)
        vals, sl, sr = reconstruct(MultipeakonState.create([0.0], [c]), grid)
        fld = PeakedField.create(grid, vals, sl, sr)
        assert energy_E(fld) == pytest.approx(2.0 * c * c, rel=1e-4)

    def test_energy_constant_along_flow(self):
        base = uniform_grid(40.0, 16001)
        states = mp_integrate(two_peakon_state(), 5.0, 1e-2, record_every=100)
        energies = []
        for st_k in states:
            # insert nodes at the current peak positions so the one-sided
            # slopes resolve the corners exactly
            grid = np.unique(np.concatenate([base, st_k.x]))
            vals, sl, sr = reconstruct(st_k, grid)
            energies.append(h1_norm_sq_arrays(grid, vals, sl, sr))
        assert max(energies) - min(energies) < 1e-5 * energies[0]


class TestSerialization:
    def test_trajectory_csv_schema(self, tmp_path):
        states = mp_integrate(two_peakon_state(), 1.0, 1e-2, record_every=10)
        path = tmp_path / "traj.csv"
        trajectory_to_csv(states, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,x_1,x_2,m_1,m_2,H,sum_m"
        assert len(lines) == len(states) + 1
