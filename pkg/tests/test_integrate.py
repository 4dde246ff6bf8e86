import math

import numpy as np
import pytest

from oracles import left_riemann_deviation, rk4, tanh_rhs, trapezoid_deviation
from mieds.expr import Var, VectorField
from mieds.integrate import (
    GridMismatch,
    IntegrationError,
    NoiseSpec,
    Trajectory,
    deviation,
    euler_maruyama,
    euler_steps,
    read_trajectory_csv,
    rk4_solve,
    step_count,
    write_trajectory_csv,
)
from mieds.systems import pendulum, tanh_system


def decay(x):
    return -x


class TestRK4:
    def test_exponential_decay(self):
        traj = rk4_solve(decay, [1.0], 0.0, 1.0, 0.01)
        assert traj.states[-1, 0] == pytest.approx(math.exp(-1), abs=1e-8)
        assert traj.states.shape == (101, 1)

    def test_fourth_order(self):
        errs = [abs(rk4_solve(decay, [1.0], 0.0, 1.0, dt).states[-1, 0] - math.exp(-1)) for dt in (0.1, 0.05)]
        assert errs[0] / errs[1] == pytest.approx(16, rel=0.3)

    def test_zero_field(self):
        traj = rk4_solve(lambda x: np.zeros_like(x), [0.3, -2.0], 0.0, 1.0, 0.1)
        assert np.all(traj.states == np.array([0.3, -2.0]))

    def test_matches_independent_rk4(self):
        field, cfg = pendulum()
        traj = rk4_solve(field, cfg.x0, 0.0, cfg.horizon, cfg.dt)
        ref = rk4(lambda x: np.array([x[1], -x[1] - 9.81 * math.sin(x[0])]), cfg.x0, 200, 0.01)
        np.testing.assert_allclose(traj.states, ref, rtol=0, atol=1e-13)

    def test_blow_up_reported(self):
        with pytest.raises(IntegrationError) as info:
            rk4_solve(lambda x: x * x, [1.0], 0.0, 5.0, 0.01)
        assert 0.0 < info.value.time < 5.0

    def test_grid_validation(self):
        assert step_count(2.0, 0.01) == 200
        with pytest.raises(ValueError):
            step_count(1.0, 0.3)
        with pytest.raises(ValueError):
            step_count(-1.0, 0.1)


class TestEulerMaruyama:
    def test_zero_noise_is_euler(self):
        field = tanh_system()[0]
        em = euler_maruyama(field, [6.0], 0.0, 1.0, 0.01, NoiseSpec(0.0, 5))
        eu = euler_steps(field, [6.0], 0.0, 100, 0.01)
        assert em == eu

    def test_variance_grows_like_sigma_squared_t(self):
        # with zero drift, x(T) - x0 ~ N(0, sigma^2 T)
        sigma, T = 0.5, 1.0
        finals = [
            euler_maruyama(lambda x: 0 * x, [0.0], 0.0, T, 0.05, NoiseSpec(sigma, s)).states[-1, 0]
            for s in range(10_000)
        ]
        assert np.var(finals) == pytest.approx(sigma**2 * T, rel=0.05)

    def test_reproducible_and_seed_sensitive(self):
        f = tanh_system()[0]
        a = euler_maruyama(f, [6.0], 0.0, 1.0, 0.01, NoiseSpec(0.1, 3))
        b = euler_maruyama(f, [6.0], 0.0, 1.0, 0.01, NoiseSpec(0.1, 3))
        c = euler_maruyama(f, [6.0], 0.0, 1.0, 0.01, NoiseSpec(0.1, 4))
        assert a == b
        assert not np.array_equal(a.states, c.states)

    def test_against_hand_rolled_scheme(self):
        rng = np.random.default_rng(7)
        xi = rng.standard_normal((1000, 1))
        x = np.array([6.0])
        ref = [x]
        for j in range(1000):
            x = x + tanh_rhs(x) * 0.01 + 0.1 * math.sqrt(0.01) * xi[j]
            ref.append(x)
        got = euler_maruyama(tanh_system()[0], [6.0], 0.0, 10.0, 0.01, NoiseSpec(0.1, 7))
        np.testing.assert_allclose(got.states, np.array(ref), rtol=0, atol=1e-12)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec(-0.1)


class TestDeviation:
    def test_constant_offset(self):
        a = Trajectory(0.0, 0.1, np.zeros((11, 1)))
        b = Trajectory(0.0, 0.1, np.full((11, 1), 0.5))
        assert deviation(a, b) == pytest.approx(0.5)

    def test_identical(self):
        a = rk4_solve(decay, [1.0, 2.0], 0.0, 1.0, 0.1)
        assert deviation(a, a) == 0.0

    def test_symmetric_and_matches_oracle(self):
        field, cfg = pendulum()
        a = rk4_solve(field, cfg.x0, 0.0, 2.0, 0.01)
        b = rk4_solve(field, [0.7, 0.1], 0.0, 2.0, 0.01)
        assert deviation(a, b) == deviation(b, a)
        assert deviation(a, b) == pytest.approx(left_riemann_deviation(a.states, b.states, 0.01), rel=1e-14)
        assert deviation(a, b) == pytest.approx(trapezoid_deviation(a.states, b.states, 0.01), rel=0.01)

    def test_grid_mismatch(self):
        a = Trajectory(0.0, 0.1, np.zeros((11, 1)))
        with pytest.raises(GridMismatch):
            deviation(a, Trajectory(0.0, 0.1, np.zeros((12, 1))))
        with pytest.raises(GridMismatch):
            deviation(a, Trajectory(0.0, 0.2, np.zeros((11, 1))))


def test_trajectory_helpers():
    t = rk4_solve(decay, [1.0], 1.0, 1.0, 0.25)
    assert t.n_steps == 4 and t.dim == 1
    np.testing.assert_allclose(t.times, [1.0, 1.25, 1.5, 1.75, 2.0])
    s = t.slice(1, 3)
    assert s.t0 == 1.25 and s.n_steps == 2


def test_csv_round_trip(tmp_path):
    t = rk4_solve(VectorField(2, [Var(1), -Var(0)]), [1.0, 0.0], 0.0, 1.0, 0.1)
    p = tmp_path / "traj.csv"
    write_trajectory_csv(p, t)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,x0,x1"
    assert len(lines) == 12
    back = read_trajectory_csv(p)
    np.testing.assert_array_equal(back.states, t.states)
