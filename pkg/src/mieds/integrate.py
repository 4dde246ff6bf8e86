"""Fixed-step integrators on a uniform time grid.

``rk4_solve`` integrates any callable right-hand side (a :class:`VectorField`,
a :class:`LocalModel`, or a plain function of the state).  ``euler_maruyama``
samples the additive-noise SDE ``dx = f(x) dt + sigma dW``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .expr import DomainError

GRID_TOL = 1e-9


class IntegrationError(ArithmeticError):
    """Integration aborted; ``time`` is where the right-hand side failed."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t={time:.17g})")
        self.time = time


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States ``x(t0 + j*dt)`` for ``j = 0..N``; ``states`` has shape (N+1, n)."""

    t0: float
    dt: float
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.array(self.states, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if s.ndim != 2 or s.shape[0] < 2:
            raise ValueError("a trajectory needs at least two samples")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "states", s)

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.states.shape[0])

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt

    def __len__(self):
        return self.states.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.t0 == other.t0
            and self.dt == other.dt
            and np.array_equal(self.states, other.states)
        )

    __hash__ = None

    def slice(self, start: int, stop: int) -> "Trajectory":
        """Samples ``start..stop`` inclusive."""
        return Trajectory(self.t0 + start * self.dt, self.dt, self.states[start : stop + 1])

    def to_csv(self, path) -> None:
        write_trajectory_csv(path, self)


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    def generator(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.seed + offset)


def step_count(horizon: float, dt: float) -> int:
    if not horizon > 0 or not dt > 0:
        raise ValueError("horizon and dt must be positive")
    n = round(horizon / dt)
    if n < 1 or abs(n * dt - horizon) > GRID_TOL * max(1.0, abs(horizon)):
        raise ValueError(f"dt={dt!r} does not divide horizon={horizon!r}")
    return n


def _finite(v: np.ndarray, t: float) -> np.ndarray:
    if not np.all(np.isfinite(v)):
        raise IntegrationError("non-finite state", t)
    return v


def rk4_step(rhs: Callable, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(x)
    k2 = rhs(x + 0.5 * dt * k1)
    k3 = rhs(x + 0.5 * dt * k2)
    k4 = rhs(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_steps(rhs: Callable, x0, t0: float, n_steps: int, dt: float) -> Trajectory:
    x = np.asarray(x0, dtype=float).ravel().copy()
    out = np.empty((n_steps + 1, x.size))
    out[0] = x
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(n_steps):
            try:
                x = rk4_step(rhs, x, dt)
            except (DomainError, OverflowError, ZeroDivisionError) as exc:
                raise IntegrationError(str(exc), t0 + j * dt) from exc
            out[j + 1] = _finite(x, t0 + (j + 1) * dt)
    return Trajectory(t0, dt, out)


def rk4_solve(rhs: Callable, x0, t0: float, horizon: float, dt: float) -> Trajectory:
    """Classical Runge-Kutta on ``[t0, t0 + horizon]`` with fixed step ``dt``."""
    return rk4_steps(rhs, x0, t0, step_count(horizon, dt), dt)


def euler_steps(rhs: Callable, x0, t0: float, n_steps: int, dt: float) -> Trajectory:
    x = np.asarray(x0, dtype=float).ravel().copy()
    out = np.empty((n_steps + 1, x.size))
    out[0] = x
    for j in range(n_steps):
        x = x + rhs(x) * dt
        out[j + 1] = _finite(x, t0 + (j + 1) * dt)
    return Trajectory(t0, dt, out)


def euler_maruyama(
    rhs: Callable,
    x0,
    t0: float,
    horizon: float,
    dt: float,
    noise: NoiseSpec,
    rng: np.random.Generator | None = None,
) -> Trajectory:
    """``x_{j+1} = x_j + f(x_j) dt + sigma sqrt(dt) xi_j``, ``xi_j ~ N(0, I)``.

    The generator is seeded from ``noise.seed`` unless ``rng`` is given.
    """
    n_steps = step_count(horizon, dt)
    x = np.asarray(x0, dtype=float).ravel().copy()
    if rng is None:
        rng = noise.generator()
    xi = rng.standard_normal((n_steps, x.size))
    scale = noise.sigma * math.sqrt(dt)
    out = np.empty((n_steps + 1, x.size))
    out[0] = x
    for j in range(n_steps):
        try:
            x = x + rhs(x) * dt + scale * xi[j]
        except DomainError as exc:
            raise IntegrationError(str(exc), t0 + j * dt) from exc
        out[j + 1] = _finite(x, t0 + (j + 1) * dt)
    return Trajectory(t0, dt, out)


def deviation(a: Trajectory, b: Trajectory) -> float:
    """Left Riemann sum of ``||a(t) - b(t)||_2`` over the common grid."""
    if (
        a.states.shape != b.states.shape
        or abs(a.dt - b.dt) > GRID_TOL * a.dt
        or abs(a.t0 - b.t0) > GRID_TOL * max(1.0, abs(a.t0))
    ):
        raise GridMismatch("trajectories are not on the same grid")
    diff = a.states[:-1] - b.states[:-1]
    return float(a.dt * np.sum(np.sqrt(np.sum(diff * diff, axis=1))))


def write_trajectory_csv(path, traj: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"x{i}" for i in range(traj.dim)])
        for t, row in zip(traj.times, traj.states):
            w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    t = data[:, 0]
    return Trajectory(float(t[0]), float(t[1] - t[0]), data[:, 1:])
