"""Benchmark systems with their default experiment settings."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .encoder import EncoderConfig
from .etse import TriggerConfig
from .expr import Const, Cos, Sin, Tan, Tanh, Var, VectorField
from .integrate import NoiseSpec

G = 9.81


def pendulum() -> tuple[VectorField, EncoderConfig]:
    """Damped pendulum ``x0' = x1``, ``x1' = -x1 - 9.81 sin(x0)``."""
    x0, x1 = Var(0), Var(1)
    field = VectorField(2, [x1, -x1 - G * Sin(x0)])
    config = EncoderConfig(
        lam=2.0, k_max=3, m_max=4, horizon=2.0, dt=0.01, x0=(math.pi / 4, 0.0)
    )
    return field, config


@dataclass(frozen=True)
class QuadrotorParams:
    """Body-frame quadrotor parameters.

    Inertias are not published for the reference experiment; 1.0 is a
    placeholder that makes the gyroscopic coupling terms vanish.
    """

    I_x: float = 1.0
    I_y: float = 1.0
    I_z: float = 1.0
    mass: float = 1.0
    g: float = G
    f_wx: float = 1.0
    f_wy: float = 1.0
    f_wz: float = 1.0
    f_t: float = 0.0
    tau_wx: float = 1.0
    tau_wy: float = 1.0
    tau_wz: float = 1.0
    tau_x: float = 1.0
    tau_y: float = 1.0
    tau_z: float = 1.0

    def __post_init__(self):
        if min(self.I_x, self.I_y, self.I_z) <= 0:
            raise ValueError("inertias must be positive")
        if self.mass <= 0:
            raise ValueError("mass must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


QUADROTOR_X0 = (-2.0, -3.0, 1.0, 3.0, 1.0, 4.0, 2.0, 1.0)
QUADROTOR_STATES = ("phi", "theta", "p", "q", "r", "u", "v", "w")


def quadrotor(params: QuadrotorParams | None = None) -> tuple[VectorField, EncoderConfig]:
    """8-state quadrotor attitude and body-velocity model.

    State order is ``[phi, theta, p, q, r, u, v, w]``.  Angles are used as-is
    (no wrapping); ``tan(theta)`` raises at odd multiples of pi/2.
    """
    P = params or QuadrotorParams()
    phi, th, p, q, r, u, v, w = (Var(i) for i in range(8))
    c = Const
    comps = [
        p + r * (Cos(phi) * Tan(th)) + q * (Sin(phi) * Tan(th)),
        q * Cos(th) - r * Sin(phi),
        c((P.I_y - P.I_z) / P.I_x) * r * q + c((P.tau_x + P.tau_wx) / P.I_x),
        c((P.I_z - P.I_x) / P.I_y) * p * r + c((P.tau_y + P.tau_wy) / P.I_y),
        c((P.I_x - P.I_y) / P.I_z) * p * q + c((P.tau_z + P.tau_wz) / P.I_z),
        r * v - q * w - c(P.g) * Sin(th) + c(P.f_wx / P.mass),
        p * w - r * u + c(P.g) * Sin(phi) * Cos(th) + c(P.f_wy / P.mass),
        q * u - p * v + c(P.g) * Cos(th) * Cos(phi) + c((P.f_wz - P.f_t) / P.mass),
    ]
    config = EncoderConfig(
        lam=2.0, k_max=5, m_max=5, horizon=2.0, dt=0.01, x0=QUADROTOR_X0
    )
    return VectorField(8, comps), config


def tanh_system() -> tuple[VectorField, EncoderConfig, NoiseSpec, TriggerConfig]:
    """Scalar ``x' = -tanh(x)`` with additive noise of scale 0.1."""
    field = VectorField(1, [-Tanh(Var(0))])
    config = EncoderConfig(lam=0.01, k_max=3, m_max=3, horizon=10.0, dt=0.01, x0=(6.0,))
    return field, config, NoiseSpec(sigma=0.1, seed=0), TriggerConfig(delta_noise=0.075)


SYSTEMS = {
    "pendulum": pendulum,
    "quadrotor": quadrotor,
    "tanh": tanh_system,
}
