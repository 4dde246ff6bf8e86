"""Minimum-description-length encoding of dynamical systems with local
Taylor models, and event-triggered state estimation built on top of it."""

from .encoder import (
    EncoderConfig,
    Encoding,
    EncodingError,
    Segment,
    best_local_order,
    decode,
    encode,
    local_cost,
    stochastic_encode,
)
from .etse import (
    Analytical,
    CommLog,
    RegionSet,
    SendOnDelta,
    Smieds,
    TriggerConfig,
    monte_carlo,
    region_of,
    simulate_etse,
)
from .expr import (
    Add,
    Const,
    Cos,
    Div,
    DomainError,
    Expr,
    Mul,
    Neg,
    Pow,
    Sin,
    Sub,
    Tan,
    Tanh,
    Var,
    VectorField,
    eval_expr,
    eval_field,
    eval_jet,
)
from .integrate import NoiseSpec, Trajectory, deviation, euler_maruyama, rk4_solve
from .parse import ParseError, parse_field
from .systems import QuadrotorParams, pendulum, quadrotor, tanh_system
from .taylor import (
    LocalModel,
    TruncatedPoly,
    coefficient_count,
    compose_univariate,
    model_eval,
    poly_add,
    poly_mul,
    weight_count,
)

__version__ = "0.1.0"
