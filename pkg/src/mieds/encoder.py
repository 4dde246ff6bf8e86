"""MDL encoder: piecewise local Taylor models of a known vector field.

The horizon is cut into ``m`` equal time segments.  On each segment the field
is expanded about the segment's entry state, and the expansion order ``k`` is
chosen to minimise

    lam * k + integral over the segment of ||x(t) - x_hat(t)||_2 dt

where ``x_hat`` integrates the local model from the same entry state.  The
number of segments is then chosen to minimise the summed local costs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .expr import DomainError, VectorField
from .integrate import (
    GRID_TOL,
    IntegrationError,
    Trajectory,
    deviation,
    rk4_solve,
    rk4_steps,
    step_count,
)
from .taylor import LocalModel

log = logging.getLogger(__name__)


class EncodingError(RuntimeError):
    pass


@dataclass(frozen=True)
class EncoderConfig:
    """Search settings.

    ``lam`` weighs model order against trajectory deviation.  Orders
    ``k_min..k_max`` and segment counts ``1..m_max`` are searched.
    """

    lam: float
    k_max: int
    m_max: int
    horizon: float
    dt: float
    x0: tuple[float, ...]
    t0: float = 0.0
    k_min: int = 1

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in np.ravel(self.x0)))
        if not self.lam > 0:
            raise ValueError("lam must be > 0")
        if self.k_max < 0 or not 0 <= self.k_min <= self.k_max:
            raise ValueError("need 0 <= k_min <= k_max")
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")
        step_count(self.horizon, self.dt)

    @property
    def n_steps(self) -> int:
        return step_count(self.horizon, self.dt)


@dataclass(frozen=True, eq=False)
class Segment:
    index: int
    t_start: float
    t_stop: float
    model: LocalModel
    k_star: int
    local_cost: float
    entry_state: np.ndarray
    start_step: int
    stop_step: int

    @property
    def n_steps(self) -> int:
        return self.stop_step - self.start_step


@dataclass(frozen=True, eq=False)
class Encoding:
    m_star: int
    segments: tuple[Segment, ...]
    switch_states: tuple[np.ndarray, ...]
    total_cost: float
    cost_curve: tuple[tuple[int, float], ...]
    t0: float
    dt: float
    lam: float
    reference: Trajectory | None = field(default=None, repr=False)

    @property
    def degrees(self) -> list[int]:
        return [s.k_star for s in self.segments]

    @property
    def switch_times(self) -> list[float]:
        return [s.t_start for s in self.segments[1:]]

    @property
    def models(self) -> list[LocalModel]:
        return [s.model for s in self.segments]

    @property
    def dim(self) -> int:
        return self.segments[0].model.dim

    def same_as(self, other: "Encoding") -> bool:
        """Structural equality ignoring the cached reference trajectory."""
        if self.m_star != other.m_star or self.cost_curve != other.cost_curve:
            return False
        return all(
            a.model == b.model
            and a.k_star == b.k_star
            and a.local_cost == b.local_cost
            and a.start_step == b.start_step
            and a.stop_step == b.stop_step
            for a, b in zip(self.segments, other.segments)
        )


def segment_bounds(n_steps: int, m: int) -> list[int]:
    """Grid indices of the ``m + 1`` segment boundaries (rounded to nearest)."""
    return [int(math.floor(i * n_steps / m + 0.5)) for i in range(m + 1)]


def reconstruct(model: LocalModel, x_start, t_start: float, n_steps: int, dt: float) -> Trajectory:
    return rk4_steps(model, x_start, t_start, n_steps, dt)


def local_cost(reference: Trajectory, model: LocalModel, lam: float) -> float:
    """``lam * k + deviation`` of the model started from ``reference``'s first state.

    Returns ``inf`` if the reconstruction fails (singular or divergent model).
    """
    try:
        rec = reconstruct(model, reference.states[0], reference.t0, reference.n_steps, reference.dt)
    except (IntegrationError, DomainError):
        return math.inf
    return lam * model.degree + deviation(reference, rec)


def best_local_order(
    reference: Trajectory,
    center,
    field: VectorField,
    lam: float,
    k_max: int,
    k_min: int = 1,
) -> tuple[int, LocalModel, float]:
    """Cheapest expansion order on one segment; ties go to the smaller order."""
    try:
        full = field.jet(center, k_max)
    except DomainError as exc:
        raise EncodingError(
            f"field is singular at the center of segment starting t={reference.t0:.6g}"
        ) from exc
    best = None
    for k in range(k_min, k_max + 1):
        model = full.truncate(k)
        cost = local_cost(reference, model, lam)
        if best is None or cost < best[2]:
            best = (k, model, cost)
    if best is None or not math.isfinite(best[2]):
        raise EncodingError(
            f"every order is singular on the segment starting t={reference.t0:.6g}"
        )
    return best


def _partition(field, ref: Trajectory, m: int, config: EncoderConfig) -> list[Segment]:
    N = ref.n_steps
    bounds = segment_bounds(N, m)
    if N % m:
        log.warning("T/m is not a multiple of dt for m=%d; boundaries snapped to grid", m)
    segs = []
    for i in range(m):
        a, b = bounds[i], bounds[i + 1]
        if b <= a:
            raise EncodingError(f"m={m} leaves an empty segment on a {N}-step grid")
        piece = ref.slice(a, b)
        entry = ref.states[a]
        k, model, cost = best_local_order(piece, entry, field, config.lam, config.k_max, config.k_min)
        segs.append(
            Segment(
                index=i,
                t_start=ref.t0 + a * ref.dt,
                t_stop=ref.t0 + b * ref.dt,
                model=model,
                k_star=k,
                local_cost=cost,
                entry_state=entry.copy(),
                start_step=a,
                stop_step=b,
            )
        )
    return segs


def encode(field: VectorField, config: EncoderConfig) -> Encoding:
    """Search ``m = 1..m_max`` and return the cheapest piecewise encoding."""
    if len(config.x0) != field.dim:
        raise ValueError(f"x0 has {len(config.x0)} entries, field has dim {field.dim}")
    ref = rk4_solve(field, config.x0, config.t0, config.horizon, config.dt)
    curve = []
    best = None
    for m in range(1, config.m_max + 1):
        if m > ref.n_steps:
            log.warning("m=%d exceeds the number of grid steps; skipped", m)
            continue
        segs = _partition(field, ref, m, config)
        total = math.fsum(s.local_cost for s in segs)
        curve.append((m, total))
        if best is None or total < best[1]:
            best = (m, total, segs)
    m_star, total, segs = best
    switches = tuple(ref.states[s.start_step].copy() for s in segs[1:])
    return Encoding(
        m_star=m_star,
        segments=tuple(segs),
        switch_states=switches,
        total_cost=total,
        cost_curve=tuple(curve),
        t0=config.t0,
        dt=config.dt,
        lam=config.lam,
        reference=ref,
    )


def stochastic_encode(field: VectorField, config: EncoderConfig) -> Encoding:
    """Encoder for ``dx = f(x) dt + noise``.

    Partitioning is driven by the noiseless dynamics only, so this is the
    deterministic encoder applied to ``f``.
    """
    return encode(field, config)


def decode(encoding: Encoding, x0=None, dt: float | None = None) -> Trajectory:
    """Rebuild ``x_hat(t)`` from the models.

    Each segment is integrated from its transmitted center; ``x0`` must match
    the first center.  The last sample of a segment is replaced by the next
    segment's center.
    """
    dt = encoding.dt if dt is None else dt
    if abs(dt - encoding.dt) > GRID_TOL * encoding.dt:
        raise ValueError("decode must use the encoding's dt")
    first = encoding.segments[0].model.center
    if x0 is not None and not np.allclose(np.ravel(x0), first, rtol=0, atol=1e-12):
        raise ValueError("x0 differs from the first segment's center")
    pieces = []
    for seg in encoding.segments:
        rec = reconstruct(seg.model, seg.model.center, seg.t_start, seg.n_steps, dt)
        pieces.append(rec.states[:-1])
    pieces.append(rec.states[-1:])
    return Trajectory(encoding.t0, dt, np.concatenate(pieces))


def segment_deviations(encoding: Encoding, reference: Trajectory) -> list[float]:
    """Deviation term of each segment against ``reference``."""
    out = []
    for seg in encoding.segments:
        rec = reconstruct(seg.model, seg.model.center, seg.t_start, seg.n_steps, encoding.dt)
        out.append(deviation(reference.slice(seg.start_step, seg.stop_step), rec))
    return out
