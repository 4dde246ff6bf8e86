"""Event-triggered remote state estimation.

A sender observes the true path ``x(t)``; a receiver predicts ``x_hat(t)``
with a model.  Two triggers decide what is sent:

* the noise trigger sends the current state (``n`` scalars) and resets the
  prediction whenever ``||x_hat - x|| >= delta_noise``;
* the dynamics trigger (local-model predictor only) sends the next local
  model when the true state enters a different region.

Three predictors are provided: :class:`SendOnDelta` (hold the last state),
:class:`Analytical` (the true field) and :class:`Smieds` (piecewise Taylor
models from an :class:`~mieds.encoder.Encoding`).
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .encoder import Encoding
from .expr import VectorField
from .integrate import NoiseSpec, Trajectory, euler_maruyama, rk4_step
from .taylor import LocalModel, weight_count


@dataclass(frozen=True)
class TriggerConfig:
    delta_noise: float
    check_every: int = 1

    def __post_init__(self):
        if not self.delta_noise > 0:
            raise ValueError("delta_noise must be > 0")
        if self.check_every < 1:
            raise ValueError("check_every must be >= 1")


# regions ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RegionSet:
    """Spatial regions induced by the time segments of an encoding.

    One-dimensional systems with monotone switch states use thresholds:
    ``labels[j]`` is the segment owning the j-th interval between sorted
    ``thresholds``.  Otherwise each segment is represented by its reference
    samples and membership goes to the nearest sample.
    """

    n_regions: int
    thresholds: tuple[float, ...] = ()
    labels: tuple[int, ...] = ()
    points: np.ndarray | None = field(default=None, repr=False)
    owners: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def single(cls) -> "RegionSet":
        return cls(n_regions=1, labels=(0,))

    @classmethod
    def from_thresholds(cls, start: float, switch_values: Sequence[float]) -> "RegionSet":
        """Regions for a 1-D path from ``start`` crossing ``switch_values`` in order."""
        s = [float(start)] + [float(v) for v in switch_values]
        m = len(s)
        if m == 1:
            return cls.single()
        inc = all(b > a for a, b in zip(s, s[1:]))
        dec = all(b < a for a, b in zip(s, s[1:]))
        if not (inc or dec):
            raise ValueError("switch states are not monotone")
        s = s[1:]
        if inc:
            return cls(n_regions=m, thresholds=tuple(s), labels=tuple(range(m)))
        return cls(n_regions=m, thresholds=tuple(reversed(s)), labels=tuple(reversed(range(m))))

    @classmethod
    def from_points(cls, points, owners) -> "RegionSet":
        points = np.atleast_2d(np.asarray(points, dtype=float))
        owners = np.asarray(owners, dtype=np.int64)
        return cls(n_regions=int(owners.max()) + 1, points=points, owners=owners)

    @classmethod
    def from_encoding(cls, encoding: Encoding, reference: Trajectory | None = None) -> "RegionSet":
        if encoding.m_star == 1:
            return cls.single()
        if encoding.dim == 1:
            try:
                return cls.from_thresholds(
                    float(encoding.segments[0].entry_state[0]),
                    [float(s[0]) for s in encoding.switch_states],
                )
            except ValueError:
                pass
        reference = reference if reference is not None else encoding.reference
        if reference is None:
            raise ValueError("nearest-point regions need the reference trajectory")
        pts, own = [], []
        for seg in encoding.segments:
            pts.append(reference.states[seg.start_step : seg.stop_step])
            own.extend([seg.index] * seg.n_steps)
        return cls.from_points(np.concatenate(pts), own)

    def region_of(self, x) -> int:
        return region_of(x, self)


def region_of(x, regions: RegionSet) -> int:
    """Segment index owning state ``x``; ties go to the lower index."""
    if regions.n_regions == 1:
        return 0
    if regions.points is None:
        v = float(np.ravel(x)[0])
        th = regions.thresholds
        j = bisect.bisect_left(th, v)
        if j < len(th) and th[j] == v:
            return min(regions.labels[j], regions.labels[j + 1])
        return regions.labels[j]
    d2 = np.sum((regions.points - np.ravel(x)) ** 2, axis=1)
    best = d2.min()
    return int(regions.owners[d2 == best].min())


# predictors ---------------------------------------------------------------------


class Predictor:
    """Receiver-side model.  ``rhs(region)`` returns ``f_hat`` or ``None`` to hold."""

    name = "predictor"
    uses_regions = False

    def rhs(self, region: int) -> Callable | None:
        raise NotImplementedError

    def region_of(self, x) -> int:
        return 0

    def model_payload(self, region: int) -> int:
        return 0


class SendOnDelta(Predictor):
    """Hold the last transmitted state."""

    name = "sod"

    def rhs(self, region):
        return None


class Analytical(Predictor):
    name = "analytical"

    def __init__(self, field: VectorField):
        self.field = field

    def rhs(self, region):
        return self.field


class Smieds(Predictor):
    """Piecewise local models switched by the region of the true state."""

    name = "smieds"
    uses_regions = True

    def __init__(self, encoding: Encoding, regions: RegionSet | None = None):
        self.encoding = encoding
        self.regions = regions if regions is not None else RegionSet.from_encoding(encoding)
        if self.regions.n_regions != encoding.m_star:
            raise ValueError("need exactly one region per segment")
        self.models: list[LocalModel] = encoding.models

    def rhs(self, region):
        return self.models[region]

    def region_of(self, x):
        return region_of(x, self.regions)

    def model_payload(self, region):
        return weight_count(self.models[region])


class FrozenModel(Predictor):
    """A single local model, never switched."""

    name = "frozen"

    def __init__(self, model: LocalModel):
        self.model = model

    def rhs(self, region):
        return self.model


# communication log --------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    time: float
    kind: str  # "state" or "model"
    payload: int


@dataclass
class CommLog:
    t0: float
    events: list[Event] = field(default_factory=list)

    @property
    def state_count(self) -> int:
        return sum(e.kind == "state" for e in self.events)

    @property
    def initial_model_count(self) -> int:
        return sum(e.kind == "model" and e.time == self.t0 for e in self.events)

    @property
    def model_count(self) -> int:
        """Model switches after the initial transmission."""
        return sum(e.kind == "model" for e in self.events) - self.initial_model_count

    @property
    def total_scalars(self) -> int:
        return sum(e.payload for e in self.events)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", "kind", "payload"])
            for e in self.events:
                w.writerow([f"{e.time:.17g}", e.kind, e.payload])


def simulate_etse(
    true_path: Trajectory, predictor: Predictor, trig: TriggerConfig
) -> tuple[Trajectory, CommLog]:
    """Run one predictor against a sampled true path.

    Per sample: advance the prediction one RK4 step, check the dynamics
    trigger on the true state, then check the noise trigger.  The receiver
    starts from the true initial state.
    """
    X = true_path.states
    dt, t0 = true_path.dt, true_path.t0
    n = true_path.dim
    log = CommLog(t0=t0)
    pred = np.empty_like(X)
    xh = X[0].copy()
    pred[0] = xh
    region = predictor.region_of(X[0])
    if predictor.uses_regions:
        log.events.append(Event(t0, "model", predictor.model_payload(region)))
    f = predictor.rhs(region)
    delta = trig.delta_noise
    for j in range(1, X.shape[0]):
        t = t0 + j * dt
        if f is not None:
            xh = rk4_step(f, xh, dt)
        x = X[j]
        if predictor.uses_regions:
            r = predictor.region_of(x)
            if r != region:
                region = r
                f = predictor.rhs(region)
                log.events.append(Event(t, "model", predictor.model_payload(region)))
        if j % trig.check_every == 0:
            err = xh - x
            if math.sqrt(float(err @ err)) >= delta:
                log.events.append(Event(t, "state", n))
                xh = x.copy()
        pred[j] = xh
    return Trajectory(t0, dt, pred), log


# Monte Carlo ----------------------------------------------------------------------


@dataclass(frozen=True)
class Summary:
    mean_state: float
    std_state: float
    mean_model: float
    std_model: float
    mean_scalars: float
    std_scalars: float
    runs: int


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


@dataclass
class RunRecord:
    index: int
    seed: int
    true_path: Trajectory
    results: dict[str, tuple[Trajectory, CommLog]]


@dataclass
class MonteCarloResult:
    summaries: dict[str, Summary]
    counts: dict[str, list[tuple[int, int, int]]]
    runs: list[RunRecord] = field(default_factory=list)

    def __getitem__(self, name: str) -> Summary:
        return self.summaries[name]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(
                ["predictor", "mean_state_events", "std_state_events", "mean_model_events", "mean_total_scalars"]
            )
            for name, s in self.summaries.items():
                w.writerow(
                    [name, f"{s.mean_state:.17g}", f"{s.std_state:.17g}", f"{s.mean_model:.17g}", f"{s.mean_scalars:.17g}"]
                )


def monte_carlo(
    field: VectorField,
    noise: NoiseSpec,
    runs: int,
    predictors: Sequence[Predictor],
    trig: TriggerConfig,
    x0,
    horizon: float,
    dt: float,
    t0: float = 0.0,
    keep_runs: bool = False,
) -> MonteCarloResult:
    """Paired Monte Carlo: run ``r`` samples one path with seed ``noise.seed + r``
    and feeds it to every predictor."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    names = [p.name for p in predictors]
    if len(set(names)) != len(names):
        raise ValueError("predictor names must be unique")
    counts: dict[str, list[tuple[int, int, int]]] = {nm: [] for nm in names}
    records = []
    for r in range(runs):
        seed = noise.seed + r
        path = euler_maruyama(field, x0, t0, horizon, dt, NoiseSpec(noise.sigma, seed))
        res = {}
        for p in predictors:
            pred, log = simulate_etse(path, p, trig)
            counts[p.name].append((log.state_count, log.model_count, log.total_scalars))
            if keep_runs:
                res[p.name] = (pred, log)
        if keep_runs:
            records.append(RunRecord(r, seed, path, res))
    summaries = {}
    for nm, rows in counts.items():
        ms, ss = _mean_std([c[0] for c in rows])
        mm, sm = _mean_std([c[1] for c in rows])
        mt, st = _mean_std([c[2] for c in rows])
        summaries[nm] = Summary(ms, ss, mm, sm, mt, st, runs)
    return MonteCarloResult(summaries, counts, records)
