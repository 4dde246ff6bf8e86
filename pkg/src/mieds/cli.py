"""Command-line front end.

    mieds encode --system pendulum --out runs/pendulum
    mieds etse   --system tanh --runs 100 --seed 42 --out runs/tanh
    mieds sweep  --system tanh --sweep lambda 0.001,0.01,0.1,1 --out runs/sweep
    mieds decode --encoding runs/pendulum/encoding.json --out runs/pendulum

A JSON config file (``--config``) may set any :class:`RunConfig` key; flags
override file values.  Unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass
from dataclasses import field as dc_field
from pathlib import Path
from typing import Any

from . import systems
from .encoder import EncoderConfig, EncodingError, decode, stochastic_encode, encode
from .etse import Analytical, SendOnDelta, Smieds, TriggerConfig, monte_carlo
from .expr import VectorField
from .integrate import NoiseSpec, write_trajectory_csv
from .parse import parse_field
from .serialize import dumps, encoding_dumps, encoding_loads, fmt, write_cost_curve_csv

COMMANDS = ("encode", "decode", "etse", "sweep")
SWEEPABLE = {
    "lambda": "encode",
    "m_max": "encode",
    "k_max": "encode",
    "delta_noise": "etse",
    "sigma": "etse",
}
PREDICTORS = ("sod", "analytical", "smieds")

# defaults for an inline field with no named system
GENERIC = dict(lam=0.01, k_min=1, k_max=3, m_max=3, t0=0.0, horizon=1.0, dt=0.01, sigma=0.0, delta_noise=0.1)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a command needs.  ``None`` means "use the system default"."""

    command: str | None = None
    system: str | None = None
    field: str | None = None
    lam: float | None = None
    k_min: int | None = None
    k_max: int | None = None
    m_max: int | None = None
    t0: float | None = None
    horizon: float | None = None
    dt: float | None = None
    x0: list[float] | None = None
    sigma: float | None = None
    seed: int = 0
    delta_noise: float | None = None
    check_every: int = 1
    runs: int = 1
    out: str = "."
    predictors: list[str] = dc_field(default_factory=lambda: list(PREDICTORS))
    quadrotor: dict[str, float] = dc_field(default_factory=dict)
    encoding: str | None = None
    sweep_param: str | None = None
    sweep_values: list[float] | None = None

    # "lambda" on disk, ``lam`` in Python
    _ALIASES = {"lambda": "lam"}

    @classmethod
    def keys(cls) -> list[str]:
        inv = {v: k for k, v in cls._ALIASES.items()}
        return [inv.get(f.name, f.name) for f in dataclasses.fields(cls)]

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunConfig":
        unknown = sorted(set(d) - set(cls.keys()))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        kw = {cls._ALIASES.get(k, k): v for k, v in d.items()}
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        inv = {v: k for k, v in self._ALIASES.items()}
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is not None:
                out[inv.get(f.name, f.name)] = v
        return out

    def dumps(self) -> str:
        return dumps(self.to_dict()) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    def validate(self) -> None:
        if self.command is not None and self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.system is not None and self.system not in systems.SYSTEMS:
            raise ConfigError(f"unknown system {self.system!r}; choose from {sorted(systems.SYSTEMS)}")
        if self.system is not None and self.field is not None:
            raise ConfigError("give either 'system' or 'field', not both")
        if self.quadrotor and self.system != "quadrotor":
            raise ConfigError("'quadrotor' parameters require system 'quadrotor'")
        bad = set(self.quadrotor) - {f.name for f in dataclasses.fields(systems.QuadrotorParams)}
        if bad:
            raise ConfigError(f"unknown quadrotor parameters: {', '.join(sorted(bad))}")
        bad = set(self.predictors) - set(PREDICTORS)
        if bad or not self.predictors:
            raise ConfigError(f"predictors must be a non-empty subset of {PREDICTORS}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.sweep_param is not None and self.sweep_param not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {self.sweep_param!r}; choose from {sorted(SWEEPABLE)}")

    # resolution against system defaults -------------------------------------

    def build(self):
        """Return ``(field, EncoderConfig, NoiseSpec, TriggerConfig)``."""
        self.validate()
        noise = trig = None
        if self.system == "tanh":
            fld, enc, noise, trig = systems.tanh_system()
        elif self.system == "quadrotor":
            fld, enc = systems.quadrotor(systems.QuadrotorParams(**self.quadrotor))
        elif self.system == "pendulum":
            fld, enc = systems.pendulum()
        elif self.field is not None:
            fld = parse_field(self.field)
            if self.x0 is None:
                raise ConfigError("an inline field needs 'x0'")
            enc = None
        else:
            raise ConfigError("no system or field given")

        def pick(name, default):
            v = getattr(self, name)
            return default if v is None else v

        base = GENERIC if enc is None else dataclasses.asdict(enc)
        econf = EncoderConfig(
            lam=float(pick("lam", base["lam"])),
            k_min=int(pick("k_min", base["k_min"])),
            k_max=int(pick("k_max", base["k_max"])),
            m_max=int(pick("m_max", base["m_max"])),
            t0=float(pick("t0", base["t0"])),
            horizon=float(pick("horizon", base["horizon"])),
            dt=float(pick("dt", base["dt"])),
            x0=tuple(pick("x0", base.get("x0"))),
        )
        sigma = pick("sigma", noise.sigma if noise else GENERIC["sigma"])
        delta = pick("delta_noise", trig.delta_noise if trig else GENERIC["delta_noise"])
        return (
            fld,
            econf,
            NoiseSpec(float(sigma), int(self.seed)),
            TriggerConfig(float(delta), int(self.check_every)),
        )


# commands -----------------------------------------------------------------------


def cmd_encode(cfg: RunConfig) -> dict[str, Path]:
    fld, econf, _, _ = cfg.build()
    enc = encode(fld, econf)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "encoding": out / "encoding.json",
        "cost_curve": out / "cost_curve.csv",
        "reference": out / "reference.csv",
        "decoded": out / "decoded.csv",
    }
    files["encoding"].write_text(encoding_dumps(enc))
    write_cost_curve_csv(files["cost_curve"], enc)
    write_trajectory_csv(files["reference"], enc.reference)
    write_trajectory_csv(files["decoded"], decode(enc))
    return files


def cmd_decode(cfg: RunConfig) -> dict[str, Path]:
    if cfg.encoding is None:
        raise ConfigError("decode needs an encoding file ('encoding' / --encoding)")
    enc = encoding_loads(Path(cfg.encoding).read_text())
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "decoded.csv"
    write_trajectory_csv(path, decode(enc))
    return {"decoded": path}


def _predictors(cfg: RunConfig, fld: VectorField, econf: EncoderConfig):
    preds = []
    for name in cfg.predictors:
        if name == "sod":
            preds.append(SendOnDelta())
        elif name == "analytical":
            preds.append(Analytical(fld))
        else:
            preds.append(Smieds(stochastic_encode(fld, econf)))
    return preds


def _run_etse(cfg: RunConfig, keep_runs: bool):
    fld, econf, noise, trig = cfg.build()
    if noise.sigma == 0 and cfg.runs > 1:
        raise ConfigError("noiseless ETSE runs are identical; use runs=1 or sigma > 0")
    preds = _predictors(cfg, fld, econf)
    return monte_carlo(
        fld, noise, cfg.runs, preds, trig, econf.x0, econf.horizon, econf.dt,
        t0=econf.t0, keep_runs=keep_runs,
    )


def cmd_etse(cfg: RunConfig) -> dict[str, Path]:
    res = _run_etse(cfg, keep_runs=True)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {"aggregate": out / "aggregate.csv"}
    res.to_csv(files["aggregate"])
    for rec in res.runs:
        ev = out / f"run_{rec.index}_events.csv"
        with open(ev, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["predictor", "time", "kind", "payload"])
            for name, (_, log) in rec.results.items():
                for e in log.events:
                    w.writerow([name, fmt(e.time), e.kind, e.payload])
        paths = out / f"run_{rec.index}_paths.csv"
        n = rec.true_path.dim
        with open(paths, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            head = ["t"] + [f"x{i}" for i in range(n)]
            for name in rec.results:
                head += [f"{name}_x{i}" for i in range(n)]
            w.writerow(head)
            cols = [rec.true_path.states] + [p.states for p, _ in rec.results.values()]
            for j, t in enumerate(rec.true_path.times):
                row = [fmt(t)]
                for c in cols:
                    row += [fmt(v) for v in c[j]]
                w.writerow(row)
        files[f"run_{rec.index}_events"] = ev
        files[f"run_{rec.index}_paths"] = paths
    return files


def cmd_sweep(cfg: RunConfig, parameter: str | None = None, values=None) -> dict[str, Path]:
    parameter = parameter or cfg.sweep_param
    values = values if values is not None else cfg.sweep_values
    if parameter not in SWEEPABLE:
        raise ConfigError(f"cannot sweep {parameter!r}; choose from {sorted(SWEEPABLE)}")
    if not values:
        raise ConfigError("sweep needs at least one value")
    attr = RunConfig._ALIASES.get(parameter, parameter)
    kind = SWEEPABLE[parameter]
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    rows = []
    for v in values:
        v = int(v) if attr in ("m_max", "k_max") else float(v)
        sub = dataclasses.replace(cfg, **{attr: v})
        if kind == "encode":
            fld, econf, _, _ = sub.build()
            enc = encode(fld, econf)
            rows.append([_cell(v), enc.m_star, ";".join(map(str, enc.degrees)), fmt(enc.total_cost)])
        else:
            res = _run_etse(sub, keep_runs=False)
            row = [_cell(v)]
            for s in res.summaries.values():
                row += [fmt(s.mean_state), fmt(s.mean_model), fmt(s.mean_scalars)]
            rows.append(row)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if kind == "encode":
            w.writerow([parameter, "m_star", "degrees", "total_cost"])
        else:
            head = [parameter]
            for name in cfg.predictors:
                head += [f"{name}_mean_state_events", f"{name}_mean_model_events", f"{name}_mean_total_scalars"]
            w.writerow(head)
        w.writerows(rows)
    return {"sweep": path}


def _cell(v):
    return str(v) if isinstance(v, int) else fmt(v)


# entry point ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors (exit 1); exit 2 is reserved for I/O
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mieds", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--system", choices=sorted(systems.SYSTEMS))
    p.add_argument("--field", help="inline field text; components separated by ';' or newlines")
    p.add_argument("--x0", help="comma-separated initial state")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--runs", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--delta", dest="delta_noise", type=float)
    p.add_argument("--encoding", help="encoding.json to decode")
    p.add_argument("--sweep", nargs=2, metavar=("NAME", "VALUES"))
    return p


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def config_from_args(args: argparse.Namespace) -> RunConfig:
    d: dict[str, Any] = {}
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config must be a JSON object")
        d.update(loaded)
    d["command"] = args.command
    if args.system:
        d["system"] = args.system
        d.pop("field", None)
    if args.field:
        d["field"] = args.field.replace(";", "\n")
        d.pop("system", None)
    if args.x0:
        d["x0"] = _floats(args.x0)
    for key, val in (
        ("seed", args.seed),
        ("out", args.out),
        ("runs", args.runs),
        ("lambda", args.lam),
        ("delta_noise", args.delta_noise),
        ("encoding", args.encoding),
    ):
        if val is not None:
            d[key] = val
    if args.sweep:
        d["sweep_param"] = args.sweep[0]
        d["sweep_values"] = _floats(args.sweep[1])
    return RunConfig.from_dict(d)


RUNNERS = {"encode": cmd_encode, "decode": cmd_decode, "etse": cmd_etse, "sweep": cmd_sweep}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        files = RUNNERS[cfg.command](cfg)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, EncodingError, TypeError, KeyError) as exc:
        where = type(exc).__module__
        print(f"error [{where}]: {exc}", file=sys.stderr)
        return 1
    for name, path in files.items():
        if not name.startswith("run_"):
            print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
