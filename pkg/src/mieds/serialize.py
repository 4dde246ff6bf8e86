"""Text formats for models, encodings and tables.

Floats are written with 17 significant digits so that files round-trip
exactly and repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .encoder import Encoding, Segment
from .taylor import LocalModel, TruncatedPoly, monomial_count


def fmt(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    if v == 0.0:
        return "0"  # "-0" would read back as the integer 0
    return format(v, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed-precision floats.  Lists of scalars stay on one line."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    return json.dumps(obj)


def model_to_dict(model: LocalModel) -> dict:
    return {
        "dim": model.dim,
        "degree": model.degree,
        "center": [float(v) for v in model.center],
        "coefficients": [[float(v) for v in c.coeffs] for c in model.components],
    }


def model_from_dict(d: dict) -> LocalModel:
    n, k = int(d["dim"]), int(d["degree"])
    rows = d["coefficients"]
    if len(rows) != n or any(len(r) != monomial_count(n, k) for r in rows):
        raise ValueError("coefficient table does not match dim/degree")
    comps = tuple(TruncatedPoly(n, k, np.array(r, dtype=float)) for r in rows)
    return LocalModel(np.array(d["center"], dtype=float), k, comps)


def model_dumps(model: LocalModel) -> str:
    return dumps(model_to_dict(model)) + "\n"


def model_loads(text: str) -> LocalModel:
    return model_from_dict(json.loads(text))


def encoding_to_dict(enc: Encoding) -> dict:
    return {
        "m_star": enc.m_star,
        "lambda": enc.lam,
        "t0": enc.t0,
        "dt": enc.dt,
        "total_cost": enc.total_cost,
        "cost_curve": [[m, c] for m, c in enc.cost_curve],
        "switch_states": [[float(v) for v in s] for s in enc.switch_states],
        "segments": [
            {
                "index": s.index,
                "t_start": s.t_start,
                "t_stop": s.t_stop,
                "start_step": s.start_step,
                "stop_step": s.stop_step,
                "local_cost": s.local_cost,
                **{k: v for k, v in model_to_dict(s.model).items()},
            }
            for s in enc.segments
        ],
    }


def encoding_from_dict(d: dict) -> Encoding:
    segs = []
    for s in d["segments"]:
        model = model_from_dict(s)
        segs.append(
            Segment(
                index=int(s["index"]),
                t_start=float(s["t_start"]),
                t_stop=float(s["t_stop"]),
                model=model,
                k_star=model.degree,
                local_cost=float(s["local_cost"]),
                entry_state=model.center.copy(),
                start_step=int(s["start_step"]),
                stop_step=int(s["stop_step"]),
            )
        )
    return Encoding(
        m_star=int(d["m_star"]),
        segments=tuple(segs),
        switch_states=tuple(np.array(v, dtype=float) for v in d["switch_states"]),
        total_cost=float(d["total_cost"]),
        cost_curve=tuple((int(m), float(c)) for m, c in d["cost_curve"]),
        t0=float(d["t0"]),
        dt=float(d["dt"]),
        lam=float(d["lambda"]),
    )


def encoding_dumps(enc: Encoding) -> str:
    return dumps(encoding_to_dict(enc)) + "\n"


def encoding_loads(text: str) -> Encoding:
    return encoding_from_dict(json.loads(text))


def write_cost_curve_csv(path, enc: Encoding) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "L_total"])
        for m, c in enc.cost_curve:
            w.writerow([m, fmt(c)])
