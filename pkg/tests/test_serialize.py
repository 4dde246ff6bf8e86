import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mieds.encoder import decode, encode
from mieds.serialize import (
    dumps,
    encoding_dumps,
    encoding_loads,
    fmt,
    model_dumps,
    model_loads,
    write_cost_curve_csv,
)
from mieds.systems import pendulum, quadrotor, tanh_system


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(2.0) == "2"
    assert fmt(math.inf) == "Infinity"
    assert fmt(-math.inf) == "-Infinity"
    assert fmt(math.nan) == "NaN"


@settings(max_examples=200)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips_every_float(v):
    assert float(fmt(v)) == v


def test_dumps_layout():
    text = dumps({"a": [1, 2.5], "b": {"c": [[0.5], [1.0]]}})
    assert json.loads(text) == {"a": [1, 2.5], "b": {"c": [[0.5], [1.0]]}}
    assert '"a": [1, 2.5]' in text


@pytest.mark.parametrize("k", [0, 1, 3])
def test_model_round_trip_is_byte_exact(k):
    field, cfg = pendulum()
    model = field.jet(np.array(cfg.x0), k)
    text = model_dumps(model)
    back = model_loads(text)
    assert back == model
    assert model_dumps(back) == text
    d = json.loads(text)
    assert (d["dim"], d["degree"], d["center"]) == (2, k, list(cfg.x0))


def test_quadrotor_model_round_trip():
    field, cfg = quadrotor()
    model = field.jet(np.array(cfg.x0), 3)
    assert model_dumps(model_loads(model_dumps(model))) == model_dumps(model)


def test_model_shape_checked():
    field, cfg = pendulum()
    d = json.loads(model_dumps(field.jet(np.array(cfg.x0), 2)))
    d["degree"] = 3
    with pytest.raises(ValueError):
        model_loads(json.dumps(d))


def test_encoding_round_trip_and_decode():
    field, cfg, _, _ = tanh_system()
    enc = encode(field, cfg)
    text = encoding_dumps(enc)
    back = encoding_loads(text)
    assert encoding_dumps(back) == text
    assert back.same_as(enc)
    assert decode(back) == decode(enc)


def test_cost_curve_csv(tmp_path):
    field, cfg, _, _ = tanh_system()
    enc = encode(field, cfg)
    p = tmp_path / "c.csv"
    write_cost_curve_csv(p, enc)
    lines = p.read_text().splitlines()
    assert lines[0] == "m,L_total"
    assert [int(ln.split(",")[0]) for ln in lines[1:]] == [1, 2, 3]
    assert [float(ln.split(",")[1]) for ln in lines[1:]] == [c for _, c in enc.cost_curve]
