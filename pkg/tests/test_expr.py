import math

import numpy as np
import pytest

from oracles import fd_jet_mismatches, pendulum_rhs, quadrotor_rhs, tanh_rhs
from mieds.expr import (
    Const,
    Cos,
    Div,
    DomainError,
    Mul,
    Pow,
    Sin,
    Tan,
    Tanh,
    Var,
    VectorField,
    compile_field,
    eval_expr,
    eval_field,
    eval_jet,
)
from mieds.systems import pendulum, quadrotor, tanh_system


def test_pendulum_eval():
    field, _ = pendulum()
    np.testing.assert_allclose(eval_field(field, [math.pi / 4, 0]), [0, -9.81 * math.sin(math.pi / 4)])
    assert eval_field(field, [math.pi / 4, 0])[1] == pytest.approx(-6.9367, abs=1e-4)


def test_tanh_equilibrium():
    field = tanh_system()[0]
    assert eval_field(field, [0.0]).tolist() == [0.0]


def test_quadrotor_against_hand_evaluation():
    field, cfg = quadrotor()
    x = np.array(cfg.x0)
    np.testing.assert_allclose(eval_field(field, x), quadrotor_rhs(x), rtol=1e-14, atol=1e-14)


def test_compiled_matches_interpreted():
    rng = np.random.default_rng(3)
    for field in (pendulum()[0], quadrotor()[0], tanh_system()[0]):
        fn = compile_field(field)
        for _ in range(20):
            x = rng.uniform(-1.2, 1.2, field.dim)
            np.testing.assert_array_equal(fn(x), eval_field(field, x))
            np.testing.assert_array_equal(field(x), eval_field(field, x))


def test_shared_subgraph_evaluated_once():
    s = Sin(Var(0))
    e = Mul(s, s)
    assert eval_expr(e, [0.3]) == math.sin(0.3) ** 2


class TestDomain:
    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            eval_expr(Div(Const(1.0), Var(0)), [0.0])
        with pytest.raises(DomainError):
            eval_jet(Div(Const(1.0), Var(0)), [0.0], 2)

    def test_tan_at_half_pi(self):
        with pytest.raises(DomainError):
            eval_expr(Tan(Var(0)), [math.pi / 2])
        with pytest.raises(DomainError):
            eval_jet(Tan(Var(0)), [-3 * math.pi / 2], 3)
        with pytest.raises(DomainError):
            compile_field(VectorField(1, [Tan(Var(0))]))([math.pi / 2])

    def test_tan_near_but_not_at_pole_is_fine(self):
        assert math.isfinite(eval_expr(Tan(Var(0)), [math.pi / 2 - 1e-6]))

    def test_bad_nodes(self):
        with pytest.raises(ValueError):
            Pow(Var(0), -1)
        with pytest.raises(ValueError):
            Pow(Var(0), 1.5)
        with pytest.raises(ValueError):
            VectorField(1, [Var(1)])
        with pytest.raises(ValueError):
            VectorField(2, [Var(0)])


class TestJetExamples:
    def test_sin_maclaurin(self):
        assert eval_jet(Sin(Var(0)), [0.0], 3).terms == {(1,): 1.0, (3,): -1 / 6}

    def test_tan_maclaurin(self):
        assert eval_jet(Tan(Var(0)), [0.0], 3).terms == pytest.approx({(1,): 1.0, (3,): 1 / 3}, abs=1e-15)

    def test_product(self):
        a, b = 1.7, -0.4
        j = eval_jet(Mul(Var(0), Var(1)), [a, b], 2)
        assert j.terms == {(0, 0): a * b, (1, 0): b, (0, 1): a, (1, 1): 1.0}

    def test_sin_at_quarter_pi_against_finite_differences(self):
        c = math.pi / 4
        h = 1e-5
        f = math.sin
        d1 = (f(c + h) - f(c - h)) / (2 * h)
        d2 = (f(c + h) - 2 * f(c) + f(c - h)) / h**2
        coeffs = eval_jet(Sin(Var(0)), [c], 2).coeffs
        assert coeffs[0] == pytest.approx(math.sin(c), rel=1e-15)
        assert coeffs[1] == pytest.approx(d1, rel=1e-8)
        assert coeffs[2] == pytest.approx(d2 / 2, rel=1e-4)
        np.testing.assert_allclose(coeffs, [math.sin(c), math.cos(c), -math.sin(c) / 2], rtol=1e-14)

    def test_pow_and_div(self):
        # (1 + d)^3 / (2 + d) about d = 0 at degree 2: 1/2 + 5/4 d + 7/8 d^2
        x = Var(0)
        j = eval_jet(Div(Pow(x, 3), x + 1.0), [1.0], 2)
        np.testing.assert_allclose(j.coeffs, [0.5, 1.25, 0.875], rtol=1e-15)
        assert eval_jet(Pow(x, 0), [3.0], 2).terms == {(0,): 1.0}


MACLAURIN = {
    Sin: [0, 1, 0, -1 / 6, 0, 1 / 120, 0, -1 / 5040],
    Cos: [1, 0, -1 / 2, 0, 1 / 24, 0, -1 / 720, 0],
    Tan: [0, 1, 0, 1 / 3, 0, 2 / 15, 0, 17 / 315],
    Tanh: [0, 1, 0, -1 / 3, 0, 2 / 15, 0, -17 / 315],
}


@pytest.mark.parametrize("node", list(MACLAURIN), ids=lambda n: n.__name__)
def test_maclaurin_coefficients_exact(node):
    got = eval_jet(node(Var(0)), [0.0], 7).coeffs
    np.testing.assert_allclose(got, MACLAURIN[node], rtol=0, atol=1e-12)


BENCHMARKS = {
    "pendulum": (pendulum()[0], pendulum_rhs, 2.0),
    "tanh": (tanh_system()[0], tanh_rhs, 4.0),
    "quadrotor": (quadrotor()[0], quadrotor_rhs, 1.2),
}


def random_centers(name, n, count=20, seed=11):
    rng = np.random.default_rng(seed)
    out = rng.uniform(-BENCHMARKS[name][2], BENCHMARKS[name][2], size=(count, n))
    if name == "quadrotor":
        out[:, 2:] = rng.uniform(-3, 3, size=(count, 6))
    return out


@pytest.mark.parametrize("name", ["pendulum", "tanh"])
def test_jets_match_finite_differences(name):
    field, closed, _ = BENCHMARKS[name]
    for c in random_centers(name, field.dim):
        assert fd_jet_mismatches(field, closed, c) == []


def test_quadrotor_jets_match_finite_differences():
    field, closed, _ = BENCHMARKS["quadrotor"]
    for c in random_centers("quadrotor", 8):
        assert fd_jet_mismatches(field, closed, c) == []


@pytest.mark.parametrize("name", list(BENCHMARKS))
def test_jet_invariants(name):
    field = BENCHMARKS[name][0]
    k = 5 if field.dim < 8 else 4
    for c in random_centers(name, field.dim, count=5, seed=5):
        jet = field.jet(c, k)
        # constant term is the point value
        np.testing.assert_allclose(jet.coefficient_matrix[:, 0], eval_field(field, c), rtol=1e-15, atol=1e-15)
        # lower-degree jets are exact truncations
        for j in range(k + 1):
            assert field.jet(c, j) == jet.truncate(j)
        # no stored coefficient above the truncation degree
        assert all(sum(e) <= k for comp in jet.components for e in comp.terms)
