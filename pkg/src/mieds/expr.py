"""Expression graphs for vector fields.

A vector field is a list of scalar expressions over state variables
``x0 .. x{n-1}``.  The same graph supports point evaluation and exact
truncated Taylor expansion (jets) about any non-singular point.

Nodes overload the arithmetic operators, so fields can be written directly::

    x0, x1 = Var(0), Var(1)
    pendulum = VectorField(2, [x1, -x1 - 9.81 * Sin(x0)])
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .taylor import TruncatedPoly, compose_univariate

#: denominators / cosines smaller than this in magnitude are treated as singular
SINGULAR_TOL = 1e-12


class DomainError(ArithmeticError):
    """An elementary operation was evaluated or expanded at a singular point."""


def _as_expr(v) -> "Expr":
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return Const(float(v))
    raise TypeError(f"cannot use {type(v).__name__} in an expression")


class Expr:
    """Base class of expression nodes.  Nodes are immutable."""

    __slots__ = ()

    def children(self) -> tuple["Expr", ...]:
        return ()

    def __add__(self, o):
        return Add(self, _as_expr(o))

    def __radd__(self, o):
        return Add(_as_expr(o), self)

    def __sub__(self, o):
        return Sub(self, _as_expr(o))

    def __rsub__(self, o):
        return Sub(_as_expr(o), self)

    def __mul__(self, o):
        return Mul(self, _as_expr(o))

    def __rmul__(self, o):
        return Mul(_as_expr(o), self)

    def __truediv__(self, o):
        return Div(self, _as_expr(o))

    def __rtruediv__(self, o):
        return Div(_as_expr(o), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k):
        return Pow(self, k)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 0:
            raise ValueError(f"variable index must be a non-negative int, got {self.index!r}")


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    child: Expr

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


class Add(_Binary):
    pass


class Sub(_Binary):
    pass


class Mul(_Binary):
    pass


class Div(_Binary):
    pass


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    child: Expr
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError(f"Pow exponent must be a non-negative integer, got {self.exponent!r}")

    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=True)
class _Unary(Expr):
    child: Expr

    def children(self):
        return (self.child,)


class Sin(_Unary):
    pass


class Cos(_Unary):
    pass


class Tan(_Unary):
    pass


class Tanh(_Unary):
    pass


def max_var_index(e: Expr) -> int:
    """Largest variable index referenced by ``e`` (-1 if none)."""
    best = -1
    seen = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Var):
            best = max(best, node.index)
        stack.extend(node.children())
    return best


class VectorField:
    """Right-hand side ``f`` of ``x' = f(x)`` as ``dim`` expression graphs."""

    __slots__ = ("dim", "components", "_fn")

    def __init__(self, dim: int, components: Sequence[Expr]):
        components = tuple(_as_expr(c) for c in components)
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        if len(components) != dim:
            raise ValueError(f"expected {dim} components, got {len(components)}")
        for i, c in enumerate(components):
            if max_var_index(c) >= dim:
                raise ValueError(f"component {i} references a variable beyond x{dim - 1}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "_fn", None)

    def __setattr__(self, name, value):
        raise AttributeError("VectorField is immutable")

    def __call__(self, x) -> np.ndarray:
        fn = self._fn
        if fn is None:
            fn = compile_field(self)
            object.__setattr__(self, "_fn", fn)
        return fn(x)

    def __eq__(self, other):
        return (
            isinstance(other, VectorField)
            and self.dim == other.dim
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.dim, self.components))

    def __repr__(self):
        return f"VectorField(dim={self.dim}, components={list(self.components)!r})"

    def jet(self, center, degree: int):
        """Local Taylor model of the field about ``center``."""
        from .taylor import LocalModel

        center = np.asarray(center, dtype=float).ravel()
        if center.size != self.dim:
            raise ValueError(f"center has {center.size} entries, field has dim {self.dim}")
        memo: dict = {}
        comps = tuple(_jet(c, center, degree, memo) for c in self.components)
        return LocalModel(center, degree, comps)


# point evaluation -------------------------------------------------------------


def _eval(e: Expr, x: Sequence[float], memo: dict) -> float:
    key = id(e)
    if key in memo:
        return memo[key]
    if isinstance(e, Const):
        v = e.value
    elif isinstance(e, Var):
        v = x[e.index]
    elif isinstance(e, Neg):
        v = -_eval(e.child, x, memo)
    elif isinstance(e, Add):
        v = _eval(e.left, x, memo) + _eval(e.right, x, memo)
    elif isinstance(e, Sub):
        v = _eval(e.left, x, memo) - _eval(e.right, x, memo)
    elif isinstance(e, Mul):
        v = _eval(e.left, x, memo) * _eval(e.right, x, memo)
    elif isinstance(e, Div):
        den = _eval(e.right, x, memo)
        if abs(den) < SINGULAR_TOL:
            raise DomainError(f"division by {den!r}")
        v = _eval(e.left, x, memo) / den
    elif isinstance(e, Pow):
        v = _eval(e.child, x, memo) ** e.exponent
    elif isinstance(e, Sin):
        v = math.sin(_eval(e.child, x, memo))
    elif isinstance(e, Cos):
        v = math.cos(_eval(e.child, x, memo))
    elif isinstance(e, Tan):
        a = _eval(e.child, x, memo)
        if abs(math.cos(a)) < SINGULAR_TOL:
            raise DomainError(f"tan at odd multiple of pi/2 ({a!r})")
        v = math.tan(a)
    elif isinstance(e, Tanh):
        v = math.tanh(_eval(e.child, x, memo))
    else:
        raise TypeError(f"unknown node {type(e).__name__}")
    memo[key] = v
    return v


def eval_expr(e: Expr, x) -> float:
    return _eval(e, [float(v) for v in np.asarray(x, dtype=float).ravel()], {})


def eval_field(field: VectorField, x) -> np.ndarray:
    """``f(x)`` component-wise.

    Raises
    ------
    DomainError
        On division by (near) zero or tan at an odd multiple of pi/2.
    """
    xs = [float(v) for v in np.asarray(x, dtype=float).ravel()]
    if len(xs) != field.dim:
        raise ValueError(f"state has {len(xs)} entries, field has dim {field.dim}")
    memo: dict = {}
    return np.array([_eval(c, xs, memo) for c in field.components])


# compiled evaluation ----------------------------------------------------------------


def _checked_div(a: float, b: float) -> float:
    if abs(b) < SINGULAR_TOL:
        raise DomainError(f"division by {b!r}")
    return a / b


def _checked_tan(a: float) -> float:
    if abs(math.cos(a)) < SINGULAR_TOL:
        raise DomainError(f"tan at odd multiple of pi/2 ({a!r})")
    return math.tan(a)


def compile_field(field: VectorField) -> Callable[[Sequence[float]], np.ndarray]:
    """Straight-line Python function computing the same values as :func:`eval_field`.

    Shared subgraphs are evaluated once.
    """
    lines = []
    names: dict[int, str] = {}
    consts: dict[str, float] = {}

    def emit(e: Expr) -> str:
        key = id(e)
        if key in names:
            return names[key]
        if isinstance(e, Const):
            name = f"c{len(consts)}"
            consts[name] = e.value
            names[key] = name
            return name
        if isinstance(e, Var):
            rhs = f"x[{e.index}]"
        elif isinstance(e, Neg):
            rhs = f"-{emit(e.child)}"
        elif isinstance(e, Div):
            rhs = f"_div({emit(e.left)}, {emit(e.right)})"
        elif isinstance(e, _Binary):
            op = {Add: "+", Sub: "-", Mul: "*"}[type(e)]
            rhs = f"{emit(e.left)} {op} {emit(e.right)}"
        elif isinstance(e, Pow):
            rhs = f"{emit(e.child)} ** {e.exponent}"
        else:
            fn = {Sin: "_sin", Cos: "_cos", Tan: "_tan", Tanh: "_tanh"}[type(e)]
            rhs = f"{fn}({emit(e.child)})"
        name = f"v{len(lines)}"
        lines.append(f"    {name} = {rhs}")
        names[key] = name
        return name

    outs = [emit(c) for c in field.components]
    src = "def _f(x):\n    x = [float(v) for v in x]\n"
    src += "\n".join(lines) + ("\n" if lines else "")
    src += f"    return _array([{', '.join(outs)}], dtype=float)\n"
    env = dict(
        consts,
        _div=_checked_div,
        _tan=_checked_tan,
        _sin=math.sin,
        _cos=math.cos,
        _tanh=math.tanh,
        _array=np.array,
    )
    exec(compile(src, "<vector field>", "exec"), env)
    return env["_f"]


# univariate Taylor series about a point a, coefficients f^(j)(a)/j! --------------


def sin_cos_series(a: float, degree: int) -> tuple[list[float], list[float]]:
    s = [math.sin(a)]
    c = [math.cos(a)]
    for j in range(degree):
        s.append(c[j] / (j + 1))
        c.append(-s[j] / (j + 1))
    return s, c


def tan_series(a: float, degree: int) -> list[float]:
    if abs(math.cos(a)) < SINGULAR_TOL:
        raise DomainError(f"tan expanded at odd multiple of pi/2 ({a!r})")
    # y' = 1 + y^2
    t = [math.tan(a)]
    for j in range(degree):
        sq = sum(t[i] * t[j - i] for i in range(j + 1))
        t.append(((1.0 if j == 0 else 0.0) + sq) / (j + 1))
    return t


def tanh_series(a: float, degree: int) -> list[float]:
    # y' = 1 - y^2
    t = [math.tanh(a)]
    for j in range(degree):
        sq = sum(t[i] * t[j - i] for i in range(j + 1))
        t.append(((1.0 if j == 0 else 0.0) - sq) / (j + 1))
    return t


def reciprocal_series(a: float, degree: int) -> list[float]:
    if abs(a) < SINGULAR_TOL:
        raise DomainError(f"division by {a!r}")
    return [(-1.0) ** j / a ** (j + 1) for j in range(degree + 1)]


def _compose(series_fn: Callable[[float, int], list[float]], p: TruncatedPoly) -> TruncatedPoly:
    return compose_univariate(series_fn(p.const, p.degree), p.without_constant())


def _jet(e: Expr, center: np.ndarray, degree: int, memo: dict) -> TruncatedPoly:
    key = id(e)
    if key in memo:
        return memo[key]
    n = center.size
    if isinstance(e, Const):
        v = TruncatedPoly.constant(n, degree, e.value)
    elif isinstance(e, Var):
        v = TruncatedPoly.variable(n, degree, e.index, center[e.index])
    elif isinstance(e, Neg):
        v = -_jet(e.child, center, degree, memo)
    elif isinstance(e, Add):
        v = _jet(e.left, center, degree, memo) + _jet(e.right, center, degree, memo)
    elif isinstance(e, Sub):
        v = _jet(e.left, center, degree, memo) - _jet(e.right, center, degree, memo)
    elif isinstance(e, Mul):
        v = _jet(e.left, center, degree, memo) * _jet(e.right, center, degree, memo)
    elif isinstance(e, Div):
        num = _jet(e.left, center, degree, memo)
        v = num * _compose(reciprocal_series, _jet(e.right, center, degree, memo))
    elif isinstance(e, Pow):
        base = _jet(e.child, center, degree, memo)
        v = TruncatedPoly.constant(n, degree, 1.0)
        k = e.exponent
        while k:
            if k & 1:
                v = v * base
            k >>= 1
            if k:
                base = base * base
    elif isinstance(e, Sin):
        v = _compose(lambda a, d: sin_cos_series(a, d)[0], _jet(e.child, center, degree, memo))
    elif isinstance(e, Cos):
        v = _compose(lambda a, d: sin_cos_series(a, d)[1], _jet(e.child, center, degree, memo))
    elif isinstance(e, Tan):
        v = _compose(tan_series, _jet(e.child, center, degree, memo))
    elif isinstance(e, Tanh):
        v = _compose(tanh_series, _jet(e.child, center, degree, memo))
    else:
        raise TypeError(f"unknown node {type(e).__name__}")
    memo[key] = v
    return v


def eval_jet(e: Expr, center, degree: int) -> TruncatedPoly:
    """Truncated Taylor series of ``e`` about ``center`` up to total ``degree``.

    The result is a polynomial in ``delta = x - center``.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    center = np.asarray(center, dtype=float).ravel()
    if max_var_index(e) >= center.size:
        raise ValueError("center is shorter than the expression's variable range")
    return _jet(e, center, degree, {})
