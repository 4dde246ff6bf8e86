"""Truncated multivariate polynomials and local Taylor models.

Polynomials live in the displacement ``delta = x - center`` and are truncated
at a fixed total degree.  Coefficients are kept as a dense vector over the
graded-lex monomial basis of ``(dim, degree)``; the basis, its index lookup and
the multiplication table are cached per ``(dim, degree)`` pair.

Graded-lex order: monomials sorted by total degree, then by exponent tuple in
descending lexicographic order, e.g. for two variables at degree 2::

    1, d0, d1, d0^2, d0*d1, d1^2
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np


class DimensionError(ValueError):
    """Operands do not share dimension and truncation degree."""


def monomial_count(dim: int, degree: int) -> int:
    """Number of monomials of total degree <= ``degree`` in ``dim`` variables."""
    return math.comb(dim + degree, degree)


@functools.lru_cache(maxsize=None)
def _exponents(dim: int, degree: int) -> np.ndarray:
    rows = []
    for d in range(degree + 1):
        block = [e for e in itertools.product(range(d + 1), repeat=dim) if sum(e) == d]
        block.sort(reverse=True)
        rows.extend(block)
    out = np.array(rows, dtype=np.int64).reshape(len(rows), dim)
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=None)
def _keys(dim: int, degree: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # integer key per monomial (base degree+1 digits) plus a sorted view for lookup
    E = _exponents(dim, degree)
    radix = (degree + 1) ** np.arange(dim, dtype=np.int64)
    keys = E @ radix
    order = np.argsort(keys, kind="stable")
    return radix, keys[order], order


def _index_of(dim: int, degree: int, exps: np.ndarray) -> np.ndarray:
    radix, sorted_keys, order = _keys(dim, degree)
    pos = np.searchsorted(sorted_keys, np.atleast_2d(exps) @ radix)
    return order[pos]


@functools.lru_cache(maxsize=None)
def _mul_table(dim: int, degree: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index triples (i, j, k) with monomial_i * monomial_j = monomial_k."""
    E = _exponents(dim, degree)
    tot = E.sum(axis=1)
    I, J = [], []
    for i in range(len(E)):
        nj = monomial_count(dim, degree - tot[i])
        I.append(np.full(nj, i, dtype=np.int64))
        J.append(np.arange(nj, dtype=np.int64))
    I = np.concatenate(I)
    J = np.concatenate(J)
    K = _index_of(dim, degree, E[I] + E[J])
    for a in (I, J, K):
        a.setflags(write=False)
    return I, J, K


def basis(dim: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of the graded-lex basis."""
    return [tuple(int(v) for v in row) for row in _exponents(dim, degree)]


@dataclass(frozen=True, eq=False)
class TruncatedPoly:
    """Polynomial in ``dim`` variables truncated at total degree ``degree``.

    ``coeffs[i]`` multiplies the i-th graded-lex monomial.
    """

    dim: int
    degree: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.shape != (monomial_count(self.dim, self.degree),):
            raise DimensionError(
                f"expected {monomial_count(self.dim, self.degree)} coefficients, got {c.size}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree: int) -> "TruncatedPoly":
        return cls(dim, degree, np.zeros(monomial_count(dim, degree)))

    @classmethod
    def constant(cls, dim: int, degree: int, value: float) -> "TruncatedPoly":
        c = np.zeros(monomial_count(dim, degree))
        c[0] = value
        return cls(dim, degree, c)

    @classmethod
    def variable(cls, dim: int, degree: int, index: int, value: float = 0.0) -> "TruncatedPoly":
        """``value + delta_index``."""
        c = np.zeros(monomial_count(dim, degree))
        c[0] = value
        if degree >= 1:
            c[1 + index] = 1.0
        return cls(dim, degree, c)

    @classmethod
    def from_terms(
        cls, dim: int, degree: int, terms: Mapping[tuple[int, ...], float]
    ) -> "TruncatedPoly":
        """Build from an exponent->coefficient map; terms above ``degree`` are dropped."""
        c = np.zeros(monomial_count(dim, degree))
        for exps, v in terms.items():
            if len(exps) != dim or min(exps) < 0:
                raise DimensionError(f"bad multi-index {exps} for dim {dim}")
            if sum(exps) <= degree:
                c[_index_of(dim, degree, np.array(exps))[0]] += v
        return cls(dim, degree, c)

    # views --------------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], float]:
        """Nonzero coefficients keyed by exponent tuple."""
        E = _exponents(self.dim, self.degree)
        nz = np.flatnonzero(self.coeffs)
        return {tuple(int(v) for v in E[i]): float(self.coeffs[i]) for i in nz}

    def coefficient(self, exps: Sequence[int]) -> float:
        if sum(exps) > self.degree:
            return 0.0
        return float(self.coeffs[_index_of(self.dim, self.degree, np.asarray(exps))[0]])

    @property
    def const(self) -> float:
        return float(self.coeffs[0])

    def truncate(self, degree: int) -> "TruncatedPoly":
        """Restrict to total degree <= ``degree`` (which must not exceed ours)."""
        if degree > self.degree:
            raise DimensionError("cannot truncate to a higher degree")
        return TruncatedPoly(self.dim, degree, self.coeffs[: monomial_count(self.dim, degree)])

    def without_constant(self) -> "TruncatedPoly":
        c = self.coeffs.copy()
        c[0] = 0.0
        return TruncatedPoly(self.dim, self.degree, c)

    def __call__(self, delta) -> float:
        return float(self.coeffs @ monomials(delta, self.degree))

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "TruncatedPoly") -> None:
        if self.dim != other.dim or self.degree != other.degree:
            raise DimensionError(
                f"mismatch: ({self.dim}, {self.degree}) vs ({other.dim}, {other.degree})"
            )

    def __add__(self, other):
        if isinstance(other, TruncatedPoly):
            return poly_add(self, other)
        c = self.coeffs.copy()
        c[0] += other
        return TruncatedPoly(self.dim, self.degree, c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedPoly(self.dim, self.degree, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedPoly):
            return poly_mul(self, other)
        return TruncatedPoly(self.dim, self.degree, self.coeffs * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.degree == other.degree
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.dim, self.degree, self.coeffs.tobytes()))

    def allclose(self, other: "TruncatedPoly", **kw) -> bool:
        self._check(other)
        return bool(np.allclose(self.coeffs, other.coeffs, **kw))


def poly_add(a: TruncatedPoly, b: TruncatedPoly) -> TruncatedPoly:
    a._check(b)
    return TruncatedPoly(a.dim, a.degree, a.coeffs + b.coeffs)


def poly_mul(a: TruncatedPoly, b: TruncatedPoly) -> TruncatedPoly:
    """Product with every monomial above the truncation degree discarded."""
    a._check(b)
    I, J, K = _mul_table(a.dim, a.degree)
    prod = a.coeffs[I] * b.coeffs[J]
    out = np.bincount(K, weights=prod, minlength=a.coeffs.size)
    return TruncatedPoly(a.dim, a.degree, out)


def compose_univariate(series_coeffs: Sequence[float], p: TruncatedPoly) -> TruncatedPoly:
    """Evaluate ``sum_j series_coeffs[j] * p**j`` by Horner's rule.

    ``p`` must have zero constant term; ``series_coeffs`` has length
    ``p.degree + 1``.
    """
    d = p.degree
    if len(series_coeffs) != d + 1:
        raise ValueError(f"need {d + 1} series coefficients, got {len(series_coeffs)}")
    if p.coeffs[0] != 0.0:
        raise ValueError("argument must have zero constant term")
    acc = TruncatedPoly.constant(p.dim, d, series_coeffs[d])
    for j in range(d - 1, -1, -1):
        acc = poly_mul(acc, p) + series_coeffs[j]
    return acc


@functools.lru_cache(maxsize=None)
def _recurrence(dim: int, degree: int):
    """``monomial_i = monomial_parent[i] * delta[var[i]]`` for i >= 1.

    ``var[i]`` is the first variable with a positive exponent.
    """
    E = _exponents(dim, degree)
    var = np.argmax(E > 0, axis=1)
    var[0] = 0
    P = E.copy()
    P[np.arange(len(E)), var] -= 1
    parent = _index_of(dim, degree, P[1:]) if len(E) > 1 else np.zeros(0, dtype=np.int64)
    parent = np.concatenate([[0], parent])
    tot = E.sum(axis=1)
    levels = [np.flatnonzero(tot == d) for d in range(1, degree + 1)]
    return parent.tolist(), var.tolist(), [(lv, parent[lv], var[lv]) for lv in levels]


_SMALL_BASIS = 64


def monomials(delta, degree: int) -> np.ndarray:
    """Values of all graded-lex monomials at ``delta``."""
    delta = np.asarray(delta, dtype=float).ravel()
    parent, var, levels = _recurrence(delta.size, degree)
    if len(parent) <= _SMALL_BASIS:
        d = delta.tolist()
        out = [1.0] * len(parent)
        for i in range(1, len(parent)):
            out[i] = out[parent[i]] * d[var[i]]
        return np.array(out)
    out = np.empty(len(parent))
    out[0] = 1.0
    for idx, par, v in levels:
        out[idx] = out[par] * delta[v]
    return out


@dataclass(frozen=True, eq=False)
class LocalModel:
    """Taylor model of a vector field about ``center``.

    One :class:`TruncatedPoly` per state component, all in the displacement
    from ``center``.
    """

    center: np.ndarray
    degree: int
    components: tuple[TruncatedPoly, ...]

    def __post_init__(self):
        center = np.array(self.center, dtype=float).ravel()
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        n = center.size
        if len(comps) != n:
            raise DimensionError(f"{len(comps)} components for a {n}-dimensional center")
        for c in comps:
            if c.dim != n or c.degree != self.degree:
                raise DimensionError("components must share the model's dim and degree")
        coef = np.stack([c.coeffs for c in comps]) if comps else np.zeros((0, 1))
        coef.setflags(write=False)
        object.__setattr__(self, "_matrix", coef)

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def coefficient_matrix(self) -> np.ndarray:
        """(dim, monomial_count) array; row i holds component i."""
        return self._matrix

    def __call__(self, x) -> np.ndarray:
        return model_eval(self, x)

    def truncate(self, degree: int) -> "LocalModel":
        return LocalModel(self.center, degree, tuple(c.truncate(degree) for c in self.components))

    def weight_count(self) -> int:
        return weight_count(self)

    def coefficient_count(self) -> int:
        return coefficient_count(self)

    def __eq__(self, other):
        if not isinstance(other, LocalModel):
            return NotImplemented
        return (
            self.degree == other.degree
            and np.array_equal(self.center, other.center)
            and self.components == other.components
        )

    __hash__ = None


def model_eval(model: LocalModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size != model.dim:
        raise DimensionError(f"state has {x.size} entries, model expects {model.dim}")
    return model.coefficient_matrix @ monomials(x - model.center, model.degree)


def weight_count(model: LocalModel) -> int:
    """Payload size in the degree convention: a degree-k model costs k weights."""
    return model.degree


def coefficient_count(model: LocalModel) -> int:
    """Literal number of stored coefficients, ``dim * C(dim + k, k)``."""
    return model.dim * monomial_count(model.dim, model.degree)


def zero_model(center: Iterable[float]) -> LocalModel:
    center = np.asarray(list(center), dtype=float)
    n = center.size
    return LocalModel(center, 0, tuple(TruncatedPoly.zero(n, 0) for _ in range(n)))
