"""Operator expressions, Wick products and conditional moments.

Expressions are evaluated by acting on Fock states; nothing is ever
normal-ordered symbolically. Vacuum expectations expand an expression
into weighted words of field operators and read off the vacuum
coefficient of each word applied to the vacuum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .fock import TensorState, field_apply
from .hilbert import CovarianceSpec, GramSpace, Vec, covariance_space, inner, project
from .qcore import ScalarLike, as_scalar, hermite, q_factorial, q_int

Word = tuple[Vec, ...]


class OperatorExpr:
    """Base class for nodes of an operator expression tree.

    ``a * b`` composes (``b`` acts first), ``c * a`` with a scalar ``c``
    scales, ``a + b`` adds, ``a ** k`` composes ``a`` with itself.
    """

    def expand(self) -> dict[Word, Fraction]:
        cached = self.__dict__.get("_expansion")
        if cached is None:
            cached = {w: c for w, c in self._expand().items() if c}
            object.__setattr__(self, "_expansion", cached)
        return cached

    def _expand(self) -> dict[Word, Fraction]:
        raise NotImplementedError

    def adjoint(self) -> OperatorExpr:
        raise NotImplementedError

    def __add__(self, other: OperatorExpr) -> OperatorExpr:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Sum((self, other))

    def __sub__(self, other: OperatorExpr) -> OperatorExpr:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return Sum((self, Scaled(Fraction(-1), other)))

    def __neg__(self) -> OperatorExpr:
        return Scaled(Fraction(-1), self)

    def __mul__(self, other):
        if isinstance(other, OperatorExpr):
            return Product((self, other))
        return Scaled(as_scalar(other), self)

    def __rmul__(self, other):
        return Scaled(as_scalar(other), self)

    def __pow__(self, k: int) -> OperatorExpr:
        if k < 0:
            raise ValueError("negative powers are not defined")
        if k == 0:
            return Identity()
        return Product((self,) * k)


@dataclass(frozen=True, eq=False)
class Identity(OperatorExpr):
    def _expand(self):
        return {(): Fraction(1)}

    def adjoint(self):
        return self


@dataclass(frozen=True, eq=False)
class Field(OperatorExpr):
    """The self-adjoint field operator ``X_f = a_f + a_f^*``."""

    vec: Vec

    def _expand(self):
        return {(self.vec,): Fraction(1)}

    def adjoint(self):
        return self


@dataclass(frozen=True, eq=False)
class Scaled(OperatorExpr):
    coeff: Fraction
    expr: OperatorExpr

    def _expand(self):
        return {w: self.coeff * c for w, c in self.expr.expand().items()}

    def adjoint(self):
        return Scaled(self.coeff, self.expr.adjoint())


@dataclass(frozen=True, eq=False)
class Sum(OperatorExpr):
    terms: tuple[OperatorExpr, ...]

    def _expand(self):
        out: dict[Word, Fraction] = {}
        for t in self.terms:
            for w, c in t.expand().items():
                out[w] = out.get(w, Fraction(0)) + c
        return out

    def adjoint(self):
        return Sum(tuple(t.adjoint() for t in self.terms))


@dataclass(frozen=True, eq=False)
class Product(OperatorExpr):
    """Ordered composition; the rightmost factor acts first."""

    factors: tuple[OperatorExpr, ...]

    def _expand(self):
        out: dict[Word, Fraction] = {(): Fraction(1)}
        for factor in self.factors:
            nxt: dict[Word, Fraction] = {}
            for w1, c1 in out.items():
                for w2, c2 in factor.expand().items():
                    w = w1 + w2
                    nxt[w] = nxt.get(w, Fraction(0)) + c1 * c2
            out = {w: c for w, c in nxt.items() if c}
        return out

    def adjoint(self):
        return Product(tuple(f.adjoint() for f in reversed(self.factors)))


def field(vec: Vec) -> Field:
    return Field(vec)


def apply(opexpr: OperatorExpr, s: TensorState, q: ScalarLike) -> TensorState:
    """Act with ``opexpr`` on the state ``s``."""
    q = as_scalar(q)
    if isinstance(opexpr, Identity):
        return s
    if isinstance(opexpr, Field):
        return field_apply(opexpr.vec, s, q)
    if isinstance(opexpr, Scaled):
        return opexpr.coeff * apply(opexpr.expr, s, q)
    if isinstance(opexpr, Sum):
        out = TensorState.zero(s.space)
        for t in opexpr.terms:
            out = out + apply(t, s, q)
        return out
    if isinstance(opexpr, Product):
        for f in reversed(opexpr.factors):
            s = apply(f, s, q)
        return s
    raise TypeError(f"unknown operator node {type(opexpr).__name__}")


def _word_vacuum_coefficient(word: Word, q: Fraction) -> Fraction:
    space = word[0].space
    state = TensorState.vacuum(space)
    for remaining, vec in zip(range(len(word) - 1, -1, -1), reversed(word)):
        state = field_apply(vec, state, q)
        # a term of degree d needs at least d more annihilations to reach the vacuum
        if any(len(k) > remaining for k, _ in state.items()):
            state = TensorState._raw(space, {k: c for k, c in state.items() if len(k) <= remaining})
        if state.is_zero():
            return Fraction(0)
    return state.coefficient(())


def vacuum_expectation(word: OperatorExpr, q: ScalarLike) -> Fraction:
    """``E(word) = <Φ | word Φ>_q``, the vacuum coefficient of ``word Φ``."""
    q = as_scalar(q)
    total = Fraction(0)
    for w, c in word.expand().items():
        if not w:
            total += c
        elif len(w) % 2 == 0:
            total += c * _word_vacuum_coefficient(w, q)
    return total


@lru_cache(maxsize=4096)
def _wick_cached(factors: Word, q: Fraction) -> OperatorExpr:
    if not factors:
        return Identity()
    head, rest = factors[0], factors[1:]
    expr: OperatorExpr = Product((Field(head), _wick_cached(rest, q)))
    corrections = []
    for j, fj in enumerate(rest):
        weight = q ** j * inner(head, fj)
        if weight:
            corrections.append(Scaled(-weight, _wick_cached(rest[:j] + rest[j + 1:], q)))
    if corrections:
        expr = Sum((expr, *corrections))
    return expr


def wick(factors: Sequence[Vec], q: ScalarLike) -> OperatorExpr:
    """Wick product ``ψ(f_1 ⊗ ... ⊗ f_n)``, built by its recurrence.

    The defining property is ``ψ(f_1 ⊗ ... ⊗ f_n) Φ = f_1 ⊗ ... ⊗ f_n``.
    """
    factors = tuple(factors)
    if factors and any(f.space != factors[0].space for f in factors):
        raise ValueError("all Wick factors must live in one GramSpace")
    return _wick_cached(factors, as_scalar(q))


def polynomial_of(poly, op: OperatorExpr) -> OperatorExpr:
    terms = [Scaled(c, op ** k) for k, c in enumerate(poly.coeffs) if c]
    if not terms:
        return Scaled(Fraction(0), Identity())
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def hermite_of_field(n: int, f: Vec, q: ScalarLike) -> OperatorExpr:
    """The operator polynomial ``H_n(X_f)``; ``f`` must be a unit vector."""
    if inner(f, f) != 1:
        raise ValueError(f"H_n(X_f) needs a unit vector, got <f,f> = {inner(f, f)}")
    return polynomial_of(hermite(n, q), Field(f))


def wick_conditional(factors: Sequence[Vec], conditioning: Sequence[Vec], q: ScalarLike) -> OperatorExpr:
    """``E(ψ(g_1 ⊗ ... ⊗ g_m) | X_{f_1}, ..., X_{f_k})`` by projecting each factor."""
    if not conditioning:
        raise ValueError("conditioning family must be non-empty")
    return wick([project(g, conditioning) for g in factors], q)


def regression(target: Vec, conditioning: Sequence[Vec]) -> tuple[Vec, Fraction]:
    """Linear-regression vector and constant conditional variance.

    Returns ``(g, c)`` where ``g`` is the projection of ``target`` onto the
    conditioning span, so ``E(X_0 | ...) = X_g`` and
    ``E(X_0^2 | ...) = X_g^2 + c I`` with ``c = |target|^2 - |g|^2``.
    """
    g = project(target, conditioning)
    return g, inner(target, target) - inner(g, g)


@dataclass(frozen=True)
class TripletCoeffs:
    a: Fraction
    b: Fraction
    c: Fraction


@dataclass(frozen=True)
class ClassicalCoeffs:
    A: Fraction
    B: Fraction
    C: Fraction
    D: Fraction


def _triplet_entries(cov: CovarianceSpec) -> tuple[Fraction, Fraction, Fraction]:
    if cov.size != 3:
        raise ValueError(f"expected a 3x3 covariance, got {cov.size}x{cov.size}")
    if not cov.standardized:
        raise ValueError("covariance must have unit diagonal")
    fg, gh, fh = cov[0, 1], cov[1, 2], cov[0, 2]
    if fh * fh == 1:
        raise ValueError("<f,h>^2 = 1: f and h are linearly dependent, regression is degenerate")
    return fg, gh, fh


def triplet_coeffs(cov: CovarianceSpec, q: ScalarLike | None = None) -> TripletCoeffs:
    """Coefficients of ``E(Y|X,Z) = aX + bZ`` and ``E(Y^2|X,Z) = (aX+bZ)^2 + c``.

    ``cov`` orders the vectors as ``(f, g, h)``. The coefficients do not
    depend on ``q``; the argument is accepted for symmetry with
    :func:`classical_coeffs`.
    """
    fg, gh, fh = _triplet_entries(cov)
    denom = 1 - fh * fh
    a = (fg - gh * fh) / denom
    b = (gh - fg * fh) / denom
    c = (1 + 2 * fg * gh * fh - fg * fg - gh * gh - fh * fh) / denom
    assert c >= 0
    return TripletCoeffs(a, b, c)


def classical_coeffs(cov: CovarianceSpec, q: ScalarLike) -> ClassicalCoeffs:
    """Coefficients of ``E(Y~^2 | X~, Z~) = A X~^2 + B X~Z~ + C Z~^2 + D``."""
    q = as_scalar(q)
    _, _, rho = _triplet_entries(cov)
    t = triplet_coeffs(cov, q)
    a, b = t.a, t.b
    denom = 1 - q * rho * rho
    A = (a * b * (1 - q) * rho + a * a * denom) / denom
    B = a * b * (1 + q) * (1 - rho * rho) / denom
    C = (a * b * (1 - q) * rho + b * b * denom) / denom
    D = 1 - A - B * rho - C
    return ClassicalCoeffs(A, B, C, D)


class SwitchKind(str, enum.Enum):
    """Operator words ``E(H_n(X) · W · H_m(Z))`` of the switching lemma."""

    ZX = "ZX"
    XZ = "XZ"
    XX = "XX"
    ZZ = "ZZ"
    PLAIN = "PLAIN"


def _xx_table(n: int, m: int, rho: Fraction, q: Fraction) -> Fraction:
    # E(H_n(X) X^2 H_m(Z))
    if m == n + 2:
        return rho ** (n + 2) * q_factorial(n + 2, q)
    if m == n - 2:
        return rho ** (n - 2) * q_factorial(n, q)
    if m == n:
        return rho ** n * (q_int(n + 1, q) + q_int(n, q)) * q_factorial(n, q)
    return Fraction(0)


def switch_closed_form(kind: SwitchKind | str, n: int, m: int, rho: ScalarLike, q: ScalarLike) -> Fraction:
    """Closed-form value of the switching-lemma expectation for ``kind``.

    ``rho = <f, h>`` with ``X = X_f`` and ``Z = X_h`` unit fields. The
    ``m = n`` rows carry ``rho**(n-1)``; they are multiplied out so that
    every entry is a polynomial in ``rho`` (the negative-power term comes
    with a factor ``[n]_q`` that vanishes at ``n = 0``).
    """
    kind = SwitchKind(kind)
    if n < 0 or m < 0:
        raise ValueError("degrees must be non-negative")
    rho, q = as_scalar(rho), as_scalar(q)
    fact = q_factorial

    if kind is SwitchKind.PLAIN:
        return rho ** n * fact(n, q) if m == n else Fraction(0)
    if kind is SwitchKind.XX:
        return _xx_table(n, m, rho, q)
    if kind is SwitchKind.ZZ:
        # E(H_n(X) Z^2 H_m(Z)) is the XX entry with the degrees exchanged
        return _xx_table(m, n, rho, q)

    if m == n + 2:
        return rho ** (n + 1) * fact(n + 2, q)
    if m == n - 2:
        return rho ** (n - 1) * fact(n, q)
    if m != n:
        return Fraction(0)
    qn = q_int(n, q)
    low = rho ** (n - 1) * fact(n, q) if n >= 1 else Fraction(0)
    if kind is SwitchKind.ZX:
        return (qn + 1) * rho ** (n + 1) * fact(n, q) + q * qn * low
    return q_int(n + 1, q) * rho ** (n + 1) * fact(n, q) + qn * low


SWITCH_COST_LIMIT = 14


def switch_word(kind: SwitchKind | str, n: int, m: int, x: Vec, z: Vec, q: ScalarLike) -> OperatorExpr:
    """The literal operator word whose vacuum expectation the lemma evaluates."""
    kind = SwitchKind(kind)
    X, Z = Field(x), Field(z)
    middle = {
        SwitchKind.ZX: [Z, X],
        SwitchKind.XZ: [X, Z],
        SwitchKind.XX: [X, X],
        SwitchKind.ZZ: [Z, Z],
        SwitchKind.PLAIN: [],
    }[kind]
    return Product((hermite_of_field(n, x, q), *middle, hermite_of_field(m, z, q)))


def switch_bruteforce(kind: SwitchKind | str, n: int, m: int, cov: CovarianceSpec, q: ScalarLike) -> Fraction:
    """Evaluate the switching-lemma expectation by acting on the Fock space."""
    if n < 0 or m < 0:
        raise ValueError("degrees must be non-negative")
    if n + m + 2 > SWITCH_COST_LIMIT:
        raise ValueError(f"n + m + 2 = {n + m + 2} exceeds the cost limit {SWITCH_COST_LIMIT}")
    if cov.size != 2 or not cov.standardized:
        raise ValueError("expected a standardized 2x2 covariance")
    _, (x, z) = covariance_space(cov)
    return vacuum_expectation(switch_word(kind, n, m, x, z, q), q)


def qv_nc_sides(cov: CovarianceSpec, n: int, m: int, q: ScalarLike) -> tuple[Fraction, Fraction]:
    """Both sides of ``E(H_n(X) Y^2 H_m(Z)) = E(H_n(X)(A X^2 + B XZ + C Z^2 + D) H_m(Z))``.

    The left side is evaluated literally on the Fock space; the right side
    uses :func:`classical_coeffs` and literal Fock evaluation of each word.
    """
    q = as_scalar(q)
    coeffs = classical_coeffs(cov, q)
    _, (f, g, h) = covariance_space(cov)
    X, Y, Z = Field(f), Field(g), Field(h)
    P, Q = hermite_of_field(n, f, q), hermite_of_field(m, h, q)
    lhs = vacuum_expectation(P * Y * Y * Q, q)
    middle = coeffs.A * (X * X) + coeffs.B * (X * Z) + coeffs.C * (Z * Z) + coeffs.D * Identity()
    rhs = vacuum_expectation(P * middle * Q, q)
    return lhs, rhs


def space_of(expr: OperatorExpr) -> GramSpace | None:
    for word in expr.expand():
        if word:
            return word[0].space
    return None
