"""Exact scalars, q-integers, q-factorials and q-Hermite polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Union

Scalar = Fraction
ScalarLike = Union[Fraction, int, str]


def as_scalar(value: ScalarLike) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Integers, fractions and strings such as ``"-1/2"`` or ``"0.25"`` are
    accepted. Floats are rejected because their binary expansion is
    rarely what the caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (Fraction, int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse {value!r} as an exact rational") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def check_q(q: ScalarLike, *, allow_minus_one: bool = False) -> Fraction:
    """Validate the deformation parameter and return it as a Fraction.

    Fock-space constructions need ``-1 < q < 1``; the Bell checker also
    accepts the fermionic endpoint ``q = -1``.
    """
    q = as_scalar(q)
    lower_ok = q >= -1 if allow_minus_one else q > -1
    if not (lower_ok and q < 1):
        bound = "[-1, 1)" if allow_minus_one else "(-1, 1)"
        raise ValueError(f"q must lie in {bound}, got {q}")
    return q


def q_int(n: int, q: ScalarLike) -> Fraction:
    """Return ``[n]_q = 1 + q + ... + q**(n-1)``; ``[0]_q = 0``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    q = as_scalar(q)
    total = Fraction(0)
    power = Fraction(1)
    for _ in range(n):
        total += power
        power *= q
    return total


def q_factorial(n: int, q: ScalarLike) -> Fraction:
    """Return ``[n]_q! = [1]_q [2]_q ... [n]_q`` with ``[0]_q! = 1``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    q = as_scalar(q)
    result = Fraction(1)
    for k in range(1, n + 1):
        result *= q_int(k, q)
    return result


@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial, ``coeffs[k]`` multiplies ``x**k``.

    Trailing zeros are trimmed on construction so equal polynomials compare
    equal. The zero polynomial has degree ``-1``.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        coeffs = [Fraction(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_iter(cls, coeffs: Iterable[ScalarLike]) -> Polynomial:
        return cls(tuple(as_scalar(c) for c in coeffs))

    @classmethod
    def x(cls) -> Polynomial:
        return cls((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Evaluate by Horner's rule; works for any ring element ``x``."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if not self.coeffs or not other.coeffs:
                return Polynomial()
            out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return Polynomial(tuple(out))
        c = as_scalar(other)
        return Polynomial(tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Polynomial({[str(c) for c in self.coeffs]})"


@lru_cache(maxsize=None)
def _hermite_cached(n: int, q: Fraction) -> Polynomial:
    prev, cur = Polynomial(), Polynomial((Fraction(1),))
    x = Polynomial.x()
    for k in range(n):
        # x H_k = H_{k+1} + [k]_q H_{k-1}
        prev, cur = cur, x * cur - q_int(k, q) * prev
    return cur


def hermite(n: int, q: ScalarLike) -> Polynomial:
    """Monic q-Hermite polynomial ``H_n`` from the three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _hermite_cached(n, as_scalar(q))
