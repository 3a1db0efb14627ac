"""The q-Fock space over a :class:`~qgauss.hilbert.GramSpace`.

A :class:`TensorState` is a finite linear combination of elementary
tensors ``e_{i1} ⊗ ... ⊗ e_{in}`` of basis vectors, keyed by the index
tuple; the empty tuple is the vacuum.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, Sequence

from .hilbert import GramSpace, SpaceMismatchError, Vec
from .qcore import ScalarLike, as_scalar

NAIVE_DEGREE_LIMIT = 8

Key = tuple[int, ...]


class DegreeGuardError(ValueError):
    pass


class TensorState:
    """Immutable element of the (algebraic) q-Fock space."""

    __slots__ = ("space", "_terms", "_hash")

    def __init__(self, space: GramSpace, terms: Mapping[Key, ScalarLike] | None = None):
        self.space = space
        clean: dict[Key, Fraction] = {}
        for key, coeff in (terms or {}).items():
            key = tuple(key)
            if any(not 0 <= i < space.dim for i in key):
                raise IndexError(f"basis index out of range in {key}")
            c = as_scalar(coeff)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
        self._terms = {k: v for k, v in clean.items() if v}
        self._hash = None

    @classmethod
    def vacuum(cls, space: GramSpace) -> TensorState:
        return cls(space, {(): 1})

    @classmethod
    def zero(cls, space: GramSpace) -> TensorState:
        return cls(space)

    @classmethod
    def elementary(cls, vectors: Sequence[Vec], space: GramSpace | None = None) -> TensorState:
        """Expand ``v_1 ⊗ ... ⊗ v_n`` into basis-index terms by multilinearity."""
        if space is None:
            if not vectors:
                raise ValueError("space is required for the empty tensor")
            space = vectors[0].space
        terms: dict[Key, Fraction] = {(): Fraction(1)}
        for v in vectors:
            if v.space != space:
                raise SpaceMismatchError("vectors live in different GramSpaces")
            nxt: dict[Key, Fraction] = {}
            for key, c in terms.items():
                for i, a in v.support():
                    k = key + (i,)
                    nxt[k] = nxt.get(k, Fraction(0)) + c * a
            terms = nxt
        return cls(space, terms)

    @classmethod
    def _raw(cls, space: GramSpace, terms: dict[Key, Fraction]) -> TensorState:
        obj = cls.__new__(cls)
        obj.space = space
        obj._terms = {k: v for k, v in terms.items() if v}
        obj._hash = None
        return obj

    @property
    def terms(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterable[tuple[Key, Fraction]]:
        return self._terms.items()

    def coefficient(self, key: Key) -> Fraction:
        return self._terms.get(tuple(key), Fraction(0))

    def degrees(self) -> set[int]:
        return {len(k) for k in self._terms}

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def _check(self, other: TensorState) -> None:
        if other.space != self.space:
            raise SpaceMismatchError("states live over different GramSpaces")

    def __add__(self, other: TensorState) -> TensorState:
        self._check(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return TensorState._raw(self.space, out)

    def __sub__(self, other: TensorState) -> TensorState:
        return self + (-1) * other

    def __neg__(self) -> TensorState:
        return (-1) * self

    def __mul__(self, scalar: ScalarLike) -> TensorState:
        c = as_scalar(scalar)
        return TensorState._raw(self.space, {k: c * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorState):
            return NotImplemented
        return self.space == other.space and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "TensorState(0)"
        parts = []
        for key, c in sorted(self._terms.items(), key=lambda kv: (len(kv[0]), kv[0])):
            label = "⊗".join(f"e{i}" for i in key) if key else "Φ"
            parts.append(f"{c}*{label}")
        return "TensorState(" + " + ".join(parts) + ")"


def inversions(sigma: Sequence[int]) -> int:
    """Number of pairs ``i < j`` with ``sigma[i] > sigma[j]``."""
    values = list(sigma)
    ordered = sorted(values)
    n = len(values)
    if ordered != list(range(n)) and ordered != list(range(1, n + 1)):
        raise ValueError(f"{sigma!r} is not a permutation of 0..n-1 or 1..n")
    return sum(1 for i in range(len(values)) for j in range(i + 1, len(values)) if values[i] > values[j])


def _permutation_sum(left: Key, right: Key, gram, q: Fraction) -> Fraction:
    n = len(left)
    total = Fraction(0)
    for sigma in permutations(range(n)):
        prod = Fraction(1)
        for j in range(n):
            prod *= gram[left[j]][right[sigma[j]]]
            if not prod:
                break
        if prod:
            total += q ** inversions(sigma) * prod
    return total


def fock_inner_naive(u: TensorState, v: TensorState, q: ScalarLike) -> Fraction:
    """q-inner product as the literal sum over permutations.

    Exponential in the degree; intended as an oracle for :func:`fock_inner`.
    """
    u._check(v)
    q = as_scalar(q)
    gram = u.space.gram
    total = Fraction(0)
    for lk, lc in u.items():
        if len(lk) > NAIVE_DEGREE_LIMIT:
            raise DegreeGuardError(
                f"degree {len(lk)} exceeds the naive limit {NAIVE_DEGREE_LIMIT}; use fock_inner"
            )
        for rk, rc in v.items():
            if len(rk) != len(lk):
                continue
            if len(rk) > NAIVE_DEGREE_LIMIT:
                raise DegreeGuardError(
                    f"degree {len(rk)} exceeds the naive limit {NAIVE_DEGREE_LIMIT}; use fock_inner"
                )
            total += lc * rc * _permutation_sum(lk, rk, gram, q)
    return total


def _recursive_pair(left: Key, right: Key, gram, q: Fraction) -> Fraction:
    n = len(left)
    if n == 0:
        return Fraction(1)
    qpow = [Fraction(1)]
    for _ in range(n):
        qpow.append(qpow[-1] * q)
    # memo[mask] = <left[depth:] | right restricted to mask>, depth = n - popcount(mask)
    memo: dict[int, Fraction] = {0: Fraction(1)}

    def rec(mask: int) -> Fraction:
        cached = memo.get(mask)
        if cached is not None:
            return cached
        depth = n - bin(mask).count("1")
        row = gram[left[depth]]
        total = Fraction(0)
        before = 0
        for j in range(n):
            bit = 1 << j
            if mask & bit:
                g = row[right[j]]
                if g:
                    total += qpow[before] * g * rec(mask ^ bit)
                before += 1
        memo[mask] = total
        return total

    return rec((1 << n) - 1)


def fock_inner(u: TensorState, v: TensorState, q: ScalarLike) -> Fraction:
    """q-inner product by peeling off the first left factor.

    Uses ``<f ⊗ rest | g> = <rest | a_f g>`` with memoization on the set of
    right-hand positions still unused, which costs O(n 2^n) per term pair.
    """
    u._check(v)
    q = as_scalar(q)
    gram = u.space.gram
    total = Fraction(0)
    by_degree: dict[int, list[tuple[Key, Fraction]]] = {}
    for rk, rc in v.items():
        by_degree.setdefault(len(rk), []).append((rk, rc))
    for lk, lc in u.items():
        for rk, rc in by_degree.get(len(lk), ()):
            total += lc * rc * _recursive_pair(lk, rk, gram, q)
    return total


def annihilate(f: Vec, s: TensorState, q: ScalarLike) -> TensorState:
    """Apply ``a_f``: remove the j-th factor with weight ``q**(j-1) <f, f_j>``."""
    if f.space != s.space:
        raise SpaceMismatchError("vector and state live over different GramSpaces")
    q = as_scalar(q)
    gram = s.space.gram
    support = f.support()
    # <f, e_i> for every basis index i
    weights = [sum((a * gram[k][i] for k, a in support), Fraction(0)) for i in range(s.space.dim)]
    out: dict[Key, Fraction] = {}
    for key, c in s.items():
        qp = Fraction(1)
        for j, idx in enumerate(key):
            w = weights[idx]
            if w:
                k = key[:j] + key[j + 1:]
                out[k] = out.get(k, Fraction(0)) + c * qp * w
            qp *= q
    return TensorState._raw(s.space, out)


def create(f: Vec, s: TensorState) -> TensorState:
    """Apply ``a_f^*``: prepend ``f`` to every term (expanded by linearity)."""
    if f.space != s.space:
        raise SpaceMismatchError("vector and state live over different GramSpaces")
    out: dict[Key, Fraction] = {}
    support = f.support()
    for key, c in s.items():
        for i, a in support:
            k = (i,) + key
            out[k] = out.get(k, Fraction(0)) + a * c
    return TensorState._raw(s.space, out)


def field_apply(f: Vec, s: TensorState, q: ScalarLike) -> TensorState:
    """Apply the field operator ``X_f = a_f + a_f^*``."""
    return annihilate(f, s, q) + create(f, s)
