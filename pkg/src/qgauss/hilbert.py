"""Finite real inner-product spaces presented by an exact Gram matrix.

Vectors are coordinate combinations of an abstract basis whose pairwise
inner products are the Gram entries, so no square roots ever appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .qcore import ScalarLike, as_scalar

Matrix = tuple[tuple[Fraction, ...], ...]


class NotSymmetricError(ValueError):
    pass


class NotPSDError(ValueError):
    """Raised when a Gram/covariance matrix is not positive semidefinite."""

    def __init__(self, message: str, minor_order: int | None = None,
                 minor_value: Fraction | None = None):
        super().__init__(message)
        self.minor_order = minor_order
        self.minor_value = minor_value


class SpaceMismatchError(ValueError):
    pass


def to_matrix(rows: Sequence[Sequence[ScalarLike]]) -> Matrix:
    matrix = tuple(tuple(as_scalar(x) for x in row) for row in rows)
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    return matrix


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    m = [list(map(Fraction, row)) for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        p = m[col][col]
        det *= p
        for r in range(col + 1, n):
            factor = m[r][col] / p
            if factor:
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def leading_minors(matrix: Matrix) -> list[Fraction]:
    return [determinant([row[:k] for row in matrix[:k]]) for k in range(1, len(matrix) + 1)]


def check_psd(matrix: Matrix) -> int:
    """Verify symmetry and positive semidefiniteness; return the rank.

    Uses an exact LDL^T factorization with symmetric (diagonal) pivoting,
    which accepts rank-deficient matrices. On failure the first negative
    leading principal minor is reported when there is one.
    """
    n = len(matrix)
    for i in range(n):
        for j in range(i + 1, n):
            if matrix[i][j] != matrix[j][i]:
                raise NotSymmetricError(
                    f"matrix is not symmetric: entry ({i},{j}) = {matrix[i][j]} "
                    f"but ({j},{i}) = {matrix[j][i]}"
                )

    work = [list(row) for row in matrix]
    active = list(range(n))
    rank = 0
    ok = True
    while active:
        k = max(active, key=lambda i: work[i][i])
        pivot = work[k][k]
        if pivot < 0:
            ok = False
            break
        if pivot == 0:
            # all remaining diagonal entries are zero; PSD forces the block to vanish
            ok = all(work[i][j] == 0 for i in active for j in active)
            break
        active.remove(k)
        rank += 1
        for i in active:
            factor = work[i][k] / pivot
            if factor:
                for j in active:
                    work[i][j] -= factor * work[k][j]
    if ok:
        return rank

    for order, minor in enumerate(leading_minors(matrix), start=1):
        if minor < 0:
            raise NotPSDError(
                f"matrix is not positive semidefinite: leading principal minor "
                f"of order {order} is {minor}",
                order, minor,
            )
    raise NotPSDError("matrix is not positive semidefinite (a non-leading principal minor is negative)")


@dataclass(frozen=True)
class GramSpace:
    """Real inner-product space of dimension ``dim`` with exact Gram matrix."""

    gram: Matrix

    def __post_init__(self) -> None:
        gram = to_matrix(self.gram)
        if not gram:
            raise ValueError("a GramSpace needs at least one basis vector")
        object.__setattr__(self, "gram", gram)
        check_psd(gram)

    @property
    def dim(self) -> int:
        return len(self.gram)

    def basis(self, i: int) -> Vec:
        coords = [Fraction(0)] * self.dim
        coords[i] = Fraction(1)
        return Vec(self, tuple(coords))

    def basis_vectors(self) -> list[Vec]:
        return [self.basis(i) for i in range(self.dim)]

    def vector(self, coords: Sequence[ScalarLike]) -> Vec:
        return Vec(self, tuple(as_scalar(c) for c in coords))

    def zero(self) -> Vec:
        return Vec(self, (Fraction(0),) * self.dim)


@dataclass(frozen=True)
class Vec:
    space: GramSpace
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.space.dim:
            raise ValueError(f"expected {self.space.dim} coordinates, got {len(self.coords)}")

    def _check(self, other: Vec) -> None:
        if other.space != self.space:
            raise SpaceMismatchError("vectors live in different GramSpaces")

    def __add__(self, other: Vec) -> Vec:
        self._check(other)
        return Vec(self.space, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: Vec) -> Vec:
        self._check(other)
        return Vec(self.space, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> Vec:
        return Vec(self.space, tuple(-a for a in self.coords))

    def __mul__(self, scalar: ScalarLike) -> Vec:
        c = as_scalar(scalar)
        return Vec(self.space, tuple(c * a for a in self.coords))

    __rmul__ = __mul__

    def support(self) -> list[tuple[int, Fraction]]:
        """Non-zero ``(basis index, coefficient)`` pairs."""
        return [(i, c) for i, c in enumerate(self.coords) if c != 0]


def inner(u: Vec, v: Vec) -> Fraction:
    """Exact bilinear form ``u^T G v``."""
    u._check(v)
    gram = u.space.gram
    total = Fraction(0)
    for i, a in u.support():
        row = gram[i]
        for j, b in v.support():
            total += a * b * row[j]
    return total


def gram_equivalent(u: Vec, v: Vec) -> bool:
    """True when ``u - v`` has zero inner product with every basis vector."""
    diff = u - v
    return all(inner(diff, e) == 0 for e in u.space.basis_vectors())


def solve_normal_equations(system: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a consistent (possibly singular) linear system exactly.

    Rank-revealing Gauss-Jordan elimination; free variables are set to 0.
    """
    n = len(system)
    m = [list(row) + [b] for row, b in zip(system, rhs)]
    cols = len(system[0]) if system else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, n) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(n):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    if any(m[i][-1] != 0 for i in range(r, n)):
        raise ArithmeticError("inconsistent linear system")
    solution = [Fraction(0)] * cols
    for row, c in enumerate(pivots):
        solution[c] = m[row][-1]
    return solution


def project(target: Vec, onto: Sequence[Vec]) -> Vec:
    """Orthogonal projection of ``target`` onto ``span(onto)``.

    Dependent families are fine: the projection vector is unique even when
    its coefficients are not.
    """
    if not onto:
        raise ValueError("cannot project onto an empty family")
    for v in onto:
        target._check(v)
    normal = [[inner(u, v) for v in onto] for u in onto]
    rhs = [inner(u, target) for u in onto]
    coeffs = solve_normal_equations(normal, rhs)
    result = target.space.zero()
    for c, v in zip(coeffs, onto):
        if c:
            result = result + c * v
    return result


@dataclass(frozen=True)
class CovarianceSpec:
    """Symmetric PSD matrix of pairwise inner products ``<f_i, f_j>``.

    PSD-ness is checked on construction. ``standardized`` is true when the
    diagonal is all ones.
    """

    entries: Matrix

    def __post_init__(self) -> None:
        entries = to_matrix(self.entries)
        if not entries:
            raise ValueError("covariance must be non-empty")
        check_psd(entries)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def triplet(cls, fg: ScalarLike, gh: ScalarLike, fh: ScalarLike) -> CovarianceSpec:
        """Standardized covariance of ``(f, g, h)`` from its off-diagonal entries."""
        fg, gh, fh = as_scalar(fg), as_scalar(gh), as_scalar(fh)
        return cls(((1, fg, fh), (fg, 1, gh), (fh, gh, 1)))

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def standardized(self) -> bool:
        return all(self.entries[i][i] == 1 for i in range(self.size))

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i][j]


def covariance_space(cov: CovarianceSpec) -> tuple[GramSpace, list[Vec]]:
    """Realize ``cov`` as a GramSpace whose basis reproduces it exactly."""
    space = GramSpace(cov.entries)
    return space, space.basis_vectors()
