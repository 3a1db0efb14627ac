"""Gauss quadrature for the q-Gaussian law ``ν_q`` in floating point.

The rule comes from the Jacobi matrix of the monic q-Hermite recurrence
(zero diagonal, off-diagonal ``sqrt([n]_q)``) via Golub-Welsch. It is
used to cross-check support, orthogonality and moments against the exact
Fock-space computations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal


def q_int_float(n: int, q: float) -> float:
    return sum(q ** k for k in range(n))


def support_radius(q: float) -> float:
    return 2.0 / np.sqrt(1.0 - q)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def moment(self, k: int) -> float:
        return self.integrate(self.nodes ** k)


def _check_q(q: float) -> float:
    q = float(q)
    if not -1.0 < q < 1.0:
        raise ValueError(f"q must lie in (-1, 1), got {q}")
    return q


def gauss_rule(N: int, q: float) -> QuadratureRule:
    """N-point Gauss rule for ``ν_q``; exact for polynomials of degree ``2N - 1``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    q = _check_q(q)
    if N == 1:
        return QuadratureRule(np.zeros(1), np.ones(1))
    diag = np.zeros(N)
    offdiag = np.sqrt([q_int_float(n, q) for n in range(1, N)])
    try:
        nodes, vectors = eigh_tridiagonal(diag, offdiag)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigen-solver failed for N={N}, q={q}") from exc
    weights = vectors[0, :] ** 2
    weights = weights / weights.sum()
    return QuadratureRule(nodes, weights)


def hermite_values(nmax: int, x: np.ndarray, q: float) -> np.ndarray:
    """Rows ``H_0(x), ..., H_nmax(x)`` evaluated by the recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1, x.size))
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for n in range(nmax + 1):
        out[n] = cur
        prev, cur = cur, x * cur - q_int_float(n, q) * prev
    return out


def check_orthogonality(N: int, q: float, nmax: int) -> float:
    """Max deviation of ``∫ H_n H_m dν_q`` from ``δ_nm [n]_q!`` for ``n, m <= nmax``."""
    if nmax >= N:
        raise ValueError("nmax must be smaller than N")
    rule = gauss_rule(N, q)
    H = hermite_values(nmax, rule.nodes, q)
    gram = (H * rule.weights) @ H.T
    norms = np.cumprod([1.0] + [q_int_float(n, q) for n in range(1, nmax + 1)])
    return float(np.max(np.abs(gram - np.diag(norms))))
