"""Covariance feasibility for classical versions of q-Gaussian triplets.

Two necessary conditions are checked exactly: the extended Bell
inequality ``1 - <f,h> >= |<f,g> - <g,h>|`` (under its hypotheses) and
non-negativity of the classical conditional variance ``Var(Y~ | X~, Z~)``
over the support square ``[-2/sqrt(1-q), 2/sqrt(1-q)]^2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .hilbert import CovarianceSpec, NotPSDError, check_psd, to_matrix
from .qcore import ScalarLike, as_scalar, check_q

__all__ = [
    "CovarianceSpec",
    "FeasibilityVerdict",
    "QuadraticForm",
    "Verdict",
    "bell_check",
    "bm_cond_variance",
    "e1_region",
    "region_scan",
    "variance_form",
    "variance_min",
]


class Verdict(str, enum.Enum):
    NO_CLASSICAL_VERSION = "NO_CLASSICAL_VERSION"
    NOT_EXCLUDED = "NOT_EXCLUDED"
    INVALID_PSD = "INVALID_PSD"
    DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class QuadraticForm:
    """``xx x^2 + xz x z + zz z^2 + x_ x + z_ z + const`` with exact coefficients."""

    xx: Fraction
    xz: Fraction
    zz: Fraction
    const: Fraction
    x: Fraction = Fraction(0)
    z: Fraction = Fraction(0)

    def __call__(self, x, z):
        return self.xx * x * x + self.xz * x * z + self.zz * z * z + self.x * x + self.z * z + self.const

    def at_symmetric_point(self, square: Fraction, sign: int) -> Fraction:
        """Value at ``x^2 = z^2 = square`` and ``x z = sign * square``.

        Only meaningful for forms without linear terms, where this pins
        the value without taking a square root.
        """
        if self.x or self.z:
            raise ValueError("form has linear terms")
        return (self.xx + self.zz + sign * self.xz) * square + self.const

    def box_minimum(self, square: Fraction) -> Fraction:
        """Exact minimum over ``[-M, M]^2`` with ``M^2 = square``.

        Candidates are the four corners, the critical points on each edge
        and the interior critical point; with no linear terms every
        candidate value is rational in ``square``.
        """
        if self.x or self.z:
            raise ValueError("form has linear terms")
        candidates = [self.at_symmetric_point(square, 1), self.at_symmetric_point(square, -1)]
        # edges x = ±M: zz z^2 ± xz M z, critical z* = ∓ xz M / (2 zz)
        for own, other in ((self.xx, self.zz), (self.zz, self.xx)):
            if other > 0 and self.xz * self.xz <= 4 * other * other:
                candidates.append(own * square - self.xz * self.xz * square / (4 * other) + self.const)
        if self.xx >= 0 and self.zz >= 0 and 4 * self.xx * self.zz >= self.xz * self.xz:
            candidates.append(self.const)
        return min(candidates)


def variance_form(cov: CovarianceSpec, q: ScalarLike) -> QuadraticForm:
    """``Var(Y~ | X~ = x, Z~ = z)`` of the classical version, as a quadratic form.

    Works for any 3x3 covariance of ``(X, Y, Z)`` with non-degenerate
    ``(X, Z)``; variables are unstandardized, so for unit diagonal this is
    the usual standardized expression. Every quantity reduces to a
    rational function of the covariance entries.
    """
    q = as_scalar(q)
    if cov.size != 3:
        raise ValueError("expected a 3x3 covariance")
    vx, vy, vz = cov[0, 0], cov[1, 1], cov[2, 2]
    cxy, cyz, cxz = cov[0, 1], cov[1, 2], cov[0, 2]
    det_xz = vx * vz - cxz * cxz
    if vx == 0 or vz == 0 or det_xz == 0:
        raise ValueError("X and Z are linearly dependent: conditional variance is degenerate")
    # regression E(Y|X,Z) = alpha X + beta Z in unstandardized variables
    alpha = (cxy * vz - cyz * cxz) / det_xz
    beta = (cyz * vx - cxy * cxz) / det_xz
    r2 = cxz * cxz / (vx * vz)
    damp = 1 - q * r2
    ab = alpha * beta
    xx = ab * (1 - q) * cxz / (vx * damp)
    zz = ab * (1 - q) * cxz / (vz * damp)
    xz = ab * (1 + q) * (1 - r2) / damp - 2 * ab
    const = (vy - alpha * alpha * vx - beta * beta * vz
             - ab * cxz * (2 * (1 - q) + (1 + q) * (1 - r2)) / damp)
    return QuadraticForm(xx=xx, xz=xz, zz=zz, const=const)


def support_square(q: ScalarLike) -> Fraction:
    """``(2/sqrt(1-q))^2``, the squared half-width of the support of ``ν_q``."""
    return 4 / (1 - as_scalar(q))


def _standardized_triplet(cov: CovarianceSpec) -> tuple[Fraction, Fraction, Fraction]:
    if cov.size != 3:
        raise ValueError(f"expected a 3x3 covariance, got {cov.size}x{cov.size}")
    if not cov.standardized:
        raise ValueError("covariance must be standardized (unit diagonal)")
    fg, gh, fh = cov[0, 1], cov[1, 2], cov[0, 2]
    if fh * fh == 1:
        raise ValueError("<f,h>^2 = 1: f and h are linearly dependent")
    return fg, gh, fh


def variance_min(cov: CovarianceSpec, q: ScalarLike) -> Fraction:
    """Exact minimum of ``Var(Y~|X~,Z~)`` over the closed support square."""
    q = check_q(q)
    _standardized_triplet(cov)
    return variance_form(cov, q).box_minimum(support_square(q))


@dataclass(frozen=True)
class FeasibilityVerdict:
    bell_applicable: bool
    bell_satisfied: bool | None
    variance_min: Fraction | None
    variance_nonnegative: bool
    verdict: Verdict
    branch: str | None = None
    """Which hypothesis made the Bell inequality applicable, if any."""


def bell_check(cov: CovarianceSpec, q: ScalarLike) -> FeasibilityVerdict:
    """Decide whether a standardized triplet covariance is excluded.

    ``NO_CLASSICAL_VERSION`` means a necessary condition fails;
    ``NOT_EXCLUDED`` never claims that a classical version exists.
    For ``q = -1`` only the Bell inequality is used.
    """
    q = check_q(q, allow_minus_one=True)
    fg, gh, fh = _standardized_triplet(cov)

    if q == -1:
        branch = "q=-1"
    elif fh == 0:
        branch = "orthogonal"
    elif 0 < fh < 1 and fg * gh <= fh:
        branch = "sub-Markov"
    else:
        branch = None
    applicable = branch is not None
    satisfied = 1 - fh >= abs(fg - gh)

    if q == -1:
        vmin, nonneg = None, True
    else:
        vmin = variance_min(cov, q)
        nonneg = vmin >= 0

    excluded = (applicable and not satisfied) or not nonneg
    return FeasibilityVerdict(
        bell_applicable=applicable,
        bell_satisfied=satisfied,
        variance_min=vmin,
        variance_nonnegative=nonneg,
        verdict=Verdict.NO_CLASSICAL_VERSION if excluded else Verdict.NOT_EXCLUDED,
        branch=branch,
    )


def e1_region(rho: ScalarLike, fg: ScalarLike) -> bool:
    """Whether ``<f,h> = <g,h> = rho``, ``<f,g> = fg`` lies in the excluded strip.

    The strip is ``2 rho^2 - 1 < fg < 2 rho - 1``; there no classical
    version exists for any ``-1 <= q < 1``.
    """
    rho, fg = as_scalar(rho), as_scalar(fg)
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if 2 * rho * rho > 1 + fg:
        raise ValueError(f"covariance is not PSD: 2 rho^2 = {2 * rho * rho} > 1 + fg = {1 + fg}")
    return 2 * rho * rho - 1 < fg < 2 * rho - 1


def bm_cond_variance(t_prev: ScalarLike, s: ScalarLike, t: ScalarLike, q: ScalarLike,
                     x_prev: ScalarLike, x_t: ScalarLike) -> Fraction:
    """Conditional variance of the classical q-Brownian motion at an interior time.

    ``Var(X~_s | X~_{t_prev} = x_prev, X~_t = x_t)`` for
    ``t_prev < s < t`` with covariance ``min(s, t)``; by the Markov property
    earlier times drop out.
    """
    t_prev, s, t = as_scalar(t_prev), as_scalar(s), as_scalar(t)
    q = check_q(q)
    if t_prev < 0:
        raise ValueError("times must be non-negative")
    if not t_prev <= s <= t or t_prev == t:
        raise ValueError(f"expected t_prev < s < t, got {t_prev}, {s}, {t}")
    if t_prev == 0:
        raise ValueError("t_prev must be positive")
    cov = CovarianceSpec(((t_prev, t_prev, t_prev), (t_prev, s, s), (t_prev, s, t)))
    return variance_form(cov, q)(as_scalar(x_prev), as_scalar(x_t))


def bm_form(t_prev: ScalarLike, s: ScalarLike, t: ScalarLike, q: ScalarLike) -> QuadraticForm:
    """The quadratic in ``(x_prev, x_t)`` behind :func:`bm_cond_variance`."""
    t_prev, s, t = as_scalar(t_prev), as_scalar(s), as_scalar(t)
    cov = CovarianceSpec(((t_prev, t_prev, t_prev), (t_prev, s, s), (t_prev, s, t)))
    return variance_form(cov, check_q(q))


@dataclass(frozen=True)
class ScanRow:
    rho: Fraction
    fg: Fraction
    q: Fraction
    verdict: Verdict
    bell_applicable: bool | None = None
    bell_satisfied: bool | None = None
    variance_min: Fraction | None = None


def region_scan(rho_grid: Sequence[ScalarLike], fg_grid: Sequence[ScalarLike],
                q: ScalarLike) -> list[ScanRow]:
    """Tabulate :func:`bell_check` over ``<f,h> = <g,h> = rho``, ``<f,g> = fg``.

    Rows come out rho-major in the given grid order. Points whose
    covariance is not PSD are reported as ``INVALID_PSD``, and
    ``rho^2 = 1`` as ``DEGENERATE``, instead of raising.
    """
    q = check_q(q, allow_minus_one=True)
    rows = []
    for rho in map(as_scalar, rho_grid):
        for fg in map(as_scalar, fg_grid):
            matrix = to_matrix(((1, fg, rho), (fg, 1, rho), (rho, rho, 1)))
            try:
                check_psd(matrix)
            except NotPSDError:
                rows.append(ScanRow(rho, fg, q, Verdict.INVALID_PSD))
                continue
            if rho * rho == 1:
                rows.append(ScanRow(rho, fg, q, Verdict.DEGENERATE))
                continue
            v = bell_check(CovarianceSpec(matrix), q)
            rows.append(ScanRow(rho, fg, q, v.verdict, v.bell_applicable, v.bell_satisfied, v.variance_min))
    return rows
