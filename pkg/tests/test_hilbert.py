from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from qgauss.hilbert import (
    CovarianceSpec,
    GramSpace,
    NotPSDError,
    NotSymmetricError,
    SpaceMismatchError,
    check_psd,
    covariance_space,
    gram_equivalent,
    inner,
    project,
    to_matrix,
)

from conftest import random_gram


def test_inner_examples():
    e1, e2 = GramSpace(((1, 0), (0, 1))).basis_vectors()
    assert inner(e1, e2) == 0
    u1, u2 = GramSpace(((1, F(1, 2)), (F(1, 2), 1))).basis_vectors()
    assert inner(u1, u2) == F(1, 2)
    assert inner(2 * u1, 3 * u1) == 6


def test_inner_rejects_foreign_vectors():
    a = GramSpace(((1,),)).basis(0)
    b = GramSpace(((2,),)).basis(0)
    with pytest.raises(SpaceMismatchError):
        inner(a, b)


def test_project_examples():
    space = GramSpace(((1, F(1, 2), F(1, 2)), (F(1, 2), 1, F(1, 2)), (F(1, 2), F(1, 2), 1)))
    f, g, h = space.basis_vectors()
    assert gram_equivalent(project(g, [f]), F(1, 2) * f)
    assert gram_equivalent(project(f, [f, h]), f)
    # normal equations [[1, 1/2], [1/2, 1]] c = [1/2, 1/2] give c = (1/3, 1/3)
    assert project(g, [f, h]) == F(1, 3) * f + F(1, 3) * h


def test_project_dependent_family():
    space = GramSpace(((1, 0), (0, 1)))
    e1, e2 = space.basis_vectors()
    p = project(e1 + e2, [e1, 2 * e1, -e1])
    assert gram_equivalent(p, e1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_projection_idempotent_and_orthogonal(seed):
    import random

    rng = random.Random(seed)
    space = random_gram(rng)
    vecs = space.basis_vectors()
    x = space.vector([rng.randint(-3, 3) for _ in range(3)])
    family = [vecs[0], vecs[0] + rng.randint(-2, 2) * vecs[1]]
    p = project(x, family)
    assert gram_equivalent(project(p, family), p)
    for s in family:
        assert inner(x - p, s) == 0


def test_covariance_space_round_trip():
    cov = CovarianceSpec(((1, F(1, 2), F(1, 4)), (F(1, 2), 1, F(1, 2)), (F(1, 4), F(1, 2), 1)))
    _, (f, g, h) = covariance_space(cov)
    assert inner(f, g) == F(1, 2) and inner(g, h) == F(1, 2) and inner(f, h) == F(1, 4)
    vecs = covariance_space(CovarianceSpec(((1, 0, 0), (0, 1, 0), (0, 0, 1))))[1]
    assert [[inner(u, v) for v in vecs] for u in vecs] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_not_psd_reports_minor():
    with pytest.raises(NotPSDError) as info:
        CovarianceSpec(((1, 2), (2, 1)))
    assert info.value.minor_order == 2
    assert info.value.minor_value == -3
    assert "order 2" in str(info.value)


def test_not_symmetric():
    with pytest.raises(NotSymmetricError):
        CovarianceSpec(((1, 0), (F(1, 2), 1)))


def test_semidefinite_accepted():
    assert check_psd(to_matrix(((1, 1), (1, 1)))) == 1
    assert check_psd(to_matrix(((0, 0), (0, 2)))) == 1
    # leading minors non-negative yet indefinite
    with pytest.raises(NotPSDError):
        check_psd(to_matrix(((0, 0), (0, -1))))
    with pytest.raises(NotPSDError):
        check_psd(to_matrix(((0, 1), (1, 0))))
