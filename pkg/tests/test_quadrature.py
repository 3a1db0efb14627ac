from fractions import Fraction as F

import numpy as np
import pytest

from qgauss.hilbert import GramSpace
from qgauss.moments import Field, vacuum_expectation
from qgauss.qcore import q_factorial
from qgauss.quadrature import check_orthogonality, gauss_rule, hermite_values, support_radius

Q_FLOAT = [-0.9, -0.5, 0.0, 0.5, 0.9]


def test_one_point_rule():
    rule = gauss_rule(1, 0.3)
    assert rule.nodes.tolist() == [0.0] and rule.weights.tolist() == [1.0]


def test_two_point_rule_q0():
    rule = gauss_rule(2, 0.0)
    np.testing.assert_allclose(rule.nodes, [-1.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(rule.weights, [0.5, 0.5], atol=1e-14)


@pytest.mark.parametrize("q", Q_FLOAT)
@pytest.mark.parametrize("N", [2, 7, 16, 33, 64])
def test_rule_invariants(N, q):
    rule = gauss_rule(N, q)
    r = support_radius(q)
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 1) < 1e-12
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(np.abs(rule.nodes) <= r + 1e-9)
    np.testing.assert_allclose(rule.nodes, -rule.nodes[::-1], atol=1e-12)
    np.testing.assert_allclose(rule.weights, rule.weights[::-1], atol=1e-12)


@pytest.mark.parametrize("q", [F(-1, 2), F(0), F(1, 2), F(9, 10)])
def test_even_moments_match_exact(q):
    f = GramSpace(((1,),)).basis(0)
    N = 6
    rule = gauss_rule(N, float(q))
    for k in range(0, N):
        exact = vacuum_expectation(Field(f) ** (2 * k), q)
        assert rule.moment(2 * k) == pytest.approx(float(exact), abs=1e-10, rel=1e-12)


def test_orthogonality_examples():
    assert check_orthogonality(5, 0.2, 0) < 1e-14
    assert check_orthogonality(32, 0.5, 8) <= 1e-9


@pytest.mark.parametrize("q", Q_FLOAT)
def test_second_moments_of_hermite(q):
    rule = gauss_rule(20, q)
    H = hermite_values(8, rule.nodes, q)
    for n in range(9):
        exact = float(q_factorial(n, F(q).limit_denominator(1000)))
        assert rule.integrate(H[n] ** 2) == pytest.approx(exact, rel=1e-10)


def test_input_validation():
    with pytest.raises(ValueError):
        gauss_rule(0, 0.0)
    with pytest.raises(ValueError):
        gauss_rule(3, 1.0)
    with pytest.raises(ValueError):
        check_orthogonality(4, 0.0, 4)
