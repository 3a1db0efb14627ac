import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest

from qgauss.fock import (
    DegreeGuardError,
    TensorState,
    annihilate,
    create,
    field_apply,
    fock_inner,
    fock_inner_naive,
    inversions,
)
from qgauss.hilbert import GramSpace, inner
from qgauss.qcore import q_factorial

from conftest import random_gram

ORTHO3 = GramSpace(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def el(space, *idx):
    return TensorState(space, {tuple(idx): 1})


def random_keys(rng, dim, degree, count):
    return [tuple(rng.randrange(dim) for _ in range(degree)) for _ in range(count)]


def test_inversions():
    assert inversions((1, 2, 3)) == 0
    assert inversions((2, 1)) == 1
    assert inversions((3, 2, 1)) == 3
    with pytest.raises(ValueError):
        inversions((1, 1))


def test_inversion_generating_function():
    # sum over S_n of q^|sigma| is [n]_q!
    q = F(2, 3)
    for n in range(6):
        total = sum(q ** inversions(p) for p in itertools.permutations(range(n)))
        assert total == q_factorial(n, q)


def test_naive_inner_examples():
    q = F(1, 3)
    f, g, _ = ORTHO3.basis_vectors()
    ff = TensorState.elementary([f, f])
    assert fock_inner_naive(el(ORTHO3, 0), el(ORTHO3, 1), q) == inner(f, g)
    assert fock_inner_naive(ff, ff, q) == 1 + q
    assert fock_inner_naive(el(ORTHO3, 0, 1), el(ORTHO3, 1, 0), q) == q


def test_naive_degree_guard():
    s = el(ORTHO3, *([0] * 9))
    with pytest.raises(DegreeGuardError):
        fock_inner_naive(s, s, F(1, 2))


def test_fast_inner_examples(rng):
    q = F(-2, 5)
    assert fock_inner(el(ORTHO3, 0, 1), el(ORTHO3, 0), q) == 0
    f3 = el(ORTHO3, 0, 0, 0)
    assert fock_inner(f3, f3, q) == (1 + q) * (1 + q + q * q)
    space = random_gram(rng)
    u = TensorState(space, {k: rng.randint(-3, 3) for k in random_keys(rng, 3, 5, 4)})
    v = TensorState(space, {k: rng.randint(-3, 3) for k in random_keys(rng, 3, 5, 4)})
    assert fock_inner(u, v, q) == fock_inner_naive(u, v, q)


@pytest.mark.parametrize("seed", range(3))
def test_fast_matches_naive_up_to_degree_6(seed):
    rng = random.Random(seed)
    space = random_gram(rng)
    q = F(rng.randint(-9, 9), 10)
    for degree in range(7):
        for left, right in zip(random_keys(rng, 3, degree, 6), random_keys(rng, 3, degree, 6)):
            u, v = el(space, *left), el(space, *right)
            assert fock_inner(u, v, q) == fock_inner_naive(u, v, q)


def test_inner_symmetric(rng):
    space = random_gram(rng)
    q = F(3, 7)
    for degree in range(5):
        for left, right in zip(random_keys(rng, 3, degree, 4), random_keys(rng, 3, degree, 4)):
            u, v = el(space, *left), el(space, *right)
            assert fock_inner(u, v, q) == fock_inner(v, u, q)


def test_annihilate_examples():
    q = F(1, 4)
    space = GramSpace(((1, F(1, 2), F(1, 3)), (F(1, 2), 1, F(1, 5)), (F(1, 3), F(1, 5), 1)))
    f, g, h = space.basis_vectors()
    vac = TensorState.vacuum(space)
    assert annihilate(f, vac, q).is_zero()
    assert annihilate(f, el(space, 1), q) == inner(f, g) * vac
    expected = inner(f, g) * el(space, 2) + q * inner(f, h) * el(space, 1)
    assert annihilate(f, el(space, 1, 2), q) == expected


def test_create_examples():
    e1, e2, e3 = ORTHO3.basis_vectors()
    vac = TensorState.vacuum(ORTHO3)
    assert create(e1, vac) == el(ORTHO3, 0)
    assert create(e1, el(ORTHO3, 1, 2)) == el(ORTHO3, 0, 1, 2)
    s = create(e1 + e2, vac)
    assert s == el(ORTHO3, 0) + el(ORTHO3, 1)
    assert s.degrees() == {1} and len(s) == 2


def test_field_examples():
    q = F(1, 2)
    f = ORTHO3.basis(0)
    vac = TensorState.vacuum(ORTHO3)
    assert field_apply(f, vac, q) == el(ORTHO3, 0)
    assert field_apply(f, el(ORTHO3, 0), q) == vac + el(ORTHO3, 0, 0)
    s = el(ORTHO3, 0, 1) + 3 * el(ORTHO3, 2)
    assert field_apply(2 * f, s, q) == 2 * field_apply(f, s, q)


@pytest.mark.parametrize("seed", range(3))
def test_adjointness(seed):
    rng = random.Random(100 + seed)
    space = random_gram(rng)
    q = F(rng.randint(-9, 9), 10)
    vecs = space.basis_vectors()
    f = vecs[0] + F(1, 2) * vecs[2]
    for du in range(1, 6):
        dv = du - 1
        if dv > 4:
            continue
        for left, right in zip(random_keys(rng, 3, du, 3), random_keys(rng, 3, dv, 3)):
            u, v = el(space, *left), el(space, *right)
            assert fock_inner(annihilate(f, u, q), v, q) == fock_inner(u, create(f, v), q)


def commutator_residual(f, g, s, q):
    lhs = annihilate(f, create(g, s), q) - q * create(g, annihilate(f, s, q))
    return lhs - inner(f, g) * s


def test_commutation_relation_small(rng):
    space = random_gram(rng)
    q = F(-3, 8)
    f, g, h = space.basis_vectors()
    for degree in range(4):
        for key in itertools.product(range(3), repeat=degree):
            assert commutator_residual(f + h, g, el(space, *key), q).is_zero()


@pytest.mark.parametrize("q", [F(-9, 10), F(0), F(9, 10)])
def test_fock_gram_psd_spot_check(q):
    space = GramSpace(((1, F(1, 2)), (F(1, 2), 1)))
    keys = [(), (0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1)]
    states = [el(space, *k) for k in keys]
    gram = [[fock_inner(u, v, q) for v in states] for u in states]
    minors = [np.linalg.det(np.array(gram, dtype=float)[:k, :k]) for k in range(1, len(keys) + 1)]
    assert all(m >= -1e-12 for m in minors)
