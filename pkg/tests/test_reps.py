import random
from fractions import Fraction

import pytest

from mixedquiver.fields import QQ, PrimeField, Rationals
from mixedquiver.matrix import Matrix, ShapeError, SingularMatrixError
from mixedquiver.quiver import DimensionVector, Quiver, model_quiver
from mixedquiver.reps import (
    GroupElement,
    RepPoint,
    act,
    cayley,
    cayley_orthogonal,
    cayley_symplectic,
    random_group_element,
    random_rep,
    skew_form,
)


def test_shapes_are_checked():
    q = Quiver(2, [("a", 1, 2)], (1, 2))
    dv = DimensionVector.of(q, [2, 3])
    p = random_rep(q, dv, QQ, 0)
    assert p["a"].shape == (3, 2)
    with pytest.raises(ShapeError):
        RepPoint(dv, QQ, {"a": Matrix.zeros(2, 3)})
    with pytest.raises(SingularMatrixError):
        GroupElement(dv, {1: Matrix.zeros(2, 2), 2: Matrix.identity(3)})


def test_action_is_a_group_action():
    F = PrimeField(10007)
    q = model_quiver()
    dv = DimensionVector.of(q, 3)
    p = random_rep(q, dv, F, 1)
    g, h = random_group_element(dv, F, 2), random_group_element(dv, F, 3)
    assert act(act(p, h), g) == act(p, g * h)
    assert act(p, GroupElement.identity(dv, F)) == p


def test_starred_vertex_uses_inverse_transpose():
    q = model_quiver()
    dv = DimensionVector.of(q, 2)
    g = GroupElement(dv, {1: Matrix([[2, 0], [0, 1]])})
    assert g.effective(2) == Matrix([[Fraction(1, 2), 0], [0, 1]])


def test_cayley_rotation_by_quarter_turn():
    S = Matrix([[0, 1], [-1, 0]])
    assert cayley(S) == Matrix([[0, -1], [1, 0]])


def test_cayley_of_zero_is_identity():
    assert cayley(Matrix.zeros(3, 3)) == Matrix.identity(3)


@pytest.mark.parametrize("d", [1, 2, 3, 4])


def test_cayley_orthogonal(d):
    for seed in range(10):
        g = cayley_orthogonal(d, seed)
        assert g.T @ g == Matrix.identity(d)


@pytest.mark.parametrize("d", [2, 4, 6])


def test_cayley_symplectic(d):
    J = skew_form(d)
    for seed in range(10):
        g = cayley_symplectic(d, seed)
        assert g.T @ J @ g == J


def test_skew_form():
    J = skew_form(4)
    assert J.T == -J
    assert J @ J == -Matrix.identity(4)
    with pytest.raises(ValueError):
        skew_form(3)


def test_random_rep_is_deterministic():
    q = model_quiver()
    dv = DimensionVector.of(q, 2)
    assert random_rep(q, dv, QQ, 5) == random_rep(q, dv, QQ, random.Random(5))
    small = random_rep(q, dv, Rationals(), 5, entries=(-1, 0, 1))
    assert all(x in (-1, 0, 1) for m in small.mats.values() for row in m.rows for x in row)
