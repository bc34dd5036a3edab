"""Representation points, the mixed group action and test-point generators."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .fields import Field, QQ, Rationals
from .matrix import Matrix, ShapeError, SingularMatrixError
from .quiver import DimensionVector, Quiver


@dataclass(frozen=True)
class RepPoint:
    """A point of R(Q, t): one matrix of shape d_end x d_origin per arrow."""

    dv: DimensionVector
    field: Field
    mats: Mapping[str, Matrix]

    def __post_init__(self):
        q = self.dv.quiver
        if set(self.mats) != set(q.arrow_ids):
            raise ShapeError("a matrix is needed for every arrow")
        for a in q.arrow_ids:
            m = self.mats[a]
            if m.shape != self.dv.shape(a):
                raise ShapeError(f"arrow {a}: shape {m.shape}, expected {self.dv.shape(a)}")
            if m.field != self.field:
                raise ShapeError(f"arrow {a}: matrix over {m.field}, expected {self.field}")

    @property
    def quiver(self) -> Quiver:
        return self.dv.quiver

    def __getitem__(self, arrow_id: str) -> Matrix:
        return self.mats[arrow_id]

    def replace(self, **mats) -> "RepPoint":
        new = dict(self.mats)
        new.update(mats)
        return RepPoint(self.dv, self.field, new)

    def to_json(self):
        return {a: m.to_json() for a, m in self.mats.items()}

    def __eq__(self, other):
        return (
            isinstance(other, RepPoint)
            and self.dv == other.dv
            and self.field == other.field
            and dict(self.mats) == dict(other.mats)
        )

    def __hash__(self):
        return hash((self.dv, tuple(sorted(self.mats.items()))))


@dataclass(frozen=True)
class GroupElement:
    """An element of H(t): one invertible matrix per base vertex (ordinary vertex or i_q)."""

    dv: DimensionVector
    mats: Mapping[int, Matrix]

    def __post_init__(self):
        q = self.dv.quiver
        if set(self.mats) != set(q.base_vertices):
            raise ShapeError(f"group element needs matrices for vertices {q.base_vertices}")
        for v, g in self.mats.items():
            if g.shape != (self.dv[v], self.dv[v]):
                raise ShapeError(f"vertex {v}: group matrix has shape {g.shape}")
            if not g.is_invertible():
                raise SingularMatrixError(f"group matrix at vertex {v} is singular")

    def effective(self, v: int) -> Matrix:
        """The matrix acting on the space at ``v``: inverse transpose at a starred vertex."""
        q = self.dv.quiver
        g = self.mats[q.base_vertex(v)]
        return g.inverse().T if q.is_starred(v) else g

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.dv, {v: self.mats[v] @ other.mats[v] for v in self.mats})

    @classmethod
    def identity(cls, dv: DimensionVector, field: Field = QQ) -> "GroupElement":
        return cls(dv, {v: Matrix.identity(dv[v], field) for v in dv.quiver.base_vertices})


def random_rep(q: Quiver, dv: DimensionVector, field: Field, seed, entries=None) -> RepPoint:
    """Uniform entries over F_p, bounded integers over Q; deterministic in ``seed``.

    ``seed`` may be an int or a ``random.Random``. ``entries`` restricts the
    draw to a fixed set of values (used for small counterexamples).
    """
    if dv.quiver != q:
        raise ShapeError("dimension vector belongs to another quiver")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    mats = {}
    for a in q.arrow_ids:
        rows, cols = dv.shape(a)
        mats[a] = Matrix.random(rows, cols, field, rng, entries)
    return RepPoint(dv, field, mats)


def random_invertible(n: int, field: Field, rng: random.Random, tries: int = 100) -> Matrix:
    for _ in range(tries):
        g = Matrix.random(n, n, field, rng)
        if g.is_invertible():
            return g
    raise SingularMatrixError(f"no invertible {n}x{n} matrix after {tries} draws")


def random_group_element(dv: DimensionVector, field: Field, seed) -> GroupElement:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return GroupElement(dv, {v: random_invertible(dv[v], field, rng) for v in dv.quiver.base_vertices})


def act(p: RepPoint, g: GroupElement) -> RepPoint:
    """Y(a) -> G(t(a)) Y(a) G(i(a))^{-1}, where G is g_v, or its inverse transpose at a starred vertex."""
    if p.dv != g.dv:
        raise ShapeError("point and group element have different dimension vectors")
    q = p.quiver
    eff = {v: g.effective(v) for v in q.vertices}
    inv = {v: m.inverse() for v, m in eff.items()}
    return RepPoint(
        p.dv,
        p.field,
        {a.id: eff[a.end] @ p[a.id] @ inv[a.origin] for a in q.arrows},
    )


# -- orthogonal and symplectic test points --------------------------------------

def skew_form(d: int, field: Field = QQ) -> Matrix:
    """J(d): antidiagonal, +1 in the upper half of the rows and -1 in the lower half."""
    if d % 2:
        raise ValueError("the symplectic form needs an even dimension")
    return Matrix.from_function(
        d, d, lambda i, j: (1 if i < d // 2 else -1) if i + j == d - 1 else 0, field
    )


def cayley(S: Matrix) -> Matrix:
    """(I - S)(I + S)^{-1}."""
    ident = Matrix.identity(S.nrows, S.field)
    return (ident - S) @ (ident + S).inverse()


def _cayley_draw(make_S, tries):
    for _ in range(tries):
        S = make_S()
        ident = Matrix.identity(S.nrows, S.field)
        if (ident + S).det() != 0:
            return cayley(S)
    raise SingularMatrixError(f"det(I + S) = 0 in all {tries} draws")


def cayley_orthogonal(d: int, seed, field: Field | None = None, tries: int = 50) -> Matrix:
    """A random g with g^T g = I, from a random skew-symmetric S."""
    field = field or Rationals(3)
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)

    def make_S():
        upper = {(i, j): field.random_element(rng) for i in range(d) for j in range(i + 1, d)}
        return Matrix.from_function(
            d, d, lambda i, j: upper[(i, j)] if i < j else (-upper[(j, i)] if i > j else 0), field
        )

    return _cayley_draw(make_S, tries)


def cayley_symplectic(d: int, seed, field: Field | None = None, tries: int = 50) -> Matrix:
    """A random g with g^T J g = J, from S = J H with H random symmetric."""
    if d % 2:
        raise ValueError("symplectic matrices need an even dimension")
    field = field or Rationals(3)
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    J = skew_form(d, field)

    def make_S():
        upper = {(i, j): field.random_element(rng) for i in range(d) for j in range(i, d)}
        H = Matrix.from_function(d, d, lambda i, j: upper[(min(i, j), max(i, j))], field)
        return J @ H

    return _cayley_draw(make_S, tries)
