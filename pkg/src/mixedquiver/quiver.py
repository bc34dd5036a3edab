"""Quivers with a vertex partition, their doubled and hat quivers.

Vertices are the integers ``1..n``. Arrows carry string ids; the linear
order on arrows used to number hat-quiver arrows is declaration order.
A vertex of the doubled quiver is a pair ``(v, starred)``; only ordinary
vertices have starred copies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple


class QuiverError(ValueError):
    """Invalid quiver data. ``invariant`` names the violated condition."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant

    def to_json(self):
        return {"error": "QuiverError", "invariant": self.invariant, "message": str(self)}


class Arrow(NamedTuple):
    id: str
    origin: int
    end: int


class Step(NamedTuple):
    """One letter of a path: an arrow of Q, barred when it stands for the transpose."""

    arrow: str
    bar: bool = False

    def flip(self) -> "Step":
        return Step(self.arrow, not self.bar)

    def __str__(self):
        return ("~" if self.bar else "") + self.arrow


A1, A2, A3 = 1, 2, 3


@dataclass(frozen=True)
class Quiver:
    n: int
    arrows: tuple[Arrow, ...]
    ordinary: tuple[int, ...]
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arrows", tuple(Arrow(*a) for a in self.arrows))
        object.__setattr__(self, "ordinary", tuple(self.ordinary))
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        verts = set(range(1, self.n + 1))
        seen: list[int] = list(self.ordinary)
        for p in self.pairs:
            if len(p) != 2 or p[0] == p[1]:
                raise QuiverError("pair-distinct", f"pair {p} must have two distinct vertices")
            seen.extend(p)
        if sorted(seen) != sorted(verts):
            raise QuiverError(
                "partition",
                "every vertex must lie in exactly one cell (ordinary or one pair)",
            )
        ids = [a.id for a in self.arrows]
        if len(set(ids)) != len(ids):
            raise QuiverError("arrow-ids", "arrow ids must be unique")
        for a in self.arrows:
            if a.origin not in verts or a.end not in verts:
                raise QuiverError("arrow-endpoints", f"arrow {a.id} has an endpoint outside 1..{self.n}")

    @property
    def vertices(self):
        return range(1, self.n + 1)

    def arrow(self, arrow_id: str) -> Arrow:
        for a in self.arrows:
            if a.id == arrow_id:
                return a
        raise KeyError(arrow_id)

    @property
    def arrow_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.arrows)

    def is_ordinary(self, v: int) -> bool:
        return v in self.ordinary

    def is_starred(self, v: int) -> bool:
        """True for the second member j_q of a pair (its space is replaced by the dual)."""
        return any(v == j for _, j in self.pairs)

    def pair_of(self, v: int) -> int | None:
        for q, p in enumerate(self.pairs):
            if v in p:
                return q
        return None

    def partner(self, v: int) -> int:
        q = self.pair_of(v)
        if q is None:
            raise ValueError(f"vertex {v} is ordinary")
        i, j = self.pairs[q]
        return j if v == i else i

    def base_vertex(self, v: int) -> int:
        """The vertex whose group factor acts at ``v`` (``i_q`` for both members of a pair)."""
        q = self.pair_of(v)
        return v if q is None else self.pairs[q][0]

    @property
    def base_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in self.vertices if not self.is_starred(v))

    # -- doubled quiver helpers ------------------------------------------------
    def phi(self, w: tuple[int, bool]) -> tuple[int, bool]:
        """The vertex involution of the doubled quiver: v <-> v* or i_q <-> j_q."""
        v, star = w
        if self.is_ordinary(v):
            return (v, not star)
        return (self.partner(v), False)

    def step_origin(self, s: Step) -> tuple[int, bool]:
        a = self.arrow(s.arrow)
        return self.phi((a.end, False)) if s.bar else (a.origin, False)

    def step_end(self, s: Step) -> tuple[int, bool]:
        a = self.arrow(s.arrow)
        return self.phi((a.origin, False)) if s.bar else (a.end, False)

    def to_json(self, dims: Mapping[int, int] | None = None) -> dict:
        out = {
            "vertices": self.n,
            "ordinary": list(self.ordinary),
            "pairs": [list(p) for p in self.pairs],
            "arrows": [{"id": a.id, "from": a.origin, "to": a.end} for a in self.arrows],
        }
        if dims is not None:
            out["dims"] = {str(k): v for k, v in dims.items()}
        return out


def quiver_from_json(data: Mapping) -> tuple[Quiver, dict[int, int] | None]:
    """Parse the JSON quiver format; returns the quiver and the optional dims map."""
    try:
        n = int(data["vertices"])
        arrows = [Arrow(str(a["id"]), int(a["from"]), int(a["to"])) for a in data["arrows"]]
        ordinary = [int(v) for v in data.get("ordinary", [])]
        pairs = [(int(i), int(j)) for i, j in data.get("pairs", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise QuiverError("json-schema", f"malformed quiver JSON ({exc})") from None
    q = Quiver(n, tuple(arrows), tuple(ordinary), tuple(pairs))
    dims = data.get("dims")
    if dims is not None:
        dims = {int(k): int(v) for k, v in dims.items()}
    return q, dims


def load_quiver(path) -> tuple[Quiver, dict[int, int] | None]:
    with open(path) as fh:
        return quiver_from_json(json.load(fh))


@dataclass(frozen=True)
class DimensionVector:
    """Per-vertex dimensions ``d``; the star flags come from the partition."""

    quiver: Quiver
    dims: tuple[int, ...]

    def __post_init__(self):
        q = self.quiver
        if len(self.dims) != q.n:
            raise QuiverError("dims-length", f"expected {q.n} dimensions")
        if any(d < 1 for d in self.dims):
            raise QuiverError("dims-positive", "dimensions must be positive")
        for i, j in q.pairs:
            if self.dims[i - 1] != self.dims[j - 1]:
                raise QuiverError("compatible", f"d_{i} != d_{j} for pair ({i}, {j})")

    @classmethod
    def of(cls, quiver: Quiver, dims: Mapping[int, int] | Iterable[int] | int) -> "DimensionVector":
        """Accepts a mapping vertex -> d, a sequence, or one integer for all vertices."""
        if isinstance(dims, int):
            return cls(quiver, (dims,) * quiver.n)
        if isinstance(dims, Mapping):
            missing = [v for v in quiver.vertices if v not in dims]
            if missing:
                raise QuiverError("dims-length", f"no dimension for vertices {missing}")
            return cls(quiver, tuple(int(dims[v]) for v in quiver.vertices))
        return cls(quiver, tuple(int(d) for d in dims))

    def __getitem__(self, v) -> int:
        if isinstance(v, tuple):
            v = v[0]
        return self.dims[v - 1]

    @property
    def starred(self) -> frozenset[int]:
        return frozenset(v for v in self.quiver.vertices if self.quiver.is_starred(v))

    def shape(self, arrow_id: str) -> tuple[int, int]:
        a = self.quiver.arrow(arrow_id)
        return (self[a.end], self[a.origin])

    def max_dim(self) -> int:
        return max(self.dims)


def parse_dims(text: str) -> dict[int, int]:
    """Parse ``"1:2,2:2"``."""
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            v, d = part.split(":")
            out[int(v)] = int(d)
        except ValueError:
            raise QuiverError("dims-syntax", f"bad dims entry {part!r}; expected vertex:dim") from None
    return out


def classify_arrows(q: Quiver, dv: DimensionVector | None = None) -> dict[str, int]:
    """Assign each arrow to A1 (no starred endpoint), A2 (ends at some j_q) or A3 (starts at some j_q)."""
    if dv is not None and dv.quiver != q:
        raise QuiverError("compatible", "dimension vector belongs to another quiver")
    classes = {}
    for a in q.arrows:
        si, st = q.is_starred(a.origin), q.is_starred(a.end)
        if si and st:
            raise QuiverError(
                "dual-to-dual",
                f"arrow {a.id} joins two starred vertices; such arrows are eliminated beforehand",
            )
        classes[a.id] = A3 if si else A2 if st else A1
    return classes


@dataclass(frozen=True)
class DoubledQuiver:
    """Q^(d): vertices V + V*_ord, arrows A + bar(A), barred arrows stored as Steps with bar=True."""

    quiver: Quiver

    @property
    def vertices(self) -> tuple[tuple[int, bool], ...]:
        q = self.quiver
        return tuple((v, False) for v in q.vertices) + tuple((v, True) for v in q.ordinary)

    @property
    def arrows(self) -> tuple[Step, ...]:
        return tuple(Step(a.id, b) for b in (False, True) for a in self.quiver.arrows)

    def origin(self, s: Step):
        return self.quiver.step_origin(s)

    def end(self, s: Step):
        return self.quiver.step_end(s)

    @staticmethod
    def iota(s: Step) -> Step:
        return s.flip()

    def out_steps(self, w) -> list[Step]:
        return [s for s in self.arrows if self.origin(s) == w]

    def in_steps(self, w) -> list[Step]:
        return [s for s in self.arrows if self.end(s) == w]


def build_doubled(q: Quiver) -> DoubledQuiver:
    return DoubledQuiver(q)


@dataclass(frozen=True)
class Multidegree:
    quiver: Quiver
    degrees: tuple[int, ...]  # in arrow declaration order

    @classmethod
    def of(cls, q: Quiver, rbar: Mapping[str, int] | Iterable[int]) -> "Multidegree":
        if isinstance(rbar, Mapping):
            unknown = set(rbar) - set(q.arrow_ids)
            if unknown:
                raise QuiverError("multidegree", f"unknown arrows {sorted(unknown)}")
            return cls(q, tuple(int(rbar.get(a, 0)) for a in q.arrow_ids))
        degrees = tuple(int(x) for x in rbar)
        if len(degrees) != len(q.arrows):
            raise QuiverError("multidegree", "one degree per arrow expected")
        return cls(q, degrees)

    def __post_init__(self):
        if any(x < 0 for x in self.degrees):
            raise QuiverError("multidegree", "degrees must be non-negative")

    def __getitem__(self, arrow_id: str) -> int:
        return self.degrees[self.quiver.arrow_ids.index(arrow_id)]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.quiver.arrow_ids, self.degrees))

    @property
    def r(self) -> int:
        return sum(self.degrees)

    def _class_total(self, cls_: int) -> int:
        classes = classify_arrows(self.quiver)
        return sum(d for a, d in zip(self.quiver.arrow_ids, self.degrees) if classes[a] == cls_)

    @property
    def s(self) -> int:
        return self._class_total(A2)

    @property
    def t(self) -> int:
        return self.r - 2 * self.s

    def is_nonvacuous(self) -> bool:
        return self._class_total(A2) == self._class_total(A3)


@dataclass(frozen=True)
class HatQuiver:
    """Q-hat: arrow ``a`` of Q is split into arrows numbered ``seg[a]`` (1-based)."""

    quiver: Quiver
    rbar: Multidegree
    order: tuple[str, ...]
    f: tuple[str, ...]  # f[j-1] is the arrow of Q that hat-arrow j specializes to
    segments: Mapping[str, range] = field(hash=False, compare=False)

    @property
    def r(self) -> int:
        return len(self.f)

    @property
    def s(self) -> int:
        return self.rbar.s

    @property
    def t(self) -> int:
        return self.r - 2 * self.s

    def arrow_class(self, j: int) -> int:
        """Class of hat arrow j by position: [1,t] -> A1, [t+1,t+s] -> A2, rest -> A3."""
        if not 1 <= j <= self.r:
            raise IndexError(j)
        if j <= self.t:
            return A1
        return A2 if j <= self.t + self.s else A3

    def origin(self, j: int) -> int:
        return self.quiver.arrow(self.f[j - 1]).origin

    def end(self, j: int) -> int:
        return self.quiver.arrow(self.f[j - 1]).end


def build_hat(q: Quiver, rbar: Multidegree | Mapping[str, int] | Iterable[int], order: Iterable[str] | None = None) -> HatQuiver:
    if not isinstance(rbar, Multidegree):
        rbar = Multidegree.of(q, rbar)
    if not rbar.is_nonvacuous():
        raise QuiverError(
            "nonvacuity", "degrees over A2 and over A3 must have equal sums (else the component is zero)"
        )
    classes = classify_arrows(q)
    if order is None:
        # declaration order, stably grouped so that A1 < A2 < A3
        order = tuple(sorted(q.arrow_ids, key=lambda a: classes[a]))
    else:
        order = tuple(order)
        if sorted(order) != sorted(q.arrow_ids):
            raise QuiverError("order", "order must list every arrow once")
        if [classes[a] for a in order] != sorted(classes[a] for a in order):
            raise QuiverError("order", "order must place A1 arrows before A2 before A3")
    f: list[str] = []
    segments = {}
    for a in order:
        start = len(f) + 1
        f.extend([a] * rbar[a])
        segments[a] = range(start, len(f) + 1)
    return HatQuiver(q, rbar, order, tuple(f), segments)


@dataclass(frozen=True)
class AdmissibilitySets:
    """The argument sets (``T``) and image sets (``I``) of the admissibility conditions.

    Keys are ``("v", i)`` for an ordinary vertex and ``("q", q)`` for a pair index.
    """

    hat: HatQuiver
    T: Mapping[tuple[str, int], frozenset[int]] = field(hash=False, compare=False)
    I: Mapping[tuple[str, int], frozenset[int]] = field(hash=False, compare=False)

    @property
    def keys(self):
        return tuple(self.T)

    def dimension_of(self, key, dv: DimensionVector) -> int:
        kind, x = key
        if kind == "v":
            return dv[x]
        return dv[self.hat.quiver.pairs[x][0]]


def admissibility_sets(hq: HatQuiver) -> AdmissibilitySets:
    q = hq.quiver
    s = hq.s
    js = range(1, hq.r + 1)
    cls = hq.arrow_class

    def ends_at(v):
        return {j for j in js if hq.end(j) == v}

    def starts_at(v):
        return {j for j in js if hq.origin(j) == v}

    T, I = {}, {}
    for v in q.ordinary:
        T[("v", v)] = frozenset(
            {j for j in ends_at(v) if cls(j) == A1} | {j - s for j in ends_at(v) if cls(j) == A3}
        )
        I[("v", v)] = frozenset(
            {j for j in starts_at(v) if cls(j) == A1} | {j + s for j in starts_at(v) if cls(j) == A2}
        )
    for k, (iq, jq) in enumerate(q.pairs):
        T[("q", k)] = frozenset(
            {j for j in ends_at(iq) if cls(j) == A1}
            | {j - s for j in ends_at(iq) if cls(j) == A3}
            | starts_at(jq)
        )
        I[("q", k)] = frozenset(
            {j for j in starts_at(iq) if cls(j) == A1}
            | {j + s for j in starts_at(iq) if cls(j) == A2}
            | ends_at(jq)
        )
    return AdmissibilitySets(hq, T, I)


# -- standard example quivers ----------------------------------------------------

def loop_quiver(m: int = 1, names: Iterable[str] | None = None) -> Quiver:
    """One ordinary vertex with ``m`` loops (conjugation action of GL(d))."""
    names = list(names) if names is not None else (["a"] if m == 1 else [f"a{i}" for i in range(1, m + 1)])
    return Quiver(1, tuple(Arrow(x, 1, 1) for x in names), (1,))


def model_quiver() -> Quiver:
    """The three-arrow quiver defining sigma_{r,s}: pair (1, 2), loop X at 1, Y: 1->2, Z: 2->1."""
    return Quiver(2, (Arrow("X", 1, 1), Arrow("Y", 1, 2), Arrow("Z", 2, 1)), (), ((1, 2),))


def ortho_quiver(m: int = 1) -> Quiver:
    """Pair (1, 2), loops a1..am at 1, b: 1->2, c: 2->1 (orthogonal/symplectic model)."""
    loops = tuple(Arrow(f"a{i}", 1, 1) for i in range(1, m + 1))
    return Quiver(2, loops + (Arrow("b", 1, 2), Arrow("c", 2, 1)), (), ((1, 2),))
