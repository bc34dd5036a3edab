"""Closed paths in the doubled quiver and linear combinations of trace products.

A word ``(s_1 s_2 ... s_k)`` denotes ``tr(Z(s_1) Z(s_2) ... Z(s_k))``, where
``Z(a) = Y(a)`` and ``Z(~a) = Y(a)^T``. The path is read right to left:
``s_k`` is traversed first, so composability means
``origin(s_i) == end(s_{i+1})``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .matrix import Matrix, ShapeError
from .quiver import DoubledQuiver, Quiver, Step
from .reps import RepPoint

Word = tuple[Step, ...]


class PathError(ValueError):
    """A step sequence that is not a (closed) path of the doubled quiver."""


def iota_word(word: Iterable[Step]) -> Word:
    """Involution on words: reverse and toggle every bar (trace of the transpose)."""
    return tuple(s.flip() for s in reversed(tuple(word)))


def _rotations(word: Word) -> Iterator[Word]:
    for i in range(len(word)):
        yield word[i:] + word[:i]


def canonical_word(word: Iterable[Step]) -> Word:
    """Lexicographically least rotation of the word or of its iota-image."""
    word = tuple(word)
    if not word:
        return word
    return min(
        min(_rotations(word)),
        min(_rotations(iota_word(word))),
    )


def smallest_period(word: Word) -> int:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return p
    return n


def check_closed(q: Quiver, word: Word) -> None:
    if not word:
        raise PathError("empty path")
    for s in word:
        q.arrow(s.arrow)  # KeyError for unknown arrows
    k = len(word)
    for i in range(k):
        left, right = word[i], word[(i + 1) % k]
        if q.step_origin(left) != q.step_end(right):
            raise PathError(
                f"not a closed path: {right} ends at {q.step_end(right)} but {left} starts at {q.step_origin(left)}"
            )


class CyclePath:
    """An equivalence class of closed paths under rotation and iota."""

    __slots__ = ("word", "_raw")

    def __init__(self, word: Iterable[Step], quiver: Quiver | None = None):
        raw = tuple(s if isinstance(s, Step) else Step(*s) for s in word)
        if quiver is not None:
            check_closed(quiver, raw)
        self._raw = raw
        self.word = canonical_word(raw)

    @property
    def raw(self) -> Word:
        return self._raw

    def __len__(self):
        return len(self.word)

    def __eq__(self, other):
        return isinstance(other, CyclePath) and self.word == other.word

    def __lt__(self, other):
        return (len(self.word), self.word) < (len(other.word), other.word)

    def __hash__(self):
        return hash(self.word)

    def is_primitive(self) -> bool:
        return smallest_period(self.word) == len(self.word)

    def power(self, k: int) -> "CyclePath":
        return CyclePath(self.word * k)

    def multidegree(self) -> dict[str, int]:
        deg: dict[str, int] = defaultdict(int)
        for s in self.word:
            deg[s.arrow] += 1
        return dict(deg)

    def __str__(self):
        return format_word(self.word)

    def __repr__(self):
        return f"CyclePath({self})"


def format_word(word: Iterable) -> str:
    return "(" + " ".join(str(s) for s in word) + ")"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str) -> list[Word]:
    """Parse ``"(c ~b a)(x)"`` into words; ``~`` marks a barred step."""
    words = []
    rest = _CYCLE_RE.sub("", text).strip()
    if rest:
        raise ValueError(f"cannot parse {text!r}")
    for m in _CYCLE_RE.finditer(text):
        tokens = m.group(1).split()
        words.append(tuple(Step(t[1:], True) if t.startswith("~") else Step(t, False) for t in tokens))
    return words


def canonicalize(c: CyclePath | Iterable[Step], quiver: Quiver | None = None) -> CyclePath:
    """Canonical representative; with a quiver, non-closed input is rejected."""
    if isinstance(c, CyclePath):
        if quiver is not None:
            check_closed(quiver, c.raw)
        return CyclePath(c.word)
    return CyclePath(c, quiver)


def enumerate_cycles(dq: DoubledQuiver, max_len: int, base_vertex=None) -> list[CyclePath]:
    """All cycle classes of length <= max_len, each once, sorted by (length, word).

    With ``base_vertex`` (a vertex of Q or a doubled vertex ``(v, starred)``)
    only classes having a representative starting there are kept.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    q = dq.quiver
    if base_vertex is not None and not isinstance(base_vertex, tuple):
        base_vertex = (base_vertex, False)
    out_steps = {w: dq.out_steps(w) for w in dq.vertices}
    found: set[Word] = set()

    # a word (s_1 .. s_k) is built from its first-traversed step s_k backwards
    def extend(word_rev: list[Step], start, here):
        k = len(word_rev)
        if k and here == start:
            found.add(canonical_word(tuple(reversed(word_rev))))
        if k == max_len:
            return
        for s in out_steps[here]:
            word_rev.append(s)
            extend(word_rev, start, dq.end(s))
            word_rev.pop()

    for w in dq.vertices:
        extend([], w, w)

    def visits(word: Word, v) -> bool:
        return any(q.step_end(s) == v for s in word) or any(
            q.step_end(s) == v for s in iota_word(word)
        )

    cycles = [CyclePath(w) for w in found if base_vertex is None or visits(w, base_vertex)]
    return sorted(cycles)


# -- evaluation ----------------------------------------------------------------

def step_matrix(p: RepPoint, s: Step) -> Matrix:
    m = p[s.arrow]
    return m.T if s.bar else m


def word_matrix(p: RepPoint, word: Word) -> Matrix:
    if not word:
        raise PathError("empty word has no matrix")
    m = step_matrix(p, word[0])
    for s in word[1:]:
        m = m @ step_matrix(p, s)
    return m


def eval_cycle(c: CyclePath | Iterable[Step], p: RepPoint):
    word = c.raw if isinstance(c, CyclePath) else tuple(c)
    try:
        m = word_matrix(p, word)
        return m.trace()
    except ShapeError as exc:
        raise PathError(f"non-admissible product {format_word(word)}: {exc}") from None


Monomial = tuple[CyclePath, ...]


class TraceExpression:
    """A Q-linear combination of products of traces; factors kept as sorted multisets.

    The empty product is the constant 1.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Iterable[CyclePath], object] | None = None):
        acc: dict[Monomial, Fraction] = defaultdict(Fraction)
        for factors, coeff in (terms or {}).items():
            key = tuple(sorted(f if isinstance(f, CyclePath) else CyclePath(f) for f in factors))
            acc[key] += Fraction(coeff)
        self.terms: dict[Monomial, Fraction] = {k: v for k, v in acc.items() if v != 0}

    @classmethod
    def constant(cls, c) -> "TraceExpression":
        return cls({(): c})

    @classmethod
    def trace(cls, word: Iterable[Step], coeff=1, quiver: Quiver | None = None) -> "TraceExpression":
        return cls({(CyclePath(word, quiver),): coeff})

    def __add__(self, other: "TraceExpression") -> "TraceExpression":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return TraceExpression(out)

    def __neg__(self):
        return TraceExpression({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TraceExpression":
        c = Fraction(c)
        return TraceExpression({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TraceExpression):
            return self.scale(other)
        out: dict = defaultdict(Fraction)
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[tuple(sorted(k1 + k2))] += v1 * v2
        return TraceExpression(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, TraceExpression) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def cycles(self) -> set[CyclePath]:
        return {c for k in self.terms for c in k}

    def degree(self) -> int:
        return max((sum(len(c) for c in k) for k in self.terms), default=0)

    def multidegrees(self) -> set[tuple[tuple[str, int], ...]]:
        out = set()
        for k in self.terms:
            deg: dict[str, int] = defaultdict(int)
            for c in k:
                for a, n in c.multidegree().items():
                    deg[a] += n
            out.add(tuple(sorted(deg.items())))
        return out

    def homogeneous_component(self, multidegree: Mapping[str, int]) -> "TraceExpression":
        want = tuple(sorted((a, n) for a, n in multidegree.items() if n))
        out = {}
        for k, v in self.terms.items():
            deg: dict[str, int] = defaultdict(int)
            for c in k:
                for a, n in c.multidegree().items():
                    deg[a] += n
            if tuple(sorted(deg.items())) == want:
                out[k] = v
        return TraceExpression(out)

    def validate(self, quiver: Quiver) -> None:
        """Raise PathError unless every factor is a closed path of the doubled quiver."""
        for c in self.cycles():
            if len(c):
                check_closed(quiver, c.word)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in sorted(self.terms.items(), key=lambda kv: (sum(map(len, kv[0])), kv[0])):
            mono = "".join(str(c) for c in k) or "1"
            parts.append(f"{v} {mono}" if v != 1 else mono)
        return " + ".join(parts)

    def __repr__(self):
        return f"TraceExpression({self})"

    def to_latex(self) -> str:
        def step(s):
            base = f"Y_{{{s.arrow}}}"
            return base + "^{T}" if s.bar else base

        parts = []
        for k, v in sorted(self.terms.items(), key=lambda kv: (sum(map(len, kv[0])), kv[0])):
            coef = "" if v == 1 else ("-" if v == -1 else f"\\frac{{{v.numerator}}}{{{v.denominator}}}" if v.denominator != 1 else str(v))
            mono = "".join(r"\operatorname{tr}(" + " ".join(step(s) for s in c.word) + ")" for c in k) or "1"
            parts.append(coef + mono)
        return " + ".join(parts).replace("+ -", "- ") or "0"

    def to_json(self):
        return [
            {"coeff": str(v), "factors": [str(c) for c in k]}
            for k, v in sorted(self.terms.items(), key=lambda kv: (sum(map(len, kv[0])), kv[0]))
        ]


def eval_expr(e: TraceExpression, p: RepPoint, cycle_value=None):
    """Evaluate at a point. ``cycle_value`` overrides how a single trace factor is computed."""
    F = p.field
    cycle_value = cycle_value or eval_cycle
    cache = {}
    total = F.zero
    for factors, coeff in e.terms.items():
        term = F.coerce(coeff)
        for c in factors:
            if c not in cache:
                cache[c] = cycle_value(c, p)
            term = F.reduce(term * cache[c])
            if term == 0:
                break
        total = F.reduce(total + term)
    return total
