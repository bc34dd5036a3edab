"""Relation generators under substitution, and randomized verification by evaluation."""

from __future__ import annotations

import itertools
import math
import random
import re
import time
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .fields import Field, PrimeField, derive_rng
from .matrix import Matrix
from .paths import (
    CyclePath,
    PathError,
    TraceExpression,
    Word,
    check_closed,
    enumerate_cycles,
    eval_expr,
    format_word,
    iota_word,
    parse_cycles,
)
from .quiver import A2, A3, DimensionVector, Multidegree, Quiver, Step, build_doubled, classify_arrows
from .reps import RepPoint, act, random_group_element, random_rep
from .trstar import DEFAULT_R_CAP, sigma_rs


class PathElement:
    """A Q-linear combination of nonempty paths of the doubled quiver, all from ``origin`` to ``end``.

    Words follow the trace convention: the last step is traversed first.
    """

    __slots__ = ("quiver", "terms", "origin", "end")

    def __init__(self, quiver: Quiver, terms: Mapping[Iterable[Step], object]):
        self.quiver = quiver
        acc: dict[Word, Fraction] = defaultdict(Fraction)
        for w, c in terms.items():
            acc[tuple(s if isinstance(s, Step) else Step(*s) for s in w)] += Fraction(c)
        self.terms = {w: c for w, c in acc.items() if c != 0}
        if not self.terms:
            raise PathError("a path element needs at least one path with nonzero coefficient")
        ends = set()
        for w in self.terms:
            if not w:
                raise PathError("paths in a substitution must have nonzero degree")
            for s in w:
                quiver.arrow(s.arrow)
            for left, right in zip(w, w[1:]):
                if quiver.step_origin(left) != quiver.step_end(right):
                    raise PathError(f"{format_word(w)} is not a path")
            ends.add((quiver.step_origin(w[-1]), quiver.step_end(w[0])))
        if len(ends) != 1:
            raise PathError("all paths of a path element must share origin and end")
        (self.origin, self.end), = ends

    @classmethod
    def of(cls, quiver: Quiver, text: str | Iterable[tuple[str, object]]) -> "PathElement":
        """From ``"(c b) + 2 (a)"``-style text or ``[(word_text, coeff), ...]``."""
        if isinstance(text, str):
            pairs = _parse_combination(text)
        else:
            pairs = list(text)
        terms: dict = defaultdict(Fraction)
        for wtext, c in pairs:
            (w,) = parse_cycles(wtext)
            terms[w] += Fraction(c)
        return cls(quiver, terms)

    @property
    def is_closed(self) -> bool:
        return self.origin == self.end

    def iota(self) -> "PathElement":
        return PathElement(self.quiver, {iota_word(w): c for w, c in self.terms.items()})

    def __add__(self, other: "PathElement") -> "PathElement":
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, Fraction(0)) + c
        return PathElement(self.quiver, terms)

    def __str__(self):
        return " + ".join(
            (format_word(w) if c == 1 else f"{c} {format_word(w)}") for w, c in sorted(self.terms.items())
        )

    def __repr__(self):
        return f"PathElement({self})"


def _parse_combination(text: str) -> list[tuple[str, Fraction]]:
    out = []
    for m in re.finditer(r"([+-]?)\s*([0-9/]*)\s*(\([^()]*\))", text):
        sign, num, word = m.groups()
        c = Fraction(num) if num else Fraction(1)
        out.append((word, -c if sign == "-" else c))
    if not out:
        raise ValueError(f"cannot parse path combination {text!r}")
    return out


def substitute(e: TraceExpression, mapping: Mapping[str, PathElement], target: Quiver) -> TraceExpression:
    """Replace each arrow ``x`` by ``mapping[x]`` and ``~x`` by its iota-image, expanding fully."""
    images = {}
    for x, pe in mapping.items():
        if pe.quiver != target:
            raise PathError(f"image of {x} lives on another quiver")
        images[(x, False)] = list(pe.terms.items())
        images[(x, True)] = list(pe.iota().terms.items())

    cycle_cache: dict[CyclePath, TraceExpression] = {}

    def expand_cycle(c: CyclePath) -> TraceExpression:
        if c in cycle_cache:
            return cycle_cache[c]
        try:
            choices = [images[(s.arrow, s.bar)] for s in c.word]
        except KeyError as exc:
            raise PathError(f"no image given for arrow {exc.args[0][0]}") from None
        acc: dict = defaultdict(Fraction)
        for combo in itertools.product(*choices):
            word = tuple(st for w, _ in combo for st in w)
            coeff = Fraction(1)
            for _, cf in combo:
                coeff *= cf
            check_closed(target, word)
            acc[(CyclePath(word),)] += coeff
        cycle_cache[c] = TraceExpression(acc)
        return cycle_cache[c]

    total = TraceExpression()
    for factors, coeff in e.terms.items():
        term = TraceExpression.constant(coeff)
        for c in factors:
            term = term * expand_cycle(c)
        total = total + term
    return total


def substitute_sigma_r(f: PathElement, r: int, cap: int = DEFAULT_R_CAP) -> TraceExpression:
    """sigma_r(f) for a closed path element f."""
    if r < 1:
        raise ValueError("r must be positive")
    if not f.is_closed:
        raise PathError(f"sigma_r needs a closed element; {f} runs {f.origin} -> {f.end}")
    return substitute(sigma_rs(r, 0, cap), {"X": f}, f.quiver)


def substitute_sigma_rs(
    f1: PathElement, f2: PathElement, f3: PathElement, r: int, s: int, cap: int = DEFAULT_R_CAP
) -> TraceExpression:
    """sigma_{r,s}(f1, f2, f3): f1 closed at u, f2 from u to its partner, f3 back."""
    q = f1.quiver
    if f2.quiver != q or f3.quiver != q:
        raise PathError("f1, f2, f3 must live on the same quiver")
    u = f1.origin
    if not f1.is_closed:
        raise PathError(f"f1 must be closed, got {f1.origin} -> {f1.end}")
    v, starred = u
    if starred or q.is_starred(v):
        raise PathError(f"f1 must sit at an ordinary vertex or a pair head, got {u}")
    w = q.phi(u)
    if (f2.origin, f2.end) != (u, w):
        raise PathError(f"f2 must pass from {u} to {w}, got {f2.origin} -> {f2.end}")
    if (f3.origin, f3.end) != (w, u):
        raise PathError(f"f3 must pass from {w} to {u}, got {f3.origin} -> {f3.end}")
    return substitute(sigma_rs(r, s, cap), {"X": f1, "Y": f2, "Z": f3}, q)


# -- verification ------------------------------------------------------------------------------

@dataclass
class VerificationReport:
    expr: str
    kind: str
    trials: int
    field: str
    seed: int
    outcome: str  # "all-zero" | "counterexample" | "invariant" | "not-invariant"
    prob_bound: float | None
    ms: float
    log2_bound: float | None = None
    witness: dict | None = None
    value: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed_vanishing(self) -> bool:
        return self.outcome == "all-zero"

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "expr": self.expr,
            "kind": self.kind,
            "trials": self.trials,
            "field": self.field,
            "seed": self.seed,
            "outcome": self.outcome,
            "prob_bound": self.prob_bound,
        }
        if self.log2_bound is not None:
            # prob_bound underflows to 0.0 over large prime fields
            out["log2_prob_bound"] = round(self.log2_bound, 6)
        if self.witness is not None:
            out["witness"] = self.witness
            out["value"] = self.value
        if self.extra:
            out.update(self.extra)
        if timing:
            out["ms"] = round(self.ms, 3)
        return out


def _field_spec(F: Field) -> str:
    return F.spec() if hasattr(F, "spec") else repr(F)


def schwartz_zippel_bound(degree: int, sample_size: int, trials: int) -> float:
    """Chance that a nonzero polynomial of this degree vanishes at all ``trials`` random points."""
    if trials == 0:
        return 1.0
    return min(1.0, degree / sample_size) ** trials


def schwartz_zippel_log2(degree: int, sample_size: int, trials: int) -> float:
    """log2 of :func:`schwartz_zippel_bound`, which stays finite where the bound underflows."""
    return trials * min(0.0, math.log2(degree) - math.log2(sample_size))


def _small_witness(e, q, dv, F, rng, tries=64):
    for _ in range(tries):
        p = random_rep(q, dv, F, rng, entries=(-1, 0, 1))
        val = eval_expr(e, p)
        if val != 0:
            return p, val
    return None


def verify_vanishing(
    e: TraceExpression,
    Q: Quiver,
    dv: DimensionVector,
    trials: int,
    field: Field | None = None,
    seed: int = 0,
    name: str | None = None,
    point_sampler: Callable[[random.Random], RepPoint] | None = None,
    evaluator: Callable[[TraceExpression, RepPoint], object] = eval_expr,
) -> VerificationReport:
    """Evaluate ``e`` at ``trials`` random points; stop at the first nonzero value.

    A counterexample is re-drawn with entries in {-1, 0, 1} when possible, so
    the reported witness is small; it always re-evaluates to a nonzero value.
    """
    F = field or PrimeField()
    e.validate(Q)
    start = time.perf_counter()
    for k in range(trials):
        rng = derive_rng(seed, "vanish", k)
        p = point_sampler(rng) if point_sampler else random_rep(Q, dv, F, rng)
        val = evaluator(e, p)
        if val != 0:
            if point_sampler is None:
                small = _small_witness(e, Q, dv, F, derive_rng(seed, "witness", k))
                if small is not None:
                    p, val = small
            assert evaluator(e, p) != 0
            return VerificationReport(
                name or str(e), "vanishing", k + 1, _field_spec(F), seed, "counterexample", None,
                (time.perf_counter() - start) * 1000, witness=p.to_json(), value=F.to_json(val),
            )
    deg = max(e.degree(), 1)
    return VerificationReport(
        name or str(e), "vanishing", trials, _field_spec(F), seed, "all-zero",
        schwartz_zippel_bound(deg, F.sample_size(), trials), (time.perf_counter() - start) * 1000,
        schwartz_zippel_log2(deg, F.sample_size(), trials),
    )


def verify_invariance(
    e: TraceExpression,
    Q: Quiver,
    dv: DimensionVector,
    trials: int,
    seed: int = 0,
    field: Field | None = None,
    name: str | None = None,
) -> VerificationReport:
    """Check eval(e, g.p) == eval(e, p) at random (p, g). Malformed traces are rejected first."""
    F = field or PrimeField()
    e.validate(Q)
    start = time.perf_counter()
    for k in range(trials):
        rng = derive_rng(seed, "invariance", k)
        p = random_rep(Q, dv, F, rng)
        g = random_group_element(dv, F, rng)
        before, after = eval_expr(e, p), eval_expr(e, act(p, g))
        if before != after:
            return VerificationReport(
                name or str(e), "invariance", k + 1, _field_spec(F), seed, "not-invariant", None,
                (time.perf_counter() - start) * 1000, witness=p.to_json(),
                value=f"{F.to_json(before)} != {F.to_json(after)}",
            )
    return VerificationReport(
        name or str(e), "invariance", trials, _field_spec(F), seed, "invariant",
        schwartz_zippel_bound(max(2 * e.degree(), 1), F.sample_size(), trials),
        (time.perf_counter() - start) * 1000,
        schwartz_zippel_log2(max(2 * e.degree(), 1), F.sample_size(), trials),
    )


# -- graded components ---------------------------------------------------------------------

def graded_monomials(Q: Quiver, rbar: Multidegree | Mapping[str, int]) -> list[tuple[CyclePath, ...]]:
    """All products of cycles (as sorted multisets) of multidegree ``rbar``."""
    if not isinstance(rbar, Multidegree):
        rbar = Multidegree.of(Q, rbar)
    target = rbar.as_dict()
    total = rbar.r
    if total == 0:
        return [()]
    cycles = [
        c for c in enumerate_cycles(build_doubled(Q), total)
        if all(n <= target[a] for a, n in c.multidegree().items())
    ]
    out = []

    def search(start: int, remaining: dict, chosen: list):
        if not any(remaining.values()):
            out.append(tuple(chosen))
            return
        for k in range(start, len(cycles)):
            md = cycles[k].multidegree()
            if all(n <= remaining[a] for a, n in md.items()):
                for a, n in md.items():
                    remaining[a] -= n
                chosen.append(cycles[k])
                search(k, remaining, chosen)
                chosen.pop()
                for a, n in md.items():
                    remaining[a] += n

    search(0, dict(target), [])
    return out


def graded_span_dimension(
    Q: Quiver,
    dv: DimensionVector,
    rbar: Multidegree | Mapping[str, int],
    sample_points: int,
    field: Field | None = None,
    seed: int = 0,
) -> int:
    """Rank of the evaluation matrix (monomials x random points): a lower bound for dim J(Q, t)(rbar)."""
    if not isinstance(rbar, Multidegree):
        rbar = Multidegree.of(Q, rbar)
    classes = classify_arrows(Q)
    a2 = sum(n for a, n in rbar.as_dict().items() if classes[a] == A2)
    a3 = sum(n for a, n in rbar.as_dict().items() if classes[a] == A3)
    if a2 != a3:
        return 0
    F = field or PrimeField()
    monos = graded_monomials(Q, rbar)
    if not monos or sample_points < 1:
        return 0
    rows = []
    exprs = [TraceExpression({m: 1}) for m in monos]
    points = [random_rep(Q, dv, F, derive_rng(seed, "span", k)) for k in range(sample_points)]
    for e in exprs:
        rows.append([eval_expr(e, p) for p in points])
    return Matrix(rows, F).rank()
