"""The map tr* from admissible permutations to products of formal trace cycles.

Hat arrows are numbered ``1..r``; a symbol is an index with a bar flag.
``tr*`` is computed in two independent ways: the right-neighbour
(contracting) rules, and the block-joining procedure for a passive set
``B`` of hat arrows of the first class.
"""

from __future__ import annotations

import functools
import logging
from collections import defaultdict
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, NamedTuple, Sequence

from .paths import CyclePath, PathError, TraceExpression, check_closed
from .perms import Permutation, all_permutations, left_coset_representatives, young_subgroup
from .quiver import (
    A1,
    A2,
    AdmissibilitySets,
    DimensionVector,
    HatQuiver,
    Step,
    admissibility_sets,
    build_hat,
    model_quiver,
)

log = logging.getLogger(__name__)

DEFAULT_R_CAP = 8


class TrStarError(ValueError):
    pass


class CapExceeded(ValueError):
    """The requested degree exceeds the configured factorial guard."""


def check_cap(r: int, cap: int) -> None:
    if r > cap:
        raise CapExceeded(f"r = {r} exceeds the cap {cap}; raise the cap explicitly to continue")


class Sym(NamedTuple):
    index: int
    bar: bool = False

    def flip(self) -> "Sym":
        return Sym(self.index, not self.bar)

    def __str__(self):
        return ("~" if self.bar else "") + str(self.index)


def _iota(cycle: Sequence[Sym]) -> tuple[Sym, ...]:
    return tuple(x.flip() for x in reversed(cycle))


def _canonical_cycle(cycle: Sequence[Sym]) -> tuple[Sym, ...]:
    cycle = tuple(cycle)
    rots = [cycle[i:] + cycle[:i] for i in range(len(cycle))]
    inv = _iota(cycle)
    rots += [inv[i:] + inv[:i] for i in range(len(inv))]
    return min(rots)


class SymbolCycleWord:
    """A product of cycles over ``[1, r]`` and its barred copy, each index used once.

    ``cycles`` keeps the order in which the cycles were produced (for
    display); equality and hashing use the canonical form.
    """

    __slots__ = ("cycles", "canonical")

    def __init__(self, cycles: Iterable[Iterable[Sym]], r: int | None = None):
        self.cycles = tuple(tuple(Sym(*x) for x in c) for c in cycles)
        idx = sorted(x.index for c in self.cycles for x in c)
        if any(not c for c in self.cycles):
            raise TrStarError("empty cycle in word")
        if idx != list(range(1, len(idx) + 1)) or (r is not None and len(idx) != r):
            raise TrStarError("each index must occur exactly once, barred or unbarred")
        self.canonical = tuple(sorted(_canonical_cycle(c) for c in self.cycles))

    @property
    def r(self) -> int:
        return sum(len(c) for c in self.cycles)

    def __eq__(self, other):
        return isinstance(other, SymbolCycleWord) and self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    def __str__(self):
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles)

    def canonical_str(self) -> str:
        return "".join("(" + " ".join(map(str, c)) + ")" for c in self.canonical)

    def __repr__(self):
        return f"SymbolCycleWord({self})"


# -- admissibility and shifts ---------------------------------------------------

def in_LQ(sigma: Permutation, sets: AdmissibilitySets) -> bool:
    """True iff sigma maps every argument set onto the matching image set."""
    if sigma.r != sets.hat.r:
        raise TrStarError(f"permutation of degree {sigma.r} for a hat quiver with r = {sets.hat.r}")
    return all({sigma(x) for x in sets.T[k]} == set(sets.I[k]) for k in sets.T)


def class_intervals(hq: HatQuiver) -> tuple[range, range, range]:
    t, s = hq.t, hq.s
    return range(1, t + 1), range(t + 1, t + s + 1), range(t + s + 1, hq.r + 1)


def in_S0(pi: Permutation, hq: HatQuiver) -> bool:
    return all(pi.preserves(block) for block in class_intervals(hq))


def rho_shift(pi: Permutation, which: int, hq: HatQuiver) -> Permutation:
    """The shift homomorphisms S_0 -> S_r.

    ``which=1`` keeps the first two class factors and copies the second onto
    the third class; ``which=2`` keeps the first and third and copies the
    third back onto the second.
    """
    if pi.r != hq.r or not in_S0(pi, hq):
        raise TrStarError(f"{pi} does not preserve the three class intervals")
    s = hq.s
    _, a2, a3 = class_intervals(hq)
    img = list(pi.img)
    if which == 1:
        for x in a3:
            img[x - 1] = pi(x - s) + s
    elif which == 2:
        for x in a2:
            img[x - 1] = pi(x + s) - s
    else:
        raise ValueError("which must be 1 or 2")
    return Permutation(img)


# -- contracting rules -------------------------------------------------------------

def _neighbour_rule(sigma: Permutation, sinv: Permutation, hq: HatQuiver):
    cls = hq.arrow_class
    s = hq.s

    def back(x):  # x = sigma^{-1}(...)
        c = cls(x)
        return Sym(x) if c == A1 else Sym(x + s) if c == A2 else Sym(x, True)

    def fwd(x):  # x = sigma(...)
        c = cls(x)
        return Sym(x, True) if c == A1 else Sym(x) if c == A2 else Sym(x - s, True)

    def nxt(sym: Sym) -> Sym:
        j = sym.index
        c = cls(j)
        if not sym.bar:
            if c == A1:
                return back(sinv(j))
            if c == A2:
                return back(sinv(j + s))
            return fwd(sigma(j))
        if c == A1:
            return fwd(sigma(j))
        if c == A2:
            return back(sinv(j))
        return fwd(sigma(j - s))

    return nxt


def trstar_contract(sigma: Permutation, hq: HatQuiver, sets: AdmissibilitySets | None = None) -> SymbolCycleWord:
    """tr*(sigma) by the right-neighbour rules; cycles start at their least unvisited index."""
    sets = sets or admissibility_sets(hq)
    if not in_LQ(sigma, sets):
        raise TrStarError(f"{sigma} is not admissible; tr* is defined on L(Q) only")
    nxt = _neighbour_rule(sigma, sigma.inverse(), hq)
    placed: set[int] = set()
    cycles = []
    for start in range(1, hq.r + 1):
        if start in placed:
            continue
        cyc = [Sym(start)]
        placed.add(start)
        cur = nxt(cyc[0])
        while cur != cyc[0]:
            if cur.index in placed:
                raise TrStarError(f"contracting rules revisit index {cur.index}")
            cyc.append(cur)
            placed.add(cur.index)
            cur = nxt(cur)
        cycles.append(cyc)
    return SymbolCycleWord(cycles, hq.r)


# -- block joining --------------------------------------------------------------------

def _blocks(tau: Permutation, B: frozenset[int], hq: HatQuiver):
    """Blocks C_v of tau^{-1} (in order) and the cycles made of passive integers only."""
    cls = hq.arrow_class
    s = hq.s

    def left(l):
        c = cls(l)
        return Sym(l) if c == A1 else Sym(l, True) if c == A2 else Sym(l - s)

    def right(j):
        c = cls(j)
        return Sym(j) if c == A1 else Sym(j + s) if c == A2 else Sym(j, True)

    blocks, passive_cycles = [], []
    for cyc in tau.inverse().cycles():
        pos = [k for k, x in enumerate(cyc) if x not in B]
        if not pos:
            passive_cycles.append(tuple(Sym(x) for x in cyc))
            continue
        n = len(cyc)
        for m, p in enumerate(pos):
            q = pos[(m + 1) % len(pos)]
            gap = (q - p - 1) % n if len(pos) > 1 else n - 1
            frag = [cyc[(p + 1 + u) % n] for u in range(gap)]
            blocks.append((left(cyc[p]), *(Sym(x) for x in frag), right(cyc[q])))
    return blocks, passive_cycles


def trstar_blocks(tau: Permutation, B: Iterable[int], hq: HatQuiver, sets: AdmissibilitySets | None = None) -> SymbolCycleWord:
    """tr*(tau) from the blocks of tau^{-1} bounded by integers outside ``B``.

    Blocks are joined end to end; a block whose last symbol is the bar of the
    current end is appended transposed. ``B`` must consist of first-class hat
    arrows.
    """
    B = frozenset(B)
    if any(not 1 <= b <= hq.r or hq.arrow_class(b) != A1 for b in B):
        raise TrStarError("the passive set must consist of first-class hat arrows")
    sets = sets or admissibility_sets(hq)
    if not in_LQ(tau, sets):
        raise TrStarError(f"{tau} is not admissible; tr* is defined on L(Q) only")
    blocks, passive_cycles = _blocks(tau, B, hq)
    used = [False] * len(blocks)
    cycles = []
    for first in range(len(blocks)):
        if used[first]:
            continue
        used[first] = True
        chain = list(blocks[first])
        while not (len(chain) > 1 and chain[-1] == chain[0]):
            end = chain[-1]
            for v, blk in enumerate(blocks):
                if used[v]:
                    continue
                if blk[0] == end:
                    chain.extend(blk[1:])
                    break
                if blk[-1] == end.flip():
                    chain.extend(_iota(blk)[1:])
                    break
            else:
                raise TrStarError(f"join deadlock at symbol {end}: the passive set is inconsistent")
            used[v] = True
        chain.pop()
        cycles.append(chain)
    return SymbolCycleWord(cycles + passive_cycles, hq.r)


# -- expressions ------------------------------------------------------------------------

def word_to_expression(w: SymbolCycleWord, hq: HatQuiver, coeff=1) -> TraceExpression:
    """Specialize symbols to arrows: ``j -> f(j)``, ``~j -> ~f(j)``; one trace factor per cycle."""
    if w.r != hq.r:
        raise TrStarError("word and hat quiver have different r")
    factors = []
    for c in w.cycles:
        word = tuple(Step(hq.f[x.index - 1], x.bar) for x in c)
        try:
            check_closed(hq.quiver, word)
        except PathError as exc:
            raise TrStarError(f"specialized cycle is not closed: {exc}") from None
        factors.append(CyclePath(word))
    return TraceExpression({tuple(factors): coeff})


class _Accumulator:
    """Sums signed tr*-words, caching the specialization of each symbol cycle."""

    def __init__(self, hq: HatQuiver):
        self.hq = hq
        self.cache: dict[tuple[Sym, ...], CyclePath] = {}
        self.terms: dict[tuple[CyclePath, ...], Fraction] = defaultdict(Fraction)

    def add(self, w: SymbolCycleWord, coeff) -> None:
        factors = []
        for c in w.canonical:
            cp = self.cache.get(c)
            if cp is None:
                word = tuple(Step(self.hq.f[x.index - 1], x.bar) for x in c)
                check_closed(self.hq.quiver, word)
                cp = self.cache[c] = CyclePath(word)
            factors.append(cp)
        self.terms[tuple(sorted(factors))] += coeff

    def expression(self, scale=1) -> TraceExpression:
        scale = Fraction(scale)
        return TraceExpression({k: v * scale for k, v in self.terms.items()})


def model_hat(r: int, s: int) -> HatQuiver:
    if s < 0 or 2 * s > r:
        raise ValueError(f"need 0 <= 2s <= r, got r={r}, s={s}")
    return build_hat(model_quiver(), {"X": r - 2 * s, "Y": s, "Z": s})


def sigma_rs(r: int, s: int, cap: int = DEFAULT_R_CAP) -> TraceExpression:
    """sigma_{r,s}(X, Y, Z) on the model quiver, expanded over canonical cycles."""
    check_cap(r, cap)
    if r > DEFAULT_R_CAP:
        log.warning("expanding sigma_{%d,%d} over %d permutations", r, s, factorial(r))
    return _sigma_rs(r, s)


@functools.lru_cache(maxsize=None)
def _sigma_rs(r: int, s: int) -> TraceExpression:
    hq = model_hat(r, s)
    sets = admissibility_sets(hq)
    acc = _Accumulator(hq)
    for sigma in all_permutations(r):
        acc.add(trstar_contract(sigma, hq, sets), sigma.sign)
    t = r - 2 * s
    return acc.expression(Fraction(1, factorial(t) * factorial(s) ** 2))


# -- base groups and suitable generators ------------------------------------------------------

class YoungLayout:
    """A base group: each argument set is cut into consecutive (monotone) layers."""

    def __init__(self, sets: AdmissibilitySets, layers: Mapping[tuple[str, int], Sequence[Iterable[int]]]):
        self.sets = sets
        if set(layers) != set(sets.T):
            raise ValueError(f"layers needed for exactly the keys {sorted(sets.T)}")
        fixed = {}
        for key, parts in layers.items():
            parts = [tuple(sorted(p)) for p in parts if p]
            got = sorted(x for p in parts for x in p)
            if got != sorted(sets.T[key]):
                raise ValueError(f"layers at {key} do not partition its argument set")
            for a, b in zip(parts, parts[1:]):
                if max(a) > min(b):
                    raise ValueError(f"layers at {key} are not monotone")
            fixed[key] = tuple(parts)
        self.layers: dict[tuple[str, int], tuple[tuple[int, ...], ...]] = fixed

    @classmethod
    def from_sizes(cls, sets: AdmissibilitySets, sizes: Mapping[tuple[str, int], Sequence[int]]) -> "YoungLayout":
        """Cut each sorted argument set into runs of the given sizes (missing keys become one layer)."""
        layers = {}
        for key, T in sets.T.items():
            elems = sorted(T)
            sz = list(sizes.get(key, [len(elems)]))
            if sum(sz) != len(elems):
                raise ValueError(f"sizes {sz} do not add up to |T{key}| = {len(elems)}")
            parts, pos = [], 0
            for k in sz:
                parts.append(elems[pos:pos + k])
                pos += k
            layers[key] = parts
        return cls(sets, layers)

    @classmethod
    def singletons(cls, sets: AdmissibilitySets) -> "YoungLayout":
        return cls(sets, {k: [[x] for x in sorted(T)] for k, T in sets.T.items()})

    def all_layers(self) -> list[tuple[int, ...]]:
        return [p for parts in self.layers.values() for p in parts]

    def group(self) -> list[Permutation]:
        return list(young_subgroup(self.all_layers(), self.sets.hat.r))

    def contains(self, pi: Permutation) -> bool:
        return all(pi.preserves(p) for p in self.all_layers())

    def witness(self, dv: DimensionVector):
        """A layer longer than the dimension at its vertex or pair, or None."""
        for key, parts in self.layers.items():
            d = self.sets.dimension_of(key, dv)
            for p in parts:
                if len(p) > d:
                    return key, p
        return None

    def sufficiently_large(self, dv: DimensionVector) -> bool:
        return self.witness(dv) is not None

    def __repr__(self):
        return f"YoungLayout({self.layers})"


def fiber_group(hq: HatQuiver) -> list[Permutation]:
    """S_f: permutations of [1, r] preserving every fibre of the arrow specialization."""
    return list(young_subgroup([seg for seg in hq.segments.values() if len(seg)], hq.r))


def suitable_generator(sigma1: Permutation, layout: YoungLayout, cap: int = DEFAULT_R_CAP) -> TraceExpression:
    """The normalized suitable generator

        z = 1/|S_f| * sum_{pi in S_f/H} sum_{tau in base group} sgn(tau) tr*(rho1(pi) sigma1 tau rho2(pi)^{-1}, f),

    with ``H = {pi in S_f : sigma1^{-1} rho1(pi) sigma1 and rho2(pi) lie in the base group}``
    and each left coset represented by its least element.
    """
    sets = layout.sets
    hq = sets.hat
    check_cap(hq.r, cap)
    if not in_LQ(sigma1, sets):
        raise TrStarError(f"{sigma1} is not admissible")
    Sf = fiber_group(hq)
    s1inv = sigma1.inverse()
    H = [
        pi for pi in Sf
        if layout.contains(s1inv * rho_shift(pi, 1, hq) * sigma1) and layout.contains(rho_shift(pi, 2, hq))
    ]
    reps = left_coset_representatives(Sf, H)
    base = layout.group()
    acc = _Accumulator(hq)
    for pi in reps:
        left = rho_shift(pi, 1, hq) * sigma1
        right = rho_shift(pi, 2, hq).inverse()
        for tau in base:
            acc.add(trstar_contract(left * tau * right, hq, sets), tau.sign)
    return acc.expression(Fraction(1, len(Sf)))


def base_sum(sigma1: Permutation, layout: YoungLayout) -> TraceExpression:
    """sum over the base group of sgn(tau) tr*(sigma1 tau, f), without normalization."""
    sets = layout.sets
    acc = _Accumulator(sets.hat)
    for tau in layout.group():
        acc.add(trstar_contract(sigma1 * tau, sets.hat, sets), tau.sign)
    return acc.expression()
