"""Dimension specializations, the two-vertex model for O(d) and Sp(d), and the
coefficient identities behind z(f).

Specializations are realized on points: ``embed_point`` sends a point of
dimension n to one of dimension N, and an invariant is pulled back by
evaluating it at the embedded point.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .fields import QQ, Field
from .matrix import Matrix, ShapeError, SingularMatrixError, charpoly_coefficients
from .paths import CyclePath, PathError, TraceExpression, eval_expr
from .quiver import DimensionVector, Quiver, Step, ortho_quiver
from .relations import PathElement, substitute_sigma_r
from .reps import GroupElement, RepPoint, random_rep, skew_form

STANDARD = "standard"
NONSTANDARD = "nonstandard"
SYMP = "symplectic"        # centred block, zero elsewhere
SYMP_J = "symplectic+J"    # centred block plus the tails of J(N)
SYMP_NEG_J = "symplectic-J"  # centred block plus the tails of -J(N)

_SYMP_MODES = (SYMP, SYMP_J, SYMP_NEG_J)

ORTHOGONAL = "O"
SYMPLECTIC = "Sp"


def parse_flavor(text: str) -> str:
    t = text.strip().lower()
    if t in ("o", "orthogonal"):
        return ORTHOGONAL
    if t in ("sp", "symplectic"):
        return SYMPLECTIC
    raise ValueError(f"unknown flavor {text!r}; expected O or Sp")


# -- structured matrices -------------------------------------------------------------------

def E(d: int, field: Field = QQ) -> Matrix:
    return Matrix.identity(d, field)


def E_tail(N: int, n: int, field: Field = QQ) -> Matrix:
    """N x N, ones on the diagonal after the first n places, zero elsewhere."""
    return Matrix.from_function(N, N, lambda i, j: 1 if i == j and i >= n else 0, field)


def J(d: int, field: Field = QQ) -> Matrix:
    return skew_form(d, field)


def J_tail(N: int, n: int, field: Field = QQ) -> Matrix:
    """J(N) with its centred n x n block cleared: the symplectic embedding of the zero matrix."""
    if N % 2 or n % 2:
        raise ValueError("symplectic sizes must be even")
    lo, hi = (N - n) // 2, (N + n) // 2
    full = skew_form(N, field)
    return Matrix.from_function(N, N, lambda i, j: 0 if lo <= i < hi and lo <= j < hi else full[i, j], field)


# -- specialization maps ------------------------------------------------------------------------

@dataclass(frozen=True)
class SpecializationMap:
    """Embeds points of dimension ``small`` into dimension ``big``, arrow by arrow."""

    big: DimensionVector
    small: DimensionVector
    modes: Mapping[str, str]

    def __post_init__(self):
        q = self.big.quiver
        if self.small.quiver != q:
            raise ShapeError("both dimension vectors must belong to the same quiver")
        if any(n > N for n, N in zip(self.small.dims, self.big.dims)):
            raise ShapeError("the small dimension vector must not exceed the big one")
        if set(self.modes) != set(q.arrow_ids):
            raise ValueError("a mode is needed for every arrow")
        symp = [m in _SYMP_MODES for m in self.modes.values()]
        if any(symp) and not all(symp):
            raise ValueError("symplectic modes cannot be mixed with the others")
        for a in q.arrows:
            mode = self.modes[a.id]
            if mode == NONSTANDARD:
                for dv in (self.big, self.small):
                    if dv[a.origin] != dv[a.end]:
                        raise ValueError(f"non-standard mode on {a.id} needs equal dimensions at both ends")
            elif mode in _SYMP_MODES:
                for dv in (self.big, self.small):
                    if dv[a.origin] % 2 or dv[a.end] % 2:
                        raise ValueError("symplectic mode needs even dimensions")
            elif mode != STANDARD:
                raise ValueError(f"unknown mode {mode!r}")

    @property
    def quiver(self) -> Quiver:
        return self.big.quiver

    @property
    def symplectic(self) -> bool:
        return any(m in _SYMP_MODES for m in self.modes.values())

    @classmethod
    def standard(cls, q: Quiver, big, small) -> "SpecializationMap":
        return cls(DimensionVector.of(q, big), DimensionVector.of(q, small), {a: STANDARD for a in q.arrow_ids})

    @classmethod
    def nonstandard(cls, q: Quiver, big, small, arrows: Iterable[str] | None = None) -> "SpecializationMap":
        """Non-standard on ``arrows`` (default: every arrow with equal end dimensions)."""
        bdv, sdv = DimensionVector.of(q, big), DimensionVector.of(q, small)
        if arrows is None:
            arrows = [
                a.id for a in q.arrows
                if bdv[a.origin] == bdv[a.end] and sdv[a.origin] == sdv[a.end]
            ]
        arrows = set(arrows)
        return cls(bdv, sdv, {a: NONSTANDARD if a in arrows else STANDARD for a in q.arrow_ids})

    @classmethod
    def symplectic_standard(cls, q: Quiver, big, small, plus: Iterable[str] = ("b",), minus: Iterable[str] = ("c",)) -> "SpecializationMap":
        plus, minus = set(plus), set(minus)
        modes = {a: SYMP_J if a in plus else SYMP_NEG_J if a in minus else SYMP for a in q.arrow_ids}
        return cls(DimensionVector.of(q, big), DimensionVector.of(q, small), modes)

    def _offset(self, v: int) -> int:
        return (self.big[v] - self.small[v]) // 2 if self.symplectic else 0

    def embed_matrix(self, arrow_id: str, m: Matrix) -> Matrix:
        a = self.quiver.arrow(arrow_id)
        mode = self.modes[arrow_id]
        R, C = self.big[a.end], self.big[a.origin]
        r0, c0 = self._offset(a.end), self._offset(a.origin)
        rows, cols = m.shape
        F = m.field
        if mode == NONSTANDARD:
            tail = E_tail(R, rows, F)
        elif mode == SYMP_J:
            tail = J_tail(R, rows, F)
        elif mode == SYMP_NEG_J:
            tail = -J_tail(R, rows, F)
        else:
            tail = None

        def entry(i, j):
            if r0 <= i < r0 + rows and c0 <= j < c0 + cols:
                return m[i - r0, j - c0]
            return tail[i, j] if tail is not None else 0

        return Matrix.from_function(R, C, entry, F)

    def embed_group_matrix(self, v: int, g: Matrix) -> Matrix:
        N, n = self.big[v], self.small[v]
        o = self._offset(v)

        def entry(i, j):
            if o <= i < o + n and o <= j < o + n:
                return g[i - o, j - o]
            return 1 if i == j else 0

        return Matrix.from_function(N, N, entry, g.field)


def embed_point(p: RepPoint, smap: SpecializationMap) -> RepPoint:
    if p.dv != smap.small:
        raise ShapeError("point does not have the small dimension vector of the map")
    return RepPoint(smap.big, p.field, {a: smap.embed_matrix(a, p[a]) for a in p.quiver.arrow_ids})


def embed_group(g: GroupElement, smap: SpecializationMap) -> GroupElement:
    if g.dv != smap.small:
        raise ShapeError("group element does not have the small dimension vector of the map")
    return GroupElement(smap.big, {v: smap.embed_group_matrix(v, m) for v, m in g.mats.items()})


def compose(outer: SpecializationMap, inner: SpecializationMap) -> SpecializationMap:
    """The map n -> N' obtained by embedding n -> N (``inner``) then N -> N' (``outer``)."""
    if inner.big != outer.small:
        raise ShapeError("maps do not compose")
    if inner.modes != outer.modes:
        raise ValueError("only maps with the same modes compose to a map of that kind")
    return SpecializationMap(outer.big, inner.small, dict(inner.modes))


class Pullback:
    """The specialization of an invariant of dimension N, as a function on points of dimension n."""

    def __init__(self, e: TraceExpression, smap: SpecializationMap):
        e.validate(smap.quiver)
        self.e = e
        self.smap = smap

    def __call__(self, p: RepPoint):
        return eval_expr(self.e, embed_point(p, self.smap))


def pullback_invariant(e: TraceExpression, smap: SpecializationMap) -> Pullback:
    return Pullback(e, smap)


def leading_coefficient(values: Sequence, degree: int):
    """Coefficient of x^degree of the polynomial of degree <= ``degree`` through (k, values[k]), k = 0..degree."""
    if len(values) != degree + 1:
        raise ValueError("need degree + 1 values")
    diffs = [Fraction(v) for v in values]
    for _ in range(degree):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    f = 1
    for k in range(2, degree + 1):
        f *= k
    return diffs[0] / f


def degree_drop(e: TraceExpression, nonstandard: SpecializationMap, standard: SpecializationMap, p: RepPoint):
    """Top coefficient (in the scaling p -> x p) of the non-standard minus the standard pullback of ``e``.

    For ``e`` homogeneous of degree r it is the degree-r part of the
    difference, which must vanish.
    """
    r = e.degree()
    F = p.field
    vals = []
    for x in range(r + 1):
        px = RepPoint(p.dv, F, {a: m.scale(x) for a, m in p.mats.items()})
        vals.append(F.reduce(pullback_invariant(e, nonstandard)(px) - pullback_invariant(e, standard)(px)))
    return leading_coefficient(vals, r)


# -- the orthogonal / symplectic model ------------------------------------------------------------

def _step_sign(s: Step) -> int:
    # Y(b) -> J, Y(c) -> -J, transposes flip the sign
    base = 1 if s.arrow == "b" else -1
    return -base if s.bar else base


def ortho_symp_specialize(e: TraceExpression, flavor: str, m: int | None = None) -> TraceExpression:
    """Eliminate b and c: Y(b), Y(c) -> E (O) or J, -J (Sp).

    The result is a formal expression in the loops ``a_i`` where ``~a_i``
    now stands for the adjoint of a_i (transpose for O, J^{-1} a^T J for
    Sp). A factor left without any loop is written ``()`` and stands for
    tr(E(d)) = d.
    """
    flavor = parse_flavor(flavor)
    q = ortho_quiver(m) if m is not None else None
    if q is not None:
        e.validate(q)
    out: dict = {}
    for factors, coeff in e.terms.items():
        sign = 1
        new = []
        for c in factors:
            word = c.word
            if any(s.arrow not in ("b", "c") and not s.arrow.startswith("a") for s in word):
                raise PathError(f"{c} is not a cycle of the two-vertex model quiver")
            links = [s for s in word if s.arrow in ("b", "c")]
            if flavor == SYMPLECTIC and links:
                # each visit to vertex 2 contributes (-1) times the signs of its two links
                sgn = (-1) ** (len(links) // 2)
                for s in links:
                    sgn *= _step_sign(s)
                sign *= sgn
            new.append(CyclePath(tuple(s for s in word if s.arrow not in ("b", "c"))))
        key = tuple(sorted(new))
        out[key] = out.get(key, 0) + sign * coeff
    return TraceExpression(out)


def adjoint(a: Matrix, flavor: str) -> Matrix:
    if parse_flavor(flavor) == ORTHOGONAL:
        return a.T
    d = a.nrows
    Jd = skew_form(d, a.field)
    return Jd.inverse() @ a.T @ Jd


def formal_word_matrix(word: Sequence[Step], mats: Mapping[str, Matrix], flavor: str, d: int, field: Field = QQ) -> Matrix:
    """Product of the loops, ``~a`` read as the adjoint; the empty word is E(d)."""
    out = Matrix.identity(d, field)
    adj = {}
    for s in word:
        if s.bar:
            if s.arrow not in adj:
                adj[s.arrow] = adjoint(mats[s.arrow], flavor)
            out = out @ adj[s.arrow]
        else:
            out = out @ mats[s.arrow]
    return out


def eval_specialized(e: TraceExpression, mats: Mapping[str, Matrix], flavor: str):
    """Evaluate an output of :func:`ortho_symp_specialize` at a tuple of d x d matrices."""
    flavor = parse_flavor(flavor)
    d = next(iter(mats.values())).nrows
    F = next(iter(mats.values())).field
    if flavor == SYMPLECTIC and d % 2:
        raise ValueError("the symplectic flavor needs an even dimension")
    cache = {}
    total = F.zero
    for factors, coeff in e.terms.items():
        term = F.coerce(coeff)
        for c in factors:
            if c not in cache:
                cache[c] = formal_word_matrix(c.word, mats, flavor, d, F).trace()
            term = F.reduce(term * cache[c])
        total = F.reduce(total + term)
    return total


def model_point(flavor: str, mats: Mapping[str, Matrix]) -> RepPoint:
    """The point of the two-vertex quiver with the given loops and Y(b), Y(c) = E, E (O) or J, -J (Sp)."""
    flavor = parse_flavor(flavor)
    m = len(mats)
    q = ortho_quiver(m)
    d = next(iter(mats.values())).nrows
    F = next(iter(mats.values())).field
    if flavor == ORTHOGONAL:
        b = c = E(d, F)
    else:
        b = J(d, F)
        c = -b
    return RepPoint(DimensionVector.of(q, d), F, {**mats, "b": b, "c": c})


def lift_word(word: Sequence[Step]) -> tuple[Step, ...]:
    """A closed path at vertex 1 of the model quiver specializing to a formal word in a_i and ~a_i.

    Every maximal run of barred letters is wrapped as ``c ~a ... ~a b``.
    """
    word = tuple(word)
    out: list[Step] = []
    k = 0
    while k < len(word):
        if word[k].bar:
            out.append(Step("c"))
            while k < len(word) and word[k].bar:
                out.append(word[k])
                k += 1
            out.append(Step("b"))
        else:
            out.append(word[k])
            k += 1
    return tuple(out)


def specialized_sigma(word: Sequence[Step], j: int, flavor: str, m: int) -> TraceExpression:
    """sigma_j of a formal word, built on the model quiver and then specialized."""
    q = ortho_quiver(m)
    f = PathElement(q, {lift_word(word): 1})
    if j == 0:
        return TraceExpression.constant(1)
    return ortho_symp_specialize(substitute_sigma_r(f, j), flavor, m)


def locus_point(flavor: str, d: int, m: int, field: Field, seed, tries: int = 50) -> RepPoint:
    """Random loops; Y(c) random invertible symmetric (O) or skew (Sp); Y(b) = Y(c)^{-1}."""
    flavor = parse_flavor(flavor)
    if flavor == SYMPLECTIC and d % 2:
        raise ValueError("the symplectic locus needs an even dimension")
    if getattr(field, "characteristic", 0) == 2:
        raise ValueError("characteristic 2 is excluded for the orthogonal/symplectic model")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    q = ortho_quiver(m)
    dv = DimensionVector.of(q, d)
    base = random_rep(q, dv, field, rng)
    for _ in range(tries):
        up = {(i, j): field.random_element(rng) for i in range(d) for j in range(i, d)}
        if flavor == ORTHOGONAL:
            c = Matrix.from_function(d, d, lambda i, j: up[(min(i, j), max(i, j))], field)
        else:
            c = Matrix.from_function(
                d, d, lambda i, j: up[(i, j)] if i < j else (-up[(j, i)] if i > j else 0), field
            )
        if c.is_invertible():
            return base.replace(b=c.inverse(), c=c)
    raise SingularMatrixError(f"no invertible Y(c) after {tries} draws")


def locus_equations(p: RepPoint, flavor: str) -> tuple[Matrix, Matrix]:
    """(Y(b)Y(c) - E, Y(c) -+ Y(c)^T): the matrices whose entries generate T_d."""
    flavor = parse_flavor(flavor)
    b, c = p["b"], p["c"]
    z = b @ c - E(c.nrows, c.field)
    u = c - c.T if flavor == ORTHOGONAL else c + c.T
    return z, u


# -- coefficient identities --------------------------------------------------------------------------

class Poly:
    """Univariate polynomial in lambda with rational coefficients (``coeffs[k]`` of lambda^k)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, coeff, k: int) -> "Poly":
        return cls([0] * k + [coeff])

    def _coerce(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return self.coeffs == self._coerce(other).coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                parts.append(str(c) if k == 0 else f"{c}*L^{k}" if k > 1 else f"{c}*L")
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self})"


def alpha_coeffs(N: int, n: int, r: int) -> list[Poly]:
    """alpha_j = (-1)^j C(N-n+j-1, j) lambda^j for j = 0..r."""
    if not N > n >= 0:
        raise ValueError("need N > n >= 0")
    D = N - n
    return [Poly.monomial((-1) ** j * comb(D + j - 1, j), j) for j in range(r + 1)]


def alpha_by_recursion(N: int, n: int, r: int) -> list[Poly]:
    """Solve the triangular system Eq_t for alpha with alpha_0 = 1."""
    D = N - n
    alpha = [Poly([1])]
    for k in range(1, r + 1):
        acc = Poly()
        for i in range(1, k + 1):
            acc = acc + Poly.monomial(comb(D, i), i) * alpha[k - i]
        alpha.append(-acc)
    return alpha


def eq_t_residuals(N: int, n: int, r: int, alpha: Sequence[Poly] | None = None) -> list[Poly]:
    """Left-hand sides of Eq_t, t = 0..r-1."""
    alpha = alpha if alpha is not None else alpha_coeffs(N, n, r)
    D = N - n
    out = []
    for t in range(r):
        acc = Poly()
        for k in range(r - t + 1):
            acc = acc + Poly.monomial(comb(D, k), k) * alpha[r - t - k]
        out.append(acc)
    return out


def generalized_vanishing(N: int, n: int, r: int, t1: int, t2: int, alpha: Sequence[Poly] | None = None) -> Poly:
    """sum_{s=0..r-t1} C(N-t2, s) lambda^s alpha_{r-t1-s}.

    Zero for 0 <= t1 <= t2 <= n < r; the value at t2 = n + 1 is a non-zero probe.
    """
    if not 0 <= t1 <= r or t2 < 0 or t2 > N:
        raise ValueError("need 0 <= t1 <= r and 0 <= t2 <= N")
    alpha = alpha if alpha is not None else alpha_coeffs(N, n, r)
    acc = Poly()
    for s in range(r - t1 + 1):
        acc = acc + Poly.monomial(comb(N - t2, s), s) * alpha[r - t1 - s]
    return acc


def sigma_shift_identity(N: int, k: int, X: Matrix, y) -> tuple:
    """(sigma_k(X + y E(N)), sum_s C(N-k+s, s) y^s sigma_{k-s}(X))."""
    if X.shape != (N, N):
        raise ShapeError(f"X must be {N}x{N}")
    if not 0 <= k <= N:
        raise ValueError("need 0 <= k <= N")
    F = X.field
    y = F.coerce(y)
    lhs = charpoly_coefficients(X + E(N, F).scale(y))[k]
    sig = charpoly_coefficients(X)
    rhs = F.zero
    for s in range(k + 1):
        rhs = F.reduce(rhs + F.coerce(comb(N - k + s, s)) * y ** s * sig[k - s])
    return lhs, rhs


# -- z(f) ---------------------------------------------------------------------------------------------

def split_f(f: PathElement) -> tuple[dict, dict, Fraction]:
    """(f1 terms, f2 terms, lambda): f2 collects the monomials without any loop a_i."""
    f1, f2 = {}, {}
    for w, c in f.terms.items():
        (f1 if any(s.arrow not in ("b", "c") for s in w) else f2)[w] = c
    return f1, f2, sum(f2.values(), Fraction(0))


def z_of_f(f: PathElement, r: int, N: int, n: int) -> TraceExpression:
    """z(f) = sum_k alpha_k sigma_{r-k}(f), with alpha taken at lambda = sum of the f2 coefficients."""
    if f.origin != (1, False) or not f.is_closed:
        raise PathError("f must be closed at vertex 1")
    _, _, lam = split_f(f)
    alpha = alpha_coeffs(N, n, r)
    z = TraceExpression()
    for k in range(r + 1):
        a = alpha[k](lam)
        if a == 0:
            continue
        part = TraceExpression.constant(1) if k == r else substitute_sigma_r(f, r - k)
        z = z + part.scale(a)
    return z
