"""Acceptance criteria 1-12; each test prints one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` for the summary block, or
``python tests/test_acceptance.py`` to print the lines directly.
"""

import itertools
import random
import time
from fractions import Fraction

from mixedquiver.fields import QQ, PrimeField, Rationals, derive_rng
from mixedquiver.matrix import Matrix, sigma_coeff
from mixedquiver.paths import TraceExpression, enumerate_cycles, eval_expr
from mixedquiver.perms import Permutation, all_permutations
from mixedquiver.quiver import (
    DimensionVector,
    Quiver,
    Step,
    admissibility_sets,
    build_doubled,
    build_hat,
    loop_quiver,
    model_quiver,
    ortho_quiver,
)
from mixedquiver.relations import (
    PathElement,
    graded_span_dimension,
    substitute_sigma_r,
    verify_invariance,
    verify_vanishing,
)
from mixedquiver.reps import act, cayley_orthogonal, cayley_symplectic, random_group_element, random_rep
from mixedquiver.special import (
    SpecializationMap,
    compose,
    embed_group,
    embed_point,
    eq_t_residuals,
    eval_specialized,
    formal_word_matrix,
    generalized_vanishing,
    sigma_shift_identity,
    specialized_sigma,
)
from mixedquiver.trstar import (
    SymbolCycleWord,
    Sym,
    YoungLayout,
    in_LQ,
    model_hat,
    sigma_rs,
    suitable_generator,
    trstar_blocks,
    trstar_contract,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

FP = PrimeField()


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def mixed3():
    # ordinary vertex 1, pair (2, 3); g ends at the starred vertex, c leaves it
    return Quiver(3, [("a", 1, 1), ("b", 1, 2), ("e", 2, 2), ("g", 2, 3), ("c", 3, 1)], (1,), ((2, 3),))


def test_criterion_01_worked_example():
    start = time.perf_counter()
    hq = model_hat(7, 2)
    tau = Permutation.parse("(1 4 5)(2 6 7)", 7)
    w = trstar_blocks(tau, {2, 3}, hq)
    expected = SymbolCycleWord([[Sym(1), Sym(7), Sym(2, True), Sym(4, True)], [Sym(5, True), Sym(6)], [Sym(3)]])
    agree = w == trstar_contract(tau, hq)
    secs = time.perf_counter() - start
    ok = str(w) == "(1 7 ~2 ~4)(~5 6)(3)" and w == expected and agree and secs < 1
    report(1, ok, f"tr*((1 4 5)(2 6 7)) = {w}, contracting rules agree: {agree}, {secs:.3f} s")


def _multidegrees(q, r):
    n = len(q.arrows)
    for degs in itertools.product(range(r + 1), repeat=n):
        if sum(degs) == r:
            yield dict(zip(q.arrow_ids, degs))


def test_criterion_02_dual_algorithm_oracle():
    start = time.perf_counter()
    checked = mismatches = 0
    configs = [("loops", loop_quiver(2)), ("model", model_quiver()), ("mixed", mixed3())]
    for _, q in configs:
        for r in range(1, 7):
            for md in _multidegrees(q, r):
                try:
                    hq = build_hat(q, md)
                except ValueError:
                    continue  # vacuous multidegree
                sets = admissibility_sets(hq)
                for sigma in all_permutations(r):
                    if not in_LQ(sigma, sets):
                        continue
                    checked += 1
                    if trstar_contract(sigma, hq, sets) != trstar_blocks(sigma, (), hq, sets):
                        mismatches += 1
    secs = time.perf_counter() - start
    report(2, mismatches == 0 and checked > 0 and secs < 120,
           f"{checked} admissible permutations (r <= 6, three quivers), {mismatches} mismatches, {secs:.1f} s")


def test_criterion_03_sigma_r0_is_sigma_r():
    q = model_quiver()
    bad = total = 0
    for r in range(1, 6):
        e = sigma_rs(r, 0)
        for d in (r, r + 1, r + 2):
            dv = DimensionVector.of(q, d)
            for k in range(100):
                p = random_rep(q, dv, FP, derive_rng(3, r, d, k))
                total += 1
                bad += eval_expr(e, p) != sigma_coeff(p["X"], r)
    report(3, bad == 0, f"{total} evaluations over F_(2^61-1), {bad} disagreements")


def test_criterion_04_cayley_hamilton():
    q = loop_quiver()
    f = PathElement.of(q, "(a)")
    details, ok = [], True
    for d in range(1, 5):
        dv = DimensionVector.of(q, d)
        top = verify_vanishing(substitute_sigma_r(f, d + 1), q, dv, 200, FP, seed=d)
        low = verify_vanishing(substitute_sigma_r(f, d), q, dv, 10, FP, seed=d)
        ok &= top.outcome == "all-zero" and low.outcome == "counterexample"
        details.append(f"d={d}: {top.outcome}/{low.outcome}@{low.trials}")
    report(4, ok, "; ".join(details))


def test_criterion_05_relation_vanishing():
    start = time.perf_counter()
    q = model_quiver()
    ok, details = True, []
    for d, r, s in [(1, 2, 1), (1, 3, 1), (2, 3, 1), (2, 4, 2)]:
        rep = verify_vanishing(sigma_rs(r, s), q, DimensionVector.of(q, d), 200, FP, seed=5)
        ok &= rep.outcome == "all-zero"
        details.append(f"(d,r,s)=({d},{r},{s}) {rep.outcome}")
    probe = verify_vanishing(sigma_rs(2, 1), q, DimensionVector.of(q, 2), 200, FP, seed=5)
    ok &= probe.outcome == "counterexample"
    details.append(f"probe (2,2,1) {probe.outcome}")
    secs = time.perf_counter() - start
    report(5, ok and secs < 300, "; ".join(details) + f"; {secs:.1f} s")


# (quiver, r, s, sigma_1, layer sizes, a dimension where the layout is large, one where it is not)
SUITABLE_CASES = [
    ("loop", 3, 0, "", [3], 2, 3),
    ("loop", 4, 0, "(1 2)", [3, 1], 2, 3),
    ("model", 3, 1, "", [3], 2, 3),
    ("model", 4, 1, "(1 2)", [2, 2], 1, 2),
    ("model", 5, 1, "", [3, 2], 2, 3),
    ("model", 5, 2, "(1 3)", [3, 2], 2, 3),
]


def _suitable(kind, r, s, sig, sizes):
    if kind == "loop":
        q = loop_quiver(1, ["X"])
        hq = build_hat(q, {"X": r})
        key = ("v", 1)
    else:
        q = model_quiver()
        hq = model_hat(r, s)
        key = ("q", 0)
    layout = YoungLayout.from_sizes(admissibility_sets(hq), {key: sizes})
    return q, layout, suitable_generator(Permutation.parse(sig, r), layout)


def test_criterion_06_suitable_generators():
    ok, details = True, []
    for kind, r, s, sig, sizes, d_ok, d_bad in SUITABLE_CASES:
        q, layout, z = _suitable(kind, r, s, sig, sizes)
        dv_ok, dv_bad = DimensionVector.of(q, d_ok), DimensionVector.of(q, d_bad)
        good = verify_vanishing(z, q, dv_ok, 100, FP, seed=r)
        probe = verify_vanishing(z, q, dv_bad, 100, FP, seed=r)
        ok &= layout.sufficiently_large(dv_ok) and not layout.sufficiently_large(dv_bad)
        ok &= good.outcome == "all-zero" and probe.outcome == "counterexample"
        details.append(f"{kind} r={r} s={s} {sizes}: d={d_ok} {good.outcome}, d={d_bad} {probe.outcome}")
    report(6, ok, f"{len(SUITABLE_CASES)} generators; " + "; ".join(details))


def test_criterion_07_invariance():
    exprs = []
    for q, d in ((model_quiver(), 2), (mixed3(), 2), (loop_quiver(2), 2)):
        for c in enumerate_cycles(build_doubled(q), 3):
            exprs.append((str(c), q, d, TraceExpression.trace(c.word)))
    for r, s in [(2, 1), (3, 1), (4, 2), (4, 1)]:
        exprs.append((f"sigma_{r},{s}", model_quiver(), 3, sigma_rs(r, s)))
    for case in SUITABLE_CASES:
        q, _, z = _suitable(*case[:5])
        exprs.append((f"z{case[:5]}", q, case[6], z))
    failed = []
    for k, (name, q, d, e) in enumerate(exprs):
        rep = verify_invariance(e, q, DimensionVector.of(q, d), 100, seed=k, field=FP)
        if rep.outcome != "invariant":
            failed.append(name)
    report(7, not failed, f"{len(exprs)} expressions x 100 group elements, not invariant: {failed or 'none'}")


def test_criterion_08_sigma_shift_identity():
    F = Rationals()
    bad = total = 0
    for N in range(1, 9):
        for k in range(N + 1):
            for t in range(20):
                rng = derive_rng(8, N, k, t)
                lhs, rhs = sigma_shift_identity(N, k, Matrix.random(N, N, F, rng), F.random_element(rng))
                total += 1
                bad += lhs != rhs
    report(8, bad == 0, f"{total} instances (N <= 8, 0 <= k <= N) over Q, {bad} failures")


def test_criterion_09_coefficient_identities():
    # the identities are stated for r > n; the range below covers N - n <= 5, r <= 8
    start = time.perf_counter()
    nonzero = checked = probes = 0
    for D in range(1, 6):
        for n in range(0, 8):
            N = n + D
            for r in range(n + 1, 9):
                for res in eq_t_residuals(N, n, r):
                    checked += 1
                    nonzero += not res.is_zero()
                for t1 in range(n + 1):
                    for t2 in range(t1, n + 1):
                        checked += 1
                        nonzero += not generalized_vanishing(N, n, r, t1, t2).is_zero()
                if n + 1 <= N:
                    probes += not generalized_vanishing(N, n, r, 0, n + 1).is_zero()
    secs = time.perf_counter() - start
    report(9, nonzero == 0 and probes > 0 and secs < 60,
           f"{checked} polynomials, {nonzero} nonzero; {probes} nonzero probes at t2 = n + 1; {secs:.2f} s")


def _words(rng, count):
    letters = [Step(f"a{i}", b) for i in (1, 2, 3) for b in (False, True)]
    out = []
    for length in range(1, 5):
        for _ in range(count):
            out.append(tuple(rng.choice(letters) for _ in range(length)))
    return out


def test_criterion_10_orthogonal_symplectic_invariance():
    rng = random.Random(10)
    words = _words(rng, 2)
    checks, bad = 0, 0
    for flavor, dims, gen in (("O", (1, 2, 3, 4), cayley_orthogonal), ("Sp", (2, 4), cayley_symplectic)):
        for d in dims:
            group = [gen(d, derive_rng(10, flavor, d, k)) for k in range(100)]
            group = [(g, g.inverse()) for g in group]
            for w in words:
                mats = {f"a{i}": Matrix.random(d, d, QQ, rng) for i in (1, 2, 3)}
                exprs = [specialized_sigma(w, j, flavor, 3) for j in range(1, d + 1)]
                base = [eval_specialized(e, mats, flavor) for e in exprs]
                oracle = formal_word_matrix(w, mats, flavor, d)
                bad += any(b != sigma_coeff(oracle, j) for j, b in enumerate(base, 1))
                for g, gi in group:
                    moved = {a: g @ x @ gi for a, x in mats.items()}
                    checks += 1
                    bad += any(eval_specialized(e, moved, flavor) != b for e, b in zip(exprs, base))
    report(10, bad == 0, f"{len(words)} words (length <= 4, m = 3), d <= 4, {checks} (word, g) pairs, {bad} failures")


def test_criterion_11_specialization_coherence():
    q = ortho_quiver(2)
    bad = total = 0
    cases = [
        ("standard", SpecializationMap.standard, (5, 4, 2)),
        ("nonstandard", SpecializationMap.nonstandard, (5, 4, 2)),
        ("symplectic", SpecializationMap.symplectic_standard, (6, 4, 2)),
    ]
    for name, make, (Np, N, n) in cases:
        inner, outer = make(q, N, n), make(q, Np, N)
        both = compose(outer, inner)
        dv = DimensionVector.of(q, n)
        for k in range(100):
            rng = derive_rng(11, name, k)
            p = random_rep(q, dv, QQ, rng)
            g = random_group_element(dv, QQ, rng)
            total += 1
            bad += embed_point(act(p, g), inner) != act(embed_point(p, inner), embed_group(g, inner))
            bad += embed_point(embed_point(p, inner), outer) != embed_point(p, both)
    report(11, bad == 0, f"{total} random inputs over standard, non-standard (5,4,2) and symplectic (6,4,2); {bad} failures")


# ranks at d = 4, 3, 2, 1, fixed after the first verified run
FROZEN_RANKS = {"loop": [3, 3, 2, 1], "model": [6, 6, 5, 1]}


def test_criterion_12_graded_stabilization():
    got = {}
    for name, q, rbar in (("loop", loop_quiver(), {"a": 3}), ("model", model_quiver(), {"X": 1, "Y": 1, "Z": 1})):
        got[name] = [graded_span_dimension(q, DimensionVector.of(q, d), rbar, 16, FP, seed=12) for d in (4, 3, 2, 1)]
    ok = got == FROZEN_RANKS
    ok &= all(v[0] == v[1] and min(v[2:]) < v[1] for v in got.values())
    report(12, ok, f"ranks at d = 4,3,2,1: one-loop degree 3 {got['loop']}, three-arrow (1,1,1) {got['model']}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
