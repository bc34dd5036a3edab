import random
from fractions import Fraction

import pytest

from mixedquiver.fields import PrimeField
from mixedquiver.matrix import sigma_coeff
from mixedquiver.paths import TraceExpression, eval_expr, parse_cycles
from mixedquiver.perms import Permutation, all_permutations
from mixedquiver.quiver import DimensionVector, Quiver, admissibility_sets, build_hat, loop_quiver, model_quiver
from mixedquiver.relations import verify_vanishing
from mixedquiver.reps import random_rep
from mixedquiver.trstar import (
    CapExceeded,
    Sym,
    SymbolCycleWord,
    TrStarError,
    YoungLayout,
    base_sum,
    fiber_group,
    in_LQ,
    in_S0,
    model_hat,
    rho_shift,
    sigma_rs,
    suitable_generator,
    trstar_blocks,
    trstar_contract,
    word_to_expression,
)


def tr(text, coeff=1):
    return TraceExpression.trace(parse_cycles(text)[0], coeff)


def test_worked_example():
    hq = model_hat(7, 2)
    tau = Permutation.parse("(1 4 5)(2 6 7)", 7)
    w = trstar_blocks(tau, {2, 3}, hq)
    assert str(w) == "(1 7 ~2 ~4)(~5 6)(3)"
    assert w == trstar_contract(tau, hq)
    expected = SymbolCycleWord([[Sym(1), Sym(7), Sym(2, True), Sym(4, True)], [Sym(5, True), Sym(6)], [Sym(3)]])
    assert w == expected
    assert w.canonical_str() == expected.canonical_str()


def test_symbol_word_equality_ignores_rotation_and_iota():
    a = SymbolCycleWord([[Sym(1), Sym(2, True)], [Sym(3)]])
    b = SymbolCycleWord([[Sym(3)], [Sym(2), Sym(1, True)]])
    assert a == b and hash(a) == hash(b)
    with pytest.raises(TrStarError):
        SymbolCycleWord([[Sym(1), Sym(1, True)]])


def test_identity_on_loops_gives_singletons():
    hq = build_hat(loop_quiver(), {"a": 4})
    w = trstar_contract(Permutation.identity(4), hq)
    assert w == SymbolCycleWord([[Sym(k)] for k in range(1, 5)])


def test_non_admissible_rejected():
    hq = build_hat(mixed3(), {"a": 1, "e": 1})
    bad = Permutation.parse("(1 2)", 2)  # would send the loop at 1 into vertex 2
    assert not in_LQ(bad, admissibility_sets(hq))
    with pytest.raises(TrStarError):
        trstar_contract(bad, hq)
    with pytest.raises(TrStarError):
        trstar_blocks(Permutation.identity(3), {2}, model_hat(3, 1))  # 2 is not a first-class arrow


def mixed3():
    return Quiver(3, [("a", 1, 1), ("b", 1, 2), ("e", 2, 2), ("g", 2, 3), ("c", 3, 1)], (1,), ((2, 3),))


def test_blocks_agree_with_contracting_rules_under_random_passive_sets():
    rng = random.Random(11)
    q = mixed3()
    for md in ({"a": 1, "b": 1, "g": 1, "c": 1}, {"a": 1, "e": 1, "g": 1, "c": 1, "b": 1}, {"b": 1, "e": 1, "g": 2, "c": 2}):
        hq = build_hat(q, md)
        sets = admissibility_sets(hq)
        first = [j for j in range(1, hq.r + 1) if hq.arrow_class(j) == 1]
        for sigma in all_permutations(hq.r):
            if not in_LQ(sigma, sets):
                continue
            B = [x for x in first if rng.random() < 0.5]
            assert trstar_blocks(sigma, B, hq, sets) == trstar_contract(sigma, hq, sets)


def test_word_to_expression():
    hq = model_hat(7, 2)
    w = trstar_contract(Permutation.parse("(1 4 5)(2 6 7)", 7), hq)
    e = word_to_expression(w, hq)
    # f sends 1..3 to X, 4..5 to Y, 6..7 to Z
    assert e == tr("(X Z ~X ~Y)") * tr("(~Y Z)") * tr("(X)")


def test_small_sigma_rs():
    assert sigma_rs(1, 0) == tr("(X)")
    assert sigma_rs(2, 0) == (tr("(X)") * tr("(X)") - tr("(X X)")).scale(Fraction(1, 2))
    assert sigma_rs(2, 1) == tr("(Y Z)", -1) + tr("(Y ~Z)")


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_sigma_r0_is_charpoly_coefficient(r):
    F = PrimeField()
    q = model_quiver()
    e = sigma_rs(r, 0)
    for d in (r - 1 if r > 1 else r, r, r + 1):
        for seed in range(5):
            p = random_rep(q, DimensionVector.of(q, d), F, seed)
            assert eval_expr(e, p) == sigma_coeff(p["X"], r)


def test_cap():
    with pytest.raises(CapExceeded):
        sigma_rs(5, 1, cap=4)


def test_rho_shifts():
    hq = model_hat(5, 1)  # classes [1..3], [4], [5]
    pi = Permutation.parse("(1 2)", 5)
    assert in_S0(pi, hq)
    assert rho_shift(pi, 1, hq) == pi
    with pytest.raises(TrStarError):
        rho_shift(Permutation.parse("(3 4)", 5), 1, hq)
    hq = build_hat(model_quiver(), {"X": 1, "Y": 2, "Z": 2})
    pi = Permutation.parse("(2 3)", 5)
    assert rho_shift(pi, 1, hq) == Permutation.parse("(2 3)(4 5)", 5)
    pi = Permutation.parse("(4 5)", 5)
    assert rho_shift(pi, 2, hq) == Permutation.parse("(2 3)(4 5)", 5)


def _subgroup(sigma1, layout):
    hq = layout.sets.hat
    inv = sigma1.inverse()
    return [
        pi for pi in fiber_group(hq)
        if layout.contains(inv * rho_shift(pi, 1, hq) * sigma1) and layout.contains(rho_shift(pi, 2, hq))
    ]


@pytest.mark.parametrize(
    "r,s,sizes",
    [(3, 0, [1, 2]), (3, 0, [2, 1]), (4, 1, [2, 2]), (4, 1, [1, 3]), (5, 2, [3, 2]), (5, 1, [1, 1, 3])],
)
def test_suitable_generator_coset_oracle(r, s, sizes):
    # every coset contributes the same base sum, so z = base_sum / |H|
    hq = model_hat(r, s)
    sets = admissibility_sets(hq)
    layout = YoungLayout.from_sizes(sets, {("q", 0): sizes})
    admissible = [p for p in all_permutations(r) if in_LQ(p, sets)]
    for sigma1 in admissible[:6]:
        H = _subgroup(sigma1, layout)
        assert suitable_generator(sigma1, layout) == base_sum(sigma1, layout).scale(Fraction(1, len(H)))


def test_suitable_generator_vanishes_when_large():
    hq = model_hat(3, 1)
    layout = YoungLayout.from_sizes(admissibility_sets(hq), {("q", 0): [3]})
    z = suitable_generator(Permutation.identity(3), layout)
    q = model_quiver()
    for d, outcome in ((2, "all-zero"), (3, "counterexample")):
        dv = DimensionVector.of(q, d)
        assert layout.sufficiently_large(dv) == (d < 3)
        assert verify_vanishing(z, q, dv, 30, seed=d).outcome == outcome


def test_layout_validation():
    sets = admissibility_sets(model_hat(4, 1))
    with pytest.raises(ValueError):
        YoungLayout.from_sizes(sets, {("q", 0): [2, 3]})
    with pytest.raises(ValueError):
        YoungLayout(sets, {("q", 0): [[1, 3], [2, 4]]})
    single = YoungLayout.singletons(sets)
    assert len(single.group()) == 1
