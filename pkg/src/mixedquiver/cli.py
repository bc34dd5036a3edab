"""Command-line front end.

Exit status: 0 when every assertion of the run holds, 1 when one fails,
2 for invalid input or configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import deque
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .fields import QQ, Rationals, derive_rng, parse_field
from .matrix import Matrix, sigma_coeff
from .paths import PathError, TraceExpression, enumerate_cycles, format_word
from .perms import Permutation
from .quiver import (
    DimensionVector,
    QuiverError,
    Step,
    build_doubled,
    build_hat,
    admissibility_sets,
    load_quiver,
    loop_quiver,
    model_quiver,
    parse_dims,
)
from .relations import (
    PathElement,
    graded_span_dimension,
    substitute_sigma_r,
    substitute_sigma_rs,
    verify_invariance,
    verify_vanishing,
)
from .reps import cayley_orthogonal, cayley_symplectic
from .special import (
    ORTHOGONAL,
    SYMPLECTIC,
    alpha_by_recursion,
    alpha_coeffs,
    eq_t_residuals,
    eval_specialized,
    formal_word_matrix,
    generalized_vanishing,
    locus_equations,
    locus_point,
    parse_flavor,
    sigma_shift_identity,
    specialized_sigma,
)
from .trstar import (
    DEFAULT_R_CAP,
    TrStarError,
    YoungLayout,
    model_hat,
    sigma_rs,
    suitable_generator,
    trstar_blocks,
    trstar_contract,
)


class ConfigError(ValueError):
    pass


# builtin defaults; argparse defaults are None so config values can fill gaps
DEFAULTS = {
    "field": "fp",
    "trials": 200,
    "max_len": 3,
    "r_cap": DEFAULT_R_CAP,
    "format": "text",
    "emit": "expr",
    "points": 20,
    "m": 3,
    "d": 4,
    "len": 4,
    "words": 8,
    "flavor": "both",
    "samples": 20,
    "which": "all",
    "expect": "auto",
}

RANDOMIZED = {"verify", "ortho", "span"}


def _common(p: argparse.ArgumentParser, *names: str) -> None:
    if "quiver" in names:
        p.add_argument("--quiver", help="quiver JSON file")
    if "dims" in names:
        p.add_argument("--dims", help='dimensions, e.g. "1:2,2:2"')
    if "field" in names:
        p.add_argument("--field", help="q or fp:<prime> (default fp:2^61-1)")
    if "seed" in names:
        p.add_argument("--seed", type=int, help="RNG seed (required for randomized runs)")
    if "trials" in names:
        p.add_argument("--trials", type=int)
    p.add_argument("--r-cap", dest="r_cap", type=int, help="largest r expanded over S_r")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--format", choices=["json", "text"], help="stdout format")
    p.add_argument("--config", help="TOML file mirroring the flags; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixedquiver", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cycles", help="list canonical cycles of the doubled quiver")
    _common(p, "quiver")
    p.add_argument("--max-len", dest="max_len", type=int)
    p.add_argument("--base-vertex", dest="base_vertex", type=int)

    p = sub.add_parser("trstar", help="tr*(sigma) on the three-arrow model quiver")
    _common(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--perm", required=True, help='cycle notation, e.g. "(1 4 5)(2 6 7)"')
    p.add_argument("--passive", help="comma-separated passive set B (uses block joining)")

    p = sub.add_parser("sigma-rs", help="expand sigma_{r,s}")
    _common(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--emit", choices=["expr", "latex", "json"])

    p = sub.add_parser("verify", help="randomized verification suites")
    vsub = p.add_subparsers(dest="suite", required=True)
    v = vsub.add_parser("relations", help="sigma_r(f) / sigma_{r,s}(f1,f2,f3) vanishing")
    _common(v, "quiver", "dims", "field", "seed", "trials")
    v.add_argument("--r", type=int, required=True)
    v.add_argument("--s", type=int, default=0)
    v.add_argument("--f", help='closed path element for sigma_r, e.g. "(a) + 2 (c b)"')
    v.add_argument("--f1")
    v.add_argument("--f2")
    v.add_argument("--f3")
    v.add_argument("--expect", choices=["auto", "vanish", "nonvanish"])
    v = vsub.add_parser("suitable", help="suitable generators on the model quiver")
    _common(v, "dims", "field", "seed", "trials")
    v.add_argument("--r", type=int, required=True)
    v.add_argument("--s", type=int, default=0)
    v.add_argument("--sigma", default="", help="sigma_1 in cycle notation (default identity)")
    v.add_argument("--layout", help='layer sizes per argument set, e.g. "q0:2,1"')
    v = vsub.add_parser("invariance", help="invariance of cycles (and sigma_{r,s}) under the group")
    _common(v, "quiver", "dims", "field", "seed", "trials")
    v.add_argument("--max-len", dest="max_len", type=int)
    v.add_argument("--r", type=int)
    v.add_argument("--s", type=int, default=0)

    p = sub.add_parser("identities", help="coefficient identities (exact)")
    _common(p, "seed")
    p.add_argument("--which", choices=["all", "lemma4.1", "eqt", "genvanish"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("ortho", help="orthogonal/symplectic invariance of specialized generators")
    _common(p, "seed", "trials")
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--len", type=int)
    p.add_argument("--words", type=int, help="number of random words")
    p.add_argument("--flavor", choices=["O", "Sp", "both"])

    p = sub.add_parser("span", help="rank of a graded component by evaluation")
    _common(p, "quiver", "dims", "field", "seed")
    p.add_argument("--rbar", required=True, help='multidegree, e.g. "a1:1,b:1,c:1"')
    p.add_argument("--points", type=int)
    return parser


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the TOML config, then from builtin defaults."""
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        config = {k: v for k, v in data.items() if not isinstance(v, dict)}
        section = data.get(args.command, {})
        if isinstance(section, dict):
            config.update({k: v for k, v in section.items() if not isinstance(v, dict)})
            suite = getattr(args, "suite", None)
            if suite and isinstance(section.get(suite), dict):
                config.update(section[suite])
        config = {k.replace("-", "_"): v for k, v in config.items()}
    for key, value in vars(args).items():
        if value is None:
            if key in config:
                setattr(args, key, config[key])
            elif key in DEFAULTS:
                setattr(args, key, DEFAULTS[key])
    if args.r_cap is not None and args.r_cap < 1:
        raise ConfigError("--r-cap must be positive")
    if getattr(args, "max_len", None) is not None and args.max_len < 1:
        raise ConfigError("--max-len must be positive")
    if getattr(args, "trials", None) is not None and args.trials < 1:
        raise ConfigError("--trials must be positive")
    if args.command in RANDOMIZED and getattr(args, "seed", None) is None:
        raise ConfigError(f"{args.command} is randomized: --seed is required")
    if hasattr(args, "field"):
        args.field_obj = parse_field(str(args.field))
    return args


# -- helpers ----------------------------------------------------------------------------------

def _quiver_and_dims(args, fallback):
    if args.quiver:
        q, dims = load_quiver(args.quiver)
    else:
        q, dims = fallback(), None
    if getattr(args, "dims", None):
        dims = parse_dims(args.dims)
    return q, dims


def _dv(q, dims, default=None):
    if dims is None:
        if default is None:
            raise ConfigError("--dims is required")
        dims = default
    return DimensionVector.of(q, dims)


def _shortest_path(q, start, goal):
    """Shortest nonempty path in the doubled quiver, as a trace-order word."""
    dq = build_doubled(q)
    queue = deque([(start, ())])
    seen = set()
    while queue:
        v, walk = queue.popleft()
        for s in dq.out_steps(v):
            w = dq.end(s)
            nw = walk + (s,)
            if w == goal:
                return tuple(reversed(nw))
            if w not in seen:
                seen.add(w)
                queue.append((w, nw))
    return None


def _default_relation_inputs(q, s):
    for v in q.base_vertices:
        u = (v, False)
        f1 = _shortest_path(q, u, u)
        if f1 is None:
            continue
        if s == 0:
            return {"f": PathElement(q, {f1: 1})}
        w = q.phi(u)
        f2, f3 = _shortest_path(q, u, w), _shortest_path(q, w, u)
        if f2 and f3:
            return {"f1": PathElement(q, {f1: 1}), "f2": PathElement(q, {f2: 1}), "f3": PathElement(q, {f3: 1})}
    raise ConfigError("the quiver has no vertex carrying the required paths; pass --f or --f1/--f2/--f3")


class Run:
    """Collects report items and the overall pass/fail status."""

    def __init__(self, args):
        self.args = args
        self.items = []
        self.timing = []
        self.ok = True
        self.lines = []

    def add(self, item: dict, passed: bool | None, line: str, ms: float | None = None):
        if passed is not None:
            item["passed"] = passed
            self.ok &= passed
        self.items.append(item)
        self.timing.append(round(ms, 3) if ms is not None else None)
        self.lines.append(line)

    def finish(self, extra: dict | None = None) -> int:
        report = {"command": self.args.command, "passed": self.ok, "items": self.items}
        if getattr(self.args, "suite", None):
            report["suite"] = self.args.suite
        if getattr(self.args, "seed", None) is not None:
            report["seed"] = self.args.seed
        if extra:
            report.update(extra)
        report["timing"] = {"ms": self.timing}
        text = json.dumps(report, indent=2, sort_keys=True)
        if self.args.out:
            Path(self.args.out).write_text(text + "\n")
        if self.args.format == "json":
            print(text)
        else:
            for line in self.lines:
                print(line)
        return 0 if self.ok else 1


# -- subcommands ---------------------------------------------------------------------------------

def cmd_cycles(args) -> int:
    q, _ = _quiver_and_dims(args, model_quiver)
    run = Run(args)
    for c in enumerate_cycles(build_doubled(q), args.max_len, args.base_vertex):
        run.add({"cycle": str(c), "length": len(c), "primitive": c.is_primitive()}, None,
                str(c) if c.is_primitive() else f"{c}  (not primitive)")
    return run.finish()


def cmd_trstar(args) -> int:
    hq = model_hat(args.r, args.s)
    sigma = Permutation.parse(args.perm, args.r)
    run = Run(args)
    contract = trstar_contract(sigma, hq)
    if args.passive is not None:
        B = [int(x) for x in args.passive.split(",") if x.strip()]
        blocks = trstar_blocks(sigma, B, hq)
        agree = blocks == contract
        run.add({"perm": str(sigma), "passive": sorted(B), "blocks": str(blocks),
                 "contract": str(contract), "canonical": blocks.canonical_str(), "agree": agree},
                agree, str(blocks) if agree else f"{blocks} != {contract} (contracting rules)")
    else:
        run.add({"perm": str(sigma), "contract": str(contract), "canonical": contract.canonical_str()},
                None, str(contract))
    return run.finish()


def cmd_sigma_rs(args) -> int:
    e = sigma_rs(args.r, args.s, args.r_cap)
    run = Run(args)
    if args.emit == "latex":
        line = e.to_latex()
    elif args.emit == "json":
        line = json.dumps(e.to_json(), indent=2)
    else:
        line = str(e)
    run.add({"r": args.r, "s": args.s, "terms": e.to_json()}, None, line)
    return run.finish()


def cmd_verify_relations(args) -> int:
    F = args.field_obj
    parse = lambda q, t: PathElement.of(q, t)  # noqa: E731
    if args.quiver:
        q, dims = _quiver_and_dims(args, model_quiver)
    else:
        q = loop_quiver() if args.s == 0 and not (args.f1 or args.f2 or args.f3) else model_quiver()
        dims = parse_dims(args.dims) if args.dims else None
    dv = _dv(q, dims)
    if args.s == 0 and not args.f1:
        f = parse(q, args.f) if args.f else _default_relation_inputs(q, 0)["f"]
        e = substitute_sigma_r(f, args.r, args.r_cap)
        name = f"sigma_{args.r}({f})"
        bound = dv[f.origin]
    else:
        if args.f1:
            f1, f2, f3 = (parse(q, getattr(args, k)) for k in ("f1", "f2", "f3"))
        else:
            ins = _default_relation_inputs(q, args.s)
            f1, f2, f3 = ins["f1"], ins["f2"], ins["f3"]
        e = substitute_sigma_rs(f1, f2, f3, args.r, args.s, args.r_cap)
        name = f"sigma_{{{args.r},{args.s}}}({f1}; {f2}; {f3})"
        bound = dv[f1.origin]
    expect = args.expect
    if expect == "auto":
        expect = "vanish" if args.r > bound else "nonvanish"
    rep = verify_vanishing(e, q, dv, args.trials, F, args.seed, name=name)
    passed = (rep.outcome == "all-zero") == (expect == "vanish")
    item = rep.to_json(timing=False)
    item["expected"] = expect
    run = Run(args)
    run.add(item, passed, f"{'PASS' if passed else 'FAIL'} {name}: {rep.outcome} after {rep.trials} trials"
            f" (expected {expect})", rep.ms)
    return run.finish()


def _parse_layout(text, sets):
    sizes = {}
    if text:
        for part in text.split(";"):
            part = part.strip()
            if not part:
                continue
            key, _, vals = part.partition(":")
            kind, idx = key[0], int(key[1:])
            sizes[(kind, idx)] = [int(x) for x in vals.split(",") if x.strip()]
    return YoungLayout.from_sizes(sets, sizes)


def cmd_verify_suitable(args) -> int:
    F = args.field_obj
    if args.s == 0:
        q = loop_quiver(1, ["X"])
        hq = build_hat(q, {"X": args.r})
    else:
        q = model_quiver()
        hq = model_hat(args.r, args.s)
    sets = admissibility_sets(hq)
    layout = _parse_layout(args.layout, sets)
    sigma1 = Permutation.parse(args.sigma, args.r)
    dv = _dv(q, parse_dims(args.dims) if args.dims else None)
    z = suitable_generator(sigma1, layout, args.r_cap)
    large = layout.sufficiently_large(dv)
    rep = verify_vanishing(z, q, dv, args.trials, F, args.seed, name=f"z({sigma1}, {layout.layers})")
    item = rep.to_json(timing=False)
    item["sufficiently_large"] = large
    passed = rep.outcome == "all-zero" if large else None
    status = "PASS" if passed else ("FAIL" if passed is False else "INFO")
    run = Run(args)
    run.add(item, passed, f"{status} suitable generator, layout {'large' if large else 'not large'}: {rep.outcome}", rep.ms)
    return run.finish()


def cmd_verify_invariance(args) -> int:
    F = args.field_obj
    q, dims = _quiver_and_dims(args, model_quiver)
    dv = _dv(q, dims, default=2)
    exprs = [(str(c), TraceExpression.trace(c.word)) for c in enumerate_cycles(build_doubled(q), args.max_len)]
    if args.r is not None:
        if args.quiver:
            raise ConfigError("--r applies to the built-in model quiver only")
        exprs.append((f"sigma_{{{args.r},{args.s}}}", sigma_rs(args.r, args.s, args.r_cap)))
    run = Run(args)
    for k, (name, e) in enumerate(exprs):
        rep = verify_invariance(e, q, dv, args.trials, seed=args.seed + k, field=F, name=name)
        passed = rep.outcome == "invariant"
        run.add(rep.to_json(timing=False), passed, f"{'PASS' if passed else 'FAIL'} {name}: {rep.outcome}", rep.ms)
    return run.finish()


def cmd_identities(args) -> int:
    N, n, r = args.N, args.n, args.r
    if not N > n >= 0:
        raise ConfigError("need N > n >= 0")
    run = Run(args)
    which = args.which
    if which in ("all", "lemma4.1"):
        seed = args.seed if args.seed is not None else 0
        F = Rationals()
        for k in range(N + 1):
            ok = True
            for t in range(args.samples):
                rng = derive_rng(seed, "shift", N, k, t)
                X = Matrix.random(N, N, F, rng)
                y = F.random_element(rng)
                lhs, rhs = sigma_shift_identity(N, k, X, y)
                ok &= lhs == rhs
            run.add({"identity": "lemma4.1", "N": N, "k": k, "samples": args.samples}, ok,
                    f"{'PASS' if ok else 'FAIL'} sigma_{k}(X + yE({N})) expansion, {args.samples} samples")
    if which in ("all", "eqt"):
        alpha = alpha_coeffs(N, n, r)
        same = alpha == alpha_by_recursion(N, n, r)
        run.add({"identity": "alpha", "N": N, "n": n, "r": r}, same,
                f"{'PASS' if same else 'FAIL'} closed form of alpha agrees with the triangular solve")
        for t, res in enumerate(eq_t_residuals(N, n, r, alpha)):
            run.add({"identity": "eqt", "t": t, "residual": str(res)}, res.is_zero(),
                    f"{'PASS' if res.is_zero() else 'FAIL'} Eq_{t}: {res}")
    if which in ("all", "genvanish"):
        if r <= n:
            raise ConfigError("the generalized sums vanish only for r > n")
        alpha = alpha_coeffs(N, n, r)
        for t1 in range(n + 1):
            for t2 in range(t1, n + 1):
                v = generalized_vanishing(N, n, r, t1, t2, alpha)
                run.add({"identity": "genvanish", "t1": t1, "t2": t2, "value": str(v)}, v.is_zero(),
                        f"{'PASS' if v.is_zero() else 'FAIL'} (t1, t2) = ({t1}, {t2}): {v}")
        probe = generalized_vanishing(N, n, r, 0, n + 1, alpha)
        run.add({"identity": "genvanish-probe", "t1": 0, "t2": n + 1, "value": str(probe)}, not probe.is_zero(),
                f"{'PASS' if not probe.is_zero() else 'FAIL'} probe (0, {n + 1}) is nonzero: {probe}")
    return run.finish()


def _random_word(rng, m, length):
    return tuple(Step(f"a{rng.randint(1, m)}", rng.random() < 0.5) for _ in range(length))


def cmd_ortho(args) -> int:
    flavors = [ORTHOGONAL, SYMPLECTIC] if args.flavor == "both" else [parse_flavor(args.flavor)]
    run = Run(args)
    F = QQ
    for flavor in flavors:
        if flavor == SYMPLECTIC and args.d % 2:
            run.add({"flavor": flavor, "skipped": "odd d"}, None, f"SKIP {flavor}: d = {args.d} is odd")
            continue
        gen = cayley_orthogonal if flavor == ORTHOGONAL else cayley_symplectic
        rng = derive_rng(args.seed, "ortho", flavor)
        p = locus_point(flavor, args.d, args.m, F, derive_rng(args.seed, "locus", flavor))
        z, u = locus_equations(p, flavor)
        zero = Matrix.zeros(args.d, args.d, F)
        ok = z == zero and u == zero
        run.add({"flavor": flavor, "check": "locus"}, ok, f"{'PASS' if ok else 'FAIL'} {flavor} locus point satisfies T_d")
        for w in range(args.words):
            word = _random_word(rng, args.m, rng.randint(1, args.len))
            start = time.perf_counter()
            mats = {f"a{i}": Matrix.random(args.d, args.d, F, rng) for i in range(1, args.m + 1)}
            exprs = {j: specialized_sigma(word, j, flavor, args.m) for j in range(1, args.d + 1)}
            base = {j: eval_specialized(e, mats, flavor) for j, e in exprs.items()}
            oracle = formal_word_matrix(word, mats, flavor, args.d, F)
            ok = all(base[j] == sigma_coeff(oracle, j) for j in exprs)
            for t in range(args.trials):
                g = gen(args.d, derive_rng(args.seed, "g", flavor, w, t))
                gi = g.inverse()
                moved = {a: g @ x @ gi for a, x in mats.items()}
                ok &= all(eval_specialized(e, moved, flavor) == base[j] for j, e in exprs.items())
            name = format_word(word)
            run.add({"flavor": flavor, "word": name, "sigmas": list(exprs), "trials": args.trials}, ok,
                    f"{'PASS' if ok else 'FAIL'} {flavor} sigma_j{name}, j <= {args.d}: invariant under {args.trials} elements",
                    (time.perf_counter() - start) * 1000)
    return run.finish()


def cmd_span(args) -> int:
    q, dims = _quiver_and_dims(args, model_quiver)
    dv = _dv(q, dims)
    rbar = {}
    for part in args.rbar.split(","):
        a, _, k = part.partition(":")
        rbar[a.strip()] = int(k)
    rank = graded_span_dimension(q, dv, rbar, args.points, args.field_obj, args.seed)
    run = Run(args)
    run.add({"rbar": rbar, "dims": list(dv.dims), "points": args.points, "rank": rank}, None, str(rank))
    return run.finish()


COMMANDS = {
    "cycles": cmd_cycles,
    "trstar": cmd_trstar,
    "sigma-rs": cmd_sigma_rs,
    ("verify", "relations"): cmd_verify_relations,
    ("verify", "suitable"): cmd_verify_suitable,
    ("verify", "invariance"): cmd_verify_invariance,
    "identities": cmd_identities,
    "ortho": cmd_ortho,
    "span": cmd_span,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
        key = (args.command, args.suite) if args.command == "verify" else args.command
        return COMMANDS[key](args)
    except (ConfigError, QuiverError, PathError, TrStarError, ValueError, KeyError, OSError, ZeroDivisionError) as exc:
        payload = exc.to_json() if isinstance(exc, QuiverError) else {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
