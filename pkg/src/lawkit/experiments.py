"""The bundled experiments: each reproduces one of the desk-checkable
counterexamples or censuses and returns a structured report."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Optional

from ._util import Budget
from .base import DELTA0, FIN, make_graph, make_set, nerve, hom_set
from .models import (
    enumerate_models,
    mutate_family,
    segal_check,
    segal_compare,
)
from .monadkit import (
    arity_category,
    builtin,
    catalan_census,
    coequalizer_experiment,
    factor_through,
    groupoid_pushout_probe,
    hom_census_formulas,
    nerve_arity_probe,
    pushout_preservation,
)
from .base import identity_map
from .pretheory import bundled
from .theorycheck import complete_to_theory, theories_isomorphic_bounded


@dataclass
class Report:
    command: str
    status: str               # "pass" | "fail" | "unknown"
    bounds: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {"pass": 0, "fail": 1, "unknown": 2}[self.status]

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "command": self.command,
            "status": self.status,
            "exit_code": self.exit_code,
            "bounds": self.bounds,
            "details": self.details,
        }

    def to_text(self) -> str:
        lines = [f"[{self.status}] {self.command}"]
        if self.bounds:
            lines.append("  bounds: " + ", ".join(f"{k}={v}" for k, v in sorted(self.bounds.items())))
        for k, v in self.details.items():
            lines.append(f"  {k}: {v}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def oracle_monoid_census(n: int) -> int:
    """Brute force count of (unit, associative binary operation) structures."""
    count = 0
    rng = range(n)
    for op in itertools.product(rng, repeat=n * n):
        def mul(x, y):
            return op[x * n + y]
        if any(mul(mul(a, b), c) != mul(a, mul(b, c))
               for a in rng for b in rng for c in rng):
            continue
        count += sum(1 for e in rng
                     if all(mul(e, x) == x and mul(x, e) == x for x in rng))
    return count


def oracle_monotone_maps(m: int, n: int) -> int:
    """Order-preserving maps {0..m} -> {0..n} by direct enumeration."""
    return sum(1 for _ in itertools.combinations_with_replacement(range(n + 1), m + 1))


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def run_monoid_census(max_size: int = 3, budget: Optional[Budget] = None) -> Report:
    p = bundled("monoid")
    rows = {}
    ok = True
    for n in range(max_size + 1):
        got = len(enumerate_models(p, make_set(n), budget))
        want = oracle_monoid_census(n)
        rows[str(n)] = {"models": got, "oracle": want}
        ok = ok and got == want
    return Report("experiment monoid-census", "pass" if ok else "fail",
                  {"max_size": max_size}, {"census": rows})


def run_eq36(num_graphs: int = 20, max_n: int = 3, seed: int = 2026,
             budget: Optional[Budget] = None) -> Report:
    rng = random.Random(seed)
    checks = 0
    failures = []
    graphs = []
    for _ in range(num_graphs):
        v = rng.randint(0, 4)
        e = 0 if v == 0 else rng.randint(0, 4)
        edges = tuple((rng.randrange(v), rng.randrange(v)) for _ in range(e))
        graphs.append((v, edges))
        x = make_graph(v, edges)
        for which in ("P", "Q"):
            for n in range(max_n + 1):
                r = hom_census_formulas(which, n, x, budget)
                checks += 1
                if not r["match"]:
                    failures.append({"graph": [v, list(map(list, edges))],
                                     "monad": which, "n": n,
                                     "direct": r["direct"], "closed": r["closed"]})
    return Report("experiment eq36", "pass" if not failures else "fail",
                  {"graphs": num_graphs, "max_n": max_n, "seed": seed},
                  {"checks": checks, "failures": failures})


def run_simplex(max_mn: int = 4, assoc_exhaustive: int = 2,
                assoc_samples: int = 500, seed: int = 7,
                *, budget: Optional[Budget] = None) -> Report:
    kt = arity_category(builtin("free-category"), DELTA0, list(range(max_mn + 1)), budget)
    counts_ok = True
    counts = {}
    for m in kt.window:
        for n in kt.window:
            size = kt.size(m, n)
            want = comb(m + n + 1, m + 1)
            counts[f"{m},{n}"] = size
            if size != want or size != oracle_monotone_maps(m, n):
                counts_ok = False
    assoc_ok = True
    small = [a for a in kt.window if a <= assoc_exhaustive]
    for a, b, c, d in itertools.product(small, repeat=4):
        for f in range(kt.size(a, b)):
            for g in range(kt.size(b, c)):
                fg = kt.compose(a, b, c, f, g)
                for h in range(kt.size(c, d)):
                    if kt.compose(a, c, d, fg, h) != \
                            kt.compose(a, b, d, f, kt.compose(b, c, d, g, h)):
                        assoc_ok = False
    rng = random.Random(seed)
    for _ in range(assoc_samples):
        a, b, c, d = (rng.choice(kt.window) for _ in range(4))
        if not (kt.size(a, b) and kt.size(b, c) and kt.size(c, d)):
            continue
        f = rng.randrange(kt.size(a, b))
        g = rng.randrange(kt.size(b, c))
        h = rng.randrange(kt.size(c, d))
        fg = kt.compose(a, b, c, f, g)
        gh = kt.compose(b, c, d, g, h)
        if kt.compose(a, c, d, fg, h) != kt.compose(a, b, d, f, gh):
            assoc_ok = False
    ok = counts_ok and assoc_ok
    return Report("experiment simplex", "pass" if ok else "fail",
                  {"max_mn": max_mn},
                  {"counts": counts, "counts_ok": counts_ok, "assoc_ok": assoc_ok})


def run_groupoid_pushout(budget: Optional[Budget] = None) -> Report:
    probe = groupoid_pushout_probe()
    rep = pushout_preservation(builtin("free-groupoid"), probe)
    witness = next((m for m in rep.missing
                    if m["component"] == "1" and m["src"] == "a" and m["tgt"] == "c"), None)
    expected = (not rep.surjective and rep.injective
                and rep.domain_sizes == {"0": 3, "1": 7}
                and rep.codomain_sizes == {"0": 3, "1": 9}
                and witness is not None)
    identity_ok = pushout_preservation(builtin("identity"), probe).preserved
    category_ok = pushout_preservation(builtin("free-category"), probe).preserved
    ok = expected and identity_ok and category_ok
    return Report("experiment groupoid-pushout", "pass" if ok else "fail", {},
                  {"domain_edges": rep.domain_sizes["1"],
                   "codomain_edges": rep.codomain_sizes["1"],
                   "missing": rep.missing,
                   "witness_a_to_c": witness,
                   "identity_preserves": identity_ok,
                   "free_category_preserves": category_ok})


def run_involutive_arities(budget: Optional[Budget] = None) -> Report:
    probe = groupoid_pushout_probe()
    rep = nerve_arity_probe(builtin("involutive"), probe, 2, budget)
    cat = nerve_arity_probe(builtin("free-category"), probe, 2, budget)
    witness_ok = "(r, i(s))" in rep.unhit
    ok = (not rep.passed) and witness_ok and cat.passed
    return Report("experiment involutive-arities", "pass" if ok else "fail",
                  {"arity": 2},
                  {"involutive_total": rep.total, "involutive_hit": rep.hit,
                   "unhit": rep.unhit, "free_category_passes": cat.passed})


def run_catalan(max_nodes: int = 6, sizes: tuple[int, ...] = (1, 2, 3),
                budget: Optional[Budget] = None) -> Report:
    rows = {}
    ok = True
    for s in sizes:
        r = catalan_census(s, max_nodes)
        rows[str(s)] = {"counts": {str(k): v for k, v in r["counts"].items()},
                        "total": r["total"], "match": r["match"]}
        ok = ok and r["match"]
    return Report("experiment catalan", "pass" if ok else "fail",
                  {"max_nodes": max_nodes, "sizes": list(sizes)}, {"census": rows})


def run_saturation(budget: Optional[Budget] = None) -> Report:
    none4 = factor_through(identity_map(make_set(4)), make_set(2), budget)
    some2 = factor_through(identity_map(make_set(2)), make_set(2), budget)
    const = factor_through(
        identity_map(make_set(1)), make_set(1), budget)
    ok = none4 is None and some2 is not None and const is not None
    return Report("experiment saturation", "pass" if ok else "fail", {},
                  {"id4_through_2": "none" if none4 is None else "found",
                   "id2_through_2": "found" if some2 is not None else "none",
                   "id1_through_1": "found" if const is not None else "none"})


def run_coequalizer(max_vertices: int = 3, max_edges: int = 3,
                    budget: Optional[Budget] = None) -> Report:
    r = coequalizer_experiment(max_vertices, max_edges)
    return Report("experiment coequalizer", "pass" if r["ok"] else "fail",
                  {"max_vertices": max_vertices, "max_edges": max_edges},
                  {"graphs": r["graph_count"], "aggregate": r["aggregate"]})


SEGAL_CATEGORIES = [
    ("terminal", 1, ((0, 0),)),
    ("discrete-2", 2, ((0, 0), (1, 1))),
    ("arrow", 2, ((0, 0), (1, 1), (0, 1))),
    ("parallel-pair", 2, ((0, 0), (1, 1), (0, 1), (0, 1))),
    ("group-z2", 1, ((0, 0), (0, 0))),
    ("group-z3", 1, ((0, 0), (0, 0), (0, 0))),
    ("poset-chain-2", 3, ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2))),
    ("span", 3, ((0, 0), (1, 1), (2, 2), (1, 0), (1, 2))),
    ("cospan", 3, ((0, 0), (1, 1), (2, 2), (0, 1), (2, 1))),
    ("discrete-4", 4, ((0, 0), (1, 1), (2, 2), (3, 3))),
]


def run_segal(max_n: int = 4, budget: Optional[Budget] = None) -> Report:
    rows = {}
    ok = True
    for k, (name, nv, edges) in enumerate(SEGAL_CATEGORIES):
        x = make_graph(nv, edges)
        fam = nerve(DELTA0, x, list(range(max_n + 1)), budget)
        passes = all(segal_check(fam, n) for n in range(1, max_n + 1))
        op = "remove" if k % 2 == 0 else "duplicate"
        mutant = mutate_family(fam, 2, op, 0)
        w = segal_compare(mutant, 2)
        mutant_fails = w is not None and w["arity"] == 2
        rows[name] = {"nerve_passes": passes, "mutation": op,
                      "mutant_witness": w}
        ok = ok and passes and mutant_fails
    return Report("experiment segal", "pass" if ok else "fail",
                  {"max_n": max_n}, {"categories": rows})


EXPERIMENTS = {
    "monoid-census": run_monoid_census,
    "eq36": run_eq36,
    "simplex": run_simplex,
    "groupoid-pushout": run_groupoid_pushout,
    "involutive-arities": run_involutive_arities,
    "catalan": run_catalan,
    "saturation": run_saturation,
    "segal": run_segal,
    "coequalizer": run_coequalizer,
}


def run_experiment(name: str, budget: Optional[Budget] = None) -> Report:
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; "
                       f"known: {', '.join(sorted(EXPERIMENTS))}")
    return EXPERIMENTS[name](budget=budget or Budget())
