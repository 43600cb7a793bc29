"""Computable monads, Kleisli arity categories, and the probes."""

import itertools
from math import comb

import pytest

from lawkit.base import (
    DELTA0,
    FIN,
    graph_edges,
    hom_set,
    identity_map,
    make_graph,
    make_set,
)
from lawkit.monadkit import (
    CATALAN,
    TruncationError,
    arity_category,
    builtin,
    catalan_census,
    coequalizer_experiment,
    factor_through,
    free_monad_from_signature,
    groupoid_pushout_probe,
    hom_census_formulas,
    nerve_arity_probe,
    pushout_preservation,
)
from lawkit.pretheory import make_signature


# ---------------------------------------------------------------------------
# builtin values
# ---------------------------------------------------------------------------

def test_free_category_on_paths():
    T = builtin("free-category")
    for n in range(4):
        tv = T.at(DELTA0.realize(n))
        assert tv.exact
        assert tv.carrier.size("0") == n + 1
        # nonempty paths n(n+1)/2 plus n+1 identity paths
        assert tv.carrier.size("1") == n * (n + 1) // 2 + (n + 1)


def test_free_category_truncates_on_cycles():
    T = builtin("free-category")
    loop = make_graph(1, ((0, 0),))
    tv = T.at(loop)
    assert not tv.exact


def test_pointing_monad_shape():
    # P X = X + X_1 . [0]
    x = make_graph(3, ((0, 1), (2, 1)))
    tv = builtin("pointing").at(x)
    assert tv.carrier.size("0") == 5 and tv.carrier.size("1") == 2
    assert graph_edges(tv.carrier) == graph_edges(x)


def test_free_involution_monad_shape():
    # Q X = X + X_1 . [1]
    x = make_graph(3, ((0, 1), (2, 1)))
    tv = builtin("free-involution").at(x)
    assert tv.carrier.size("0") == 7 and tv.carrier.size("1") == 4


def test_involutive_monad_shape():
    x = make_graph(3, ((0, 1), (2, 1)))
    tv = builtin("involutive").at(x)
    assert tv.carrier.size("0") == 3 and tv.carrier.size("1") == 4
    assert graph_edges(tv.carrier) == [(0, 1), (2, 1), (1, 0), (1, 2)]


def test_free_monoid_monad_counts():
    T = builtin("free-monoid", max_len=4)
    tv = T.at(make_set(2))
    assert tv.carrier.size("*") == sum(2 ** k for k in range(5))
    assert not tv.exact
    assert T.at(make_set(0)).exact


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("zeta-monad")


# ---------------------------------------------------------------------------
# monad laws
# ---------------------------------------------------------------------------

GRAPH_MONADS = ["identity", "free-category", "free-groupoid", "pointing",
                "free-involution", "involutive"]


@pytest.mark.parametrize("name", GRAPH_MONADS)
def test_unit_kleisli_law(name):
    # eta^sharp = id on small acyclic probes
    T = builtin(name)
    for x in (make_graph(2, ((0, 1),)), make_graph(3, ((0, 1), (2, 1)))):
        tv = T.at(x)
        ext = T.kleisli(tv.unit, tv, tv)
        assert ext == identity_map(tv.carrier)


@pytest.mark.parametrize("name", GRAPH_MONADS)
def test_kleisli_associativity(name):
    # (g^sharp . f)^sharp = g^sharp . f^sharp on enumerated small maps
    T = builtin(name)
    x = make_graph(2, ((0, 1),))
    y = make_graph(2, ((0, 1),))
    z = make_graph(3, ((0, 1), (1, 2)))
    tx, ty, tz = T.at(x), T.at(y), T.at(z)
    for f in hom_set(x, ty.carrier)[:6]:
        for g in hom_set(y, tz.carrier)[:6]:
            gs = T.kleisli(g, ty, tz)
            lhs = T.kleisli(f.then(gs), tx, tz)
            rhs = T.kleisli(f, tx, ty).then(gs)
            assert lhs == rhs


# ---------------------------------------------------------------------------
# arity categories
# ---------------------------------------------------------------------------

def test_identity_monad_arity_category_is_the_family():
    kt = arity_category(builtin("identity"), DELTA0, [0, 1, 2])
    for a in kt.window:
        for b in kt.window:
            assert kt.size(a, b) == max(0, b - a + 1)


def test_free_category_arity_category_is_simplex():
    kt = arity_category(builtin("free-category"), DELTA0, [0, 1, 2, 3, 4])
    for m in kt.window:
        for n in kt.window:
            assert kt.size(m, n) == comb(m + n + 1, m + 1)


def test_free_involution_arity_hom_count():
    kt = arity_category(builtin("free-involution"), DELTA0, [0, 1])
    assert kt.size(1, 1) == 2  # Grph([1], Q[1]) = 2 . Grph([1], [1])


def test_arity_category_units_and_associativity():
    kt = arity_category(builtin("free-category"), DELTA0, [0, 1, 2])
    for a in kt.window:
        ea = kt.identity(a)
        for b in kt.window:
            for f in range(kt.size(a, b)):
                assert kt.compose(a, a, b, ea, f) == f
                assert kt.compose(a, b, b, f, kt.identity(b)) == f
    for a, b, c, d in itertools.product(kt.window, repeat=4):
        for f in range(kt.size(a, b)):
            for g in range(kt.size(b, c)):
                fg = kt.compose(a, b, c, f, g)
                for h in range(kt.size(c, d)):
                    gh = kt.compose(b, c, d, g, h)
                    assert kt.compose(a, c, d, fg, h) == kt.compose(a, b, d, f, gh)


# ---------------------------------------------------------------------------
# eq36 census formulas
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("which", ["P", "Q"])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_census_formulas(which, n):
    for x in (make_graph(3, ((0, 1), (2, 1))),
              make_graph(2, ((0, 1), (1, 0), (0, 0))),
              make_graph(0, ()),
              make_graph(4, ((0, 1), (1, 2), (2, 3), (3, 0)))):
        assert hom_census_formulas(which, n, x)["match"]


def test_census_p_on_point():
    # P[0] = [0]: no paths of positive length
    x = DELTA0.realize(0)
    for n in (1, 2, 5):
        r = hom_census_formulas("P", n, x)
        assert r["direct"] == 0 and r["match"]


# ---------------------------------------------------------------------------
# pushout preservation and the arity probes
# ---------------------------------------------------------------------------

def test_groupoid_pushout_counterexample():
    probe = groupoid_pushout_probe()
    rep = pushout_preservation(builtin("free-groupoid"), probe)
    assert not rep.surjective and rep.injective
    assert rep.domain_sizes == {"0": 3, "1": 7}
    assert rep.codomain_sizes == {"0": 3, "1": 9}
    assert {"component": "1", "element": "s⁻¹∘r",
            "src": "a", "tgt": "c"} in rep.missing


def test_identity_preserves_probes():
    probe = groupoid_pushout_probe()
    assert pushout_preservation(builtin("identity"), probe).preserved
    assert pushout_preservation(builtin("free-category"), probe).preserved
    assert pushout_preservation(builtin("pointing"), probe).preserved
    assert pushout_preservation(builtin("free-involution"), probe).preserved


def test_involutive_arity_probe_fails_with_named_pair():
    probe = groupoid_pushout_probe()
    rep = nerve_arity_probe(builtin("involutive"), probe, 2)
    assert rep.total == 6 and rep.hit == 4
    assert "(r, i(s))" in rep.unhit and "(s, i(r))" in rep.unhit


def test_involutive_probe_passes_elsewhere():
    probe = groupoid_pushout_probe()
    assert nerve_arity_probe(builtin("free-category"), probe, 2).passed
    assert nerve_arity_probe(builtin("involutive"), probe, 1).passed


def test_free_groupoid_arity_probe_fails_at_one():
    probe = groupoid_pushout_probe()
    rep = nerve_arity_probe(builtin("free-groupoid"), probe, 1)
    assert not rep.passed
    assert "(s⁻¹∘r)" in rep.unhit


# ---------------------------------------------------------------------------
# catalan terms and factorisations
# ---------------------------------------------------------------------------

def test_catalan_counts():
    for size in (1, 2, 3):
        r = catalan_census(size, 6)
        assert r["match"]
        for n in range(7):
            assert r["counts"][n] == CATALAN[n] * size ** (n + 1)


def test_catalan_singleton_counts_are_catalan_numbers():
    r = catalan_census(1, 6)
    assert tuple(r["counts"][n] for n in range(7)) == CATALAN[:7]


def test_factor_through():
    assert factor_through(identity_map(make_set(4)), make_set(2)) is None
    got = factor_through(identity_map(make_set(2)), make_set(2))
    assert got is not None and got[0].then(got[1]) == identity_map(make_set(2))
    const = factor_through(
        PresheafMapConst := hom_set(make_set(3), make_set(3))[0], make_set(1))
    assert const is not None


# ---------------------------------------------------------------------------
# coequaliser experiment
# ---------------------------------------------------------------------------

def test_coequalizer_examples():
    r = coequalizer_experiment(2, 2)
    assert r["ok"]
    rows = {}
    # recompute the three bundled examples directly
    single = make_graph(2, ((0, 1),))
    double = make_graph(2, ((0, 1), (1, 0)))
    empty = make_graph(2, ())

    def structures(x):
        nv, ne = x.size("0"), x.size("1")
        src, tgt = x.act("sigma"), x.act("tau")
        q = eq = 0
        for i_map in itertools.product(range(ne), repeat=ne):
            if any(i_map[i_map[e]] != e for e in range(ne)):
                continue
            q += 1
            if all(src[i_map[e]] == tgt[e] for e in range(ne)):
                eq += 1
        return q, eq

    assert structures(single) == (1, 0)
    assert structures(double) == (2, 1)
    assert structures(empty) == (1, 1)


# ---------------------------------------------------------------------------
# signature term monads
# ---------------------------------------------------------------------------

def test_unary_signature_chain_counts():
    sig = make_signature(FIN, {1: make_set(1)})
    for depth in (0, 2, 4):
        T = free_monad_from_signature(sig, depth)
        assert T.at(make_set(3)).carrier.size("*") == (depth + 1) * 3


def test_empty_signature_is_identity():
    T = free_monad_from_signature(make_signature(FIN, {}), 3)
    x = make_set(4)
    assert T.at(x).carrier == x


def test_binary_signature_reproduces_catalan_census():
    # per internal-node counts agree with the census for n <= depth
    sig = make_signature(FIN, {2: make_set(1)})
    depth = 3
    T = free_monad_from_signature(sig, depth)
    for size in (1, 2):
        tv = T.at(make_set(size))

        def nodes(key):
            if key[0] == "leaf":
                return 0
            _, _, _, inp = key
            return 1 + sum(nodes(tv.data["terms"][obj][i]) for obj, i in inp)

        counts = {}
        for key in tv.data["terms"]["*"]:
            counts[nodes(key)] = counts.get(nodes(key), 0) + 1
        census = catalan_census(size, depth)["counts"]
        for n in range(depth + 1):
            assert counts.get(n, 0) == census[n]


def test_signature_monad_kleisli_substitution():
    from lawkit.base import PresheafMap

    sig = make_signature(FIN, {1: make_set(1)})
    shallow = free_monad_from_signature(sig, 2)
    deep = free_monad_from_signature(sig, 6)
    x, y = make_set(1), make_set(1)
    tx = shallow.at(x)          # terms op^k(leaf), k <= 2
    ty = deep.at(y)             # room for the substituted chains
    f = PresheafMap(x, ty.carrier, ((2,),))  # leaf |-> op^2(leaf)
    ext = shallow.kleisli(f, tx, ty)
    assert ext("*", 1) == 3     # op(leaf) |-> op^3(leaf)
    assert ext("*", 2) == 4
    # substitution beyond the target's window is flagged
    with pytest.raises(TruncationError):
        shallow.kleisli(PresheafMap(x, tx.carrier, ((2,),)), tx, tx)
