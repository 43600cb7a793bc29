"""Presheaves, homs, colimits, arity families, nerves."""

import itertools

import pytest

from lawkit.base import (
    DELTA0,
    FIN,
    G1,
    ArityHom,
    PresheafMap,
    compose_homs,
    coproduct,
    density_presentation_sound,
    graph_edges,
    hom_set,
    identity_map,
    is_isomorphic,
    make_graph,
    make_set,
    nerve,
    pushout,
    wide_pushout,
)


def path(n):
    return DELTA0.realize(n)


def tau():
    return PresheafMap(path(0), path(1), ((1,), ()))


def sigma():
    return PresheafMap(path(0), path(1), ((0,), ()))


# ---------------------------------------------------------------------------
# hom_set
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("m,n", [(0, 0), (0, 2), (1, 1), (1, 3), (2, 1), (3, 4)])
def test_path_hom_counts(m, n):
    # |Grph([m], [n])| = max(0, n - m + 1)
    assert len(hom_set(path(m), path(n))) == max(0, n - m + 1)


@pytest.mark.parametrize("n,m", [(0, 0), (0, 3), (1, 4), (2, 3), (3, 2)])
def test_set_hom_counts(n, m):
    assert len(hom_set(make_set(n), make_set(m))) == m ** n


def test_hom_contains_identity():
    for x in (make_set(3), path(2), make_graph(2, ((0, 1), (1, 0)))):
        assert identity_map(x) in hom_set(x, x)


def test_hom_from_initial_is_singleton():
    empty_set = make_set(0)
    assert len(hom_set(empty_set, make_set(5))) == 1
    empty_graph = make_graph(0, ())
    assert len(hom_set(empty_graph, path(3))) == 1


def test_hom_order_deterministic():
    maps = hom_set(make_set(2), make_set(2))
    assert [f.parts for f in maps] == sorted(f.parts for f in maps)


def test_homs_all_commute():
    x = make_graph(2, ((0, 1), (0, 0)))
    y = make_graph(3, ((0, 1), (1, 2), (2, 2)))
    maps = hom_set(x, y)
    assert all(f.commutes() for f in maps)
    # cross-check against the brute-force count
    brute = 0
    for v in itertools.product(range(3), repeat=2):
        for e in itertools.product(range(3), repeat=2):
            src, tgt = y.act("sigma"), y.act("tau")
            xs, xt = x.act("sigma"), x.act("tau")
            if all(src[e[i]] == v[xs[i]] and tgt[e[i]] == v[xt[i]] for i in range(2)):
                brute += 1
    assert len(maps) == brute


def test_map_composition_associative_small():
    # associativity and unitality checked by enumeration on small carriers
    x = make_set(2)
    y = make_set(2)
    z = make_set(2)
    for f in hom_set(x, y):
        assert identity_map(x).then(f) == f and f.then(identity_map(y)) == f
        for g in hom_set(y, z):
            for h in hom_set(z, make_set(2)):
                assert f.then(g).then(h) == f.then(g.then(h))


# ---------------------------------------------------------------------------
# colimits
# ---------------------------------------------------------------------------

def test_coproduct_of_singletons():
    cop = coproduct([make_set(1)] * 4)
    assert cop.presheaf.sizes == (4,)
    hit = {inj("*", 0) for inj in cop.injections}
    assert hit == {0, 1, 2, 3}


def test_empty_coproduct_is_initial():
    cop = coproduct([], shape=G1)
    assert cop.presheaf.sizes == (0, 0)


def test_coproduct_injections_jointly_surjective():
    xs = [make_graph(1, ()), make_graph(2, ((0, 1),))]
    cop = coproduct(xs)
    seen = set()
    for x, inj in zip(xs, cop.injections):
        for obj, i in x.elements():
            seen.add((obj, inj(obj, i)))
    assert seen == set(cop.presheaf.elements())


def test_pushout_of_intervals_is_two_step_path():
    po = pushout(tau(), sigma())
    assert is_isomorphic(po.presheaf, path(2)) is not None


def test_pushout_tau_tau_is_cospan():
    po = pushout(tau(), tau())
    assert po.presheaf.sizes == (3, 2)
    assert sorted(graph_edges(po.presheaf)) == [(0, 1), (2, 1)]


def test_pushout_along_identity():
    x = make_graph(2, ((0, 1),))
    f = identity_map(x)
    g = PresheafMap(x, path(2), ((0, 1), (0,)))
    po = pushout(f, g)
    assert is_isomorphic(po.presheaf, path(2)) is not None


def test_pushout_universal_property_unique():
    # the factoring map is the unique mediating map (exhaustive search)
    z, x = path(0), path(1)
    po = pushout(tau(), tau())
    w = make_graph(2, ((0, 1), (1, 0)))
    for p in hom_set(x, w):
        for q in hom_set(x, w):
            if tau().then(p) != tau().then(q):
                continue
            med = po.factor(p, q)
            assert po.inj1.then(med) == p and po.inj2.then(med) == q
            mediators = [u for u in hom_set(po.presheaf, w)
                         if po.inj1.then(u) == p and po.inj2.then(u) == q]
            assert mediators == [med]


def test_wide_pushout_single_leg():
    wp = wide_pushout([tau()])
    assert wp.presheaf == path(1)


def test_wide_pushout_three_intervals():
    # [1] +_[0] [1] +_[0] [1] glued target-to-source is [3]
    colim = path(1)
    boundary = tau()
    for _ in range(2):
        po = pushout(boundary, sigma())
        boundary = tau().then(po.inj2)
        colim = po.presheaf
    assert is_isomorphic(colim, path(3)) is not None


def test_wide_pushout_over_initial_is_coproduct():
    empty = make_set(0)
    legs = [PresheafMap(empty, make_set(1), ((),)) for _ in range(3)]
    wp = wide_pushout(legs)
    assert wp.presheaf.sizes == (3,)


# ---------------------------------------------------------------------------
# arity families
# ---------------------------------------------------------------------------

def test_full_fidelity():
    for fam, pairs in ((FIN, itertools.product(range(4), repeat=2)),
                       (DELTA0, itertools.product(range(4), repeat=2))):
        for a, b in pairs:
            homs = fam.homs(a, b)
            maps = [fam.hom_map(h) for h in homs]
            assert len(maps) == len(set(m.parts for m in maps))
            assert len(homs) == len(hom_set(fam.realize(a), fam.realize(b)))


def test_hom_composition_matches_realisation():
    for fam in (FIN, DELTA0):
        for a, b, c in itertools.product(range(3), repeat=3):
            for h1 in fam.homs(a, b):
                for h2 in fam.homs(b, c):
                    comp = compose_homs(h1, h2)
                    assert fam.hom_map(h1).then(fam.hom_map(h2)) == fam.hom_map(comp)


@pytest.mark.parametrize("fam,a", [(FIN, 0), (FIN, 1), (FIN, 3), (FIN, 4),
                                   (DELTA0, 1), (DELTA0, 2), (DELTA0, 3)])
def test_density_presentations_sound(fam, a):
    assert density_presentation_sound(fam, a)


# ---------------------------------------------------------------------------
# nerves
# ---------------------------------------------------------------------------

def test_nerve_of_set_sizes():
    F = nerve(FIN, make_set(3), [0, 1, 2, 3])
    assert {a: F.sizes[a] for a in F.arities} == {0: 1, 1: 3, 2: 9, 3: 27}
    assert F.validate()


def test_nerve_of_cospan_sizes():
    x = make_graph(3, ((0, 1), (2, 1)))
    F = nerve(DELTA0, x, [0, 1, 2])
    assert F.sizes[1] == 2 and F.sizes[2] == 0
    assert F.validate()


def test_nerve_identity_action():
    F = nerve(DELTA0, path(2), [0, 1, 2])
    for a in F.arities:
        assert F.act(DELTA0.identity(a)) == tuple(range(F.sizes[a]))
