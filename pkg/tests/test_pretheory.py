"""Presentations, words, and the bounded congruence closure."""

import random

import pytest

from lawkit.base import DELTA0, FIN, ArityHom, make_set
from lawkit.models import ModelZoo, evaluate_word
from lawkit.pretheory import (
    BaseLetter,
    GenLetter,
    Pretheory,
    Word,
    adjoin_equation,
    adjoin_generator,
    bundled,
    certify_hom_table,
    congruence_closure,
    hom_classes,
    identity_word,
    initial_pretheory,
    make_signature,
    pretheory_from_signature,
    reduce_word,
    word,
)


def fmap(images, a, b):
    return BaseLetter(ArityHom("map", a, b, tuple(images)))


def shift(k, a, b):
    return BaseLetter(ArityHom("shift", a, b, (k,)))


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

def test_reduce_collapses_adjacent_base_letters():
    w = word(fmap((0,), 1, 2), fmap((0, 0), 2, 1))
    r = reduce_word(w)
    assert r.letters == ()  # composite is the identity on 1


def test_reduce_keeps_generators_apart():
    m = bundled("monoid")
    w = word(m.gen("m"), fmap((0, 1), 2, 3))
    assert reduce_word(w) == w


def test_word_composability_checked():
    with pytest.raises(AssertionError):
        Word(1, 1, (GenLetter("m", 1, 2), GenLetter("m", 1, 2)))


# ---------------------------------------------------------------------------
# presentations
# ---------------------------------------------------------------------------

def test_bundled_counts():
    assert (len(bundled("monoid").generators), len(bundled("monoid").equations)) == (6, 11)
    assert (len(bundled("monoid-redundant").generators),
            len(bundled("monoid-redundant").equations)) == (7, 13)
    assert (len(bundled("category").generators), len(bundled("category").equations)) == (6, 15)
    assert (len(bundled("groupoid").generators), len(bundled("groupoid").equations)) == (9, 21)


def test_unknown_bundled_name():
    with pytest.raises(KeyError):
        bundled("loop-space")


def test_adjoin_generator_duplicate_rejected():
    p = bundled("monoid")
    with pytest.raises(ValueError):
        adjoin_generator(p, "m", 1, 2)


def test_adjoin_equation_requires_parallel():
    p = bundled("monoid")
    with pytest.raises(ValueError):
        adjoin_equation(p, word(p.gen("m")), identity_word(1))


def test_monoid_and_groupoid_fixture_shapes():
    m = bundled("monoid")
    assert ("m", 1, 2) in m.generators and ("i", 1, 0) in m.generators
    g = bundled("groupoid")
    assert ("c", 1, 1) in g.generators


# ---------------------------------------------------------------------------
# congruence closure
# ---------------------------------------------------------------------------

def test_initial_fin_class_counts_at_any_bound():
    init = initial_pretheory(FIN)
    for bound in (1, 2, 4):
        t = congruence_closure(init, bound, window=[0, 1, 2, 3], certify=False)
        for a in t.window:
            for b in t.window:
                assert t.num_classes(a, b) == b ** a


def test_initial_graph_class_counts():
    init = initial_pretheory(DELTA0)
    t = congruence_closure(init, 3, window=[0, 1, 2, 3], certify=True)
    for a in t.window:
        for b in t.window:
            assert t.num_classes(a, b) == max(0, b - a + 1)
            assert t.complete[(a, b)]


def test_initial_hom_classes_reps():
    t = congruence_closure(initial_pretheory(FIN), 2, window=[0, 1, 2], certify=False)
    reps = [w.pretty(FIN) for w in hom_classes(t, 1, 2)]
    assert reps == ["map(0)[1->2]", "map(1)[1->2]"]
    tg = congruence_closure(initial_pretheory(DELTA0), 2, window=[0, 1], certify=False)
    assert [w.pretty(DELTA0) for w in hom_classes(tg, 0, 1)] == ["sigma", "tau"]


def test_monoid_unit_law_classes():
    # m;i1 and m;1i are united with the identity at any bound >= 2
    m = bundled("monoid")
    t = congruence_closure(m, 3, certify=False)
    idw = identity_word(1)
    assert t.class_of(word(m.gen("m"), m.gen("i1"))) == t.class_of(idw)
    assert t.class_of(word(m.gen("m"), m.gen("1i"))) == t.class_of(idw)
    assert t.class_of(word(m.gen("i"))) is not None
    reps = [w.pretty(FIN) for w in hom_classes(t, 1, 0)]
    assert "i" in reps


def test_monoid_m_class_distinct_from_injections():
    m = bundled("monoid")
    t = congruence_closure(m, 3, certify=False)
    cm = t.class_of(word(m.gen("m")))
    ci1 = t.class_of(word(fmap((0,), 1, 2)))
    ci2 = t.class_of(word(fmap((1,), 1, 2)))
    assert len({cm, ci1, ci2}) == 3
    # certified distinct by a 2-element model
    zoo = ModelZoo(m, 2)
    assert zoo.separated(word(m.gen("m")), word(fmap((0,), 1, 2)))


def test_monoid_associativity_closure():
    m = bundled("monoid")
    t = congruence_closure(m, 3, certify=False)
    lhs = word(m.gen("m"), m.gen("1m"))
    rhs = word(m.gen("m"), m.gen("m1"))
    assert t.class_of(lhs) == t.class_of(rhs)


def test_groupoid_inverse_class_is_separate_formally():
    # c;c evaluates like the identity in every model (see models tests) but
    # stays in its own bounded congruence class: the presentation has no
    # rewrite collapsing it, so the unit of the completion is what merges it.
    g = bundled("groupoid")
    t = congruence_closure(g, 5, window=[0, 1, 2, 3], certify=False)
    cc = word(g.gen("c"), g.gen("c"))
    assert t.class_of(cc) != t.class_of(identity_word(1))
    # the half-derived facts: source/target of inverses flip
    assert t.class_of(word(shift(0, 0, 1), g.gen("c"))) == t.class_of(word(shift(1, 0, 1)))
    assert t.class_of(word(shift(1, 0, 1), g.gen("c"))) == t.class_of(word(shift(0, 0, 1)))
    # and the inverse laws themselves
    assert t.class_of(word(g.gen("m"), g.gen("1c"))) == t.class_of(word(shift(0, 1, 2)))
    assert t.class_of(word(g.gen("m"), g.gen("c1"))) == t.class_of(word(shift(1, 1, 2)))


def test_adjoining_trivial_equation_changes_nothing():
    m = bundled("monoid")
    w = word(m.gen("m"))
    m2 = adjoin_equation(m, w, w)
    t1 = congruence_closure(m, 3, certify=False)
    t2 = congruence_closure(m2, 3, certify=False)
    assert all(t1.num_classes(a, b) == t2.num_classes(a, b)
               for a in t1.window for b in t1.window)


def test_adjoin_equation_monotone():
    m = bundled("monoid")
    # force "the unit is idempotent-ish": i;! = id kills many classes
    extra = adjoin_equation(m, word(m.gen("i"), fmap((), 0, 1)), identity_word(1))
    t1 = congruence_closure(m, 3, certify=False)
    t2 = congruence_closure(extra, 3, certify=False)
    shrank = False
    for a in t1.window:
        for b in t1.window:
            assert t2.num_classes(a, b) <= t1.num_classes(a, b)
            shrank = shrank or t2.num_classes(a, b) < t1.num_classes(a, b)
    assert shrank


def test_no_generators_means_arity_homs():
    p = initial_pretheory(FIN)
    p = adjoin_generator(p, "f", 1, 1)
    base = congruence_closure(initial_pretheory(FIN), 2, window=[0, 1, 2], certify=False)
    withf = congruence_closure(p, 2, window=[0, 1, 2], certify=False)
    assert withf.num_classes(1, 1) > base.num_classes(1, 1)


def test_congruence_property_sampled():
    # u ~ u' and v ~ v' imply u;v ~ u';v' whenever all composites stay in
    # the enumerated set
    m = bundled("monoid")
    t = congruence_closure(m, 4, certify=False)
    rng = random.Random(11)
    pairs = t.united_pairs(rng, 300, max_len=2)
    checked = 0
    for u, u2 in pairs:
        for v, v2 in pairs:
            if u.dst != v.src:
                continue
            c1 = t.class_of(u.then(v))
            c2 = t.class_of(u2.then(v2))
            if c1 is None or c2 is None:
                continue
            assert c1 == c2
            checked += 1
    assert checked > 100


def test_completeness_flags_monoid_incomplete():
    m = bundled("monoid")
    t = congruence_closure(m, 2, certify=True)
    # the monoid pretheory has unboundedly many classes: flags must be false
    assert not t.complete[(1, 1)]


def test_certify_after_the_fact():
    init = initial_pretheory(FIN)
    t = congruence_closure(init, 2, window=[0, 1, 2], certify=False)
    assert not any(t.complete.values())
    certify_hom_table(t)
    assert all(t.complete.values())


# ---------------------------------------------------------------------------
# signatures
# ---------------------------------------------------------------------------

def test_signature_to_pretheory_fin():
    sig = make_signature(FIN, {2: make_set(1)})
    p = pretheory_from_signature(sig)
    assert p.generators == (("op2_0", 1, 2),)
    assert p.equations == ()


def test_signature_to_pretheory_empty():
    p = pretheory_from_signature(make_signature(FIN, {}))
    assert p.generators == () and p.equations == ()


def test_signature_to_pretheory_graph_composition():
    # Sigma([2]) = [1] gives two vertex generators, one edge generator, and
    # the two boundary equations tying its endpoints to them
    sig = make_signature(DELTA0, {2: DELTA0.realize(1)})
    p = pretheory_from_signature(sig)
    gens = {g[0]: (g[1], g[2]) for g in p.generators}
    assert gens == {"v2_0": (0, 2), "v2_1": (0, 2), "e2_0": (1, 2)}
    assert len(p.equations) == 2


def test_signature_models_are_structures():
    # concrete models biject with structures hom(K a, X) -> hom(Sigma a, X)
    from lawkit.models import enumerate_models

    sig = make_signature(FIN, {0: make_set(2), 2: make_set(1)})
    p = pretheory_from_signature(sig)
    for n in (0, 1, 2):
        x = make_set(n)
        want = (n ** 1) ** 2 * (n ** (n ** 2)) if n else 0
        # structures: hom(K0,X) -> hom(Sigma0,X) and hom(K2,X) -> hom(Sigma2,X)
        want = (n ** 2) ** 1 * n ** (n ** 2)
        assert len(enumerate_models(p, x)) == want
