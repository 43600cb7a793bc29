"""The theory condition, bounded completion, and bounded isomorphism."""

from math import comb

import pytest

from lawkit.base import DELTA0, FIN, ArityHom, make_set
from lawkit.models import enumerate_models, model_separates
from lawkit.pretheory import (
    BaseLetter,
    bundled,
    congruence_closure,
    hom_classes,
    identity_word,
    initial_pretheory,
    word,
)
from lawkit.theorycheck import (
    complete_to_theory,
    is_theory,
    model_census,
    table_is_theory,
    theories_isomorphic_bounded,
)


def fmap(images, a, b):
    return BaseLetter(ArityHom("map", a, b, tuple(images)))


# ---------------------------------------------------------------------------
# is_theory
# ---------------------------------------------------------------------------

def test_initial_pretheories_are_theories():
    v = is_theory(initial_pretheory(FIN), bound=3, window=[0, 1, 2, 3])
    assert v.status == "theory"
    v = is_theory(initial_pretheory(DELTA0), bound=3, window=[0, 1, 2, 3])
    assert v.status == "theory"


def test_monoid_is_not_a_theory():
    v = is_theory(bundled("monoid"), bound=4)
    assert v.status == "not-theory"
    assert v.witness["kind"] == "not-surjective"
    assert v.bound == 4


def test_monoid_pair_m_and_unit_constant_has_pairing_preimage():
    # the pair (class of m, class of i;!) in hom(1, 2)^2 does acquire a
    # pairing preimage: 1i;m computes q |-> (m(q), e), and the closure
    # derives that its second component lands in the class of i;!.  The
    # not-theory verdict for the monoid pretheory therefore rests on other
    # missing tuples (see test_monoid_is_not_a_theory).
    from lawkit.pretheory import Word

    m = bundled("monoid")
    table = congruence_closure(m, 4, certify=False)
    t1 = table.class_of(word(m.gen("m")))
    t2 = table.class_of(word(m.gen("i"), fmap((), 0, 2)))
    assert t1 is not None and t2 is not None
    i1 = BaseLetter(ArityHom("map", 1, 2, (0,)))
    i2 = BaseLetter(ArityHom("map", 1, 2, (1,)))
    preimages = []
    for w in hom_classes(table, 2, 2):
        c1 = table.class_of(Word(1, 2, (i1,) + w.letters))
        c2 = table.class_of(Word(1, 2, (i2,) + w.letters))
        if (c1, c2) == (t1, t2):
            preimages.append(w.pretty(FIN))
    assert "1i ; m" in preimages


def test_category_pretheory_not_theory():
    # hom([n], [1]) is empty for n >= 2 while the Segal limit is not
    v = is_theory(bundled("category"), bound=4, window=[0, 1, 2, 3])
    assert v.status == "not-theory"
    assert v.witness["kind"] == "not-surjective"


def test_groupoid_pretheory_not_theory():
    v = is_theory(bundled("groupoid"), bound=4, window=[0, 1, 2, 3])
    assert v.status == "not-theory"


# ---------------------------------------------------------------------------
# completion
# ---------------------------------------------------------------------------

def test_completed_monoid_hom_counts():
    m = bundled("monoid")
    tt = complete_to_theory(m, bound=3, depth=3, window=[0, 1, 2, 3], with_words=False)
    for n in tt.window:
        assert tt.size(1, n) == sum(n ** k for k in range(5))


def test_completed_initial_is_initial():
    init = initial_pretheory(FIN)
    tt = complete_to_theory(init, bound=3, depth=2, window=[0, 1, 2])
    for a in tt.window:
        for b in tt.window:
            assert tt.size(a, b) == b ** a
            entries = tt.unit[(a, b)]
            assert sorted(x for x in entries if x is not None) == list(range(tt.size(a, b)))
    assert all(tt.exact.values())
    assert table_is_theory(tt).status == "theory"


def test_completed_category_is_simplex():
    cat = bundled("category")
    tt = complete_to_theory(cat, bound=4, depth=8, window=[0, 1, 2, 3], with_words=False)
    assert all(tt.exact.values())
    for m in tt.window:
        for n in tt.window:
            assert tt.size(m, n) == comb(m + n + 1, m + 1)
    assert table_is_theory(tt).status == "theory"


def test_completion_unit_is_functorial_within_bounds():
    m = bundled("monoid")
    tt = complete_to_theory(m, bound=3, depth=3, window=[0, 1, 2])
    table = tt.word_table
    # identities map to identities
    for a in tt.window:
        idx = table.class_of(identity_word(a))
        assert tt.unit[(a, a)][idx] == tt.identity(a)
    # composites within bounds are preserved
    mm = word(m.gen("m"))
    m1w = word(m.gen("m1"))
    cu = tt.unit[(1, 2)][table.class_of(mm)]
    # m ; 1m = m ; m1 lives outside the [0..2] window, so compose smaller:
    i1w = word(m.gen("i1"))
    ci = tt.unit[(2, 1)][table.class_of(i1w)]
    comp = tt.compose(1, 2, 1, cu, ci)
    expected = tt.unit[(1, 1)][table.class_of(mm.then(i1w))]
    assert comp == expected


def test_completion_unit_merges_groupoid_inverse_square():
    g = bundled("groupoid")
    tt = complete_to_theory(g, bound=4, depth=6, window=[0, 1, 2])
    table = tt.word_table
    cc = table.class_of(word(g.gen("c"), g.gen("c")))
    ii = table.class_of(identity_word(1))
    assert cc != ii  # distinct word classes at the bound
    assert tt.unit[(1, 1)][cc] == tt.unit[(1, 1)][ii]  # identified by the unit


def test_completion_rejects_bad_bounds():
    with pytest.raises(ValueError):
        complete_to_theory(bundled("monoid"), bound=0, depth=2)


# ---------------------------------------------------------------------------
# reflection invariance and isomorphism
# ---------------------------------------------------------------------------

def test_models_agree_across_presentations_with_same_completion():
    # the monoid pretheory and its redundant extension present the same
    # theory, so their model censuses agree on every carrier
    a = model_census(bundled("monoid"), 2)
    b = model_census(bundled("monoid-redundant"), 2)
    assert a == b


def test_completed_monoid_isomorphic_to_redundant():
    t1 = complete_to_theory(bundled("monoid"), bound=3, depth=2,
                            window=[0, 1, 2], with_words=False)
    t2 = complete_to_theory(bundled("monoid-redundant"), bound=3, depth=2,
                            window=[0, 1, 2], with_words=False)
    v = theories_isomorphic_bounded(t1, t2, census_bound=2)
    assert v.status == "isomorphic"


def test_iso_reflexive():
    t1 = complete_to_theory(bundled("monoid"), bound=3, depth=2,
                            window=[0, 1, 2], with_words=False)
    v = theories_isomorphic_bounded(t1, t1, census_bound=1)
    assert v.status == "isomorphic"


def test_iso_rejects_mismatched_families():
    t1 = complete_to_theory(bundled("monoid"), bound=3, depth=2,
                            window=[0, 1], with_words=False)
    t2 = complete_to_theory(bundled("category"), bound=3, depth=2,
                            window=[0, 1], with_words=False)
    with pytest.raises(ValueError):
        theories_isomorphic_bounded(t1, t2)


def test_iso_detects_census_difference():
    t1 = complete_to_theory(bundled("monoid"), bound=3, depth=2,
                            window=[0, 1], with_words=False)
    t2 = complete_to_theory(initial_pretheory(FIN), bound=3, depth=2,
                            window=[0, 1], with_words=False)
    v = theories_isomorphic_bounded(t1, t2, census_bound=2)
    assert v.status == "not-isomorphic"
    assert v.detail["reason"] == "model censuses differ"
