"""Parser and emitter round trips, error positions."""

import pytest

from lawkit.dsl import LawkitParseError, emit, parse
from lawkit.pretheory import bundled, bundled_names


@pytest.mark.parametrize("name", bundled_names())
def test_round_trip_bundled(name):
    p = bundled(name)
    q = parse(emit(p))
    assert q.family is p.family
    assert q.generators == p.generators
    assert q.equations == p.equations


def test_empty_file_is_initial():
    p = parse("base fin\n")
    assert p.generators == () and p.equations == ()
    g = parse("# a comment\nbase graph\n")
    assert g.family.kind == "graph"


def test_generator_declaration():
    p = parse("base fin\ngenerator m : 1 -> 2\n")
    assert p.generators == (("m", 1, 2),)


def test_graph_arities_bracketed():
    p = parse("base graph\ngenerator m : [1] -> [2]\n")
    assert p.generators == (("m", 1, 2),)


def test_word_endpoint_check_passes_example():
    # "eq m ; map(0,0)[2->1] = id[1]" type-checks (1 -> 1 both sides)
    text = "base fin\ngenerator m : 1 -> 2\neq m ; map(0,0)[2->1] = id[1]\n"
    p = parse(text)
    assert len(p.equations) == 1


def test_word_endpoint_mismatch_rejected():
    text = "base fin\ngenerator m : 1 -> 2\neq m = id[1]\n"
    with pytest.raises(LawkitParseError):
        parse(text)


def test_noncomposable_word_rejected():
    text = "base fin\ngenerator m : 1 -> 2\neq m ; m = m ; m\n"
    with pytest.raises(LawkitParseError):
        parse(text)


def test_unknown_generator_rejected_with_position():
    text = "base fin\neq f = id[1]\n"
    with pytest.raises(LawkitParseError) as err:
        parse(text)
    assert err.value.line == 2


def test_empty_image_list_for_initial_map():
    p = parse("base fin\ngenerator i : 1 -> 0\neq i ; map()[0->1] = id[1]\n")
    assert len(p.equations) == 1


def test_map_image_out_of_range():
    with pytest.raises(LawkitParseError):
        parse("base fin\ngenerator f : 1 -> 1\neq map(3)[1->2] ; f = map(0)[1->2] ; f\n")


def test_sigma_tau_shorthand():
    p = parse("base graph\ngenerator i : [1] -> [0]\neq sigma ; i = id[[0]]\n")
    lhs = p.equations[0][0]
    assert lhs.pretty(p.family) == "sigma ; i"


def test_shift_out_of_range():
    with pytest.raises(LawkitParseError):
        parse("base graph\ngenerator f : [1] -> [1]\neq shift(3)[1->2] ; f = f\n")


def test_basemap_wrong_base():
    with pytest.raises(LawkitParseError):
        parse("base graph\neq map(0)[1->1] = id[[1]]\n")
    with pytest.raises(LawkitParseError):
        parse("base fin\neq sigma = id[0]\n")


def test_duplicate_generator_rejected():
    with pytest.raises(LawkitParseError):
        parse("base fin\ngenerator m : 1 -> 2\ngenerator m : 1 -> 2\n")


def test_import_bundled():
    p = parse("base fin\nimport monoid\ngenerator extra : 1 -> 1\n")
    assert len(p.generators) == 7
    assert ("extra", 1, 1) in p.generators
    assert len(p.equations) == 11


def test_import_wrong_base():
    with pytest.raises(LawkitParseError):
        parse("base graph\nimport monoid\n")


def test_header_required():
    with pytest.raises(LawkitParseError):
        parse("generator m : 1 -> 2\n")


def test_digit_leading_generator_names():
    p = parse("base fin\ngenerator 1m : 2 -> 3\n")
    assert p.generators == (("1m", 2, 3),)
