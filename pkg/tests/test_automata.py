import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viewsynth.errors import CapExceeded, InputError
from viewsynth.model import EMPTY, RSym, ralt, rcat, rstar
from viewsynth.automata import (
    NWA,
    accepts,
    compile_regex,
    complement,
    contains,
    determinize,
    difference_witness,
    eliminate_epsilon,
    is_empty,
    nwa_to_regex,
    product,
    substitute,
    to_dot,
    word_nwa,
)
from viewsynth.oracle import enumerate_language

from .conftest import all_words, bounded_language, rx


# --- strategies -----------------------------------------------------------

def regexes(labels=("b1", "b2"), depth=3):
    leaf = st.sampled_from([RSym(l) for l in labels] + [EMPTY])
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            st.lists(inner, min_size=2, max_size=3).map(rcat),
            st.lists(inner, min_size=2, max_size=3).map(ralt),
            inner.map(rstar),
        ),
        max_leaves=6,
    )


# --- compile --------------------------------------------------------------

def test_compile_chain():
    a = rx("b1.b2")
    assert a.n_states == 3
    assert bounded_language(a, {"b1", "b2"}, 3) == {("b1", "b2")}


def test_compile_union_of_pairs():
    a = rx("(a1|a3).(a2|a3)")
    expected = {("a1", "a2"), ("a1", "a3"), ("a3", "a2"), ("a3", "a3")}
    assert bounded_language(a, {"a1", "a2", "a3"}, 3) == expected


def test_compile_empty_language():
    empty, witness = is_empty(compile_regex(EMPTY))
    assert empty and witness is None


# --- product / complement / determinize ------------------------------------

def test_product_self_witness():
    a = rx("b1.b2")
    empty, witness = is_empty(product(a, a))
    assert not empty
    assert witness == ("b1", "b2")


def test_complement_examples():
    d = complement(determinize(rx("b1.b2"), alphabet={"b1", "b2"}))
    c = d.as_nwa()
    assert accepts(c, ())
    assert accepts(c, ("b1",))
    assert accepts(c, ("b1", "b2", "b1"))
    assert not accepts(c, ("b1", "b2"))


def test_determinize_two_initial_states():
    # NWA with two initial states: one accepts b1, the other b1.b1
    a = NWA(
        n_states=5,
        alphabet={"b1"},
        initials={0, 2},
        finals={1, 4},
        transitions={(0, "b1", 1), (2, "b1", 3), (3, "b1", 4)},
    )
    d = determinize(a).as_nwa()
    for w in all_words({"b1"}, 4):
        assert accepts(d, w) == (w in {("b1",), ("b1", "b1")})


def test_determinize_cap():
    with pytest.raises(CapExceeded):
        determinize(rx("(b1|b2)*.b1.(b1|b2).(b1|b2).(b1|b2)"), cap=4)


def test_complement_requires_complete():
    from viewsynth.automata import DWA

    partial = DWA(1, frozenset({"b1"}), 0, {}, frozenset())
    with pytest.raises(InputError):
        complement(partial)


# --- containment ------------------------------------------------------------

def test_contains_examples():
    assert contains(rx("b1.b2"), rx("b1.b2|b1"))
    assert not contains(rx("b1*"), rx("b1.b1"))
    assert difference_witness(rx("b1*"), rx("b1.b1")) == ()


def test_contains_sec6_solution():
    q_s = rx("(a1|a3).(a2|a3)")
    views = {"a1": rx("b1"), "a2": rx("b2"), "a3": None}
    substituted = substitute(q_s, views, {"a1", "a2", "a3"}, {"b1", "b2"})
    assert contains(substituted, rx("b1.b2"))


# --- substitution -----------------------------------------------------------

def test_substitute_sec6_views():
    q_s = rx("(a1|a3).(a2|a3)")
    views = {"a1": rx("b1"), "a2": rx("b2"), "a3": None}
    result = substitute(q_s, views, {"a1", "a2", "a3"}, {"b1", "b2"})
    assert bounded_language(result, {"b1", "b2"}, 4) == {("b1", "b2")}


def test_substitute_empty_view_kills_language():
    q_s = rx("b1.a", alphabet={"a", "b1"})
    result = substitute(q_s, {"a": None}, {"a"}, {"b1"})
    empty, _ = is_empty(result)
    assert empty


def test_substitute_missing_view_rejected():
    with pytest.raises(InputError, match="a2"):
        substitute(rx("a1.a2"), {"a1": rx("b1")}, {"a1", "a2"}, {"b1"})


def test_substitute_matches_textual_substitution():
    # singleton-word views: automaton substitution == word-by-word rewriting
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randint(1, 3)
        trans = set()
        for _ in range(rng.randint(1, 5)):
            trans.add(
                (
                    rng.randrange(n),
                    rng.choice(["a", "b1", "b2"]),
                    rng.randrange(n),
                )
            )
        a = NWA(n, {"a", "b1", "b2"}, {0}, {rng.randrange(n)}, trans)
        # nonempty view words keep images at least as long as their sources,
        # so source words up to length 3 cover every image up to length 3
        word = tuple(rng.choice(["b1", "b2"]) for _ in range(rng.randint(1, 2)))
        view_nwa = {"a": word_nwa(word, {"b1", "b2"})}
        via_automata = substitute(a, view_nwa, {"a"}, {"b1", "b2"})
        texted = {
            tuple(x for letter in w for x in (word if letter == "a" else (letter,)))
            for w in bounded_language(a, {"a", "b1", "b2"}, 3)
        }
        got = bounded_language(via_automata, {"b1", "b2"}, 3)
        want = {w for w in texted if len(w) <= 3}
        assert got == want


@settings(max_examples=60, deadline=None)
@given(regexes(), regexes())
def test_product_complement_pointwise(r1, r2):
    alphabet = {"b1", "b2"}
    a, b = compile_regex(r1, alphabet), compile_regex(r2, alphabet)
    prod = product(a, b, alphabet=alphabet)
    comp = complement(determinize(a, alphabet=alphabet)).as_nwa()
    for w in all_words(alphabet, 3):
        assert accepts(prod, w) == (accepts(a, w) and accepts(b, w))
        assert accepts(comp, w) == (not accepts(a, w))


@settings(max_examples=40, deadline=None)
@given(regexes())
def test_emptiness_matches_bounded_search(r):
    alphabet = {"b1", "b2"}
    a = compile_regex(r, alphabet)
    d = determinize(a, alphabet=alphabet)
    empty, witness = is_empty(a)
    short_words = [w for w in all_words(alphabet, d.n_states) if accepts(a, w)]
    assert empty == (not short_words)
    if not empty:
        # witness is a shortest accepted word, in BFS order
        assert witness == min(short_words, key=lambda w: (len(w), w))


def test_substitute_monotone():
    q_s = rx("a1.a2")
    small = {"a1": rx("b1"), "a2": rx("b2")}
    large = {"a1": rx("b1|b2"), "a2": rx("b2|b1.b1")}
    sub_small = substitute(q_s, small, {"a1", "a2"}, {"b1", "b2"})
    sub_large = substitute(q_s, large, {"a1", "a2"}, {"b1", "b2"})
    for w in all_words({"b1", "b2"}, 4):
        if accepts(sub_small, w):
            assert accepts(sub_large, w)


# --- regex extraction and export --------------------------------------------

@settings(max_examples=50, deadline=None)
@given(regexes())
def test_state_elimination_round_trip(r):
    alphabet = {"b1", "b2"}
    a = compile_regex(r, alphabet)
    back = compile_regex(nwa_to_regex(a), alphabet)
    for w in all_words(alphabet, 3):
        assert accepts(a, w) == accepts(back, w)


def test_epsilon_elimination():
    a = NWA(
        3,
        {"b1"},
        {0},
        {2},
        {(0, None, 1), (1, "b1", 2), (2, None, 0)},
    )
    clean = eliminate_epsilon(a)
    assert not clean.has_epsilon
    assert bounded_language(clean, {"b1"}, 3) == {("b1",), ("b1", "b1"), ("b1", "b1", "b1")}


def test_dot_export_mentions_states():
    dot = to_dot(rx("b1.b2"))
    assert "digraph" in dot and "doublecircle" in dot


def test_language_enumeration_shortest_first():
    words = enumerate_language(rx("b1*"), 3)
    assert words == [(), ("b1",), ("b1", "b1"), ("b1", "b1", "b1")]
