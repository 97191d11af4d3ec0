import random

from viewsynth.model import inverse
from viewsynth.parser import parse_regex
from viewsynth.automata import NWA, accepts, compile_regex
from viewsynth.oracle import GraphDatabase, enumerate_language, eval_2rpq
from viewsynth.twoway import (
    accepts_two,
    contains_2rpq,
    fold_automaton,
    folds_onto,
    two_to_one,
)

from .conftest import all_words


def rx2(text):
    return compile_regex(parse_regex(text, None, two_way=True))


def brute_fold_accepts(a: NWA, u, max_v_len):
    """Brute-force fold membership: some accepted v folds onto u."""
    for v in enumerate_language(a, max_v_len, cap=100_000):
        if folds_onto(v, u) is not None:
            return True
    return False


# --- folds_onto ----------------------------------------------------------------

def test_fold_paper_example():
    cert = folds_onto(("a", "b", "b^-", "b", "c"), ("a", "b", "c"))
    assert cert == [0, 1, 2, 1, 2, 3]


def test_fold_identity():
    for word in [(), ("a",), ("a", "b"), ("a", "b^-", "c")]:
        assert folds_onto(word, word) == list(range(len(word) + 1))


def test_fold_mismatch():
    assert folds_onto(("a",), ("b",)) is None


def test_inverse_is_an_involution():
    for label in ("a", "a^-", "some_label"):
        assert inverse(inverse(label)) == label


def test_fold_certificate_is_valid():
    v = ("a", "a^-", "a", "b")
    u = ("a", "b")
    cert = folds_onto(v, u)
    assert cert is not None
    assert cert[0] == 0 and cert[-1] == len(u)
    for j, (i, i2) in enumerate(zip(cert, cert[1:])):
        if i2 == i + 1:
            assert v[j] == u[i]
        else:
            assert i2 == i - 1 and v[j] == inverse(u[i2])


# --- fold_automaton / two_to_one --------------------------------------------------

def test_fold_automaton_paper_example():
    one = two_to_one(fold_automaton(rx2("a b b^- b c")))
    assert accepts(one, ("a", "b", "c"))
    assert accepts(one, ("a", "b", "b^-", "b", "c"))
    assert not accepts(one, ("a", "c"))
    assert not accepts(one, ("a", "b"))


def test_forward_language_included_in_fold():
    for text in ["a.b", "a|b.a", "(a|b)*"]:
        a = rx2(text)
        one = two_to_one(fold_automaton(a))
        for w in all_words({"a", "b"}, 3):
            if accepts(a, w):
                assert accepts(one, w)


def test_two_to_one_matches_direct_two_way_run():
    a = rx2("a b^- a")
    t = fold_automaton(a)
    one = two_to_one(t)
    for w in all_words({"a", "a^-", "b", "b^-"}, 3):
        assert accepts(one, w) == accepts_two(t, w)


def random_two_way_nwa(rng, labels):
    n = rng.randint(1, 3)
    transitions = set()
    for _ in range(rng.randint(1, 6)):
        transitions.add((rng.randrange(n), rng.choice(labels), rng.randrange(n)))
    return NWA(n, set(labels), {0}, {rng.randrange(n)}, transitions)


def test_bounded_equivalence_against_brute_fold_search():
    rng = random.Random(19)
    labels = ("a", "a^-")
    for _ in range(8):
        a = random_two_way_nwa(rng, labels)
        one = two_to_one(fold_automaton(a))
        for u in all_words(labels, 4):
            bound = 2 * len(u) + 2 * a.n_states
            assert accepts(one, u) == brute_fold_accepts(a, u, bound), (a, u)


# --- contains_2rpq -----------------------------------------------------------------

def test_contains_2rpq_reflexive():
    q = rx2("a.b^-.c")
    assert contains_2rpq(q, q)


def test_contains_2rpq_paper_direction():
    # abb-bc folds onto abc, so the query a.b.c contains into a.b.b^-.b.c
    assert contains_2rpq(rx2("a.b.c"), rx2("a.b.b^-.b.c"))
    assert not contains_2rpq(rx2("a.b.b^-.b.c"), rx2("a.b.c"))


def test_contains_2rpq_negative():
    assert not contains_2rpq(rx2("a.b"), rx2("a.c"))


def test_contains_2rpq_agrees_with_semantics():
    # containment holding implies answer inclusion on every database
    rng = random.Random(29)
    q1 = rx2("a.b.c")
    q2 = rx2("a.b.b^-.b.c")
    for _ in range(25):
        db = _random_db(rng, ["a", "b", "c"])
        assert eval_2rpq(db, q1) <= eval_2rpq(db, q2)


def test_semantic_witness_for_noncontainment():
    # q(a.c) is not inside q(a.b.b^-.c): a database with no b edges separates
    db = GraphDatabase(
        frozenset({"x", "y", "w"}),
        frozenset({("x", "a", "y"), ("y", "c", "w")}),
    )
    assert eval_2rpq(db, rx2("a.c")) == {("x", "w")}
    assert eval_2rpq(db, rx2("a.b.b^-.c")) == set()
    assert not contains_2rpq(rx2("a.c"), rx2("a.b.b^-.c"))


def test_eval_matches_fold_closure_on_bounded_words():
    # answers of a two-way query equal the union of its fold-closure words'
    # answers (bounded check)
    rng = random.Random(33)
    q = rx2("a.b^-|b.a")
    folded = two_to_one(fold_automaton(q))
    fold_words = enumerate_language(folded, 4, cap=50_000)
    for _ in range(15):
        db = _random_db(rng, ["a", "b"])
        direct = eval_2rpq(db, q)
        via_folds = set()
        for u in fold_words:
            via_folds |= eval_2rpq(db, _word_query(u))
        assert direct == via_folds


def _random_db(rng, labels):
    n = rng.randint(1, 4)
    nodes = [f"n{i}" for i in range(n)]
    edges = set()
    for _ in range(rng.randint(0, 2 * n)):
        edges.add((rng.choice(nodes), rng.choice(labels), rng.choice(nodes)))
    return GraphDatabase(frozenset(nodes), frozenset(edges))


def _word_query(word):
    from viewsynth.automata import word_nwa

    return word_nwa(word, set(word) | {"a", "b"})
