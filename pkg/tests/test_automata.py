import itertools

import pytest
from hypothesis import given, settings, strategies as st

from abelauto import automata
from abelauto.automata import Automaton
from abelauto.errors import AlphabetMismatch

AB = ["a", "b"]


def zero_star_one():
    return Automaton(AB, 2, 0, [1], [(0, "a", 0), (0, "b", 1)])


def brute_words(aut, n):
    out = set()
    for k in range(n + 1):
        for w in itertools.product(aut.alphabet, repeat=k):
            if aut.accepts(w):
                out.add(w)
    return out


def test_accepts_examples():
    a = zero_star_one()
    assert a.accepts(["a", "a", "b"])
    assert not a.accepts(["a", "b", "a"])
    assert not a.accepts([])


def test_tautology_minimizes_to_one_state():
    a = zero_star_one()
    u = a.union(a.complement()).minimize()
    assert u.n == 1 and u.finish == {0}


def test_intersection_cross_checked_by_enumeration():
    a = zero_star_one()
    ones = Automaton(AB, 1, 0, [0], [(0, "b", 0)])
    inter = a.intersect(ones)
    assert brute_words(inter, 4) == {("b",)}


def test_boolean_ops_against_brute_force():
    a = zero_star_one()
    b = Automaton(AB, 2, 0, [0], [(0, "a", 1), (1, "a", 0), (0, "b", 0), (1, "b", 1)])
    wa, wb = brute_words(a, 5), brute_words(b, 5)
    assert brute_words(a.union(b), 5) == wa | wb
    assert brute_words(a.intersect(b), 5) == wa & wb
    assert brute_words(a.difference(b), 5) == wa - wb
    comp = a.complement()
    allw = brute_words(automata.universal(AB), 5)
    assert brute_words(comp, 5) == allw - wa


def test_concat_star():
    a = automata.from_word(("a",), AB)
    b = automata.from_word(("b",), AB)
    ab = a.concat(b)
    assert ab.accepts(["a", "b"]) and not ab.accepts(["a"]) and not ab.accepts([])
    star = ab.star()
    assert star.accepts([]) and star.accepts(["a", "b", "a", "b"])
    assert not star.accepts(["a", "b", "a"])


def test_alphabet_mismatch_raises():
    a = zero_star_one()
    c = Automaton(["a", "c"], 1, 0, [0], [(0, "a", 0)])
    with pytest.raises(AlphabetMismatch):
        a.union(c)


def test_count_words_examples():
    assert zero_star_one().count_words(5) == 5
    assert automata.universal(AB).count_words(3) == 15
    zs = Automaton(AB, 1, 0, [0], [(0, "a", 0)])
    os = Automaton(AB, 1, 0, [0], [(0, "b", 0)])
    assert zs.concat(os).count_words(3) == 10


def test_minimize_preserves_counts():
    a = zero_star_one().concat(zero_star_one())
    assert a.minimize().growth_profile(10) == a.growth_profile(10)


def test_language_equality_certificate():
    a = zero_star_one()
    again = Automaton(
        AB, 4, 0, [1, 3],
        [(0, "a", 2), (2, "a", 0), (0, "b", 1), (2, "b", 3)],
    )
    assert a.language_equal(again)
    assert not a.language_equal(automata.universal(AB))


def test_project_diagonal_is_universal():
    letters = [(x, y) for x in AB for y in AB]
    diag = Automaton(letters, 1, 0, [0], [(0, (x, x), 0) for x in AB])
    proj = automata.unwrap_singletons(diag.project(1, ("a", "a")))
    assert proj.minimize().language_equal(automata.universal(AB))


def test_project_empty_is_empty():
    letters = [(x, y) for x in AB for y in AB]
    empty = automata.empty_language(letters)
    proj = automata.unwrap_singletons(empty.project(1, ("a", "a")))
    assert proj.is_empty()


def test_is_sparse_examples():
    assert automata.is_sparse(zero_star_one()).sparse
    res = automata.is_sparse(automata.universal(AB))
    assert not res.sparse
    u, v, w = res.witness
    assert v != w
    zs = Automaton(AB, 1, 0, [0], [(0, "a", 0)])
    os = Automaton(AB, 1, 0, [0], [(0, "b", 0)])
    zoz = zs.concat(os).concat(zs)
    r = automata.is_sparse(zoz)
    assert r.sparse and r.degree == 3


def test_sparse_witness_certifies_growth():
    res = automata.is_sparse(automata.universal(AB))
    u, v, w = res.witness
    profile = automata.universal(AB).growth_profile(40)
    assert profile[40] >= 2**10 * max(profile[20], 1) // profile[20]
    assert profile[40] / max(profile[20], 1) > 2**10


def test_sparse_degree_bounds_growth():
    zs = Automaton(AB, 1, 0, [0], [(0, "a", 0)])
    os = Automaton(AB, 1, 0, [0], [(0, "b", 0)])
    zoz = zs.concat(os).concat(zs)
    res = automata.is_sparse(zoz)
    profile = zoz.growth_profile(40)
    scale = max(profile[n] / (n + 1) ** res.degree for n in range(5, 21))
    for n in range(21, 41):
        assert profile[n] <= scale * (n + 1) ** res.degree * 1.0001


def test_sparse_decompose_examples():
    terms = automata.sparse_decompose(zero_star_one())
    assert terms == (automata.SimpleSparseTerm((), ((("a",), ("b",)),)),)
    fin = automata.from_word(("a", "b"), AB)
    t2 = automata.sparse_decompose(fin)
    assert len(t2) == 1 and t2[0].pairs == ()
    zs = Automaton(AB, 1, 0, [0], [(0, "a", 0)])
    os = Automaton(AB, 1, 0, [0], [(0, "b", 0)])
    zoz = zs.concat(os).concat(zs)
    terms3 = automata.sparse_decompose(zoz)  # verifies equality internally
    assert max(len(t.pairs) for t in terms3) == 3


def test_parikh_examples():
    star_ab = automata.from_word(("a", "b"), AB).star()
    image = automata.parikh_image(star_ab)
    got = image.members_upto(8)
    want = {(k, k) for k in range(9)}
    assert got == want
    assert automata.parikh_image(automata.empty_language(AB)).linear_sets == ()
    zs = Automaton(AB, 1, 0, [0], [(0, "a", 0)])
    os = Automaton(AB, 1, 0, [0], [(0, "b", 0)])
    img2 = automata.parikh_image(zs.concat(os))
    assert img2.members_upto(8) == {(i, j) for i in range(9) for j in range(9)}


def test_parikh_agrees_with_brute_force():
    a = zero_star_one().union(automata.from_word(("b", "b", "a"), AB).star())
    image = automata.parikh_image(a)
    members = image.members_upto(8)
    seen = set()
    for w in brute_words(a, 8):
        vec = (w.count("a"), w.count("b"))
        seen.add(vec)
        assert vec in members, (w, vec)
    for vec in members:
        if sum(vec) <= 4:
            assert vec in seen


small_nfas = st.builds(
    lambda n, edges, finish, init: Automaton(
        AB, n, init % n, {f % n for f in finish}, [(q % n, AB[l % 2], t % n) for q, l, t in edges]
    ),
    st.integers(min_value=1, max_value=4),
    st.lists(st.tuples(st.integers(0, 3), st.integers(0, 1), st.integers(0, 3)), max_size=10),
    st.lists(st.integers(0, 3), min_size=1, max_size=3),
    st.integers(0, 3),
)


@given(small_nfas)
@settings(max_examples=60, deadline=None)
def test_minimize_is_language_preserving(aut):
    m = aut.minimize()
    assert brute_words(aut, 4) == brute_words(m, 4)
    assert m.growth_profile(10) == aut.determinize().growth_profile(10)


@given(small_nfas)
@settings(max_examples=40, deadline=None)
def test_complement_partitions_words(aut):
    comp = aut.complement()
    allw = brute_words(automata.universal(AB), 3)
    wa = brute_words(aut, 3)
    assert brute_words(comp, 3) == allw - wa


def test_json_round_trip():
    a = zero_star_one()
    back = Automaton.from_json(a.to_json())
    assert back.language_equal(a)
