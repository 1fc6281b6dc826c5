import random

import pytest

from abelauto import automata, presburger
from abelauto.autosets import AutomaticSet, linear_relation, f_cycle, whole_group
from abelauto.modeltheory import (
    EDPSet,
    edp,
    edp_member,
    edp_normal_form,
    edp_union,
    edp_union_single,
    exponent_relation,
    ladder_search,
    order_pair_set,
    sparse_to_edp,
    tpower_expansion_report,
    trace_relation,
)
from abelauto.spanning import product_span


@pytest.fixture(scope="module")
def t_powers_edp(span7):
    phi = presburger.parse_formula("k2 = 1", ("k1", "k2"))[0]
    return edp(span7, (((),), ((1,),)), phi)


class TestEDP:
    def test_enumeration(self, t_powers_edp, f7):
        els = t_powers_edp.enumerate_elements(6)
        assert els == {f7.monomial(d) for d in range(6)}

    def test_member_examples(self, t_powers_edp, f7):
        assert edp_member(t_powers_edp, f7.monomial(5))
        assert not edp_member(t_powers_edp, (2,))
        assert not edp_member(t_powers_edp, ())

    def test_empty_phi_rejects_zero(self, span7):
        e = edp(span7, (((),),), presburger.rel_false(1))
        assert not edp_member(e, ())

    def test_member_agrees_with_enumeration(self, span7, f7):
        rng = random.Random(1)
        phi = presburger.parse_formula("k1 <= k2", ("k1", "k2"))[0]
        e = edp(span7, (((1,),), ((0, 2),)), phi)
        els = e.enumerate_elements(7)
        sample = list(els)[:10]
        sample += [f7._strip([rng.randrange(7) for _ in range(4)]) for _ in range(8)]
        for el in sample:
            brute = el in els if len(el) <= 8 else None
            if brute is not None:
                assert edp_member(e, el) == brute, el

    def test_union_pointwise(self, t_powers_edp, span7, f7):
        phi = presburger.parse_formula("k2 = 1", ("k1", "k2"))[0]
        two = edp(span7, (((),), ((2,),)), phi)
        u = edp_union(t_powers_edp, two)
        for el in [(1,), (2,), (0, 1), (0, 2), (3,), ()]:
            want = edp_member(t_powers_edp, el) or edp_member(two, el)
            assert edp_member(u, el) == want, el

    def test_union_single_track_construction(self, t_powers_edp, span7):
        phi = presburger.parse_formula("k2 = 1", ("k1", "k2"))[0]
        two = edp(span7, (((),), ((2,),)), phi)
        merged = edp_union_single(t_powers_edp, two)
        assert len(merged.components) == 1
        assert merged.enumerate_elements(5) == edp_union(
            t_powers_edp, two
        ).enumerate_elements(5)


class TestNormalForm:
    def test_single_letter_unchanged(self, t_powers_edp):
        assert edp_normal_form(t_powers_edp) is t_powers_edp

    def test_two_letter_word(self, span7, f7):
        phi = presburger.parse_formula("k1 = 1", ("k1", "k2"))[0]
        e = edp(span7, (((1,),), ((1,), (0, 1))), phi)
        nf = edp_normal_form(e)
        assert nf.is_single_letter()
        assert nf.r == 2
        els = e.enumerate_elements(8)
        els_nf = nf.enumerate_elements(8)
        assert els <= els_nf
        assert {x for x in els_nf if len(x) <= 7} <= e.enumerate_elements(12)

    def test_mixed_lengths(self, span7, f7):
        # words of lengths 1 and 2 -> block size 2
        phi = presburger.rel_true(2)
        e = edp(span7, (((3,),), ((0, 1), (1,))), phi)
        nf = edp_normal_form(e)
        assert nf.is_single_letter() and nf.r == 2
        els = e.enumerate_elements(6)
        els_nf = nf.enumerate_elements(10)
        assert els <= els_nf
        assert {x for x in nf.enumerate_elements(6) if len(x) <= 5} <= e.enumerate_elements(10)


class TestSparseToEDP:
    def test_battery_sets_convert(self, battery):
        sparse_names = ("t_powers", "cycle_1", "cycle_t", "t_union_2t", "cycle_1_z")
        for name in sparse_names:
            aset = battery[name]
            e = sparse_to_edp(aset)
            want = aset.elements(6)
            got = {
                x
                for x in e.enumerate_elements(9)
                if aset.span.shortest_len(x) <= 6
            }
            assert got == want, name

    def test_spot_membership(self, battery, f7):
        e = sparse_to_edp(battery["t_powers"])
        assert edp_member(e, f7.monomial(4))
        assert not edp_member(e, (2,))


class TestExponentRelation:
    def test_diagonal_is_equality(self, z4, spanz):
        pair = product_span(spanz, 2)
        rel = linear_relation(z4, 1, [spanz.digits, spanz.digits], (1, -1))
        diag = AutomaticSet(pair, rel)
        out = exponent_relation(diag, (((1,),), ((1,),)))
        for k1 in range(9):
            for k2 in range(9):
                assert out.member((k1, k2)) == (k1 == k2)

    def test_whole_group_full_relation(self, spanz):
        out = exponent_relation(whole_group(spanz), (((1,),),))
        assert all(out.member((k,)) for k in range(9))

    def test_t_power_shape(self, t_powers, span7):
        out = exponent_relation(t_powers, (((), (1,)),))
        for k1 in range(8):
            for k2 in range(8):
                assert out.member((k1, k2)) == (k2 == 1)

    def test_round_trip_against_brute_force(self, spanz, z4):
        # evaluate [a^k b^l] against direct arithmetic for a small set
        target = f_cycle(spanz, (1,))
        out = exponent_relation(target, (((1,),),))
        for k in range(9):
            val = z4.eval_word(((1,),) * k)
            assert out.member((k,)) == target.member(val), k


class TestTraceRelation:
    def test_diagonal_gives_value_equivalence(self, t_powers_edp, f7, span7):
        pair = product_span(span7, 2)
        rel = linear_relation(f7, 1, [span7.digits, span7.digits], (1, -1))
        diag = AutomaticSet(pair, rel)
        tr = trace_relation(t_powers_edp, diag, m=2)
        for a in range(5):
            for b in range(5):
                assert tr.member((a, 1, b, 1)) == (a == b)
                assert not tr.member((a, 0, b, 1))

    def test_empty_trace(self, t_powers_edp, span7):
        from abelauto.autosets import empty_set

        pair_empty = empty_set(product_span(span7, 2))
        tr = trace_relation(t_powers_edp, pair_empty, m=2)
        assert presburger.decide_empty(tr)

    def test_addition_graph_on_t_powers(self, t_powers_edp, f7, span7):
        # t-powers sum to a t-power only in degenerate ways; the trace of the
        # addition graph restricted to the cube has no triples of distinct
        # exponents
        triple = product_span(span7, 3)
        rel = linear_relation(f7, 1, [span7.digits] * 3, (1, 1, -1))
        add = AutomaticSet(triple, rel)
        tr = trace_relation(t_powers_edp, add, m=3)
        for a in range(4):
            for b in range(4):
                for c in range(4):
                    got = tr.member((a, 1, b, 1, c, 1))
                    want = False  # t^a + t^b = t^c never holds in F_7[t]
                    assert got == want, (a, b, c)


class TestLadders:
    def test_order_pair_found(self, span7):
        ops = order_pair_set(span7, (1,))
        for n in (1, 2, 3):
            res = ladder_search(ops, n, bound=8)
            assert res.found
            lad = res.ladder
            g = ops.group
            for i in range(n):
                for j in range(n):
                    s = g.add(lad.a_elements[i], lad.b_elements[j])
                    assert ops.member(s) == (i <= j)

    def test_cycle_has_no_ladder(self, battery):
        res = ladder_search(battery["cycle_1"], 3, bound=10)
        assert not res.found
        assert res.bound == 10

    def test_empty_set_no_ladder(self, span7):
        from abelauto.autosets import empty_set

        assert not ladder_search(empty_set(span7), 1, bound=6).found

    def test_nonempty_set_has_trivial_ladder(self, t_powers):
        assert ladder_search(t_powers, 1, bound=6).found

    def test_exact_mode_small(self, spanz, evens):
        res = ladder_search(evens, 1, mode="exact")
        assert res.found


class TestPolysnipDemo:
    def test_small_report(self):
        report = tpower_expansion_report(7, 6, spot_checks=4)
        assert report["encoding_chosen"] == "set-definition"
        chosen = report["encodings"]["set-definition"]
        assert chosen["all_pass"]
        assert chosen["checks"]["phi_defines_t_powers"]["trace_size"] == 7
        displayed = report["encodings"]["displayed-strings"]
        assert not displayed["all_pass"]
        assert report["membership_machinery_agrees"]

    def test_rejects_small_primes(self):
        with pytest.raises(ValueError):
            tpower_expansion_report(5, 4)


def test_edp_serialization_round_trip(t_powers_edp):
    back = EDPSet.from_json(t_powers_edp.to_json())
    assert back.enumerate_elements(5) == t_powers_edp.enumerate_elements(5)
