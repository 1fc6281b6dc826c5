import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from abelauto import automata
from abelauto.autosets import (
    And,
    AutomaticSet,
    Eq,
    Exists,
    ForAll,
    InSet,
    Not,
    Term,
    absorb_star_term,
    addition_automaton,
    compile_formula,
    equality_transducer,
    f_cycle,
    from_kernel,
    from_language,
    groupless_f_set,
    is_f_sparse,
    kernel_of,
    linear_relation,
    min_representatives,
    rebase,
    shift_class,
    singleton,
    sparse_sum,
    star_term_translates,
    translate,
    whole_group,
    empty_set,
)
from abelauto.groups import PowerGroup
from abelauto.spanning import power_span, product_span


def brute_cycle(group, a, deg_cap, delta=1):
    out = set()
    acc = group.zero()
    k = 0
    while k <= deg_cap + 2:
        acc = group.add(acc, group.apply_endo(a, delta * k))
        out.add(acc)
        k += 1
    return out


class TestMembership:
    def test_t_powers(self, t_powers, f7):
        assert t_powers.member((0, 0, 0, 1))
        assert t_powers.member((1,))
        assert not t_powers.member((2,)) and not t_powers.member(())

    def test_whole_group_membership(self, spanz):
        assert whole_group(spanz).member((-17,))

    def test_member_respects_saturation(self, spanz, z4):
        # a language holding only the non-minimal word [-2, 1] for 2 still
        # answers membership for the minimal word "2"
        lang = automata.from_word(((-2,), (1,)), spanz.digits)
        aset = from_language(spanz, lang)
        assert aset.member((2,))
        assert not aset.member((1,))

    def test_elements_vs_membership_on_ball(self, battery, span7, spanz):
        for name in ("t_powers", "cycle_1", "evens_z"):
            aset = battery[name]
            span = aset.span
            els = aset.elements(4)
            ball = span.ball(4)
            for a in ball:
                assert (a in els) == aset.member(a), (name, a)

    def test_padding_invariance_random(self, battery):
        rng = random.Random(7)
        for aset in battery.values():
            digits = aset.span.digits
            zero = aset.group.zero()
            for _ in range(40):
                w = [digits[rng.randrange(len(digits))] for _ in range(rng.randrange(10))]
                assert aset.dfa.accepts(w) == aset.dfa.accepts(w + [zero])


class TestTransducers:
    def test_equality_conversion_example(self, z4, spanz):
        tr = equality_transducer(z4, spanz, [(0,), (1,), (2,), (3,)])
        assert tr.automaton.accepts([((3,), (-1,)), ((0,), (1,))])
        assert not tr.automaton.accepts([((3,), (1,)), ((0,), (1,))])

    def test_identical_words_accepted(self, z4, spanz):
        tr = equality_transducer(z4, spanz, spanz.digits)
        rng = random.Random(0)
        for _ in range(50):
            w = [spanz.digits[rng.randrange(5)] for _ in range(rng.randrange(6))]
            assert tr.automaton.accepts([(a, a) for a in w])

    def test_poly_equality_is_diagonal(self, f7, span7):
        # exact coset representatives: distinct equal-length strings are
        # never equal in value
        tr = equality_transducer(f7, span7, span7.digits)
        for w1 in itertools.product(span7.digits, repeat=2):
            for w2 in itertools.product(span7.digits, repeat=2):
                expected = w1 == w2
                assert tr.automaton.accepts(list(zip(w1, w2))) == expected

    def test_addition_automaton(self, z4, spanz, f7, span7):
        add = addition_automaton(z4, spanz)
        assert add.accepts([((2,), (2,), (0,)), ((0,), (0,), (1,))])  # 2+2=4
        assert add.accepts([((1,), (0,), (1,))])
        # reachable carries stay within the digit range
        rel = linear_relation(z4, 1, [spanz.digits] * 3, (1, 1, -1))
        assert rel.n <= 5
        f7add = addition_automaton(f7, span7)
        assert f7add.accepts([((3,), (5,), (1,))])

    def test_addition_brute_force(self, z4, spanz):
        add = addition_automaton(z4, spanz)
        for x in range(-6, 7):
            for y in range(-6, 7):
                wx = spanz.shortest_expansion((x,))
                wy = spanz.shortest_expansion((y,))
                wz = spanz.shortest_expansion((x + y,))
                n = max(len(wx), len(wy), len(wz))
                pad = lambda w: list(w) + [(0,)] * (n - len(w))
                word = list(zip(pad(wx), pad(wy), pad(wz)))
                assert add.accepts(word), (x, y)


class TestRebase:
    def test_membership_preserved_base4(self, evens, spanz):
        target = power_span(spanz, 2)
        moved = rebase(evens, target)
        for v in range(-100, 101):
            assert moved.member((v,)) == (v % 2 == 0), v

    def test_rebase_same_span_is_identity(self, evens):
        assert rebase(evens, evens.span) is evens

    def test_poly_rebase(self, t_powers, span7):
        target = power_span(span7, 2)
        moved = rebase(t_powers, target)
        for d in range(11):
            el = (0,) * d + (1,)
            assert moved.member(el), d
        assert not moved.member((2,)) and not moved.member((1, 1))


class TestCompile:
    def test_even_numbers(self, evens):
        assert evens.member((6,)) and not evens.member((7,))

    def test_x_equals_x_is_whole_group(self, z4, spanz):
        x = Term.var(z4, "x")
        whole = compile_formula(spanz, Eq(x, x), ("x",))
        assert whole.same_set(whole_group(spanz))

    def test_empty_intersection(self, t_powers, span7, f7):
        x, y = Term.var(f7, "x"), Term.var(f7, "y")
        two_t = compile_formula(
            span7,
            Exists("y", And((InSet(t_powers, ("y",)), Eq(x, y + y)))),
            ("x",),
        )
        both = t_powers.intersect(two_t)
        assert both.is_empty()

    def test_forall(self, z4, spanz, evens):
        # z such that every member of {z} is even: here z even
        x, z = Term.var(z4, "x"), Term.var(z4, "z")
        node = ForAll("x", Not(And((Eq(x, z), Not(InSet(evens, ("x",)))))))
        same = compile_formula(spanz, node, ("z",))
        for v in range(-20, 21):
            assert same.member((v,)) == (v % 2 == 0)

    def test_singleton_and_translate(self, span7, f7):
        single = singleton(span7, (1, 1))
        assert single.member((1, 1)) and not single.member((1,))
        shifted = translate(single, (1,))
        assert shifted.member((2, 1)) and not shifted.member((1, 1))


class TestKernel:
    def test_t_powers_kernel_has_three_classes(self, t_powers):
        kernel = kernel_of(t_powers)
        assert kernel.class_count() == 3
        # classes are t^N itself, {0}, and the empty set
        sizes = sorted(c.dfa.n for c in kernel.classes)
        assert kernel.accepting.count(True) == 1

    def test_whole_group_kernel_is_single_class(self, spanz, z4):
        kernel = kernel_of(whole_group(spanz))
        assert kernel.class_count() == 1

    def test_diagonal_kernel_has_two_classes(self, f7, span7):
        pair = product_span(span7, 2)
        rel = linear_relation(f7, 1, [span7.digits, span7.digits], (1, -1))
        diag = AutomaticSet(pair, rel)
        kernel = kernel_of(diag)
        assert kernel.class_count() == 2

    def test_round_trip_battery(self, battery):
        for name, aset in battery.items():
            kernel = kernel_of(aset)
            back = from_kernel(kernel)
            assert back.same_set(aset), name

    def test_concatenation_law(self, t_powers, f7):
        # (A_sigma)_tau = A_{sigma tau} along table paths
        kernel = kernel_of(t_powers)
        S = kernel.coset_system
        rng = random.Random(3)
        for _ in range(12):
            word = [rng.randrange(len(S)) for _ in range(rng.randrange(1, 4))]
            idx = 0
            for s_idx in word:
                idx = kernel.table[(idx, s_idx)]
            # recompute by shifting the root class directly
            direct = t_powers
            for s_idx in word:
                direct = shift_class(direct, S.representatives[s_idx])
            assert kernel.classes[idx].same_set(direct)

    def test_shift_class_nondigit(self, evens, z4):
        # 3 is a coset representative but not a digit
        shifted = shift_class(evens, (3,))
        for x in range(-20, 21):
            assert shifted.member((x,)) == ((3 + 4 * x) % 2 == 0)


class TestMinRepresentatives:
    def test_t_powers_minreps(self, t_powers, span7):
        reps = min_representatives(t_powers)
        zero, one = (), (1,)
        got = set(reps.words(4))
        assert got == {(one,), (zero, one), (zero, zero, one), (zero, zero, zero, one)}

    def test_empty_set(self, span7):
        reps = min_representatives(empty_set(span7))
        assert reps.is_empty()

    def test_count_matches_ball(self, spanz):
        # whole group: minimal representatives biject onto the lambda balls
        reps = min_representatives(whole_group(spanz))
        profile = reps.growth_profile(8)
        ball = spanz.ball(8)
        for n in range(9):
            assert profile[n] == sum(1 for l in ball.values() if l <= n)

    def test_injective_on_battery(self, battery):
        for name, aset in battery.items():
            reps = min_representatives(aset)
            seen = {}
            for w in reps.words(6):
                val = aset.span.eval_word(w)
                assert val not in seen, (name, w, seen[val])
                seen[val] = w


class TestSparsity:
    def test_t_powers_sparse(self, t_powers):
        res = is_f_sparse(t_powers)
        assert res.sparse and res.terms

    def test_whole_groups_not_sparse(self, span7, spanz):
        for span in (span7, spanz):
            res = is_f_sparse(whole_group(span))
            assert not res.sparse
            u, v, w = res.witness
            assert v != w

    def test_cycles_sparse(self, battery):
        for name in ("cycle_1", "cycle_t", "cycle_sum", "t_union_2t", "cycle_1_z"):
            assert is_f_sparse(battery[name]).sparse, name

    def test_sum_matches_brute_force(self, battery, f7):
        s = battery["cycle_sum"]
        A = brute_cycle(f7, (1,), 9)
        B = brute_cycle(f7, (0, 1), 9)
        sums = {f7.add(x, y) for x in A for y in B}
        for el in sums:
            if len(el) <= 9:
                assert s.member(el), el
        rng = random.Random(5)
        for _ in range(200):
            el = f7._strip([rng.randrange(7) for _ in range(rng.randrange(1, 7))])
            if len(el) <= 6:
                assert s.member(el) == (el in sums), el

    def test_sum_with_zero_singleton(self, t_powers, span7):
        zs = singleton(span7, ())
        assert sparse_sum(t_powers, zs, recheck=False).same_set(t_powers)

    def test_union_and_intersection_brute(self, battery, f7):
        a, b = battery["cycle_1"], battery["t_powers"]
        union = a.union(b)
        inter = a.intersect(b)
        ea, eb = a.elements(6), b.elements(6)
        assert union.elements(6) == ea | eb
        assert inter.elements(6) == ea & eb
        for el in [(1,), (1, 1), (0, 1), (3,)]:
            assert union.member(el) == (a.member(el) or b.member(el))
            assert inter.member(el) == (a.member(el) and b.member(el))


class TestCycles:
    def test_geometric_cycle_base4(self, spanz):
        c = f_cycle(spanz, (1,))
        for n in range(5):
            assert c.member(((4 ** (n + 1) - 1) // 3,))
        assert c.member((21,)) and not c.member((20,)) and not c.member((0,))

    def test_poly_cycle(self, span7, f7):
        c = f_cycle(span7, (1,))
        assert c.member((1, 1, 1)) and c.member((1,))
        assert not c.member((0, 1))

    def test_zero_cycle_is_origin(self, spanz):
        c = f_cycle(spanz, (0,), 2)
        assert c.member((0,)) and not c.member((1,))

    def test_delta_two_cycle(self, spanz, z4):
        c = f_cycle(spanz, (1,), 2)
        expected = brute_cycle(z4, (1,), 0, delta=2)
        # elements 1, 1+16, 1+16+256, ...
        vals = [1, 17, 273]
        for v in vals:
            assert c.member((v,)), v
        assert not c.member((5,))

    def test_groupless_set(self, span7, f7):
        gs = groupless_f_set(span7, (3,), [((1,), 1)])
        # 3 + C(1;F)
        assert gs.member(f7.add((3,), (1, 1)))
        assert not gs.member((1, 1))


class TestLambdaWordBound:
    def test_word_values_bounded(self, spanz):
        # lambda([sigma]) <= M * 2^{|sigma|} with M measured on short words
        rng = random.Random(11)
        M = max(
            spanz.lambda_value(spanz.eval_word((d,))) / 2 for d in spanz.digits
        )
        for _ in range(150):
            w = [spanz.digits[rng.randrange(5)] for _ in range(rng.randrange(9))]
            val = spanz.eval_word(w)
            assert spanz.lambda_value(val) <= M * 2 ** len(w)


class TestStarTermCalculus:
    def test_absorption_identity(self, z4):
        # [v0 w^k v1] = gamma + [a^(k-1)] over F^s for k >= 1
        v0, w, v1 = ((1,),), ((1,),), ((2,),)
        gamma, letters = absorb_star_term(z4, 1, [v0, v1], [w], 1)
        assert len(letters) == 1
        for k in range(1, 7):
            word = v0 + w * k + v1
            direct = z4.eval_word(word)
            folded = z4.add(gamma, z4.eval_word(letters * (k - 1), 1))
            assert direct == folded, k

    def test_translates_cover_term(self, z4):
        term = automata.SimpleSparseTerm(((1,),), ((((1,),), ((2,),)),))
        vals = {z4.eval_word(((1,),) + ((1,),) * k + ((2,),)) for k in range(7)}
        covered = set()
        for gamma, letters, s in star_term_translates(z4, 1, term):
            for exps in itertools.product(range(8), repeat=len(letters)):
                word = []
                for a, e in zip(letters, exps):
                    word += [a] * e
                covered.add(z4.add(gamma, z4.eval_word(word, s)))
        assert vals <= covered
        small = {v for v in covered if abs(v[0]) < 4**5}
        big_vals = {
            z4.eval_word(((1,),) + ((1,),) * k + ((2,),)) for k in range(12)
        }
        assert small <= big_vals


def test_serialization_round_trip(t_powers):
    back = AutomaticSet.from_json(t_powers.to_json())
    assert back.same_set(t_powers)
