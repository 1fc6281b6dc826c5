import itertools

import pytest
from hypothesis import given, settings, strategies as st

from abelauto.groups import (
    FreeLattice,
    IntegerBase,
    LatticeWithTorsion,
    PolyRing,
    PowerGroup,
    group_from_json,
)


def test_eval_word_examples(z4, f7):
    assert z4.eval_word([(2,), (1,)]) == (6,)
    assert z4.eval_word([]) == (0,)
    assert f7.eval_word([(3,), (), (1,)]) == (3, 0, 1)


def test_eval_word_concat_law(z4):
    # eval(s t) = eval(s) + F^{|s|} eval(t)
    digits = [(-2,), (-1,), (0,), (1,), (2,)]
    for s_len in range(3):
        for t_len in range(3):
            for s in itertools.product(digits, repeat=s_len):
                for t in itertools.product(digits, repeat=t_len):
                    lhs = z4.eval_word(s + t)
                    rhs = z4.add(z4.eval_word(s), z4.apply_endo(z4.eval_word(t), len(s)))
                    assert lhs == rhs


def test_coset_system_z4(z4):
    cs = z4.coset_system(1)
    assert cs.representatives == ((0,), (1,), (2,), (3,))


def test_coset_system_diag23():
    g = FreeLattice(2, [[2, 0], [0, 3]])
    cs = g.coset_system(1)
    assert len(cs) == 6
    # brute-force pairwise incongruence on a box
    for a in itertools.product(range(-4, 5), repeat=2):
        matches = [r for r in cs.representatives if g.coset_key(a) == g.coset_key(r)]
        assert len(matches) == 1


def test_coset_system_f7(f7):
    assert f7.coset_system(1).representatives == ((), (1,), (2,), (3,), (4,), (5,), (6,))
    assert len(f7.coset_system(2)) == 49


def test_duplicate_representatives_rejected(z4):
    with pytest.raises(ValueError):
        z4.coset_system_from([(0,), (1,), (2,), (6,)], 1)
    with pytest.raises(ValueError):
        z4.coset_system_from([(0,), (1,), (2,)], 1)


def test_preimage_examples(z4, f7):
    assert z4.preimage_endo((8,)) == (2,)
    assert z4.preimage_endo((6,)) is None
    assert f7.preimage_endo((0, 1, 1)) == (1, 1)


def test_arithmetic_examples(f7):
    fib = FreeLattice(2, [[1, 1], [1, 0]])
    assert fib.apply_endo((1, 0)) == (1, 1)
    assert fib.neg((0, 0)) == (0, 0)
    assert f7.add((3,), (5,)) == (1,)


def test_injectivity_requirement():
    with pytest.raises(ValueError):
        FreeLattice(2, [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        IntegerBase(1)


def test_torsion_group():
    g = LatticeWithTorsion(1, [2], [[2]])
    assert g.apply_endo((1, 1)) == (2, 1)
    assert g.preimage_endo((2, 1)) == (1, 1)
    assert g.preimage_endo((1, 1)) is None
    assert g.quotient_size(1) == 2
    with pytest.raises(ValueError):
        LatticeWithTorsion(1, [4], [[2]], torsion_units=[2])


def test_power_group(f7):
    g = PowerGroup(f7, 2)
    a = ((1,), (0, 1))
    assert g.add(a, g.neg(a)) == g.zero()
    assert g.apply_endo(a) == ((0, 1), (0, 0, 1))
    assert g.quotient_size(1) == 49
    assert len(g.coset_system(1)) == 49


def test_json_round_trip(z4, f7):
    for g in (z4, f7, FreeLattice(2, [[1, 1], [1, 0]]),
              LatticeWithTorsion(1, [2], [[2]]), PowerGroup(f7, 2)):
        assert group_from_json(g.to_json()) == g


ints = st.integers(min_value=-30, max_value=30)


@given(st.lists(ints, min_size=2, max_size=2), st.integers(1, 3))
@settings(max_examples=50, deadline=None)
def test_preimage_round_trip_lattice(coords, r):
    fib = FreeLattice(2, [[1, 1], [1, 0]])
    a = tuple(coords)
    assert fib.preimage_endo(fib.apply_endo(a, r), r) == a


@given(st.lists(st.integers(0, 6), max_size=5), st.integers(1, 3))
@settings(max_examples=50, deadline=None)
def test_preimage_round_trip_poly(coeffs, r):
    f7 = PolyRing(7)
    a = f7._strip(coeffs)
    assert f7.preimage_endo(f7.apply_endo(a, r), r) == a


@given(ints)
@settings(max_examples=60, deadline=None)
def test_unique_coset_representative(n):
    z4 = IntegerBase(4)
    cs = z4.coset_system(1)
    matches = [r for r in cs.representatives if z4.coset_key((n,)) == z4.coset_key(r)]
    assert len(matches) == 1
