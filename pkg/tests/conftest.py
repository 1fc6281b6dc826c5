import pytest

from abelauto import automata
from abelauto.autosets import (
    AutomaticSet,
    compile_formula,
    f_cycle,
    from_language,
    singleton,
    sparse_sum,
    translate,
    whole_group,
    empty_set,
    Term,
    Eq,
    Exists,
    And,
    InSet,
)
from abelauto.groups import IntegerBase, PolyRing
from abelauto.spanning import verify_spanning


@pytest.fixture(scope="session")
def f7():
    return PolyRing(7)


@pytest.fixture(scope="session")
def z4():
    return IntegerBase(4)


@pytest.fixture(scope="session")
def span7(f7):
    res = verify_spanning(f7, [f7.const(i) for i in range(7)], 1)
    assert res.ok
    return res.spanning_set


@pytest.fixture(scope="session")
def spanz(z4):
    res = verify_spanning(z4, [(-2,), (-1,), (0,), (1,), (2,)], 1)
    assert res.ok
    return res.spanning_set


def t_power_language(span7):
    """The 0*10* language over the F_7 digits."""
    zero, one = (), (1,)
    edges = [(0, zero, 0), (0, one, 1), (1, zero, 1)]
    edges += [(1, one, 2), (2, zero, 2), (2, one, 2)]
    return automata.Automaton(span7.digits, 3, 0, [1], edges)


@pytest.fixture(scope="session")
def t_powers(span7):
    return from_language(span7, t_power_language(span7))


@pytest.fixture(scope="session")
def evens(z4, spanz):
    x, y = Term.var(z4, "x"), Term.var(z4, "y")
    return compile_formula(spanz, Exists("y", Eq(x, y + y)), ("x",))


@pytest.fixture(scope="session")
def battery(f7, span7, z4, spanz, t_powers, evens):
    """Ten named automatic sets used by the kernel / min-rep / EDP criteria."""
    two_t_powers = compile_formula(
        span7,
        Exists(
            "y",
            And(
                (
                    InSet(t_powers, ("y",)),
                    Eq(Term.var(f7, "x"), Term.var(f7, "y") + Term.var(f7, "y")),
                )
            ),
        ),
        ("x",),
    )
    c1 = f_cycle(span7, (1,))
    ct = f_cycle(span7, (0, 1))
    sets = {
        "t_powers": t_powers,
        "cycle_1": c1,
        "cycle_t": ct,
        "cycle_sum": sparse_sum(c1, ct, recheck=False),
        "t_union_2t": t_powers.union(two_t_powers),
        "singleton_1_plus_t": singleton(span7, (1, 1)),
        "t_powers_shifted": translate(t_powers, (1,)),
        "empty_f7": empty_set(span7),
        "evens_z": evens,
        "cycle_1_z": f_cycle(spanz, (1,)),
    }
    return sets
