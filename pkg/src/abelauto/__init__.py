"""Automatic, sparse, and exponent-definable subsets of abelian groups."""

from .automata import Automaton, SemilinearSet, SimpleSparseTerm
from .autosets import (
    AutomaticSet,
    addition_automaton,
    compile_formula,
    equality_transducer,
    f_cycle,
    from_kernel,
    from_language,
    groupless_f_set,
    is_f_sparse,
    kernel_of,
    min_representatives,
    rebase,
    sparse_sum,
    translate,
)
from .groups import (
    CosetSystem,
    FreeLattice,
    IntegerBase,
    LatticeWithTorsion,
    PolyRing,
    PowerGroup,
    Word,
    group_from_json,
)
from .modeltheory import (
    EDPSet,
    Ladder,
    edp,
    edp_member,
    edp_normal_form,
    edp_union,
    exponent_relation,
    ladder_search,
    order_pair_set,
    sparse_to_edp,
    tpower_expansion_report,
    trace_relation,
)
from .presburger import PresburgerRel, parse_formula
from .spanning import (
    SpanningSet,
    eigen_gate,
    enlarge_span,
    power_span,
    product_span,
    verify_spanning,
)

__version__ = "0.1.0"
