"""Automatic subsets of a group with respect to a spanning digit set.

An AutomaticSet pairs a spanning set with a DFA over its digits.  The DFA is
kept canonical: padding closed (trailing zero digits never change
acceptance), saturated (every digit word evaluating into the set is
accepted, not just one representative per element), and minimal.  Saturation
makes the minimal DFA a decidable equality certificate for the represented
subset, which the kernel machinery depends on.
"""

from dataclasses import dataclass
from itertools import product
from math import lcm

from . import automata, errors
from .automata import Automaton
from .errors import CarryCapExceeded, KernelCapExceeded
from .groups import PowerGroup
from .spanning import SpanningSet, power_span, product_span


_ALPHABET_CAP = 400_000


# -- carry-automaton constructions --------------------------------------------


def linear_relation(group, r, track_alphabets, coeffs, const=None, carry_cap=None):
    """Automaton for {(w_1..w_m) : sum coeffs_i * [w_i]_{F^r} + const = 0}.

    States are carry elements; reading a letter tuple s maps carry c to
    F^-r (c + sum coeffs_i s_i), pruned when the sum is not divisible.  The
    carry set is finite for digits drawn from spanning sets; the cap turns
    divergence on bad inputs into a diagnosable error.
    """
    carry_cap = carry_cap or errors.carry_cap()
    zero = group.zero()
    start = const if const is not None else zero
    size = 1
    for alpha in track_alphabets:
        size *= len(alpha)
    if size > _ALPHABET_CAP:
        raise errors.CapExceeded(
            "composite alphabet too large for exact compilation", size=size
        )
    letters = [tuple(p) for p in product(*track_alphabets)]
    states = {start: 0}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        c = order[i]
        for letter in letters:
            total = c
            for coeff, s in zip(coeffs, letter):
                total = group.add(total, group.scalar_mul(coeff, s))
            nxt = group.preimage_endo(total, r)
            if nxt is None:
                continue
            if nxt not in states:
                states[nxt] = len(order)
                order.append(nxt)
                if len(order) > carry_cap:
                    raise CarryCapExceeded(
                        "carry exploration exceeded cap", cap=carry_cap,
                        carries_seen=len(order),
                    )
            edges.append((states[c], letter, states[nxt]))
        i += 1
    finish = [states[zero]] if zero in states else []
    return Automaton(letters, len(order), 0, finish, edges)


@dataclass(frozen=True)
class CarryTransducer:
    """Letter-to-digit conversion relation with its reachable carry set."""

    group: object
    source_alphabet: tuple
    target_alphabet: tuple
    r: int
    automaton: Automaton
    carries: tuple


def equality_transducer(group, span, source_alphabet):
    """Relation {(sigma, tau) : [sigma] = [tau]} over source x span digits."""
    src = tuple(sorted(set(source_alphabet) | {group.zero()}, key=group.sort_key))
    aut = linear_relation(group, span.r, [src, span.digits], (1, -1))
    carries = len(aut.to_json()["edges"])  # informational only
    return CarryTransducer(group, src, span.digits, span.r, aut.minimize(), (carries,))


def addition_automaton(group, span):
    """Automaton over digit triples recognizing [x] + [y] = [z]."""
    return linear_relation(group, span.r, [span.digits] * 3, (1, 1, -1)).minimize()


_EQ_CACHE = {}


def _equality_dfa(span):
    key = span.key()
    if key not in _EQ_CACHE:
        aut = linear_relation(
            span.group, span.r, [span.digits, span.digits], (1, -1)
        )
        _EQ_CACHE[key] = aut.determinize()
    return _EQ_CACHE[key]


def _pair_run(left, right):
    """Complete-DFA product running `left` on pair letters and `right` on
    the second coordinate (both complete DFAs; left over pairs)."""
    states = {(left.initial, right.initial): 0}
    order = [(left.initial, right.initial)]
    edges = []
    i = 0
    right_idx = {a: li for li, a in enumerate(right.alphabet)}
    while i < len(order):
        ql, qr = order[i]
        for li, letter in enumerate(left.alphabet):
            nl = left.delta[(ql, li)][0]
            nr = right.delta[(qr, right_idx[letter[1]])][0]
            key = (nl, nr)
            if key not in states:
                states[key] = len(order)
                order.append(key)
            edges.append((i, letter, states[key]))
        i += 1
    finish = [
        states[(ql, qr)]
        for (ql, qr) in order
        if ql in left.finish and qr in right.finish
    ]
    return Automaton(left.alphabet, len(order), 0, finish, edges)


def _saturate(span, aut):
    """Close a padding-closed digit language under value equality."""
    g = span.group
    eq = _equality_dfa(span)
    lang = aut.determinize()
    pair = _pair_run(eq, lang)
    zero = g.zero()
    nfa = automata.unwrap_singletons(pair.project(1, (zero, zero)))
    return nfa.minimize()


class AutomaticSet:
    """A subset of the group represented by a canonical digit DFA."""

    __slots__ = ("group", "span", "dfa")

    def __init__(self, span, dfa, canonical=False):
        self.group = span.group
        self.span = span
        if not canonical:
            dfa = _on_alphabet(dfa, span.digits)
            dfa = dfa.padding_closure(span.group.zero())
            dfa = _saturate(span, dfa)
        self.dfa = dfa.minimize()

    def key(self):
        return (self.span.key(), self.dfa.canonical_key())

    def same_set(self, other):
        return self.key() == other.key()

    def member(self, a):
        word = self.span.shortest_expansion(a)
        return self.dfa.accepts(word)

    def contains_zero(self):
        return self.dfa.initial in self.dfa.finish

    def is_empty(self):
        return self.dfa.is_empty()

    def min_representatives(self):
        return min_representatives(self)

    def elements(self, maxlen):
        """Distinct elements of accepted words up to the given length."""
        reps = min_representatives(self)
        return {self.span.eval_word(w) for w in reps.words(maxlen)}

    def complement(self):
        return AutomaticSet(self.span, self.dfa.complement(), canonical=True)

    def union(self, other):
        a, b = common_span(self, other)
        return AutomaticSet(a.span, a.dfa.union(b.dfa), canonical=True)

    def intersect(self, other):
        a, b = common_span(self, other)
        return AutomaticSet(a.span, a.dfa.intersect(b.dfa), canonical=True)

    def difference(self, other):
        a, b = common_span(self, other)
        return AutomaticSet(a.span, a.dfa.difference(b.dfa), canonical=True)

    def to_json(self):
        return {
            "group": self.group.to_json(),
            "span": self.span.to_json(),
            "automaton": self.dfa.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        from .groups import group_from_json

        g = group_from_json(obj["group"])
        span = SpanningSet.from_json(g, obj["span"])
        return cls(span, Automaton.from_json(obj["automaton"]))

    def __repr__(self):
        return f"AutomaticSet(span=r{self.span.r}x{len(self.span.digits)}, dfa={self.dfa.n})"


def _on_alphabet(aut, digits):
    extra = [d for d in digits if d not in set(aut.alphabet)]
    missing = set(aut.alphabet) - set(digits)
    if missing:
        raise errors.AlphabetMismatch(
            f"automaton letters {sorted(missing)!r} are not spanning digits"
        )
    if not extra:
        return aut
    alphabet = list(aut.alphabet) + extra
    edges = [
        (q, aut.alphabet[li], q2) for (q, li), ts in aut.delta.items() for q2 in ts
    ]
    return Automaton(alphabet, aut.n, aut.initial, aut.finish, edges)


def from_language(span, dfa):
    """Wrap any digit automaton; the language is padded and saturated so the
    represented set's membership is word-independent."""
    return AutomaticSet(span, dfa)


def whole_group(span):
    return AutomaticSet(span, automata.universal(span.digits), canonical=True)


def empty_set(span):
    return AutomaticSet(span, automata.empty_language(span.digits), canonical=True)


def singleton(span, element):
    aut = linear_relation(span.group, span.r, [span.digits], (1,), span.group.neg(element))
    # track arity 1: unwrap tuple letters
    edges = [
        (q, aut.alphabet[li][0], q2)
        for (q, li), ts in aut.delta.items()
        for q2 in ts
    ]
    unwrapped = Automaton(span.digits, aut.n, aut.initial, aut.finish, edges)
    return AutomaticSet(span, unwrapped)


def common_span(a, b):
    """Rebase both operands to one spanning set (lcm of the exponents)."""
    if a.group != b.group:
        raise ValueError("sets live in different groups")
    if a.span == b.span:
        return a, b
    target_r = lcm(a.span.r, b.span.r)
    if a.span.r == target_r:
        target = a.span
    else:
        target = power_span(a.span, target_r // a.span.r, verify=False)
    return rebase(a, target), rebase(b, target)


# -- language conversion between digit alphabets / powers ---------------------


def convert_language(group, aut, source_alphabet, source_r, target_span):
    """Reinterpret a word language over (source alphabet, F^source_r) as an
    automatic set over the target spanning set.

    Both sides are grouped into blocks spanning lcm(source_r, target r)
    endomorphism applications; a carry relation equates block values, the
    source track is projected away, and target blocks are expanded back
    into digit letters.
    """
    g = group
    zero = g.zero()
    src = tuple(sorted(set(source_alphabet) | {zero}, key=g.sort_key))
    big = lcm(source_r, target_span.r)
    b_src = big // source_r
    b_tgt = big // target_span.r
    padded = aut.padding_closure(zero) if zero in aut.alphabet else _with_letter(aut, zero).padding_closure(zero)
    dfa = padded.determinize()
    # macro automaton over length-b_src blocks
    src_blocks = [tuple(p) for p in product(src, repeat=b_src)]
    tgt_blocks = [tuple(p) for p in product(target_span.digits, repeat=b_tgt)]
    src_idx = {a: li for li, a in enumerate(dfa.alphabet)}

    def run_block(q, block):
        for letter in block:
            q = dfa.delta[(q, src_idx[letter])][0]
        return q

    # carry relation over (source block, target block) pairs, fused with the
    # macro run of the source language
    carry_cap = errors.carry_cap()
    start = (zero, dfa.initial)
    states = {start: 0}
    order = [start]
    edges = []
    i = 0
    src_val = {blk: g.eval_word(blk, source_r) for blk in src_blocks}
    tgt_val = {blk: g.eval_word(blk, target_span.r) for blk in tgt_blocks}
    while i < len(order):
        c, q = order[i]
        for sb in src_blocks:
            total_src = g.add(c, src_val[sb])
            q2 = run_block(q, sb)
            for tb in tgt_blocks:
                total = g.sub(total_src, tgt_val[tb])
                nxt = g.preimage_endo(total, big)
                if nxt is None:
                    continue
                key = (nxt, q2)
                if key not in states:
                    states[key] = len(order)
                    order.append(key)
                    if len(order) > carry_cap:
                        raise CarryCapExceeded(
                            "conversion carry cap exceeded", cap=carry_cap
                        )
                edges.append((i, (sb, tb), states[key]))
        i += 1
    finish = [
        states[(c, q)] for (c, q) in order if c == zero and q in dfa.finish
    ]
    alphabet = [(sb, tb) for sb in src_blocks for tb in tgt_blocks]
    rel = Automaton(alphabet, len(order), 0, finish, edges)
    zero_src = tuple([zero] * b_src)
    zero_tgt = tuple([zero] * b_tgt)
    projected = automata.unwrap_singletons(rel.project(0, (zero_src, zero_tgt)))
    expanded = _expand_blocks(projected, target_span.digits, b_tgt)
    return AutomaticSet(target_span, expanded)


def _with_letter(aut, letter):
    alphabet = list(aut.alphabet) + [letter]
    edges = [
        (q, aut.alphabet[li], q2) for (q, li), ts in aut.delta.items() for q2 in ts
    ]
    return Automaton(alphabet, aut.n, aut.initial, aut.finish, edges)


def _expand_blocks(aut, digits, b):
    """Replace every block letter (d_1..d_b) by a chain of digit letters."""
    if b == 1:
        edges = [
            (q, aut.alphabet[li][0], q2)
            for (q, li), ts in aut.delta.items()
            for q2 in ts
        ]
        return Automaton(digits, aut.n, aut.initial, aut.finish, edges)
    edges = []
    n = aut.n
    for (q, li), targets in aut.delta.items():
        block = aut.alphabet[li]
        for q2 in targets:
            prev = q
            for j, d in enumerate(block):
                if j == len(block) - 1:
                    edges.append((prev, d, q2))
                else:
                    edges.append((prev, d, n))
                    prev = n
                    n += 1
    return Automaton(digits, n, aut.initial, aut.finish, edges)


def rebase(aset, target_span):
    """The same subset of the group, represented over another spanning set."""
    if aset.span == target_span:
        return aset
    return convert_language(
        aset.group, aset.dfa, aset.span.digits, aset.span.r, target_span
    )


# -- first-order compiler ------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """Integer combination of variables plus a group constant."""

    group: object
    coeffs: tuple  # sorted ((name, coeff), ...)
    const: tuple

    @staticmethod
    def var(group, name):
        return Term(group, ((name, 1),), group.zero())

    @staticmethod
    def const_term(group, element):
        return Term(group, (), element)

    def _merge(self, other, sign):
        coeffs = dict(self.coeffs)
        for name, c in other.coeffs:
            coeffs[name] = coeffs.get(name, 0) + sign * c
        coeffs = tuple(sorted((n, c) for n, c in coeffs.items() if c != 0))
        const = self.group.add(
            self.const, other.const if sign > 0 else self.group.neg(other.const)
        )
        return Term(self.group, coeffs, const)

    def __add__(self, other):
        return self._merge(other, 1)

    def __sub__(self, other):
        return self._merge(other, -1)

    def scale(self, k):
        return Term(
            self.group,
            tuple((n, k * c) for n, c in self.coeffs if k * c != 0),
            self.group.scalar_mul(k, self.const),
        )


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class InSet:
    aset: AutomaticSet
    vars: tuple


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class ForAll:
    var: str
    body: object


def _product_alphabet(span, m):
    size = len(span.digits) ** m
    if size > _ALPHABET_CAP:
        raise errors.CapExceeded(
            "composite alphabet too large for exact compilation",
            tracks=m, size=size,
        )
    return [tuple(p) for p in product(span.digits, repeat=m)]


def _embed_set(aset, positions, span, m):
    """Cylindrify a member set automaton onto chosen tracks of arity m."""
    inner = aset.dfa  # complete DFA over its own digit alphabet
    letters = _product_alphabet(span, m)
    idx = {a: li for li, a in enumerate(inner.alphabet)}
    edges = []
    for letter in letters:
        picked = tuple(letter[p] for p in positions)
        if len(positions) == 1:
            picked = picked[0]
        li = idx[picked]
        for q in range(inner.n):
            edges.append((q, letter, inner.delta[(q, li)][0]))
    return Automaton(letters, inner.n, inner.initial, inner.finish, edges)


def _compile_node(span, node, vars_):
    g = span.group
    m = len(vars_)
    if isinstance(node, Eq):
        term = node.lhs - node.rhs
        index = {v: i for i, v in enumerate(vars_)}
        vec = [0] * m
        for name, c in term.coeffs:
            if name not in index:
                raise ValueError(f"unbound variable {name!r}")
            vec[index[name]] = c
        return linear_relation(g, span.r, [span.digits] * m, vec, term.const)
    if isinstance(node, InSet):
        positions = [vars_.index(v) for v in node.vars]
        inner = node.aset
        if inner.span != span and not (
            len(node.vars) > 1 and inner.span == product_span(span, len(node.vars))
        ):
            want = span if len(node.vars) == 1 else product_span(span, len(node.vars))
            inner = rebase(inner, want)
        return _embed_set(inner, positions, span, m)
    if isinstance(node, Not):
        return _compile_node(span, node.body, vars_).minimize().complement()
    if isinstance(node, And):
        parts = [_compile_node(span, p, vars_) for p in node.parts]
        out = parts[0]
        for p in parts[1:]:
            out = out.intersect(p)
        return out
    if isinstance(node, Or):
        parts = [_compile_node(span, p, vars_) for p in node.parts]
        out = parts[0]
        for p in parts[1:]:
            out = out.union(p)
        return out
    if isinstance(node, Exists):
        inner = _compile_node(span, node.body, vars_ + (node.var,))
        pads = (g.zero(),) * (m + 1)
        return inner.project(m, pads).minimize()
    if isinstance(node, ForAll):
        return _compile_node(span, Not(Exists(node.var, Not(node.body))), vars_)
    raise TypeError(f"not a formula node: {node!r}")


def compile_formula(span, node, free_vars):
    """Compile a formula over (group, +) with set predicates and parameters.

    Atoms are equalities of linear terms and memberships in named automatic
    sets; connectives map to automaton boolean algebra, quantifiers to
    padded projection.  The result is an automatic subset of group^m for m
    free variables (of the group itself when m = 1).
    """
    free_vars = tuple(free_vars)
    aut = _compile_node(span, node, free_vars)
    m = len(free_vars)
    if m == 0:
        raise ValueError("compile_formula needs at least one free variable")
    if m == 1:
        edges = [
            (q, aut.alphabet[li][0], q2)
            for (q, li), ts in aut.delta.items()
            for q2 in ts
        ]
        base = Automaton(span.digits, aut.n, aut.initial, aut.finish, edges)
        return AutomaticSet(span, base)
    return AutomaticSet(product_span(span, m), aut)


def decide_sentence(span, node):
    """Truth of a fully quantified sentence (compiled as a 0-ary language)."""
    aut = _compile_node(span, node, ())
    return not aut.is_empty()


def translate(aset, gamma):
    """The set shifted by a group element."""
    g = aset.group
    x, y = Term.var(g, "x"), Term.var(g, "y")
    node = Exists("y", And((InSet(aset, ("y",)), Eq(x, y + Term.const_term(g, gamma)))))
    return compile_formula(aset.span, node, ("x",))


# -- kernels -------------------------------------------------------------------


def shift_class(aset, s):
    """{x : s + F^r x in A} for an arbitrary group element s."""
    g = aset.group
    span = aset.span
    if s in span.digit_set:
        dfa = aset.dfa  # complete minimal DFA; saturation survives derivatives
        li = dfa.letter_index(s)
        shifted = Automaton(
            dfa.alphabet,
            dfa.n,
            dfa.delta[(dfa.initial, li)][0],
            dfa.finish,
            [(q, dfa.alphabet[l], t[0]) for (q, l), t in dfa.delta.items()],
        )
        return AutomaticSet(span, shifted.minimize(), canonical=True)
    # carry relation {(tau, rho) : [rho] = s + F^r [tau]} fused with A on rho
    carry_cap = errors.carry_cap()
    zero = g.zero()
    dfa = aset.dfa
    idx = {a: li for li, a in enumerate(dfa.alphabet)}
    start = (s, dfa.initial)
    states = {start: 0}
    order = [start]
    edges = []
    i = 0
    while i < len(order):
        c, q = order[i]
        for t in span.digits:
            for rho in span.digits:
                pre = g.preimage_endo(g.sub(c, rho), span.r)
                if pre is None:
                    continue
                nxt = (g.add(pre, t), dfa.delta[(q, idx[rho])][0])
                if nxt not in states:
                    states[nxt] = len(order)
                    order.append(nxt)
                    if len(order) > carry_cap:
                        raise CarryCapExceeded("shift carry cap exceeded", cap=carry_cap)
                edges.append((i, (t, rho), states[nxt]))
        i += 1
    finish = [states[(c, q)] for (c, q) in order if c == zero and q in dfa.finish]
    rel = Automaton(
        [(t, rho) for t in span.digits for rho in span.digits],
        len(order), 0, finish, edges,
    )
    nfa = automata.unwrap_singletons(rel.project(1, (zero, zero)))
    return AutomaticSet(span, _saturate(span, nfa.minimize()), canonical=True)


@dataclass(frozen=True)
class Kernel:
    coset_system: object
    classes: tuple
    table: dict  # (class index, representative index) -> class index
    accepting: tuple

    def class_count(self):
        return len(self.classes)

    def to_json(self):
        return {
            "classes": len(self.classes),
            "sizes": [c.dfa.n for c in self.classes],
            "accepting": list(self.accepting),
            "representatives": [
                self.coset_system.group.element_to_json(rep)
                for rep in self.coset_system.representatives
            ],
            "table": [
                [self.table[(i, s)] for s in range(len(self.coset_system))]
                for i in range(len(self.classes))
            ],
        }


def kernel_of(aset, coset_system=None, class_cap=None):
    """Classes {A_sigma} discovered breadth-first over coset representatives.

    Class identity is decided by the canonical saturated minimal DFA.  A is
    automatic exactly when this closure is finite; exceeding the cap on sets
    built from genuine automata indicates a bug (the error says so).
    """
    class_cap = class_cap or errors.kernel_cap()
    S = coset_system or aset.group.coset_system(aset.span.r)
    classes = [aset]
    keymap = {aset.key(): 0}
    table = {}
    i = 0
    while i < len(classes):
        for s_idx, s in enumerate(S.representatives):
            child = shift_class(classes[i], s)
            key = child.key()
            if key not in keymap:
                keymap[key] = len(classes)
                classes.append(child)
                if len(classes) > class_cap:
                    raise KernelCapExceeded(
                        "kernel class cap exceeded: either not automatic or a bug",
                        cap=class_cap, classes_seen=len(classes),
                    )
            table[(i, s_idx)] = keymap[key]
        i += 1
    accepting = tuple(c.contains_zero() for c in classes)
    return Kernel(S, tuple(classes), table, accepting)


def from_kernel(kernel):
    """Rebuild the automatic set from its kernel.

    The representation language is reconstructed over the spanning digits
    (acceptance of sigma is 0 in A_sigma), which stays faithful even when
    the coset representatives alone cannot reach every group element.
    """
    root = kernel.classes[0]
    span = root.span
    classes = [root]
    keymap = {root.key(): 0}
    edges = []
    i = 0
    while i < len(classes):
        for d in span.digits:
            child = shift_class(classes[i], d)
            key = child.key()
            if key not in keymap:
                keymap[key] = len(classes)
                classes.append(child)
            edges.append((i, d, keymap[key]))
        i += 1
    finish = [i for i, c in enumerate(classes) if c.contains_zero()]
    dfa = Automaton(span.digits, len(classes), 0, finish, edges)
    return AutomaticSet(span, dfa, canonical=True)


# -- minimal representatives and sparsity --------------------------------------


def _lex_less_dfa(span):
    """Pairs (sigma, tau) with tau strictly lex-below sigma at equal length."""
    letters = [(a, b) for a in span.digits for b in span.digits]
    key = span.group.sort_key
    edges = []
    for a, b in letters:
        if key(b) < key(a):
            target_from_open = 1
        elif key(b) > key(a):
            target_from_open = 2
        else:
            target_from_open = 0
        edges.append((0, (a, b), target_from_open))
        edges.append((1, (a, b), 1))
        edges.append((2, (a, b), 2))
    return Automaton(letters, 3, 0, (1,), edges)


def _ends_in_zero_dfa(span):
    zero = span.group.zero()
    letters = [(a, b) for a in span.digits for b in span.digits]
    edges = []
    for a, b in letters:
        tgt = 1 if b == zero else 0
        edges.append((0, (a, b), tgt))
        edges.append((1, (a, b), tgt))
    return Automaton(letters, 2, 0, (1,), edges)


def min_representatives(aset):
    """The regular language of length-lex-least representations.

    Implements the witness-pair construction: K collects pairs (sigma, tau)
    of equal-value words of the set's language where tau is lex-smaller or
    tau ends in a padding zero; the minimal words are L minus the first
    projection of K.  Evaluation restricted to the result is a bijection
    onto the set.
    """
    span = aset.span
    lang = aset.dfa
    eq = _equality_dfa(span)
    l_first = _track_run(lang, 0)
    l_second = _track_run(lang, 1)
    witness = eq.intersect(l_first).intersect(l_second).intersect(
        _lex_less_dfa(span).union(_ends_in_zero_dfa(span)).minimize()
    )
    shadowed = automata.unwrap_singletons(witness.project_plain(1)).determinize()
    return lang.difference(shadowed).minimize()


def _track_run(dfa, track):
    """Cylindrify a digit DFA onto one coordinate of the pair alphabet."""
    letters = [(a, b) for a in dfa.alphabet for b in dfa.alphabet]
    idx = {a: li for li, a in enumerate(dfa.alphabet)}
    edges = []
    for a, b in letters:
        li = idx[(a, b)[track]]
        for q in range(dfa.n):
            edges.append((q, (a, b), dfa.delta[(q, li)][0]))
    return Automaton(letters, dfa.n, dfa.initial, dfa.finish, edges)


@dataclass(frozen=True)
class FSparseResult:
    sparse: bool
    degree: int = 0
    terms: tuple = ()
    witness: tuple = ()

    def __bool__(self):
        return self.sparse


def is_f_sparse(aset):
    """Sparsity of the represented set, decided on minimal representatives."""
    reps = min_representatives(aset)
    res = automata.is_sparse(reps)
    if not res.sparse:
        return FSparseResult(False, witness=res.witness)
    terms = automata.sparse_decompose(reps)
    return FSparseResult(True, degree=res.degree, terms=terms)


def sparse_sum(a, b, recheck=True):
    """{x + y : x in A, y in B}; sparsity is re-verified on the result."""
    a, b = common_span(a, b)
    g = a.group
    x, y, z = (Term.var(g, v) for v in ("x", "y", "z"))
    node = Exists(
        "x",
        Exists(
            "y",
            And((InSet(a, ("x",)), InSet(b, ("y",)), Eq(x + y, z))),
        ),
    )
    out = compile_formula(a.span, node, ("z",))
    if recheck and is_f_sparse(a) and is_f_sparse(b):
        if not is_f_sparse(out):
            raise AssertionError("sum of sparse sets came back non-sparse: bug")
    return out


def sparse_union(a, b):
    return a.union(b)


def sparse_intersect_automatic(a, x):
    return a.intersect(x)


def f_cycle(span, a, delta=1):
    """{a + F^delta a + ... + F^(delta n) a : n >= 0} as an automatic set."""
    g = span.group
    zero = g.zero()
    letters = sorted({zero, a}, key=g.sort_key)
    if delta == 1:
        edges = [(0, a, 1), (1, a, 1)]
        n = 2
        finish = [1]
    else:
        # 0 -a-> 1(acc) -0-> 2 -0-> ... -0-> delta -a-> 1
        edges = [(0, a, 1)]
        for j in range(delta - 1):
            edges.append((1 + j, zero, 2 + j))
        edges.append((delta, a, 1))
        n = delta + 1
        finish = [1]
    if a == zero:
        lang = automata.from_word((zero,), letters)
    else:
        lang = Automaton(letters, n, 0, finish, edges)
    return convert_language(g, lang, letters, 1, span)


def groupless_f_set(span, gamma, cycles):
    """A translate of a sum of cycles: gamma + C(a_1) + ... + C(a_k)."""
    out = None
    for a, delta in cycles:
        c = f_cycle(span, a, delta)
        out = c if out is None else sparse_sum(out, c, recheck=False)
    if out is None:
        out = singleton(span, span.group.zero())
    if gamma != span.group.zero():
        out = translate(out, gamma)
    return out


# -- star-term calculus (translates + single letters) --------------------------


def absorb_star_term(group, r, v_words, w_words, s):
    """Rewrite v0 w1^{k1} v1 ... wn^{kn} vn (all |w_i| = s, k_i >= 1) as
    gamma + [a_1^{k_1-1} ... a_n^{kn-1}] over F^(r*s).

    Recursive telescoping: with u = [w], y = F^{r|v0|} u, z = F^{r(|v0|+s)}
    gamma', the head star contributes gamma = [v0] + y + z and letter
    a = F^{rs} y + F^{rs} z - z; tail letters are shifted by F^{r(|v0|+s)}.
    """
    if not w_words:
        return group.eval_word(v_words[0], r), ()
    v0 = v_words[0]
    u = group.eval_word(w_words[0], r)
    gamma_tail, letters_tail = absorb_star_term(
        group, r, v_words[1:], w_words[1:], s
    )
    shift = r * (len(v0) + s)
    y = group.apply_endo(u, r * len(v0))
    z = group.apply_endo(gamma_tail, shift)
    gamma = group.add(group.eval_word(v0, r), group.add(y, z))
    fy = group.apply_endo(y, r * s)
    fz = group.apply_endo(z, r * s)
    a_head = group.add(fy, group.sub(fz, z))
    letters = (a_head,) + tuple(group.apply_endo(t, shift) for t in letters_tail)
    return gamma, letters


def star_term_translates(group, r, term, s=None):
    """Cover a simple sparse term by translates of single-letter star sets.

    Yields (gamma, letters, s) triples, each denoting
    gamma + {[a_1^{e_1} ... a_n^{e_n}] : e_i >= 0} over F^(r*s); their union
    is the evaluation of the whole term.  Case-splits over star residues and
    zero exponents, so the count is exponential in the number of stars.
    """
    stars = [w for w, _ in term.pairs]
    if not stars or all(len(w) == 0 for w in stars):
        flat = term.v0 + sum((w * 0 + v for w, v in term.pairs), ())
        yield group.eval_word(flat, r), (), 1
        return
    if any(len(w) == 0 for w in stars):
        # drop empty stars; they contribute nothing
        pairs = tuple((w, v) for w, v in term.pairs if len(w) > 0)
        merged_v0 = term.v0
        rebuilt = []
        for w, v in term.pairs:
            if len(w) == 0:
                if rebuilt:
                    pw, pv = rebuilt[-1]
                    rebuilt[-1] = (pw, pv + v)
                else:
                    merged_v0 = merged_v0 + v
            else:
                rebuilt.append((w, v))
        term = automata.SimpleSparseTerm(merged_v0, tuple(rebuilt))
        stars = [w for w, _ in term.pairs]
        if not stars:
            yield group.eval_word(term.v0, r), (), 1
            return
    if s is None:
        s = lcm(*[len(w) for w in stars])
    reps = [s // len(w) for w in stars]
    n = len(stars)
    for residues in product(*(range(rep) for rep in reps)):
        for zeros in product((False, True), repeat=n):
            # k_i = reps[i]*k'_i + residues[i]; zeros marks k'_i = 0
            v_words = [term.v0]
            w_words = []
            for i, (w, v) in enumerate(term.pairs):
                residue_word = w * residues[i]
                if zeros[i]:
                    v_words[-1] = v_words[-1] + residue_word + v
                else:
                    # w^{reps*k'} and w^{residue} commute as strings, so the
                    # residue word can sit after the starred block
                    w_words.append(w * reps[i])
                    v_words.append(residue_word + v)
            gamma, letters = absorb_star_term(group, r, v_words, w_words, s)
            yield gamma, letters, s
