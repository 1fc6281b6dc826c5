"""Model-theoretic probes: exponent-parameterized sets, Presburger exponent
relations, order-property (ladder) search, and the F_p[t] demonstration.

An EDP set collects the evaluations of words sigma_1^{k_1}...sigma_n^{k_n}
whose exponent vector satisfies a Presburger constraint.  Exponent relations
reduce membership questions about such sets to the Presburger engine via a
synchronized block-pointer automaton and its Parikh image.
"""

import time
from dataclasses import dataclass
from itertools import product
from math import lcm

from . import automata, autosets, presburger
from .autosets import AutomaticSet, Term, InSet, Eq, And, Or, Not, Exists
from .groups import PolyRing, PowerGroup
from .presburger import PresburgerRel
from .spanning import SpanningSet, product_span, verify_spanning


@dataclass(frozen=True)
class EDPComponent:
    """A single block [s^Phi] = {[s_1^{k_1} ... s_n^{k_n}] : Phi(k_1..k_n)}."""

    words: tuple  # each word is a tuple of group elements
    phi: PresburgerRel

    def arity(self):
        return len(self.words)

    def is_single_letter(self):
        return all(len(w) == 1 for w in self.words)


@dataclass(frozen=True)
class EDPSet:
    """A finite union of exponent-parameterized word sets over F^r.

    Unions are kept as components: the track-concatenation construction
    exists (edp_union_single) but makes the bit-level exponent alphabet grow
    as 2^(total tracks), so only unions of small arity are merged that way.
    """

    span: SpanningSet
    components: tuple

    @property
    def group(self):
        return self.span.group

    @property
    def r(self):
        return self.span.r

    @property
    def words(self):
        if len(self.components) != 1:
            raise ValueError("words is only defined for single-component sets")
        return self.components[0].words

    @property
    def phi(self):
        if len(self.components) != 1:
            raise ValueError("phi is only defined for single-component sets")
        return self.components[0].phi

    def arity(self):
        return sum(c.arity() for c in self.components)

    def is_single_letter(self):
        return all(c.is_single_letter() for c in self.components)

    def enumerate_elements(self, max_word_len, exp_cap=None):
        """Brute-force expansion oracle: evaluate every admissible exponent
        tuple whose total word length stays within the bound."""
        g = self.group
        out = set()
        for comp in self.components:
            caps = []
            for w in comp.words:
                caps.append(
                    max_word_len if len(w) == 0 else max_word_len // len(w)
                )
            if exp_cap is not None:
                caps = [min(c, exp_cap) for c in caps]
            for exps in product(*(range(c + 1) for c in caps)):
                total = sum(e * len(w) for e, w in zip(exps, comp.words))
                if total > max_word_len:
                    continue
                if not comp.phi.member(exps):
                    continue
                word = []
                for w, e in zip(comp.words, exps):
                    word.extend(w * e)
                out.add(g.eval_word(word, self.r))
        return out

    def to_json(self):
        g = self.group
        return {
            "group": g.to_json(),
            "span": self.span.to_json(),
            "components": [
                {
                    "words": [[g.element_to_json(a) for a in w] for w in c.words],
                    "phi": c.phi.to_json(),
                }
                for c in self.components
            ],
        }

    @classmethod
    def from_json(cls, obj):
        from .groups import group_from_json

        g = group_from_json(obj["group"])
        span = SpanningSet.from_json(g, obj["span"])
        comps = []
        for c in obj["components"]:
            words = tuple(
                tuple(g.element_from_json(a) for a in w) for w in c["words"]
            )
            comps.append(EDPComponent(words, PresburgerRel.from_json(c["phi"])))
        return cls(span, tuple(comps))


def edp(span, words, phi):
    """Single-component constructor."""
    return EDPSet(span, (EDPComponent(tuple(tuple(w) for w in words), phi),))


def edp_union(e1, e2):
    """Union of EDP sets (component concatenation)."""
    if e1.span != e2.span:
        raise ValueError("EDP union needs a common spanning set")
    return EDPSet(e1.span, e1.components + e2.components)


def edp_union_single(e1, e2):
    """The exponent-track concatenation union of two single components.

    Joins the word tuples and takes (phi1 and k2 = 0) or (phi2 and k1 = 0);
    exponential in the combined arity, so only small instances are practical.
    """
    if e1.span != e2.span:
        raise ValueError("EDP union needs a common spanning set")
    c1, = e1.components
    c2, = e2.components
    n1, n2 = c1.arity(), c2.arity()
    phi1 = c1.phi
    for _ in range(n2):
        phi1 = presburger.insert_track(phi1, phi1.arity)
    phi2 = c2.phi
    for _ in range(n1):
        phi2 = presburger.insert_track(phi2, 0)
    zero2 = _all_zero(n1 + n2, range(n1, n1 + n2))
    zero1 = _all_zero(n1 + n2, range(n1))
    phi = presburger.rel_or(
        presburger.rel_and(phi1, zero2), presburger.rel_and(phi2, zero1)
    )
    return edp(e1.span, c1.words + c2.words, phi)


def _all_zero(arity, coords):
    parts = []
    for c in coords:
        vec = [0] * arity
        vec[c] = 1
        parts.append(presburger.atom_linear(arity, vec, 0))
    return presburger.rel_and(*parts) if parts else presburger.rel_true(arity)


def _const_coords(arity, assignments):
    parts = []
    for c, value in assignments:
        vec = [0] * arity
        vec[c] = 1
        parts.append(presburger.atom_linear(arity, vec, value))
    return presburger.rel_and(*parts) if parts else presburger.rel_true(arity)


def affine_preimage(rel, specs, new_arity):
    """{y : rel(f(y))} for a componentwise affine f.

    specs[i] describes original coordinate i: ("const", c) or ("var", j, a, b)
    meaning a*y_j + b.
    """
    k = rel.arity
    inner = rel
    for _ in range(new_arity):
        inner = presburger.insert_track(inner, 0)
    # variable order: (y_0..y_{new-1}, old_0..old_{k-1})
    parts = [inner]
    for i, spec in enumerate(specs):
        vec = [0] * (new_arity + k)
        vec[new_arity + i] = 1
        if spec[0] == "const":
            parts.append(presburger.atom_linear(new_arity + k, vec, spec[1]))
        else:
            _, j, a, b = spec
            vec[j] -= a
            parts.append(presburger.atom_linear(new_arity + k, vec, b))
    out = presburger.rel_and(*parts)
    for _ in range(k):
        out = presburger.exists(out, out.arity - 1)
    return out


# -- exponent relations ---------------------------------------------------------


def exponent_relation(xset, tracks, base_span=None):
    """The Presburger relation {(k_1..k_m) : ([a_1^{k_1}], ..) in X}.

    ``tracks`` holds one tuple of single letters per coordinate of X; the
    letters may be arbitrary group elements.  A synchronized automaton reads
    one annotated letter per step (the current block or padding on every
    track, with monotone block pointers), converts the emitted value to X's
    digits through a fused carry track, and runs X's automaton on the
    digits.  Its Parikh image over the annotations, pushed through the
    block-count matrix and stripped of the padding counts, is the relation.
    """
    from .errors import CarryCapExceeded
    from . import errors

    m = len(tracks)
    G = xset.group
    span = xset.span
    r = span.r
    zero = G.zero()
    dfa = xset.dfa
    sizes = [len(t) for t in tracks]
    pad = [n + 1 for n in sizes]  # block index n_i+1 is the padding block
    annotations = [tuple(j) for j in product(*(range(1, n + 2) for n in sizes))]

    def composite(ann):
        vals = tuple(
            tracks[t][ann[t] - 1] if ann[t] <= sizes[t] else (zero[t] if m > 1 else zero)
            for t in range(m)
        )
        return vals[0] if m == 1 else vals

    carry_cap = errors.carry_cap()
    start_state = (tuple([0] * m), zero, dfa.initial)
    states = {start_state: 0}
    order = [start_state]
    edges = []
    i = 0
    while i < len(order):
        pointers, carry, q = order[i]
        for ann in annotations:
            ok = True
            for t in range(m):
                if ann[t] < max(pointers[t], 1) or (
                    pointers[t] == pad[t] and ann[t] != pad[t]
                ):
                    ok = False
                    break
            if not ok:
                continue
            shifted = G.add(carry, composite(ann))
            for li, d in enumerate(dfa.alphabet):
                nxt_carry = G.preimage_endo(G.sub(shifted, d), r)
                if nxt_carry is None:
                    continue
                key = (ann, nxt_carry, dfa.delta[(q, li)][0])
                if key not in states:
                    states[key] = len(order)
                    order.append(key)
                    if len(order) > carry_cap:
                        raise CarryCapExceeded(
                            "exponent relation carry cap exceeded", cap=carry_cap
                        )
                edges.append((i, ann, states[key]))
        i += 1
    finish = [states[s] for s in order if s[1] == zero and s[2] in dfa.finish]
    mach = automata.Automaton(annotations, len(order), 0, finish, edges)
    image = automata.parikh_image(mach)
    # block-count matrix: one row per exponent k_{i,j}, then the pads
    ann_sorted = mach.alphabet
    rows = []
    for t in range(m):
        for j in range(1, sizes[t] + 1):
            rows.append([1 if ann[t] == j else 0 for ann in ann_sorted])
    for t in range(m):
        rows.append([1 if ann[t] == pad[t] else 0 for ann in ann_sorted])
    mapped = image.map_linear(rows)
    rel = presburger.from_semilinear(mapped)
    for _ in range(m):
        rel = presburger.exists(rel, rel.arity - 1)
    return rel


def edp_member(edp_set, element):
    """Membership via the exponent relation against the singleton {element}."""
    e = edp_set if edp_set.is_single_letter() else edp_normal_form(edp_set)
    target = autosets.singleton(e.span, element)
    for comp in e.components:
        rel = exponent_relation(target, (tuple(w[0] for w in comp.words),), e.span)
        if not presburger.decide_empty(presburger.rel_and(rel, comp.phi)):
            return True
    return False


# -- single-letter normal form ---------------------------------------------------


def edp_normal_form(edp_set, block_cap=4):
    """Equivalent EDP set whose words are single letters (over a power of F).

    Per component: words are regrouped into common-length blocks, split over
    residues and zero exponents, rewritten by the star-absorption identity,
    and the leftover translate folded into the first letter.  The case split
    is exponential in the number of words; block_cap bounds it.
    """
    if edp_set.is_single_letter():
        return edp_set
    comps = []
    max_s = 1
    for comp in edp_set.components:
        live_words = [w for w in comp.words if len(w) > 0]
        stars = [len(w) for w in live_words]
        if stars:
            max_s = lcm(max_s, lcm(*stars))
    target_span = (
        edp_set.span
        if max_s == 1
        else autosets.power_span(edp_set.span, max_s, verify=False)
    )
    for comp in edp_set.components:
        comps.extend(
            _normal_form_component(edp_set.span, target_span, comp, block_cap)
        )
    return EDPSet(target_span, tuple(comps))


def _normal_form_component(span, target_span, comp, block_cap):
    g = span.group
    phi = comp.phi
    live = [i for i, w in enumerate(comp.words) if len(w) > 0]
    for i in reversed(range(len(comp.words))):
        if i not in live:
            phi = presburger.exists(phi, i)
    words = [comp.words[i] for i in sorted(live)]
    s_all = target_span.r // span.r
    if not words:
        if presburger.decide_empty(phi):
            return [EDPComponent(((g.zero(),),), presburger.rel_false(1))]
        return [EDPComponent(((g.zero(),),), presburger.atom_const(1))]
    n = len(words)
    if n > block_cap:
        raise errors_cap(n, block_cap)
    s = s_all  # every word length divides the shared block size
    reps = [s // len(w) for w in words]
    r = span.r
    out = []
    for residues in product(*(range(rep) for rep in reps)):
        for zeros in product((False, True), repeat=n):
            v_words = [()]
            w_words = []
            specs = []  # affine map: original k_i from the kept exponents
            kept = 0
            for i, w in enumerate(words):
                residue_word = w * residues[i]
                if zeros[i]:
                    v_words[-1] = v_words[-1] + residue_word
                    specs.append(("const", residues[i]))
                else:
                    w_words.append(w * reps[i])
                    v_words.append(residue_word)
                    # k_i = reps[i]*(e_kept + 1) + residues[i]
                    specs.append(("var", kept, reps[i], reps[i] + residues[i]))
                    kept += 1
            gamma, letters = autosets.absorb_star_term(g, r, v_words, w_words, s)
            psi = affine_preimage(phi, specs, kept)
            out.extend(_translate_fold(target_span, gamma, letters, psi))
    return out


def errors_cap(n, cap):
    from .errors import CapExceeded

    return CapExceeded("normal-form case split too large", words=n, cap=cap)


def _translate_fold(span, gamma, letters, psi):
    """gamma + [letters^psi] as translate-free components.

    Folds gamma into whichever letter is first to have a positive exponent:
    gamma + [a_1^{e_1}..] = union over i of [(gamma+a_i) a_i^{e_i} ..] with
    e_i decremented, plus {gamma} itself when psi(0..0) holds.
    """
    g = span.group
    n = len(letters)
    singleton_gamma = EDPComponent(((gamma,),), presburger.atom_const(1))
    if n == 0:
        if presburger.decide_empty(psi):
            return []
        return [singleton_gamma]
    out = []
    if psi.member((0,) * n):
        out.append(singleton_gamma)
    for i in range(n):
        # words: (gamma + a_i), a_i, a_{i+1}, ..., a_n with lead exponent 1
        head = g.add(gamma, letters[i])
        ws = ((head,),) + tuple((a,) for a in letters[i:])
        arity = 1 + (n - i)
        specs = []
        for orig in range(n):
            if orig < i:
                specs.append(("const", 0))
            elif orig == i:
                specs.append(("var", 1, 1, 1))  # e_i = new_1 + 1
            else:
                specs.append(("var", 1 + (orig - i), 1, 0))
        psi_i = affine_preimage(psi, specs, arity)
        lead_one = _const_coords(arity, [(0, 1)])
        constrained = presburger.rel_and(psi_i, lead_one)
        if not presburger.decide_empty(constrained):
            out.append(EDPComponent(ws, constrained))
    return out


def sparse_to_edp(aset):
    """Every sparse automatic set is exponent-definable: star factors get
    free exponents, connector words exponent one."""
    res = autosets.is_f_sparse(aset)
    if not res.sparse:
        raise ValueError("input is not sparse")
    span = aset.span
    comps = []
    for term in res.terms:
        words = []
        fixed = []
        for piece, free in _term_pieces(term):
            if len(piece) == 0:
                continue
            words.append(tuple(piece))
            fixed.append(not free)
        if not words:
            words = [(span.group.zero(),)]
            fixed = [True]
        arity = len(words)
        phi = _const_coords(arity, [(i, 1) for i, f in enumerate(fixed) if f])
        comps.append(EDPComponent(tuple(words), phi))
    if not comps:
        comps.append(EDPComponent(((span.group.zero(),),), presburger.rel_false(1)))
    return EDPSet(span, tuple(comps))


def _term_pieces(term):
    yield term.v0, False
    for w, v in term.pairs:
        yield w, True
        yield v, False


# -- trace relations -------------------------------------------------------------


def trace_relation(edp_set, xset, m=None):
    """Exponent tuples realizing the trace of X on the EDP set's image.

    Requires a single-component set in single-letter form (normal-form
    components can be traced one at a time); the result constrains every
    track's exponents by Phi and the membership of the evaluated tuple in X.
    """
    e = edp_set if edp_set.is_single_letter() else edp_normal_form(edp_set)
    if len(e.components) != 1:
        raise ValueError("trace_relation works per component; pass one")
    letters = tuple(w[0] for w in e.words)
    if m is None:
        m = xset.span.group.m if isinstance(xset.span.group, PowerGroup) else 1
    rel = exponent_relation(xset, tuple(letters for _ in range(m)), e.span)
    n = e.arity()
    for t in range(m):
        phi_t = e.phi
        for _ in range(t * n):
            phi_t = presburger.insert_track(phi_t, 0)
        while phi_t.arity < m * n:
            phi_t = presburger.insert_track(phi_t, phi_t.arity)
        rel = presburger.rel_and(rel, phi_t)
    return rel


# -- ladders ----------------------------------------------------------------------


@dataclass(frozen=True)
class Ladder:
    n: int
    a_elements: tuple
    b_elements: tuple


@dataclass(frozen=True)
class LadderResult:
    found: bool
    ladder: Ladder = None
    bound: int = 0
    note: str = ""

    def __bool__(self):
        return self.found


def _ladder_pool(aset, bound, cap=600):
    """Candidate elements: members, their word prefixes, and tail values."""
    g = aset.group
    reps = autosets.min_representatives(aset)
    pool = {g.zero()}
    for word in reps.words(bound):
        if len(pool) > cap:
            break
        value = aset.span.eval_word(word)
        pool.add(value)
        prefix = g.zero()
        for k, letter in enumerate(word):
            prefix = g.add(prefix, g.apply_endo(letter, aset.span.r * k))
            pool.add(prefix)
            pool.add(g.sub(value, prefix))
    return sorted(pool, key=g.sort_key)[: cap]


def ladder_search(aset, n, mode="bounded", bound=None, pool_cap=600):
    """Search for a_1..a_n, b_1..b_n with a_i + b_j in A iff i <= j.

    Exact mode compiles the first-order ladder sentence (alphabet grows as
    |digits|^(2n), so only small instances are feasible); bounded mode
    searches candidate pools drawn from the set's own words within the
    length bound and reports NoneWithin on failure.  Found ladders are
    always verified by their full membership table before being returned.
    """
    from . import errors

    bound = bound or errors.ladder_bound()
    g = aset.group
    if n < 1:
        raise ValueError("ladder length must be >= 1")
    if mode == "exact":
        return _ladder_exact(aset, n)
    pool = _ladder_pool(aset, bound, pool_cap)
    member = {}

    def mem(a, b):
        key = g.add(a, b)
        if key not in member:
            member[key] = aset.member(key)
        return member[key]

    m = len(pool)
    profiles = {}
    for a in pool:
        bits = 0
        for bi, b in enumerate(pool):
            if mem(a, b):
                bits |= 1 << bi
        profiles.setdefault(bits, a)
    items = [(bits, a) for bits, a in profiles.items()]
    full = (1 << m) - 1

    found = []

    def feasible(chosen):
        # T_j = intersection of S_1..S_j minus the union of the later S's
        inter = full
        for j, (bits, _) in enumerate(chosen):
            inter &= bits
            rest = 0
            for later_bits, _ in chosen[j + 1 :]:
                rest |= later_bits
            if inter & ~rest == 0 and j + 1 < len(chosen):
                return False
            if j + 1 == len(chosen) and inter == 0:
                return False
        return True

    def dfs(chosen):
        if found:
            return
        if len(chosen) == n:
            bs = []
            inter = full
            for j, (bits, _) in enumerate(chosen):
                inter &= bits
                rest = 0
                for later_bits, _ in chosen[j + 1 :]:
                    rest |= later_bits
                avail = inter & ~rest
                if avail == 0:
                    return
                bs.append(pool[(avail & -avail).bit_length() - 1])
            found.append((tuple(a for _, a in chosen), tuple(bs)))
            return
        for bits, a in items:
            if any(b == bits for b, _ in chosen):
                continue
            cand = chosen + [(bits, a)]
            if feasible(cand):
                dfs(cand)
                if found:
                    return

    dfs([])
    if not found:
        return LadderResult(False, bound=bound, note=f"no ladder over {m} candidates")
    a_el, b_el = found[0]
    for i in range(n):
        for j in range(n):
            if aset.member(g.add(a_el[i], b_el[j])) != (i <= j):
                raise AssertionError("ladder verification failed: bug")
    return LadderResult(True, Ladder(n, a_el, b_el), bound=bound)


def _ladder_exact(aset, n):
    g = aset.group
    span = aset.span
    x, y, z = Term.var(g, "x"), Term.var(g, "y"), Term.var(g, "z")
    sums = autosets.compile_formula(
        span,
        Exists("z", And((InSet(aset, ("z",)), Eq(x + y, z)))),
        ("x", "y"),
    )
    names_a = [f"a{i}" for i in range(n)]
    names_b = [f"b{j}" for j in range(n)]
    atoms = []
    for i in range(n):
        for j in range(n):
            atom = InSet(sums, (names_a[i], names_b[j]))
            atoms.append(atom if i <= j else Not(atom))
    body = And(tuple(atoms))
    for name in reversed(names_a + names_b):
        body = Exists(name, body)
    truth = autosets.decide_sentence(span, body)
    if not truth:
        return LadderResult(False, note="exact sentence is unsatisfiable")
    # the sentence only decides existence; recover a witness with the
    # bounded search, which verifies the table
    bounded = ladder_search(aset, n, mode="bounded")
    if bounded.found:
        return bounded
    return LadderResult(True, note="exact sentence satisfiable; no small witness")


def order_pair_set(span, a):
    """{(F^i a, F^j a) : i <= j} over the squared group: the standard
    unstable sparse example."""
    g = span.group
    zero = g.zero()
    if a not in span.digit_set:
        from .spanning import enlarge_span

        span = enlarge_span(span, [a])
    pspan = product_span(span, 2)
    letters = [(zero, zero), (a, zero), (zero, a), (a, a)]
    edges = [
        (0, (zero, zero), 0),
        (0, (a, a), 2),
        (0, (a, zero), 1),
        (1, (zero, zero), 1),
        (1, (zero, a), 2),
        (2, (zero, zero), 2),
    ]
    nfa = automata.Automaton(letters, 3, 0, (2,), edges)
    return AutomaticSet(pspan, autosets._on_alphabet(nfa, pspan.digits))


# -- the F_p[t] power-multiplication demonstration --------------------------------


def _tpower_edp(span, coeff_pair):
    """The auxiliary set t^N + 2t^N + {c1 t^(i+j) + c2 t^i + c2 t^j}.

    coeff_pair = (c_cross, c_diag) are the digit values used for the third
    component's strings: (i<j)-strings 0^i c2 0^(j-i-1) c2 0^(i-1) c1 and
    (i=j)-strings 0^i (2*c2) 0^(i-1) c1.
    """
    g = span.group
    p = g.p
    c1, c2 = coeff_pair
    z = g.zero()
    one = g.const(1)
    two = g.const(2)
    lead = g.const(c1)
    mid = g.const(c2)
    dbl = g.const(2 * c2)

    def single(e):
        return (e,)

    tN = edp(
        span,
        (single(z), single(one)),
        presburger.parse_formula("k2 = 1", ("k1", "k2"))[0],
    )
    twotN = edp(
        span,
        (single(z), single(two)),
        presburger.parse_formula("k2 = 1", ("k1", "k2"))[0],
    )
    lt = edp(
        span,
        (single(z), single(mid), single(z), single(mid), single(z), single(lead)),
        presburger.parse_formula(
            "k2 = 1 & k4 = 1 & k6 = 1 & k1 = k5 + 1 & 1 <= k1",
            ("k1", "k2", "k3", "k4", "k5", "k6"),
        )[0],
    )
    eq = edp(
        span,
        (single(z), single(dbl), single(z), single(lead)),
        presburger.parse_formula(
            "k2 = 1 & k4 = 1 & 1 <= k1 & k1 = k3 + 1",
            ("k1", "k2", "k3", "k4"),
        )[0],
    )
    return edp_union(edp_union(tN, twotN), edp_union(lt, eq))


def tpower_expansion_report(p=7, dmax=12, spot_checks=12):
    """Exhaustive verification of the three definability claims behind the
    power-multiplication expansion of F_p[t].

    Two digit encodings of the auxiliary set are tried: the one the set
    definition demands (third component with leading coefficient 3) and the
    literal displayed strings (leading coefficient 1).  The report records
    which encoding satisfies all three claims; the two differ, which is the
    documented discrepancy.
    """
    if p < 7:
        raise ValueError("p must be a prime >= 7")
    started = time.time()
    g = PolyRing(p)
    digits = [g.const(i) for i in range(p)]
    span = verify_spanning(g, digits, 1).spanning_set

    def tpow(i):
        return g.monomial(i)

    tpowers = {tpow(i) for i in range(dmax + 1)}
    b_expected = set()
    for i in range(1, dmax + 1):
        for j in range(i, dmax + 1):
            if i + j <= dmax:
                b_expected.add(
                    g.add(tpow(i + j), g.neg(g.add(tpow(i), tpow(j))))
                )
    encodings = {
        "set-definition": (3, -3),
        "displayed-strings": (1, -1),
    }
    report = {"p": p, "dmax": dmax, "encodings": {}}
    inv3 = pow(3, -1, p)
    for name, coeffs in encodings.items():
        edp = _tpower_edp(span, coeffs)
        members = edp.enumerate_elements(dmax + 1)
        members = {e for e in members if len(e) <= dmax + 1}
        checks = {}
        # claim 1: x in A and 2x in A defines exactly the t-powers
        phi_trace = {x for x in members if g.scalar_mul(2, x) in members}
        checks["phi_defines_t_powers"] = {
            "pass": phi_trace == tpowers,
            "trace_size": len(phi_trace),
            "expected_size": len(tpowers),
            "counterexamples": [
                g.element_to_json(x)
                for x in sorted(
                    phi_trace.symmetric_difference(tpowers), key=g.sort_key
                )[:5]
            ],
        }
        # claim 2: 3x in A minus (t^N + 2t^N) defines exactly B
        t_or_2t = {x for x in members if _is_power_like(g, x, (1, 2))}
        psi_trace = {
            g.scalar_mul(inv3, y) for y in members - t_or_2t
        }
        psi_trace = {x for x in psi_trace if len(x) <= dmax + 1}
        checks["psi_defines_difference_set"] = {
            "pass": psi_trace == b_expected,
            "trace_size": len(psi_trace),
            "expected_size": len(b_expected),
            "counterexamples": [
                g.element_to_json(x)
                for x in sorted(
                    psi_trace.symmetric_difference(b_expected), key=g.sort_key
                )[:5]
            ],
        }
        # claim 3: the final formula recovers the multiplication graph on
        # t-powers.  Every disjunct forces all of x, y, z into t^N (or the
        # constant 1), so dmax^3 t-power triples are the full trace.
        good = checks["phi_defines_t_powers"]["pass"] and checks[
            "psi_defines_difference_set"
        ]["pass"]
        triples_ok = True
        bad_triple = None
        if good:
            bset = psi_trace
            for i in range(dmax + 1):
                for j in range(dmax + 1):
                    for k in range(dmax + 1):
                        x, y, z = tpow(i), tpow(j), tpow(k)
                        holds = (
                            (x == tpow(0) and z == y)
                            or (y == tpow(0) and z == x)
                            or (
                                g.sub(z, g.add(x, y)) in bset
                                and k <= dmax
                            )
                        )
                        want = i + j == k
                        if holds != want:
                            triples_ok = False
                            bad_triple = (i, j, k)
                            break
                    if not triples_ok:
                        break
                if not triples_ok:
                    break
        checks["multiplication_graph_recovered"] = {
            "pass": good and triples_ok,
            "counterexample": bad_triple,
        }
        report["encodings"][name] = {
            "coefficients": list(coeffs),
            "checks": checks,
            "all_pass": all(c["pass"] for c in checks.values()),
        }
    # spot-validate the EDP membership machinery against the enumeration
    chosen = next(
        (n for n, res in report["encodings"].items() if res["all_pass"]), None
    )
    report["encoding_chosen"] = chosen
    report["discrepancy"] = (
        "the displayed digit strings evaluate with leading coefficient 1, "
        "but the three claims hold only for the set definition's leading "
        "coefficient 3; the strings' coefficients appear to be a typo"
    )
    if chosen:
        edp = _tpower_edp(span, tuple(report["encodings"][chosen]["coefficients"]))
        members = edp.enumerate_elements(dmax + 1)
        sample = sorted(members, key=g.sort_key)[:spot_checks]
        sample += [g.monomial(2, 4), g.monomial(3, 5)]
        agree = all(
            edp_member(edp, x) == (x in members) for x in sample
        )
        report["membership_machinery_agrees"] = agree
    report["elapsed_seconds"] = round(time.time() - started, 3)
    return report


def _is_power_like(g, x, leads):
    if not x:
        return False
    return all(c == 0 for c in x[:-1]) and x[-1] in leads
