"""Decision engine for (N,+)-definable relations via base-2 track automata.

A relation of arity k is stored as a minimal complete DFA over the alphabet
{0,1}^k, reading one bit of every argument per step, least significant bit
first, with zero-padding.  All constructors keep the automaton padding
closed, so acceptance is a property of the number tuple, not the word.
"""

from dataclasses import dataclass
from itertools import product

from . import automata
from .automata import Automaton


def _bit_alphabet(arity):
    return [tuple(bits) for bits in product((0, 1), repeat=arity)]


@dataclass(frozen=True)
class PresburgerRel:
    arity: int
    automaton: Automaton

    def member(self, values):
        values = tuple(values)
        if len(values) != self.arity:
            raise ValueError(f"expected {self.arity} values")
        if any(v < 0 for v in values):
            return False
        nbits = max([v.bit_length() for v in values] + [1])
        word = [tuple((v >> k) & 1 for v in values) for k in range(nbits)]
        return self.automaton.accepts(word)

    def is_empty(self):
        return self.automaton.is_empty()

    def tuples_upto(self, bound, max_bits=None):
        """All members with every entry <= bound."""
        bits = max_bits or max(int(bound).bit_length(), 1)
        out = set()
        for word in self.automaton.words(bits):
            vals = [0] * self.arity
            for k, letter in enumerate(word):
                for i, b in enumerate(letter):
                    vals[i] |= b << k
            if all(v <= bound for v in vals):
                out.add(tuple(vals))
        return out

    def to_json(self):
        return {"arity": self.arity, "automaton": self.automaton.to_json()}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["arity"], Automaton.from_json(obj["automaton"]))


def rel_true(arity):
    return PresburgerRel(arity, automata.universal(_bit_alphabet(arity)).minimize())


def rel_false(arity):
    return PresburgerRel(arity, automata.empty_language(_bit_alphabet(arity)).minimize())


def atom_linear(arity, coeffs, const, relation="eq"):
    """The relation sum(coeffs[i]*x_i) = const (or <= const).

    Carry construction: a state is the integer value the unread tails must
    produce; reading a bit tuple b maps d to (d - coeffs.b)/2 ("eq", only
    when even) or floor((d - coeffs.b)/2) ("le").
    """
    coeffs = tuple(int(c) for c in coeffs)
    if len(coeffs) != arity:
        raise ValueError("one coefficient per track required")
    alphabet = _bit_alphabet(arity)
    states = {int(const): 0}
    order = [int(const)]
    edges = []
    i = 0
    while i < len(order):
        d = order[i]
        qi = states[d]
        for letter in alphabet:
            step = d - sum(c * b for c, b in zip(coeffs, letter))
            if relation == "eq":
                if step % 2:
                    continue
                nd = step // 2
            else:
                nd = step // 2  # floor division, exact for negatives too
            if nd not in states:
                states[nd] = len(order)
                order.append(nd)
            edges.append((qi, letter, states[nd]))
        i += 1
    if relation == "eq":
        finish = [states[0]] if 0 in states else []
    else:
        finish = [states[d] for d in order if d >= 0]
    aut = Automaton(alphabet, len(order), 0, finish, edges).minimize()
    return PresburgerRel(arity, aut)


def atom_add():
    """x + y = z."""
    return atom_linear(3, (1, 1, -1), 0)


def atom_eq():
    """x = y."""
    return atom_linear(2, (1, -1), 0)


def atom_const(c):
    """x = c (c >= 0)."""
    return atom_linear(1, (1,), int(c))


def atom_scale(m):
    """y = m * x (m >= 1)."""
    return atom_linear(2, (m, -1), 0)


def atom_le():
    """x <= y."""
    return atom_linear(2, (1, -1), 0, relation="le")


def atom_mod(d, rem):
    """x = rem (mod d); tracks (prefix value mod d, 2^position mod d)."""
    d = int(d)
    rem = int(rem) % d
    alphabet = _bit_alphabet(1)
    states = {(0, 1 % d): 0}
    order = [(0, 1 % d)]
    edges = []
    i = 0
    while i < len(order):
        val, p2 = order[i]
        qi = states[(val, p2)]
        for letter in alphabet:
            nxt = ((val + letter[0] * p2) % d, (2 * p2) % d)
            if nxt not in states:
                states[nxt] = len(order)
                order.append(nxt)
            edges.append((qi, letter, states[nxt]))
        i += 1
    finish = [states[s] for s in order if s[0] == rem]
    return PresburgerRel(1, Automaton(alphabet, len(order), 0, finish, edges).minimize())


def rel_not(rel):
    return PresburgerRel(rel.arity, rel.automaton.complement().minimize())


def rel_and(*rels):
    arity = rels[0].arity
    if any(r.arity != arity for r in rels):
        raise ValueError("arity mismatch in conjunction")
    aut = rels[0].automaton
    for r in rels[1:]:
        aut = aut.intersect(r.automaton)
    return PresburgerRel(arity, aut)


def rel_or(*rels):
    arity = rels[0].arity
    if any(r.arity != arity for r in rels):
        raise ValueError("arity mismatch in disjunction")
    aut = rels[0].automaton
    for r in rels[1:]:
        aut = aut.union(r.automaton)
    return PresburgerRel(arity, aut)


def insert_track(rel, position):
    """Cylindrify: a new unconstrained argument at the given position."""
    aut = rel.automaton
    edges = []
    for (q, li), targets in aut.delta.items():
        old = aut.alphabet[li]
        for bit in (0, 1):
            letter = old[:position] + (bit,) + old[position:]
            for q2 in targets:
                edges.append((q, letter, q2))
    alphabet = _bit_alphabet(rel.arity + 1)
    out = Automaton(alphabet, aut.n, aut.initial, aut.finish, edges).minimize()
    return PresburgerRel(rel.arity + 1, out)


def exists(rel, coord):
    """Projection with padding re-closure and determinization."""
    if rel.arity == 0:
        raise ValueError("cannot project a 0-ary relation")
    pads = (0,) * rel.arity
    nfa = rel.automaton.project(coord, pads)
    return PresburgerRel(rel.arity - 1, nfa.minimize())


def decide_empty(rel):
    return rel.is_empty()


def from_semilinear(sl):
    """Compile a semilinear set to a padding-closed relation automaton."""
    k = sl.dim
    out = rel_false(k)
    for lin in sl.linear_sets:
        j = len(lin.periods)
        parts = []
        for d in range(k):
            coeffs = [0] * (k + j)
            coeffs[d] = 1
            for i, p in enumerate(lin.periods):
                coeffs[k + i] = -p[d]
            parts.append(atom_linear(k + j, coeffs, lin.base[d]))
        conj = rel_and(*parts) if parts else rel_true(k + j)
        for _ in range(j):
            conj = exists(conj, conj.arity - 1)
        out = rel_or(out, conj)
    return out


# -- tiny formula language -----------------------------------------------------
#
#   E ::= term ('+' term)*        term ::= NUM | VAR | NUM '*' VAR
#   F ::= E '=' E | E '<=' E | E '<' E | E 'mod' NUM '=' NUM
#       | F '&' F | F '|' F | '!' F | 'exists' VAR '.' F | '(' F ')'


class _Tokens:
    def __init__(self, text):
        import re

        self.toks = re.findall(r"[A-Za-z_][A-Za-z_0-9]*|\d+|<=|[()=+*.!&|<]", text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of formula")
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise ValueError(f"expected {tok!r}, got {got!r}")


def _parse_formula(ts):
    return _parse_or(ts)


def _parse_or(ts):
    lhs = _parse_and(ts)
    while ts.peek() == "|":
        ts.next()
        lhs = ("or", lhs, _parse_and(ts))
    return lhs


def _parse_and(ts):
    lhs = _parse_unary(ts)
    while ts.peek() == "&":
        ts.next()
        lhs = ("and", lhs, _parse_unary(ts))
    return lhs


def _parse_unary(ts):
    tok = ts.peek()
    if tok == "!":
        ts.next()
        return ("not", _parse_unary(ts))
    if tok == "exists":
        ts.next()
        var = ts.next()
        ts.expect(".")
        return ("exists", var, _parse_or(ts))
    if tok == "(":
        ts.next()
        inner = _parse_or(ts)
        ts.expect(")")
        return inner
    return _parse_atom(ts)


def _parse_term(ts):
    tok = ts.next()
    if tok.isdigit():
        if ts.peek() == "*":
            ts.next()
            var = ts.next()
            if not var.isidentifier():
                raise ValueError(f"expected a variable after '*', got {var!r}")
            return (int(tok), var)
        return (int(tok), None)
    if not tok.isidentifier():
        raise ValueError(f"expected a variable or constant, got {tok!r}")
    return (1, tok)


def _parse_expr(ts):
    terms = [_parse_term(ts)]
    while ts.peek() == "+":
        ts.next()
        terms.append(_parse_term(ts))
    const = sum(c for c, v in terms if v is None)
    coeffs = {}
    for c, v in terms:
        if v is not None:
            coeffs[v] = coeffs.get(v, 0) + c
    return coeffs, const


def _parse_atom(ts):
    lhs = _parse_expr(ts)
    op = ts.next()
    if op == "mod":
        modulus = int(ts.next())
        ts.expect("=")
        rem = int(ts.next())
        return ("mod", lhs, modulus, rem)
    if op not in ("=", "<=", "<"):
        raise ValueError(f"unknown comparison {op!r}")
    rhs = _parse_expr(ts)
    return (op, lhs, rhs)


def _free_vars(node, bound=frozenset()):
    kind = node[0]
    if kind in ("and", "or"):
        return _free_vars(node[1], bound) | _free_vars(node[2], bound)
    if kind == "not":
        return _free_vars(node[1], bound)
    if kind == "exists":
        return _free_vars(node[2], bound | {node[1]})
    out = set(node[1][0]) - bound
    if kind != "mod":
        out |= set(node[2][0]) - bound
    return out


def _compile(node, vars_):
    kind = node[0]
    index = {v: i for i, v in enumerate(vars_)}
    if kind == "and":
        return rel_and(_compile(node[1], vars_), _compile(node[2], vars_))
    if kind == "or":
        return rel_or(_compile(node[1], vars_), _compile(node[2], vars_))
    if kind == "not":
        return rel_not(_compile(node[1], vars_))
    if kind == "exists":
        var = node[1]
        inner_vars = vars_ + (var,)
        if var in vars_:
            raise ValueError(f"variable {var!r} shadows an outer binding")
        inner = _compile(node[2], inner_vars)
        return exists(inner, len(inner_vars) - 1)
    if kind == "mod":
        (coeffs, const), modulus, rem = node[1], node[2], node[3]
        # E mod m = r  <=>  exists q . E = m*q + r
        q_vars = vars_ + ("__q",)
        vec = [0] * len(q_vars)
        for v, c in coeffs.items():
            vec[index[v]] = c
        vec[-1] = -modulus
        inner = atom_linear(len(q_vars), vec, rem - const)
        return exists(inner, len(q_vars) - 1)
    (lc, lconst), (rc, rconst) = node[1], node[2]
    vec = [0] * len(vars_)
    for v, c in lc.items():
        vec[index[v]] += c
    for v, c in rc.items():
        vec[index[v]] -= c
    const = rconst - lconst
    if kind == "=":
        return atom_linear(len(vars_), vec, const)
    if kind == "<=":
        return atom_linear(len(vars_), vec, const, relation="le")
    # strict: E < E'  <=>  E + 1 <= E'
    return atom_linear(len(vars_), vec, const - 1, relation="le")


def parse_formula(text, var_order=None):
    """Compile a formula; returns (relation, variable order)."""
    ts = _Tokens(text)
    node = _parse_formula(ts)
    if ts.peek() is not None:
        raise ValueError(f"trailing input at {ts.peek()!r}")
    free = sorted(_free_vars(node))
    if var_order is not None:
        if set(var_order) < set(free):
            raise ValueError("var_order misses free variables")
        free = list(var_order)
    return _compile(node, tuple(free)), tuple(free)
