"""Finite automata over arbitrary finite alphabets.

Letters are opaque hashable tokens (ints, strings, or nested tuples); every
automaton keeps its alphabet sorted in a fixed serialization order so that
constructions, minimal forms, and JSON output are deterministic.  The minimal
complete DFA, renumbered breadth-first, is used as the canonical equality
certificate for languages.
"""

from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .errors import AlphabetMismatch, CapExceeded


def letter_key(x):
    """Total order on letters: ints, then strings, then tuples recursively."""
    if isinstance(x, tuple):
        return (2, len(x), tuple(letter_key(e) for e in x))
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    return (1, str(x))


def _freeze_letter(x):
    if isinstance(x, list):
        return tuple(_freeze_letter(e) for e in x)
    return x


def _thaw_letter(x):
    if isinstance(x, tuple):
        return [_thaw_letter(e) for e in x]
    return x


class Automaton:
    """A (possibly nondeterministic) finite automaton.

    States are 0..n-1, transitions map (state, letter_index) to a sorted
    tuple of successor states.  Instances are treated as immutable values.
    """

    __slots__ = ("alphabet", "n", "initial", "finish", "delta", "deterministic")

    def __init__(self, alphabet, n, initial, finish, edges):
        alpha = sorted({_freeze_letter(a) for a in alphabet}, key=letter_key)
        index = {a: i for i, a in enumerate(alpha)}
        if len(index) != len(list(alphabet)):
            pass  # duplicates collapse silently; edges carry letter objects
        self.alphabet = tuple(alpha)
        self.n = n
        self.initial = initial
        delta = {}
        for q, letter, q2 in edges:
            li = index[_freeze_letter(letter)]
            delta.setdefault((q, li), set()).add(q2)
        self.delta = {k: tuple(sorted(v)) for k, v in delta.items()}
        self.finish = frozenset(finish)
        self.deterministic = all(
            len(self.delta.get((q, li), ())) == 1
            for q in range(n)
            for li in range(len(alpha))
        )

    # -- basic queries ----------------------------------------------------

    def letter_index(self, letter):
        letter = _freeze_letter(letter)
        try:
            return self.alphabet.index(letter)
        except ValueError:
            raise AlphabetMismatch(f"letter {letter!r} not in alphabet") from None

    def successors(self, q, letter_idx):
        return self.delta.get((q, letter_idx), ())

    def accepts(self, word):
        current = {self.initial}
        for letter in word:
            li = self.letter_index(letter)
            current = {q2 for q in current for q2 in self.delta.get((q, li), ())}
            if not current:
                return False
        return bool(current & self.finish)

    def is_empty(self):
        seen = {self.initial}
        queue = deque(seen)
        while queue:
            q = queue.popleft()
            if q in self.finish:
                return False
            for li in range(len(self.alphabet)):
                for q2 in self.delta.get((q, li), ()):
                    if q2 not in seen:
                        seen.add(q2)
                        queue.append(q2)
        return True

    def words(self, max_len):
        """Yield accepted words of length <= max_len (trimmed DFS, lex order)."""
        trimmed = self.trim()
        if trimmed.n == 0:
            return
        stack = [(trimmed.initial, ())]
        while stack:
            q, word = stack.pop()
            if q in trimmed.finish:
                yield word
            if len(word) < max_len:
                for li in reversed(range(len(trimmed.alphabet))):
                    for q2 in trimmed.delta.get((q, li), ()):
                        stack.append((q2, word + (trimmed.alphabet[li],)))

    # -- structural transforms -------------------------------------------

    def trim(self):
        """Restrict to states both reachable and co-reachable."""
        fwd = {self.initial}
        queue = deque(fwd)
        while queue:
            q = queue.popleft()
            for li in range(len(self.alphabet)):
                for q2 in self.delta.get((q, li), ()):
                    if q2 not in fwd:
                        fwd.add(q2)
                        queue.append(q2)
        back = {}
        for (q, li), targets in self.delta.items():
            for q2 in targets:
                back.setdefault(q2, []).append(q)
        co = set(self.finish)
        queue = deque(co)
        while queue:
            q = queue.popleft()
            for q0 in back.get(q, ()):
                if q0 not in co:
                    co.add(q0)
                    queue.append(q0)
        keep = sorted(fwd & co)
        if self.initial not in co:
            return Automaton(self.alphabet, 0, 0, (), ())
        remap = {q: i for i, q in enumerate(keep)}
        edges = [
            (remap[q], self.alphabet[li], remap[q2])
            for (q, li), targets in self.delta.items()
            if q in remap
            for q2 in targets
            if q2 in remap
        ]
        return Automaton(
            self.alphabet,
            len(keep),
            remap[self.initial],
            [remap[f] for f in self.finish if f in remap],
            edges,
        )

    def determinize(self):
        """Subset construction; the result is a complete DFA."""
        if self.n == 0:
            return Automaton(self.alphabet, 1, 0, (), _complete_edges(self.alphabet, 1, {}))
        start = frozenset([self.initial])
        states = {start: 0}
        order = [start]
        edges = []
        queue = deque([start])
        while queue:
            subset = queue.popleft()
            qi = states[subset]
            for li, letter in enumerate(self.alphabet):
                nxt = frozenset(
                    q2 for q in subset for q2 in self.delta.get((q, li), ())
                )
                if nxt not in states:
                    states[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                edges.append((qi, letter, states[nxt]))
        finish = [states[s] for s in order if s & self.finish]
        return Automaton(self.alphabet, len(order), 0, finish, edges)

    def minimize(self):
        """Canonical minimal complete DFA, states renumbered breadth-first."""
        dfa = self if (self.deterministic and self.n > 0) else self.determinize()
        k = len(dfa.alphabet)
        # Moore partition refinement.
        block = [1 if q in dfa.finish else 0 for q in range(dfa.n)]
        nblocks = 2 if dfa.finish and len(dfa.finish) < dfa.n else 1
        while True:
            signature = {}
            new_block = [0] * dfa.n
            for q in range(dfa.n):
                sig = (block[q],) + tuple(
                    block[dfa.delta[(q, li)][0]] for li in range(k)
                )
                if sig not in signature:
                    signature[sig] = len(signature)
                new_block[q] = signature[sig]
            if len(signature) == nblocks:
                block = new_block
                break
            block = new_block
            nblocks = len(signature)
        # BFS renumbering from the initial block in letter order.
        rep_delta = {}
        for q in range(dfa.n):
            b = block[q]
            if b not in rep_delta:
                rep_delta[b] = tuple(block[dfa.delta[(q, li)][0]] for li in range(k))
        start = block[dfa.initial]
        number = {start: 0}
        order = [start]
        queue = deque([start])
        while queue:
            b = queue.popleft()
            for nb in rep_delta[b]:
                if nb not in number:
                    number[nb] = len(number)
                    order.append(nb)
                    queue.append(nb)
        finish_blocks = {block[q] for q in dfa.finish}
        edges = []
        for b in order:
            for li, nb in enumerate(rep_delta[b]):
                edges.append((number[b], dfa.alphabet[li], number[nb]))
        return Automaton(
            dfa.alphabet,
            len(order),
            0,
            [number[b] for b in finish_blocks if b in number],
            edges,
        )

    def canonical_key(self):
        m = self.minimize()
        return (
            m.alphabet,
            m.n,
            tuple(sorted(m.finish)),
            tuple(sorted((q, li, m.delta[(q, li)][0]) for (q, li) in m.delta)),
        )

    # -- boolean algebra ---------------------------------------------------

    def complement(self):
        dfa = self.minimize()
        finish = [q for q in range(dfa.n) if q not in dfa.finish]
        edges = [(q, dfa.alphabet[li], t[0]) for (q, li), t in dfa.delta.items()]
        return Automaton(dfa.alphabet, dfa.n, dfa.initial, finish, edges)

    def _product(self, other, keep):
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(
                f"alphabets differ: {self.alphabet!r} vs {other.alphabet!r}"
            )
        a = self if self.deterministic and self.n else self.determinize()
        b = other if other.deterministic and other.n else other.determinize()
        states = {(a.initial, b.initial): 0}
        order = [(a.initial, b.initial)]
        edges = []
        queue = deque(order)
        while queue:
            pair = queue.popleft()
            qi = states[pair]
            for li, letter in enumerate(a.alphabet):
                nxt = (a.delta[(pair[0], li)][0], b.delta[(pair[1], li)][0])
                if nxt not in states:
                    states[nxt] = len(order)
                    order.append(nxt)
                    queue.append(nxt)
                edges.append((qi, letter, states[nxt]))
        finish = [
            states[p] for p in order if keep(p[0] in a.finish, p[1] in b.finish)
        ]
        return Automaton(a.alphabet, len(order), 0, finish, edges).minimize()

    def intersect(self, other):
        return self._product(other, lambda x, y: x and y)

    def union(self, other):
        return self._product(other, lambda x, y: x or y)

    def difference(self, other):
        return self._product(other, lambda x, y: x and not y)

    def language_equal(self, other):
        return self.canonical_key() == other.canonical_key()

    # -- concatenation / star ---------------------------------------------

    def concat(self, other):
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch("concat over different alphabets")
        off = self.n
        edges = [(q, self.alphabet[li], t) for (q, li), ts in self.delta.items() for t in ts]
        edges += [
            (q + off, other.alphabet[li], t + off)
            for (q, li), ts in other.delta.items()
            for t in ts
        ]
        # glue: every finish state of self copies the out-edges of other's initial
        for f in self.finish:
            for li in range(len(other.alphabet)):
                for t in other.delta.get((other.initial, li), ()):
                    edges.append((f, other.alphabet[li], t + off))
        finish = [t + off for t in other.finish]
        if other.initial in other.finish:
            finish += list(self.finish)
        return Automaton(self.alphabet, self.n + other.n, self.initial, finish, edges)

    def star(self):
        # fresh accepting initial state that mimics the old initial's edges
        new_init = self.n
        edges = [(q, self.alphabet[li], t) for (q, li), ts in self.delta.items() for t in ts]
        for li in range(len(self.alphabet)):
            for t in self.delta.get((self.initial, li), ()):
                edges.append((new_init, self.alphabet[li], t))
        for f in self.finish:
            for li in range(len(self.alphabet)):
                for t in self.delta.get((self.initial, li), ()):
                    edges.append((f, self.alphabet[li], t))
        finish = set(self.finish) | {new_init}
        return Automaton(self.alphabet, self.n + 1, new_init, finish, edges)

    # -- counting ----------------------------------------------------------

    def count_words(self, n):
        """Exact number of accepted words of length <= n."""
        return self.growth_profile(n)[-1]

    def growth_profile(self, upto):
        """Cumulative accepted-word counts for lengths 0..upto."""
        dfa = self if (self.deterministic and self.n) else self.determinize()
        counts = [0] * dfa.n
        counts[dfa.initial] = 1
        total = sum(counts[q] for q in dfa.finish)
        profile = [total]
        k = len(dfa.alphabet)
        for _ in range(upto):
            nxt = [0] * dfa.n
            for q in range(dfa.n):
                c = counts[q]
                if c:
                    for li in range(k):
                        nxt[dfa.delta[(q, li)][0]] += c
            counts = nxt
            total += sum(counts[q] for q in dfa.finish)
            profile.append(total)
        return profile

    # -- projections over tuple alphabets -----------------------------------

    def project(self, drop, pads):
        """Erase coordinate ``drop`` of a tuple alphabet.

        ``pads`` gives the padding letter of every track.  Finish states are
        closed so that a word is accepted whenever it extends, by letters
        that are padding on every kept track, to an accepting run; this keeps
        projections of padded relations well defined.
        """
        kept_pad = tuple(p for i, p in enumerate(pads) if i != drop)
        proj = {}
        pad_like = set()  # letter indices that are padding on all kept tracks
        for li, letter in enumerate(self.alphabet):
            rest = tuple(c for i, c in enumerate(letter) if i != drop)
            proj[li] = rest
            if rest == kept_pad:
                pad_like.add(li)
        # backward closure: states that can reach finish via pad-like letters
        back = {}
        for (q, li), targets in self.delta.items():
            if li in pad_like:
                for q2 in targets:
                    back.setdefault(q2, []).append(q)
        closed = set(self.finish)
        queue = deque(closed)
        while queue:
            q = queue.popleft()
            for q0 in back.get(q, ()):
                if q0 not in closed:
                    closed.add(q0)
                    queue.append(q0)
        edges = [
            (q, proj[li], q2)
            for (q, li), targets in self.delta.items()
            for q2 in targets
        ]
        alphabet = sorted(set(proj.values()), key=letter_key)
        return Automaton(alphabet, self.n, self.initial, closed, edges)

    def project_plain(self, drop):
        """Plain coordinate erasure (no padding closure of finish states)."""
        edges = [
            (q, tuple(c for i, c in enumerate(self.alphabet[li]) if i != drop), q2)
            for (q, li), targets in self.delta.items()
            for q2 in targets
        ]
        alphabet = sorted(
            {tuple(c for i, c in enumerate(a) if i != drop) for a in self.alphabet},
            key=letter_key,
        )
        return Automaton(alphabet, self.n, self.initial, self.finish, edges)

    def padding_closure(self, pad):
        """Close the language under adding and removing trailing pad letters."""
        dfa = self.determinize()
        pi = dfa.letter_index(pad)
        # states from which some pad^k reaches finish
        good = set()
        for q in range(dfa.n):
            seen = []
            cur = q
            while cur not in seen:
                seen.append(cur)
                if cur in dfa.finish:
                    good.add(q)
                    break
                cur = dfa.delta[(cur, pi)][0]
        # then append pad*: glue a pad-looping accepting tail
        tail = dfa.n
        edges = [(q, dfa.alphabet[li], t[0]) for (q, li), t in dfa.delta.items()]
        edges.append((tail, pad, tail))
        for q in good:
            edges.append((q, pad, tail))
        return Automaton(
            dfa.alphabet, dfa.n + 1, dfa.initial, set(good) | {tail}, edges
        ).minimize()

    # -- (de)serialization ---------------------------------------------------

    def to_json(self):
        return {
            "alphabet": [_thaw_letter(a) for a in self.alphabet],
            "states": self.n,
            "initial": self.initial,
            "finish": sorted(self.finish),
            "edges": sorted(
                [q, li, q2]
                for (q, li), targets in self.delta.items()
                for q2 in targets
            ),
            "deterministic": self.deterministic,
        }

    @classmethod
    def from_json(cls, obj):
        alphabet = [_freeze_letter(a) for a in obj["alphabet"]]
        edges = [(q, alphabet[li], q2) for q, li, q2 in obj["edges"]]
        return cls(alphabet, obj["states"], obj["initial"], obj["finish"], edges)

    def __repr__(self):
        return (
            f"Automaton(|alphabet|={len(self.alphabet)}, states={self.n}, "
            f"finish={sorted(self.finish)}, dfa={self.deterministic})"
        )


def unwrap_singletons(aut):
    """Replace 1-tuple letters by their single component."""
    edges = [
        (q, aut.alphabet[li][0], q2)
        for (q, li), ts in aut.delta.items()
        for q2 in ts
    ]
    return Automaton(
        [a[0] for a in aut.alphabet], aut.n, aut.initial, aut.finish, edges
    )


def _complete_edges(alphabet, n, delta):
    return [(q, a, q) for q in range(n) for a in alphabet]


# -- simple constructors -----------------------------------------------------


def empty_language(alphabet):
    return Automaton(alphabet, 1, 0, (), ())


def universal(alphabet):
    return Automaton(alphabet, 1, 0, (0,), [(0, a, 0) for a in alphabet])


def from_word(word, alphabet):
    n = len(word) + 1
    edges = [(i, letter, i + 1) for i, letter in enumerate(word)]
    return Automaton(alphabet, n, 0, (n - 1,), edges)


def from_words(words, alphabet):
    out = empty_language(alphabet)
    for w in words:
        out = out.union(from_word(w, alphabet))
    return out


# -- sparsity ----------------------------------------------------------------


@dataclass(frozen=True)
class SimpleSparseTerm:
    """The language v0 w1* v1 ... w_n* v_n (words as letter tuples)."""

    v0: tuple
    pairs: tuple  # ((w1, v1), (w2, v2), ...)

    def star_count(self):
        return len(self.pairs)

    def to_automaton(self, alphabet):
        out = from_word(self.v0, alphabet)
        for w, v in self.pairs:
            out = out.concat(from_word(w, alphabet).star())
            out = out.concat(from_word(v, alphabet))
        return out.minimize()

    def to_json(self):
        return {
            "v0": [_thaw_letter(a) for a in self.v0],
            "pairs": [
                [[_thaw_letter(a) for a in w], [_thaw_letter(a) for a in v]]
                for w, v in self.pairs
            ],
        }


@dataclass(frozen=True)
class SparseResult:
    sparse: bool
    degree: int = 0
    terms: tuple = ()
    witness: tuple = ()  # (u, v, w): u v* and u w* both extend to acceptance


def _sccs(dfa, states):
    """Tarjan strongly connected components (iterative)."""
    index = {}
    low = {}
    on_stack = set()
    stack = []
    comps = []
    counter = [0]
    k = len(dfa.alphabet)

    def edges_of(q):
        return [t for li in range(k) for t in dfa.delta.get((q, li), ())]

    for root in states:
        if root in index:
            continue
        work = [(root, iter(edges_of(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            q, it = work[-1]
            advanced = False
            for q2 in it:
                if q2 not in index:
                    index[q2] = low[q2] = counter[0]
                    counter[0] += 1
                    stack.append(q2)
                    on_stack.add(q2)
                    work.append((q2, iter(edges_of(q2))))
                    advanced = True
                    break
                elif q2 in on_stack:
                    low[q] = min(low[q], index[q2])
            if advanced:
                continue
            work.pop()
            if low[q] == index[q]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == q:
                        break
                comps.append(sorted(comp))
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[q])
    return comps


def _first_path(dfa, src, dst_set):
    """Lexicographically-first shortest word from src into dst_set."""
    if src in dst_set:
        return ()
    seen = {src}
    queue = deque([(src, ())])
    k = len(dfa.alphabet)
    while queue:
        q, word = queue.popleft()
        for li in range(k):
            for q2 in dfa.delta.get((q, li), ()):
                if q2 in dst_set:
                    return word + (dfa.alphabet[li],)
                if q2 not in seen:
                    seen.add(q2)
                    queue.append((q2, word + (dfa.alphabet[li],)))
    return None


def is_sparse(automaton):
    """Polynomial-density test: no state may lie on two distinct cycles.

    Sparse results carry the degree bound (the maximum number of cycle
    components on an accepting path); non-sparse results carry words
    (u, v, w) such that u v* and u w* both extend to acceptance from a
    common state, certifying exponential growth.
    """
    dfa = automaton.determinize().trim()
    if dfa.n == 0:
        return SparseResult(sparse=True, degree=0, terms=())
    k = len(dfa.alphabet)
    comps = _sccs(dfa, range(dfa.n))
    comp_of = {}
    for ci, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = ci
    internal = {ci: {} for ci in range(len(comps))}  # q -> [(letter, q2)]
    for (q, li), targets in dfa.delta.items():
        for q2 in targets:
            if comp_of[q] == comp_of[q2]:
                internal[comp_of[q]].setdefault(q, []).append((dfa.alphabet[li], q2))
    for ci, comp in enumerate(comps):
        for q in comp:
            outs = internal[ci].get(q, ())
            if len(outs) >= 2:
                u = _first_path(dfa, dfa.initial, {q})
                cycles = []
                for letter, q2 in outs[:2]:
                    back = _first_path(dfa, q2, {q}) if q2 != q else ()
                    cycles.append((letter,) + back)
                return SparseResult(sparse=False, witness=(u, cycles[0], cycles[1]))
    # degree: longest path in the condensation DAG counting cycle components
    weight = [1 if any(internal[ci].values()) else 0 for ci in range(len(comps))]
    dag = {ci: set() for ci in range(len(comps))}
    for (q, li), targets in dfa.delta.items():
        for q2 in targets:
            if comp_of[q] != comp_of[q2]:
                dag[comp_of[q]].add(comp_of[q2])
    start = comp_of[dfa.initial]
    order = []  # postorder: successors appear before their predecessors
    seen = {start}
    stack = [(start, iter(dag[start]))]
    while stack:
        node, it = stack[-1]
        advanced = False
        for nxt in it:
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, iter(dag[nxt])))
                advanced = True
                break
        if not advanced:
            order.append(stack.pop()[0])
    down = {}
    for ci in order:
        down[ci] = weight[ci] + max((down[c2] for c2 in dag[ci]), default=0)
    # every component is on an accepting path (the DFA is trimmed), so the
    # heaviest path from the initial component bounds the star count
    return SparseResult(sparse=True, degree=down[start])


def _cycle_word_from(internal_edges, q):
    """Word around the unique simple cycle of a cycle SCC, starting at q."""
    word = []
    cur = q
    while True:
        letter, nxt = internal_edges[cur][0]
        word.append(letter)
        cur = nxt
        if cur == q:
            return tuple(word)


def sparse_decompose(automaton, verify=True, term_cap=10_000):
    """Decompose a sparse language into simple sparse terms.

    Walks accepting paths through the condensation DAG; each cycle component
    contributes one starred factor, rotated to start at the entry state of
    the path.  Raises ValueError when the language is not sparse.
    """
    res = is_sparse(automaton)
    if not res.sparse:
        raise ValueError("language is not sparse; decomposition undefined")
    dfa = automaton.determinize().trim()
    if dfa.n == 0:
        return ()
    comps = _sccs(dfa, range(dfa.n))
    comp_of = {}
    for ci, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = ci
    internal = {ci: {} for ci in range(len(comps))}
    external = {}
    for (q, li), targets in dfa.delta.items():
        for q2 in targets:
            if comp_of[q] == comp_of[q2]:
                internal[comp_of[q]].setdefault(q, []).append((dfa.alphabet[li], q2))
            else:
                external.setdefault(q, []).append((dfa.alphabet[li], q2))
    for q in external:
        external[q].sort(key=lambda e: letter_key(e[0]))

    terms = []

    def emit(parts):
        # parts = [v0, w1, v1, ..., wn, vn]
        pairs = tuple((parts[i], parts[i + 1]) for i in range(1, len(parts) - 1, 2))
        terms.append(SimpleSparseTerm(parts[0], pairs))
        if len(terms) > term_cap:
            raise CapExceeded("sparse decomposition term cap exceeded", cap=term_cap)

    def segments(q, edges):
        """Partial walks around the cycle from q: (word, endpoint) pairs."""
        yield ((), q)
        word = []
        cur = q
        while True:
            letter, nxt = edges[cur][0]
            if nxt == q:
                return
            word.append(letter)
            cur = nxt
            yield (tuple(word), cur)

    def walk(q, parts):
        # parts[-1] is the connector word still being accumulated
        ci = comp_of[q]
        edges = internal[ci]
        if edges:
            base = parts + [_cycle_word_from(edges, q)]
            for seg, endpoint in segments(q, edges):
                if endpoint in dfa.finish:
                    emit(base + [seg])
                for letter, q2 in external.get(endpoint, ()):
                    walk(q2, base + [seg + (letter,)])
        else:
            if q in dfa.finish:
                emit(parts)
            for letter, q2 in external.get(q, ()):
                walk(q2, parts[:-1] + [parts[-1] + (letter,)])

    walk(dfa.initial, [()])
    terms = tuple(dict.fromkeys(terms))
    if verify:
        rebuilt = empty_language(dfa.alphabet)
        for t in terms:
            rebuilt = rebuilt.union(t.to_automaton(dfa.alphabet))
        if not rebuilt.language_equal(dfa):
            raise AssertionError("sparse decomposition failed its equality check")
    return terms


@dataclass(frozen=True)
class LinearSet:
    base: tuple
    periods: tuple

    def to_json(self):
        return {"base": list(self.base), "periods": [list(p) for p in self.periods]}


@dataclass(frozen=True)
class SemilinearSet:
    dim: int
    linear_sets: tuple

    def to_json(self):
        return {"dim": self.dim, "linear_sets": [s.to_json() for s in self.linear_sets]}

    @classmethod
    def from_json(cls, obj):
        return cls(
            obj["dim"],
            tuple(
                LinearSet(tuple(s["base"]), tuple(tuple(p) for p in s["periods"]))
                for s in obj["linear_sets"]
            ),
        )

    def map_linear(self, matrix):
        """Apply an integer matrix (one row per output coordinate)."""

        def apply(v):
            return tuple(sum(row[i] * v[i] for i in range(self.dim)) for row in matrix)

        return SemilinearSet(
            len(matrix),
            tuple(
                LinearSet(
                    apply(s.base),
                    tuple(dict.fromkeys(apply(p) for p in s.periods)),
                )
                for s in self.linear_sets
            ),
        )

    def members_upto(self, bound):
        """All vectors with every entry <= bound (brute-force oracle)."""
        out = set()
        for s in self.linear_sets:
            frontier = [s.base]
            seen = set()
            while frontier:
                v = frontier.pop()
                if v in seen or any(c > bound for c in v):
                    continue
                seen.add(v)
                out.add(v)
                for p in s.periods:
                    frontier.append(tuple(a + b for a, b in zip(v, p)))
        return out


def _labeled_simple_cycles(comp, internal_edges, cap):
    """Labeled simple cycles inside one SCC as (state set, letter-index word)."""
    cycles = []
    comp_set = set(comp)
    for start in comp:
        stack = [(start, (), frozenset([start]))]
        while stack:
            q, word, visited = stack.pop()
            for li, q2 in internal_edges.get(q, ()):
                if q2 == start:
                    cycles.append((visited, word + (li,)))
                    if len(cycles) > cap:
                        raise CapExceeded("simple cycle cap exceeded", cap=cap)
                elif q2 in comp_set and q2 not in visited and q2 > start:
                    stack.append((q2, word + (li,), visited | {q2}))
    return cycles


def parikh_image(automaton, cycle_cap=20_000, set_cap=200_000):
    """Semilinear Parikh image of a regular language.

    Every accepted word decomposes into a state-simple accepting path plus
    simple cycles hanging connectedly off it, so the image is the union of
    linear sets with base = path + one copy of each chosen cycle and periods
    = the chosen cycles.
    """
    nfa = automaton.trim()
    k = len(nfa.alphabet)
    if nfa.n == 0:
        return SemilinearSet(k, ())

    def parikh(word_indices):
        v = [0] * k
        for li in word_indices:
            v[li] += 1
        return tuple(v)

    edges_of = {}
    for (q, li), targets in nfa.delta.items():
        for q2 in targets:
            edges_of.setdefault(q, []).append((li, q2))
    paths = []
    stack = [(nfa.initial, (), frozenset([nfa.initial]))]
    while stack:
        q, word, visited = stack.pop()
        if q in nfa.finish:
            paths.append((visited, parikh(word)))
            if len(paths) > set_cap:
                raise CapExceeded("simple path cap exceeded", cap=set_cap)
        for li, q2 in edges_of.get(q, ()):
            if q2 not in visited:
                stack.append((q2, word + (li,), visited | {q2}))
    comps = _sccs(nfa, range(nfa.n))
    all_cycles = []
    for comp in comps:
        comp_set = set(comp)
        internal = {}
        for q in comp:
            for li, q2 in edges_of.get(q, ()):
                if q2 in comp_set:
                    internal.setdefault(q, []).append((li, q2))
        if internal:
            all_cycles.extend(_labeled_simple_cycles(comp, internal, cycle_cap))
    cycle_vecs = [parikh(w) for _, w in all_cycles]
    linear = {}
    for path_states, base0 in paths:
        seen_subsets = {frozenset()}
        frontier = [(frozenset(), path_states)]
        while frontier:
            chosen, anchor = frontier.pop()
            base = tuple(
                b + sum(cycle_vecs[ci][i] for ci in chosen)
                for i, b in enumerate(base0)
            )
            periods = tuple(sorted({cycle_vecs[ci] for ci in chosen}))
            linear[(base, periods)] = LinearSet(base, periods)
            if len(linear) > set_cap:
                raise CapExceeded("parikh linear set cap exceeded", cap=set_cap)
            for ci, (cstates, _) in enumerate(all_cycles):
                if ci not in chosen and cstates & anchor:
                    key = chosen | {ci}
                    if key not in seen_subsets:
                        seen_subsets.add(key)
                        frontier.append((key, anchor | cstates))
    return SemilinearSet(k, tuple(linear.values()))
