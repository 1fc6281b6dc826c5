"""Spanning digit sets, their verification, and the induced length function.

A spanning set for (Gamma, F^r) is a finite symmetric digit set through
which every group element gets a radix-style expansion.  The module decides
existence for finitely generated groups (eigenvalue gate, exact arithmetic),
verifies candidate digit sets against the four axioms, builds power/enlarged
spanning sets, and computes shortest expansions and the length value
lambda(a) = 2^(shortest expansion length).
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product

from .errors import StepCapExceeded
from .groups import FreeLattice, LatticeWithTorsion, PolyRing, PowerGroup


@dataclass(frozen=True)
class GateResult:
    admits: bool
    r_hint: int = 1
    reason: str = ""
    witness: dict = None

    def __bool__(self):
        return self.admits


def _char_poly(matrix):
    from sympy import Matrix, Poly, symbols

    x = symbols("x")
    return Poly(Matrix([list(r) for r in matrix]).charpoly(x).as_expr(), x)


def _palindromic_circle_roots(coeffs):
    """Number of unit-circle roots of a palindromic integer polynomial.

    Writes f(x)/x^m as a polynomial h in y = x + 1/x via the recurrence
    T_0 = 2, T_1 = y, T_k = y*T_{k-1} - T_{k-2}, then Sturm-counts the real
    roots of h in [-2, 2].
    """
    from sympy import Poly, symbols

    y = symbols("y")
    n = len(coeffs) - 1
    assert n % 2 == 0, "palindromic factors of odd degree have a root at -1"
    m = n // 2
    t_prev = Poly(2, y)
    t_cur = Poly(y, y)
    h = Poly(coeffs[m], y)
    for k in range(1, m + 1):
        h = h + Poly(coeffs[m + k], y) * t_cur
        t_prev, t_cur = t_cur, t_cur * Poly(y, y) - t_prev
    return h.count_roots(-2, 2)


def _certified_moduli(coeffs, dps_cap=2_000):
    """Disk enclosures for all roots of a squarefree integer polynomial.

    Returns (lower, upper) certified bounds on each root's modulus, using
    Weierstrass correction disks inflated by the degree; precision escalates
    until no disk straddles the unit circle (the caller guarantees no root
    lies on it).
    """
    import mpmath

    n = len(coeffs) - 1
    lead = coeffs[0]
    dps = 40
    while dps <= dps_cap:
        with mpmath.workdps(dps):
            try:
                roots = mpmath.polyroots([mpmath.mpf(c) for c in coeffs], maxsteps=200)
            except mpmath.libmp.NoConvergence:
                dps *= 2
                continue
            out = []
            ok = True
            for i, z in enumerate(roots):
                denom = mpmath.mpf(abs(lead))
                for j, w in enumerate(roots):
                    if i != j:
                        denom *= abs(z - w)
                if denom == 0:
                    ok = False
                    break
                val = abs(mpmath.polyval([mpmath.mpf(c) for c in coeffs], z))
                radius = n * val / denom * mpmath.mpf("1.000001") + mpmath.mpf(10) ** (
                    -dps + 5
                )
                lo = float(abs(z) - radius)
                hi = float(abs(z) + radius)
                if lo <= 1.0 <= hi:
                    ok = False
                    break
                out.append((lo, hi))
            if ok:
                return out
        dps *= 2
    raise RuntimeError("root certification did not converge; increase dps_cap")


def eigen_gate(group):
    """Decide whether some power of the endomorphism admits a spanning set.

    For finitely generated groups this holds exactly when every eigenvalue of
    the endomorphism (complexified) has modulus > 1.  Unit-circle roots are
    detected with exact arithmetic on the characteristic polynomial; interior
    roots via certified disk enclosures.
    """
    if isinstance(group, PolyRing):
        return GateResult(
            True, 1, "polynomial ring over F_p: the constants form a spanning digit set"
        )
    if isinstance(group, LatticeWithTorsion):
        inner = eigen_gate(group.lattice)
        return GateResult(inner.admits, inner.r_hint, inner.reason, inner.witness)
    if isinstance(group, PowerGroup):
        inner = eigen_gate(group.base)
        return GateResult(inner.admits, inner.r_hint, inner.reason, inner.witness)
    if not isinstance(group, FreeLattice):
        raise ValueError(f"eigenvalue gate undefined for {group.variant}")
    if group.det == 0:
        raise ValueError("degenerate endomorphism (determinant 0)")

    from sympy import factor_list

    poly = _char_poly(group.endo)
    _, factors = factor_list(poly)
    min_lower = None
    for fac, _mult in factors:
        coeffs = [int(c) for c in fac.all_coeffs()]  # highest degree first
        deg = len(coeffs) - 1
        if deg == 0:
            continue
        if fac.eval(1) == 0 or fac.eval(-1) == 0:
            return GateResult(
                False,
                reason="eigenvalue on the unit circle (root at +/-1)",
                witness={"factor": str(fac.as_expr()), "root": "+/-1"},
            )
        if deg == 1:
            from fractions import Fraction

            root = Fraction(-coeffs[1], coeffs[0])
            mod = abs(root)
            if mod < 1:
                return GateResult(
                    False,
                    reason="eigenvalue of modulus < 1",
                    witness={"factor": str(fac.as_expr()), "root": str(root)},
                )
            if mod == 1:
                return GateResult(
                    False,
                    reason="eigenvalue on the unit circle",
                    witness={"factor": str(fac.as_expr()), "root": str(root)},
                )
            lower = float(mod)
        elif coeffs == coeffs[::-1]:
            # palindromic: the root set is closed under z -> 1/z
            on_circle = _palindromic_circle_roots(coeffs)
            if on_circle > 0:
                return GateResult(
                    False,
                    reason="eigenvalue on the unit circle",
                    witness={"factor": str(fac.as_expr()), "circle_roots": on_circle},
                )
            return GateResult(
                False,
                reason="eigenvalue of modulus < 1 (reciprocal root pair)",
                witness={"factor": str(fac.as_expr())},
            )
        else:
            enclosures = _certified_moduli(coeffs)
            inside = [e for e in enclosures if e[1] < 1.0]
            if inside:
                return GateResult(
                    False,
                    reason="eigenvalue of modulus < 1",
                    witness={
                        "factor": str(fac.as_expr()),
                        "modulus_enclosure": list(inside[0]),
                    },
                )
            lower = min(e[0] for e in enclosures)
        min_lower = lower if min_lower is None else min(min_lower, lower)
    import math

    if min_lower is None or min_lower > 2:
        r_hint = 1
    else:
        r_hint = max(1, math.ceil(math.log(2) / math.log(min_lower) + 1e-9))
    return GateResult(True, r_hint, "all eigenvalues have modulus > 1")


class SpanningSet:
    """A verified digit set for F^r, with memoized shortest expansions.

    The digit order (the group's serialization order) fixes every
    length-lexicographic tie-break downstream.  Instances are immutable;
    the expansion memo is append-only with idempotent values, so concurrent
    lambda queries are linearizable.
    """

    def __init__(self, group, r, digits, verified_by="construction"):
        self.group = group
        self.r = int(r)
        self.digits = tuple(sorted(set(digits), key=group.sort_key))
        self.digit_set = frozenset(self.digits)
        self.verified_by = verified_by
        by_coset = {}
        for s in self.digits:
            by_coset.setdefault(group.coset_key(s, self.r), []).append(s)
        self._by_coset = {k: tuple(v) for k, v in by_coset.items()}
        self._ell = {group.zero(): 0}

    def __repr__(self):
        return f"SpanningSet(r={self.r}, |digits|={len(self.digits)})"

    def key(self):
        import json

        return json.dumps(
            {"group": self.group.to_json(), "r": self.r,
             "digits": [self.group.element_to_json(d) for d in self.digits]},
            sort_keys=True,
        )

    def __eq__(self, other):
        return isinstance(other, SpanningSet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def digits_congruent_to(self, a):
        return self._by_coset.get(self.group.coset_key(a, self.r), ())

    def eval_word(self, letters):
        return self.group.eval_word(letters, self.r)

    def shortest_expansion(self, a, state_cap=2_000_000):
        """Length-lexicographically least digit word evaluating to ``a``.

        Breadth-first search over residuals x -> F^-r (x - s) with digits
        explored in serialization order; the first arrival at 0 is the
        minimal word.
        """
        g = self.group
        if a == g.zero():
            return ()
        parent = {a: None}
        queue = [a]
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            for s in self.digits_congruent_to(x):
                y = g.preimage_endo(g.sub(x, s), self.r)
                if y is None:
                    continue
                if y == g.zero():
                    return self._reconstruct(a, x, s, parent)
                if y not in parent:
                    parent[y] = (s, x)
                    queue.append(y)
                    if len(queue) > state_cap:
                        raise StepCapExceeded(
                            "expansion state cap exceeded; digit set may not span",
                            cap=state_cap,
                        )
        raise StepCapExceeded(
            "element has no expansion over this digit set", cap=state_cap
        )

    def _reconstruct(self, a, x, last_digit, parent):
        # digits along the BFS path a -> x, then the closing digit
        chain = []
        cur = x
        while cur != a:
            s0, prev = parent[cur]
            chain.append(s0)
            cur = prev
        chain.reverse()
        chain.append(last_digit)
        return tuple(chain)

    def shortest_len(self, a):
        if a not in self._ell:
            self._ell[a] = len(self.shortest_expansion(a))
        return self._ell[a]

    def lambda_value(self, a):
        """lambda(a) = 2^(length of the shortest expansion)."""
        return 2 ** self.shortest_len(a)

    def ball(self, n):
        """{element: shortest length} for all elements of length <= n.

        Layered closure B_k = digits + F^r B_(k-1); independent of the BFS
        in shortest_expansion, which makes it a useful cross-check oracle.
        """
        g = self.group
        out = {g.zero(): 0}
        layer = [g.zero()]
        for k in range(1, n + 1):
            nxt = []
            for b in layer:
                fb = g.apply_endo(b, self.r)
                for s in self.digits:
                    v = g.add(s, fb)
                    if v not in out:
                        out[v] = k
                        nxt.append(v)
            layer = nxt
        return out

    def to_json(self):
        return {
            "r": self.r,
            "digits": [self.group.element_to_json(d) for d in self.digits],
        }

    @classmethod
    def from_json(cls, group, obj, verified_by="file"):
        digits = [group.element_from_json(d) for d in obj["digits"]]
        return cls(group, obj["r"], digits, verified_by=verified_by)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    spanning_set: SpanningSet = None
    axiom: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def _sum_witness(group, digits, total, k):
    """A concrete k-tuple of digits summing to ``total`` (failures only)."""
    if k == 1:
        return (total,) if total in set(digits) else None
    for s in digits:
        rest = _sum_witness(group, digits, group.sub(total, s), k - 1)
        if rest is not None:
            return (s,) + rest
    return None


def _greedy_cap(group, a):
    bits = _size_bits(group, a)
    return 10 * (1 + bits)


def _size_bits(group, a):
    if isinstance(group, PolyRing):
        return len(a) + 1
    if isinstance(group, PowerGroup):
        return max(_size_bits(group.base, x) for x in a) if a else 1
    return max((abs(int(c)).bit_length() for c in a), default=1)


def verify_spanning(group, digits, r, generators=(), greedy=True):
    """Check the spanning-set axioms for a candidate digit set.

    Axioms (ii)-(iv) are decided exhaustively over digit tuples.  Axiom (i)
    is checked by the contraction argument: greedy expansion must terminate
    at 0 from every probe (digits, pairwise sums, group generators, callers'
    extras), and the digit set must meet every coset of F^r.
    """
    digits = tuple(sorted(set(digits), key=group.sort_key))
    digit_set = frozenset(digits)
    if not digits:
        return VerifyResult(False, axiom="ii", witness=("empty digit set",))
    zero = group.zero()
    if zero not in digit_set:
        return VerifyResult(False, axiom="ii", witness=(zero,))
    for s in digits:
        if group.neg(s) not in digit_set:
            return VerifyResult(False, axiom="ii", witness=(group.neg(s),))
    # coset coverage (necessary for axiom (i))
    covered = {group.coset_key(s, r) for s in digits}
    if len(covered) < group.quotient_size(r):
        missing = next(
            rep
            for rep in group.coset_system(r).representatives
            if group.coset_key(rep, r) not in covered
        )
        return VerifyResult(False, axiom="i", witness=(missing,))
    # k-fold sumsets (iterated, deduplicated: digit sums collapse heavily)
    sums = {1: set(digits)}
    for k in (2, 3, 4, 5):
        sums[k] = {group.add(a, s) for a in sums[k - 1] for s in digits}
    # axiom (iii): 5-fold sums land in digits + F^r digits
    reachable = set()
    for s in digits:
        fs = group.apply_endo(s, r)
        for t in digits:
            reachable.add(group.add(t, fs))
    for total in sums[5]:
        if total not in reachable:
            return VerifyResult(
                False, axiom="iii", witness=_sum_witness(group, digits, total, 5)
            )
    # axiom (iv): divisible 3-fold sums divide into the digit set
    for total in sums[3]:
        pre = group.preimage_endo(total, r)
        if pre is not None and pre not in digit_set:
            return VerifyResult(
                False, axiom="iv", witness=_sum_witness(group, digits, total, 3)
            )
    span = SpanningSet(group, r, digits, verified_by="axioms")
    if greedy:
        probes = set(digits) | set(generators) | set(group.generators())
        for s, t in combinations_with_replacement(digits, 2):
            probes.add(group.add(s, t))
        for probe in sorted(probes, key=group.sort_key):
            # expansion search with a seen-set and a state cap; exhausting
            # either means no expansion is reachable from the probe
            cap = max(50_000, 128 * _greedy_cap(group, probe))
            try:
                span.shortest_expansion(probe, state_cap=cap)
            except StepCapExceeded:
                return VerifyResult(False, axiom="i", witness=(probe,))
    return VerifyResult(True, spanning_set=span)


def power_span(span, s, verify=True):
    """Digits = evaluations of all length-s words; spans for F^(r*s)."""
    if s == 1:
        return span
    g = span.group
    digits = {g.eval_word(w, span.r) for w in product(span.digits, repeat=s)}
    if verify:
        res = verify_spanning(g, digits, span.r * s)
        if not res.ok:
            raise AssertionError(
                f"power span failed verification on axiom {res.axiom}: {res.witness}"
            )
        return res.spanning_set
    return SpanningSet(g, span.r * s, digits, verified_by="power construction")


def product_span(span, m):
    """Componentwise digit set for the m-th power group (spans by construction)."""
    if m == 1:
        return span
    pg = PowerGroup(span.group, m)
    digits = tuple(product(span.digits, repeat=m))
    return SpanningSet(pg, span.r, digits, verified_by="product construction")


def enlarge_span(span, extra, rounds_cap=8, power_cap=3, size_cap=5_000):
    """A verified spanning set whose digits contain the old ones and ``extra``.

    Iteratively closes the candidate under negation and the repairs demanded
    by axioms (iii)/(iv); if closure does not stabilize (or fails the greedy
    check), retries over the squared power.  Raises StepCapExceeded with the
    last candidate when every escalation fails.
    """
    g = span.group
    base = span
    last = None
    for _escalation in range(power_cap + 1):
        r = base.r
        cand = set(base.digits) | set(extra) | {g.neg(x) for x in extra} | {g.zero()}
        for _round in range(rounds_cap):
            changed = False
            for x in list(cand):
                if g.neg(x) not in cand:
                    cand.add(g.neg(x))
                    changed = True
            by_coset = {}
            for s in sorted(cand, key=g.sort_key):
                by_coset.setdefault(g.coset_key(s, r), []).append(s)
            # axiom (iv) repairs
            for tup in combinations_with_replacement(sorted(cand, key=g.sort_key), 3):
                total = g.zero()
                for x in tup:
                    total = g.add(total, x)
                pre = g.preimage_endo(total, r)
                if pre is not None and pre not in cand:
                    cand.add(pre)
                    cand.add(g.neg(pre))
                    changed = True
            # axiom (iii) repairs
            fr = {s: g.apply_endo(s, r) for s in cand}
            sums2 = {g.add(t, fs) for s, fs in fr.items() for t in cand}
            for tup in combinations_with_replacement(sorted(cand, key=g.sort_key), 5):
                total = g.zero()
                for x in tup:
                    total = g.add(total, x)
                if total in sums2:
                    continue
                fixes = []
                for s in by_coset.get(g.coset_key(total, r), ()):
                    t = g.preimage_endo(g.sub(total, s), r)
                    if t is not None:
                        fixes.append(t)
                if fixes:
                    best = min(fixes, key=lambda t: (_size_bits(g, t), g.sort_key(t)))
                    cand.add(best)
                    cand.add(g.neg(best))
                else:
                    cand.add(total)
                    cand.add(g.neg(total))
                changed = True
                break  # recompute sums2 against the grown candidate
            if len(cand) > size_cap:
                break
            if not changed:
                result = verify_spanning(g, cand, r)
                if result.ok:
                    return result.spanning_set
                break
        last = tuple(sorted(cand, key=g.sort_key))
        base = power_span(base, 2)
    raise StepCapExceeded(
        "enlargement did not stabilize; raise rounds_cap/power_cap",
        candidate=last,
    )
