"""Concrete abelian groups equipped with an injective endomorphism.

Four families are supported: free lattices Z^m with an integer matrix of
nonzero determinant, Z with multiplication by a base d (|d| >= 2), the
polynomial ring F_p[t] with multiplication by t, and a lattice times a
finite torsion factor on which the endomorphism acts bijectively.  Finite
powers of any of these are available for working with relations.

Elements are plain tuples: integer coordinates for lattices, coefficient
lists (lowest degree first, no trailing zeros) for polynomials, and tuples
of member elements for powers.  All operations are pure; coordinates use
Python's arbitrary-precision integers throughout.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd


def _mat_vec(matrix, vec):
    return tuple(sum(row[i] * vec[i] for i in range(len(vec))) for row in matrix)


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(len(b[0])))
        for i in range(n)
    )


def _identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _det(matrix):
    """Integer determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = len(matrix)
    m = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def _solve_exact(matrix, vec):
    """Solve M x = v over Q; returns a tuple of Fractions (M invertible)."""
    n = len(matrix)
    a = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(vec[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[i][n] for i in range(n))


def _smith_decomposition(matrix):
    """Smith normal form with a left transform: returns (L, diag, Linv).

    L is unimodular with L*M*R diagonal; Linv is its integer inverse.  The
    diagonal entries are the elementary divisors, made positive.
    """
    from sympy import Matrix
    from sympy.polys.matrices import DomainMatrix
    from sympy.polys.domains import ZZ
    from sympy.polys.matrices.normalforms import smith_normal_decomp

    dm = DomainMatrix.from_Matrix(Matrix([list(r) for r in matrix])).convert_to(ZZ)
    snf, left, _right = smith_normal_decomp(dm)
    snf_m = snf.to_Matrix()
    left_m = left.to_Matrix()
    n = len(matrix)
    diag = []
    left_rows = [[int(left_m[i, j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        d = int(snf_m[i, i])
        if d < 0:
            d = -d
            left_rows[i] = [-x for x in left_rows[i]]
        diag.append(d)
    left_t = tuple(tuple(r) for r in left_rows)
    inv = Matrix([list(r) for r in left_t]).inv()
    linv = tuple(tuple(int(inv[i, j]) for j in range(n)) for i in range(n))
    return left_t, tuple(diag), linv


def _column_hnf(matrix):
    """Lower-triangular column Hermite form (positive diagonal)."""
    m = len(matrix)
    h = [[int(x) for x in row] for row in matrix]

    def col_op(j, k, a, b, c, d):
        for i in range(m):
            h[i][j], h[i][k] = a * h[i][j] + b * h[i][k], c * h[i][j] + d * h[i][k]

    for i in range(m):
        for j in range(i + 1, m):
            while h[i][j] != 0:
                q = h[i][i] // h[i][j]
                # Euclid step: (col_i, col_j) <- (col_j, col_i - q*col_j)
                col_op(i, j, 0, 1, 1, -q)
        if h[i][i] < 0:
            for k in range(m):
                h[k][i] = -h[k][i]
    return tuple(tuple(row) for row in h)


def _hnf_reduce(hnf, vec):
    """Canonical coset representative: 0 <= w_i < H_ii componentwise."""
    w = list(vec)
    m = len(w)
    for i in range(m):
        q = w[i] // hnf[i][i]
        if q:
            for k in range(i, m):
                w[k] -= q * hnf[k][i]
    return tuple(w)


@dataclass(frozen=True)
class Word:
    """A digit string together with the endomorphism power it is read under."""

    letters: tuple
    r: int = 1


@dataclass(frozen=True)
class CosetSystem:
    """Exactly one representative of each coset of F^r applied to the group."""

    group: "Group"
    r: int
    representatives: tuple

    def index_of(self, element):
        return self._index()[self.group.coset_key(element, self.r)]

    def representative_of(self, element):
        return self.representatives[self.index_of(element)]

    def _index(self):
        if not hasattr(self, "_idx"):
            object.__setattr__(
                self,
                "_idx",
                {
                    self.group.coset_key(rep, self.r): i
                    for i, rep in enumerate(self.representatives)
                },
            )
        return self._idx

    def __len__(self):
        return len(self.representatives)


class Group:
    """Common interface; subclasses implement the per-variant arithmetic."""

    variant = "?"

    def zero(self):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def apply_endo(self, a, r=1):
        raise NotImplementedError

    def preimage_endo(self, a, r=1):
        """The unique x with F^r x = a, or None when a is not divisible."""
        raise NotImplementedError

    def quotient_size(self, r=1):
        raise NotImplementedError

    def coset_key(self, a, r=1):
        raise NotImplementedError

    def coset_system(self, r=1):
        raise NotImplementedError

    def generators(self):
        raise NotImplementedError

    def sort_key(self, a):
        raise NotImplementedError

    def scalar_mul(self, k, a):
        out = self.zero()
        step = a if k >= 0 else self.neg(a)
        for _ in range(abs(k)):
            out = self.add(out, step)
        return out

    def eval_word(self, letters, r=1):
        """[s_0 ... s_n] = s_0 + F^r s_1 + ... + F^{rn} s_n."""
        out = self.zero()
        for s in reversed(tuple(letters)):
            out = self.add(s, self.apply_endo(out, r))
        return out

    def element_to_json(self, a):
        return list(a)

    def element_from_json(self, obj):
        return tuple(obj)

    def coset_system_from(self, representatives, r=1):
        """Validate a user list: pairwise incongruent and complete."""
        reps = tuple(representatives)
        keys = [self.coset_key(a, r) for a in reps]
        if len(set(keys)) != len(keys):
            raise ValueError("representatives are not pairwise incongruent")
        if len(keys) != self.quotient_size(r):
            raise ValueError(
                f"expected {self.quotient_size(r)} representatives, got {len(keys)}"
            )
        return CosetSystem(self, r, reps)

    def to_json(self):
        raise NotImplementedError

    def __repr__(self):
        return f"{self.__class__.__name__}({self.to_json()})"

    def __eq__(self, other):
        return isinstance(other, Group) and self.to_json() == other.to_json()

    def __hash__(self):
        import json

        return hash(json.dumps(self.to_json(), sort_keys=True))


class FreeLattice(Group):
    """Z^m with an injective endomorphism given by an integer matrix."""

    variant = "FreeLattice"

    def __init__(self, rank, endo):
        self.rank = rank
        self.endo = tuple(tuple(int(x) for x in row) for row in endo)
        if len(self.endo) != rank or any(len(r) != rank for r in self.endo):
            raise ValueError("endomorphism matrix must be rank x rank")
        self.det = _det(self.endo)
        if self.det == 0:
            raise ValueError("endomorphism must be injective (nonzero determinant)")
        self._powers = {0: _identity(rank), 1: self.endo}
        self._snf_cache = {}

    def _power(self, r):
        if r not in self._powers:
            self._powers[r] = _mat_mul(self._power(r - 1), self.endo)
        return self._powers[r]

    def zero(self):
        return (0,) * self.rank

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def apply_endo(self, a, r=1):
        return _mat_vec(self._power(r), a)

    def preimage_endo(self, a, r=1):
        sol = _solve_exact(self._power(r), a)
        if any(x.denominator != 1 for x in sol):
            return None
        return tuple(int(x) for x in sol)

    def quotient_size(self, r=1):
        return abs(self.det) ** r

    def _snf(self, r):
        if r not in self._snf_cache:
            self._snf_cache[r] = _smith_decomposition(self._power(r))
        return self._snf_cache[r]

    def coset_key(self, a, r=1):
        left, diag, _ = self._snf(r)
        v = _mat_vec(left, a)
        return tuple(x % d for x, d in zip(v, diag))

    def coset_system(self, r=1):
        _, diag, linv = self._snf(r)
        hnf = _column_hnf(self._power(r))
        reps = [
            _hnf_reduce(hnf, _mat_vec(linv, key))
            for key in product(*(range(d) for d in diag))
        ]
        reps.sort(key=self.sort_key)
        return CosetSystem(self, r, tuple(reps))

    def generators(self):
        return tuple(
            tuple(1 if i == j else 0 for j in range(self.rank)) for i in range(self.rank)
        )

    def sort_key(self, a):
        return tuple(a)

    def to_json(self):
        return {"variant": "FreeLattice", "rank": self.rank, "endo": [list(r) for r in self.endo]}


class IntegerBase(FreeLattice):
    """Z with multiplication by an integer base d, |d| >= 2."""

    variant = "IntegerBase"

    def __init__(self, d):
        if abs(int(d)) < 2:
            raise ValueError("base must satisfy |d| >= 2")
        self.d = int(d)
        super().__init__(1, ((self.d,),))

    def to_json(self):
        return {"variant": "IntegerBase", "d": self.d}


class PolyRing(Group):
    """F_p[t] under addition, with the endomorphism f(t) -> t*f(t).

    Elements are coefficient tuples, lowest degree first, so that letter
    position i in a word corresponds to the t^i coefficient.
    """

    variant = "PolyRing"

    def __init__(self, p):
        p = int(p)
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError("p must be prime")
        self.p = p

    def _strip(self, coeffs):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return tuple(coeffs)

    def zero(self):
        return ()

    def add(self, a, b):
        n = max(len(a), len(b))
        a = tuple(a) + (0,) * (n - len(a))
        b = tuple(b) + (0,) * (n - len(b))
        return self._strip((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def apply_endo(self, a, r=1):
        if not a:
            return ()
        return (0,) * r + tuple(a)

    def preimage_endo(self, a, r=1):
        if not a:
            return ()
        if len(a) <= r or any(c != 0 for c in a[:r]):
            return None
        return tuple(a[r:])

    def quotient_size(self, r=1):
        return self.p**r

    def coset_key(self, a, r=1):
        return tuple(a[:r]) + (0,) * max(0, r - len(a))

    def coset_system(self, r=1):
        reps = [self._strip(c) for c in product(range(self.p), repeat=r)]
        reps.sort(key=self.sort_key)
        return CosetSystem(self, r, tuple(reps))

    def generators(self):
        return ((1,),)

    def sort_key(self, a):
        return (len(a), tuple(a))

    def const(self, n):
        return self._strip((n % self.p,))

    def monomial(self, k, coeff=1):
        if coeff % self.p == 0:
            return ()
        return (0,) * k + (coeff % self.p,)

    def to_json(self):
        return {"variant": "PolyRing", "p": self.p}


class LatticeWithTorsion(Group):
    """Z^m times a finite torsion product, with a block-diagonal endomorphism.

    The torsion factor is a product of cyclic groups Z/n_i on which the
    endomorphism acts by multiplication by units u_i; any other torsion
    action is rejected, since it would break the finite-quotient bookkeeping.
    """

    variant = "LatticeWithTorsion"

    def __init__(self, rank, torsion_orders, endo, torsion_units=None):
        self.lattice = FreeLattice(rank, endo)
        self.rank = rank
        self.orders = tuple(int(n) for n in torsion_orders)
        if any(n < 2 for n in self.orders):
            raise ValueError("torsion orders must be >= 2")
        units = torsion_units or (1,) * len(self.orders)
        self.units = tuple(int(u) % n for u, n in zip(units, self.orders))
        for u, n in zip(self.units, self.orders):
            if gcd(u, n) != 1:
                raise ValueError(
                    "unsupported torsion action: endomorphism must map the "
                    "torsion factor bijectively to itself"
                )

    def _split(self, a):
        return a[: self.rank], a[self.rank :]

    def zero(self):
        return (0,) * (self.rank + len(self.orders))

    def add(self, a, b):
        la, ta = self._split(a)
        lb, tb = self._split(b)
        return tuple(x + y for x, y in zip(la, lb)) + tuple(
            (x + y) % n for x, y, n in zip(ta, tb, self.orders)
        )

    def neg(self, a):
        la, ta = self._split(a)
        return tuple(-x for x in la) + tuple((-x) % n for x, n in zip(ta, self.orders))

    def apply_endo(self, a, r=1):
        la, ta = self._split(a)
        out_t = ta
        for _ in range(r):
            out_t = tuple((u * x) % n for u, x, n in zip(self.units, out_t, self.orders))
        return self.lattice.apply_endo(la, r) + out_t

    def preimage_endo(self, a, r=1):
        la, ta = self._split(a)
        lat = self.lattice.preimage_endo(la, r)
        if lat is None:
            return None
        out_t = ta
        for _ in range(r):
            out_t = tuple(
                (pow(u, -1, n) * x) % n for u, x, n in zip(self.units, out_t, self.orders)
            )
        return lat + out_t

    def quotient_size(self, r=1):
        return self.lattice.quotient_size(r)

    def coset_key(self, a, r=1):
        la, _ = self._split(a)
        return self.lattice.coset_key(la, r)

    def coset_system(self, r=1):
        pad = (0,) * len(self.orders)
        base = self.lattice.coset_system(r)
        return CosetSystem(self, r, tuple(rep + pad for rep in base.representatives))

    def generators(self):
        gens = [g + (0,) * len(self.orders) for g in self.lattice.generators()]
        for i in range(len(self.orders)):
            gens.append((0,) * self.rank + tuple(1 if j == i else 0 for j in range(len(self.orders))))
        return tuple(gens)

    def sort_key(self, a):
        return tuple(a)

    def to_json(self):
        return {
            "variant": "LatticeWithTorsion",
            "rank": self.rank,
            "torsion": list(self.orders),
            "endo": [list(r) for r in self.lattice.endo],
            "torsion_units": list(self.units),
        }


class PowerGroup(Group):
    """A finite power of a base group, acted on componentwise."""

    variant = "Power"

    def __init__(self, base, m):
        self.base = base
        self.m = int(m)
        if self.m < 1:
            raise ValueError("power must be >= 1")

    def zero(self):
        return (self.base.zero(),) * self.m

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def apply_endo(self, a, r=1):
        return tuple(self.base.apply_endo(x, r) for x in a)

    def preimage_endo(self, a, r=1):
        out = []
        for x in a:
            y = self.base.preimage_endo(x, r)
            if y is None:
                return None
            out.append(y)
        return tuple(out)

    def quotient_size(self, r=1):
        return self.base.quotient_size(r) ** self.m

    def coset_key(self, a, r=1):
        return tuple(self.base.coset_key(x, r) for x in a)

    def coset_system(self, r=1):
        base = self.base.coset_system(r).representatives
        return CosetSystem(self, r, tuple(product(base, repeat=self.m)))

    def generators(self):
        gens = []
        for i in range(self.m):
            for g in self.base.generators():
                gens.append(
                    tuple(g if j == i else self.base.zero() for j in range(self.m))
                )
        return tuple(gens)

    def sort_key(self, a):
        return tuple(self.base.sort_key(x) for x in a)

    def element_to_json(self, a):
        return [self.base.element_to_json(x) for x in a]

    def element_from_json(self, obj):
        return tuple(self.base.element_from_json(x) for x in obj)

    def to_json(self):
        return {"variant": "Power", "base": self.base.to_json(), "m": self.m}


def group_from_json(obj):
    variant = obj["variant"]
    if variant == "FreeLattice":
        return FreeLattice(obj["rank"], obj["endo"])
    if variant == "IntegerBase":
        return IntegerBase(obj["d"])
    if variant == "PolyRing":
        return PolyRing(obj["p"])
    if variant == "LatticeWithTorsion":
        return LatticeWithTorsion(
            obj["rank"], obj["torsion"], obj["endo"], obj.get("torsion_units")
        )
    if variant == "Power":
        return PowerGroup(group_from_json(obj["base"]), obj["m"])
    raise ValueError(f"unknown group variant {variant!r}")
