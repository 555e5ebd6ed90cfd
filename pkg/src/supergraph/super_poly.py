"""The Poisson superalgebra of polynomial Hamiltonians on C^{2n|m}.

Coordinates are ``p1..pn, q1..qn`` (even) and ``x1..xm`` (odd).  A
:class:`Monomial` keeps its even part as a sorted exponent tuple and its
odd part as a strictly increasing tuple of ``x`` indices; all Koszul signs
are produced while normalising to that form.  Odd partial derivatives act
from the left.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple


class BasisVector(NamedTuple):
    kind: str  # 'p', 'q' or 'x'
    index: int  # 1-based

    @property
    def parity(self) -> int:
        return 1 if self.kind == "x" else 0

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


def p(i: int) -> BasisVector:
    return BasisVector("p", i)


def q(i: int) -> BasisVector:
    return BasisVector("q", i)


def x(i: int) -> BasisVector:
    return BasisVector("x", i)


@dataclass(frozen=True)
class SuperDim:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("super dimension must be non-negative")

    def vectors(self) -> list[BasisVector]:
        return ([p(i) for i in range(1, self.n + 1)] + [q(i) for i in range(1, self.n + 1)]
                + [x(i) for i in range(1, self.m + 1)])

    def contains(self, v: BasisVector) -> bool:
        bound = self.m if v.kind == "x" else self.n
        return v.kind in "pqx" and 1 <= v.index <= bound

    def check(self, v: BasisVector) -> None:
        if not self.contains(v):
            raise ValueError(f"{v} is not a coordinate of C^{{{2 * self.n}|{self.m}}}")

    @property
    def osp_dim(self) -> int:
        n, m = self.n, self.m
        return 2 * n * n + n + m * (m - 1) // 2 + 2 * n * m

    def __str__(self) -> str:
        return f"{2 * self.n}|{self.m}"


def symplectic_form(a: BasisVector, b: BasisVector, d: SuperDim | None = None) -> int:
    """The canonical even symplectic form on basis vectors."""
    if d is not None:
        d.check(a)
        d.check(b)
    if a.index != b.index:
        return 0
    if a.kind == "x" or b.kind == "x":
        return 1 if a.kind == b.kind else 0
    if a.kind == "p" and b.kind == "q":
        return 1
    if a.kind == "q" and b.kind == "p":
        return -1
    return 0


# ---------------------------------------------------------------------------
# monomials


def _odd_sort_sign(seq: Iterable[int]) -> tuple[int, tuple | None]:
    """Sort odd indices; sign of the permutation, or (0, None) on a repeat."""
    items = list(seq)
    inversions = 0
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            if items[a] > items[b]:
                inversions += 1
            elif items[a] == items[b]:
                return 0, None
    return (-1 if inversions & 1 else 1), tuple(sorted(items))


class Monomial:
    """A normalised super-monomial ``p^a q^b x_{i1}...x_{ik}`` (i1 < ... < ik)."""

    __slots__ = ("even", "odd", "order", "parity", "key", "_hash")

    def __init__(self, even: Iterable[tuple[BasisVector, int]] = (), odd: Iterable[int] = ()):
        ev = tuple(sorted((BasisVector(*v), int(e)) for v, e in even if e))
        for v, e in ev:
            if v.kind not in ("p", "q") or e < 0:
                raise ValueError(f"bad even factor {v}^{e}")
        od = tuple(odd)
        if any(od[k] >= od[k + 1] for k in range(len(od) - 1)):
            raise ValueError("odd factors must be strictly increasing")
        self.even = ev
        self.odd = od
        self.order = sum(e for _, e in ev) + len(od)
        self.parity = len(od) & 1
        self.key = (self.order, ev, od)
        self._hash = hash(self.key)

    @classmethod
    def one(cls) -> "Monomial":
        return _ONE

    @classmethod
    def from_factors(cls, factors: Iterable[BasisVector]) -> tuple[int, "Monomial | None"]:
        """Product of basis vectors in the given order: ``(sign, monomial)``."""
        even: dict = {}
        odd = []
        for v in factors:
            if v.kind == "x":
                odd.append(v.index)
            else:
                even[v] = even.get(v, 0) + 1
        sign, od = _odd_sort_sign(odd)
        if not sign:
            return 0, None
        return sign, cls(even.items(), od)

    @classmethod
    def parse(cls, text: str) -> "Monomial":
        text = text.strip()
        if text in ("", "1"):
            return _ONE
        factors = []
        for kind, idx, exp in re.findall(r"([pqx])(\d+)(?:\^(\d+))?", text):
            factors.extend([BasisVector(kind, int(idx))] * int(exp or 1))
        sign, mono = cls.from_factors(factors)
        if sign != 1:
            raise ValueError(f"monomial {text!r} is not in normal form")
        return mono

    def factors(self) -> list[BasisVector]:
        """Basis vectors in normal order (the tensor lift of the monomial)."""
        out = []
        for v, e in self.even:
            out.extend([v] * e)
        out.extend(x(i) for i in self.odd)
        return out

    def exponent(self, v: BasisVector) -> int:
        if v.kind == "x":
            return 1 if v.index in self.odd else 0
        for w, e in self.even:
            if w == v:
                return e
        return 0

    def weight(self, n: int) -> tuple[int, ...]:
        """Weight for the diagonal torus of sp_{2n}: deg p_i - deg q_i."""
        w = [0] * n
        for v, e in self.even:
            w[v.index - 1] += e if v.kind == "p" else -e
        return tuple(w)

    def variables(self) -> set:
        return {v for v, _ in self.even} | {x(i) for i in self.odd}

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.key == other.key

    def __lt__(self, other: "Monomial") -> bool:
        return self.key < other.key

    def __le__(self, other: "Monomial") -> bool:
        return self.key <= other.key

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        if not self.order:
            return "1"
        parts = [f"{v}^{e}" if e > 1 else str(v) for v, e in self.even]
        if self.odd:
            parts.append("".join(f"x{i}" for i in self.odd))
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Monomial({str(self)!r})"

    def __reduce__(self):
        return (Monomial, (self.even, self.odd))


_ONE = Monomial()


def mono_mul(a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
    """Supercommutative product ``a*b`` as ``(sign, monomial)``; (0, None) if it vanishes."""
    if set(a.odd) & set(b.odd):
        return 0, None
    even = dict(a.even)
    for v, e in b.even:
        even[v] = even.get(v, 0) + e
    # merge sorted odd parts: each (i in a, j in b) with i > j is one transposition
    inv = 0
    if a.odd and b.odd:
        for i in a.odd:
            for j in b.odd:
                if i > j:
                    inv += 1
    return (-1 if inv & 1 else 1), Monomial(even.items(), tuple(sorted(a.odd + b.odd)))


def super_derivative(mono: Monomial, v: BasisVector) -> tuple[int, Monomial]:
    """Left partial derivative; zero is returned as ``(0, 1)``."""
    if v.kind == "x":
        if v.index not in mono.odd:
            return 0, _ONE
        pos = mono.odd.index(v.index)
        rest = mono.odd[:pos] + mono.odd[pos + 1:]
        return (-1 if pos & 1 else 1), Monomial(mono.even, rest)
    e = mono.exponent(v)
    if not e:
        return 0, _ONE
    even = [(w, f - 1 if w == v else f) for w, f in mono.even]
    return e, Monomial(even, mono.odd)


@lru_cache(maxsize=1 << 20)
def mono_bracket(a: Monomial, b: Monomial) -> tuple[tuple[Monomial, int], ...]:
    """Poisson bracket of two monomials as a tuple of (monomial, coefficient)."""
    out: dict = {}

    def add(c1, m1, c2, m2, scale):
        s, m = mono_mul(m1, m2)
        if s:
            out[m] = out.get(m, 0) + scale * c1 * c2 * s

    idx_a = {v.index for v, _ in a.even}
    idx_b = {v.index for v, _ in b.even}
    for i in sorted(idx_a & idx_b):
        ca, da = super_derivative(a, p(i))
        cb, db = super_derivative(b, q(i))
        if ca and cb:
            add(ca, da, cb, db, 1)
        ca, da = super_derivative(a, q(i))
        cb, db = super_derivative(b, p(i))
        if ca and cb:
            add(ca, da, cb, db, -1)
    odd_sign = 1 if a.parity else -1  # -(-1)^{|a|}
    for i in sorted(set(a.odd) & set(b.odd)):
        ca, da = super_derivative(a, x(i))
        cb, db = super_derivative(b, x(i))
        add(ca, da, cb, db, odd_sign)
    return tuple(sorted(((m, c) for m, c in out.items() if c), key=lambda t: t[0].key))


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Exact linear combination of monomials; an element of h_{2n|m}."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def monomial(cls, mono: Monomial | str, coeff=1) -> "Polynomial":
        if isinstance(mono, str):
            mono = Monomial.parse(mono)
        return cls({mono: coeff})

    @classmethod
    def var(cls, v: BasisVector) -> "Polynomial":
        return cls({Monomial.from_factors([v])[1]: 1})

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({_ONE: c})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def parity(self) -> int | None:
        """Common parity of all terms, or None for mixed/zero polynomials."""
        ps = {m.parity for m in self.terms}
        return ps.pop() if len(ps) == 1 else None

    @property
    def orders(self) -> set:
        return {m.order for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.orders) == 1 and self.parity is not None

    def in_g(self) -> bool:
        return all(m.order >= 2 for m in self.terms)

    def in_gtilde(self) -> bool:
        return all(m.order >= 3 for m in self.terms)

    def parity_parts(self) -> list["Polynomial"]:
        parts = []
        for par in (0, 1):
            t = {m: c for m, c in self.terms.items() if m.parity == par}
            if t:
                parts.append(Polynomial(t))
        return parts

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial({m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                s, m = mono_mul(m1, m2)
                if s:
                    out[m] = out.get(m, 0) + s * c1 * c2
        return Polynomial(out)

    def __rmul__(self, scalar) -> "Polynomial":
        return Polynomial({m: c * scalar for m, c in self.terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda t: t.key):
            c = self.terms[m]
            parts.append(f"{c}*{m}" if m.order else f"{c}")
        return " + ".join(parts)

    __repr__ = __str__


def poisson_bracket(a: Polynomial, b: Polynomial) -> Polynomial:
    """The canonical Poisson bracket, bilinear over parity-homogeneous parts."""
    out: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            for m, c in mono_bracket(m1, m2):
                out[m] = out.get(m, 0) + c * c1 * c2
    return Polynomial(out)


def monomials(d: SuperDim, order: int) -> list[Monomial]:
    """All monomials of the given order, sorted by the monomial total order."""
    evens = [p(i) for i in range(1, d.n + 1)] + [q(i) for i in range(1, d.n + 1)]
    out = []
    for k in range(0, min(d.m, order) + 1):
        for odd in itertools.combinations(range(1, d.m + 1), k):
            for combo in itertools.combinations_with_replacement(evens, order - k):
                ev: dict = {}
                for v in combo:
                    ev[v] = ev.get(v, 0) + 1
                out.append(Monomial(ev.items(), odd))
    return sorted(out, key=lambda mo: mo.key)


def osp_basis(d: SuperDim) -> list[Polynomial]:
    """Quadratic Hamiltonians; under the adjoint action they realise osp(2n|m)."""
    return [Polynomial.monomial(mo) for mo in monomials(d, 2)]


def act(xi: Polynomial, target: Polynomial) -> Polynomial:
    """Adjoint action of a quadratic Hamiltonian."""
    if xi.orders - {2}:
        raise ValueError("the acting element must be purely quadratic")
    return poisson_bracket(xi, target)


def linear_map_of(xi: Polynomial, d: SuperDim) -> dict:
    """Matrix of ``a -> {xi, a}`` on the coordinate vectors, as {(row, col): value}."""
    vecs = d.vectors()
    index = {v: k for k, v in enumerate(vecs)}
    out = {}
    for col, v in enumerate(vecs):
        image = poisson_bracket(xi, Polynomial.var(v))
        for mono, c in image.terms.items():
            (w,) = mono.factors()
            out[(index[w], col)] = c
    return out


def pairing(a: Polynomial, b: Polynomial) -> Fraction:
    """Bilinear extension of the symplectic form to linear polynomials."""
    total = Fraction(0)
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            if m1.order != 1 or m2.order != 1:
                raise ValueError("pairing is defined on linear polynomials only")
            total += c1 * c2 * symplectic_form(m1.factors()[0], m2.factors()[0])
    return total


# ---------------------------------------------------------------------------
# signed substitutions (elements of the even group acting by automorphisms)


Substitution = Mapping[BasisVector, tuple[int, BasisVector]]


def substitute(mono: Monomial, sub: Substitution) -> tuple[int, Monomial | None]:
    """Apply a signed variable substitution ``v -> sign * w`` multiplicatively."""
    sign = 1
    factors = []
    for v in mono.factors():
        s, w = sub.get(v, (1, v))
        sign *= s
        factors.append(w)
    s, m = Monomial.from_factors(factors)
    return sign * s, m


def weyl_generators(d: SuperDim) -> list[dict]:
    """Signed substitutions generating a finite subgroup of Sp(2n) x SO(m).

    Adjacent pair swaps and ``p1 -> q1, q1 -> -p1`` generate the
    hyperoctahedral Weyl group of sp_{2n}; for m >= 2 the quarter turns
    ``x_a -> x_{a+1}, x_{a+1} -> -x_a`` are added.  Every element lies in
    the identity component, so it acts trivially on osp-coinvariants.
    """
    gens = []
    for i in range(1, d.n):
        gens.append({p(i): (1, p(i + 1)), p(i + 1): (1, p(i)),
                     q(i): (1, q(i + 1)), q(i + 1): (1, q(i))})
    if d.n >= 1:
        gens.append({p(1): (1, q(1)), q(1): (-1, p(1))})
    for a in range(1, d.m):
        gens.append({x(a): (1, x(a + 1)), x(a + 1): (-1, x(a))})
    return gens

