"""Chevalley-Eilenberg chains of the Hamiltonian superalgebra and their osp-coinvariants.

A wedge word is a tuple of monomials of order >= 3 sorted by the monomial
total order.  Swapping adjacent factors ``g, h`` costs ``-(-1)^{|g||h|}``,
so a factor may repeat only when it is odd.

Coinvariants are computed as an explicit quotient ``W / osp.W``.  Two
reductions keep the linear algebra small without changing the answer:

* the diagonal torus of sp(2n) lies in osp, so every word of nonzero torus
  weight is already a relation and the quotient lives on the weight-zero
  words; its relations are ``x.W_{-wt(x)}`` for quadratic monomials ``x``;
* signed substitutions from the identity component of Sp(2n) x SO(m)
  (:func:`~supergraph.super_poly.weyl_generators`) act trivially on
  coinvariants, so weight-zero words are first collapsed to signed orbit
  representatives, and one quadratic monomial per orbit suffices.

``mode="naive"`` skips both reductions and is kept as an oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Iterable, Mapping, Sequence

from .exact_linalg import QuotientBasis, SparseMatrix, as_rational, format_rational, quotient_basis, rank
from .super_poly import (
    BasisVector,
    Monomial,
    Polynomial,
    SuperDim,
    mono_bracket,
    monomials,
    substitute,
    weyl_generators,
)

Word = tuple  # tuple[Monomial, ...] for wedges, tuple[BasisVector, ...] for tensors


# ---------------------------------------------------------------------------
# wedge words and chains


def normalize_word(factors: Sequence[Monomial]) -> tuple[int, Word | None]:
    """Sort factors into normal form; returns ``(sign, word)`` or ``(0, None)``."""
    fs = list(factors)
    sign = 1
    for a in range(len(fs)):
        ka, pa = fs[a].key, fs[a].parity
        for b in range(a + 1, len(fs)):
            kb = fs[b].key
            if kb < ka:
                if not (pa and fs[b].parity):
                    sign = -sign
            elif kb == ka and not pa:
                return 0, None
    return sign, tuple(sorted(fs, key=lambda mo: mo.key))


def word_order(word: Word) -> int:
    return sum(mo.order for mo in word)


def word_text(word: Word) -> str:
    return " ^ ".join(f"({mo})" for mo in word) if word else "1"


@dataclass
class CEChain:
    """Exact linear combination of normal-form wedge words."""

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {w: as_rational(c) for w, c in self.terms.items() if c != 0}

    @classmethod
    def of(cls, factors: Sequence[Monomial] | Sequence[str], coeff=1) -> "CEChain":
        monos = [Monomial.parse(f) if isinstance(f, str) else f for f in factors]
        sign, word = normalize_word(monos)
        return cls({word: sign * as_rational(coeff)} if sign else {})

    def add_term(self, word: Word, coeff) -> None:
        value = self.terms.get(word, 0) + coeff
        if value:
            self.terms[word] = value
        else:
            self.terms.pop(word, None)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def bidegrees(self) -> set:
        return {(len(w), word_order(w)) for w in self.terms}

    def __add__(self, other: "CEChain") -> "CEChain":
        out = CEChain(dict(self.terms))
        for w, c in other.terms.items():
            out.add_term(w, c)
        return out

    def __neg__(self) -> "CEChain":
        return CEChain({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "CEChain") -> "CEChain":
        return self + (-other)

    def __rmul__(self, scalar) -> "CEChain":
        return CEChain({w: c * scalar for w, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, CEChain):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{word_text(w)}" for w, c in sorted(self.terms.items(), key=lambda t: _wkey(t[0])))

    def to_json(self) -> list:
        return [[word_text(w), format_rational(c)] for w, c in sorted(self.terms.items(), key=lambda t: _wkey(t[0]))]


def _wkey(word: Word):
    return tuple(mo.key for mo in word)


def wedge(*polys: Polynomial) -> CEChain:
    """Multilinear wedge product of polynomials."""
    out = CEChain()
    for combo in itertools.product(*(list(p.terms.items()) for p in polys)):
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        sign, word = normalize_word([mo for mo, _ in combo])
        if sign:
            out.add_term(word, sign * coeff)
    return out


@lru_cache(maxsize=1 << 18)
def _word_differential(word: Word, inject: bool) -> tuple:
    out: dict = {}
    pars = [mo.parity for mo in word]
    prefix = [0]
    for par in pars:
        prefix.append(prefix[-1] + par)
    m = len(word)
    for a in range(m):
        for b in range(a + 1, m):
            i, j = a + 1, b + 1
            p = pars[a] * prefix[a] + pars[b] * prefix[b] + pars[a] * pars[b] + i + j - 1
            sign = -1 if p & 1 else 1
            if inject and (i, j) == (1, 2):
                sign = -sign
            rest = word[:a] + word[a + 1:b] + word[b + 1:]
            for mo, c in mono_bracket(word[a], word[b]):
                s, w = normalize_word((mo,) + rest)
                if s:
                    out[w] = out.get(w, 0) + sign * s * c
    return tuple((w, c) for w, c in out.items() if c)


def ce_differential(chain: CEChain, inject_sign_error: bool = False) -> CEChain:
    """The Chevalley-Eilenberg differential; ``inject_sign_error`` flips the (1,2) term."""
    out = CEChain()
    for word, coeff in chain.terms.items():
        for w, c in _word_differential(word, inject_sign_error):
            out.add_term(w, coeff * c)
    return out


def _bracket_terms(xi: Monomial, target):
    if isinstance(target, BasisVector):
        target = Monomial.from_factors([target])[1]
    return mono_bracket(xi, target)


def act_on_word(xi: Monomial, word: Word) -> dict:
    """Derivation action of a quadratic monomial on a wedge word."""
    out: dict = {}
    before = 0
    for k, g in enumerate(word):
        sign = -1 if (xi.parity and before & 1) else 1
        rest_l, rest_r = word[:k], word[k + 1:]
        for mo, c in mono_bracket(xi, g):
            s, w = normalize_word(rest_l + (mo,) + rest_r)
            if s:
                out[w] = out.get(w, 0) + sign * s * c
        before += g.parity
    return {w: c for w, c in out.items() if c}


def act_on_tensor(xi: Monomial, word: Word) -> dict:
    """Derivation action of a quadratic monomial on a tensor of basis vectors."""
    out: dict = {}
    before = 0
    for k, v in enumerate(word):
        sign = -1 if (xi.parity and before & 1) else 1
        for mo, c in _bracket_terms(xi, v):
            (w,) = mo.factors()
            key = word[:k] + (w,) + word[k + 1:]
            out[key] = out.get(key, 0) + sign * c
        before += v.parity
    return {w: c for w, c in out.items() if c}


def act(xi: Polynomial, chain: CEChain) -> CEChain:
    if xi.orders - {2}:
        raise ValueError("the acting element must be purely quadratic")
    out = CEChain()
    for mono, a in xi.terms.items():
        for word, coeff in chain.terms.items():
            for w, c in act_on_word(mono, word).items():
                out.add_term(w, a * coeff * c)
    return out


# ---------------------------------------------------------------------------
# bases


@lru_cache(maxsize=None)
def _monomials_by_order(d: SuperDim, order: int) -> tuple:
    return tuple(monomials(d, order))


@lru_cache(maxsize=None)
def _weight_table(d: SuperDim, max_order: int) -> dict:
    """(order, weight) -> monomials, for orders 3..max_order."""
    table: dict = {}
    for o in range(3, max_order + 1):
        for mo in _monomials_by_order(d, o):
            table.setdefault((o, mo.weight(d.n)), []).append(mo)
    return table


def wedge_basis(d: SuperDim, i: int, order: int, weight: tuple | None = None) -> list[Word]:
    """Normal-form words of length ``i`` and total ``order``; optionally of fixed torus weight."""
    if i == 0:
        return [()] if order == 0 and (weight is None or not any(weight)) else []
    if order < 3 * i:
        return []
    top = order - 3 * (i - 1)
    if weight is None:
        pool = [mo for o in range(3, top + 1) for mo in _monomials_by_order(d, o)]
        out = []
        for combo in itertools.combinations_with_replacement(pool, i):
            if sum(mo.order for mo in combo) != order:
                continue
            if any(a == b and not a.parity for a, b in zip(combo, combo[1:])):
                continue
            out.append(tuple(combo))
        return sorted(out, key=_wkey)

    table = _weight_table(d, top)
    pool = sorted((mo for group in table.values() for mo in group), key=lambda mo: mo.key)
    weights = {mo: mo.weight(d.n) for mo in pool}
    out: list = []

    def rec(start: int, left: int, remaining: int, wt: tuple, acc: list):
        if left == 1:
            for mo in table.get((remaining, wt), ()):
                if acc and (mo.key < acc[-1].key or (mo == acc[-1] and not mo.parity)):
                    continue
                out.append(tuple(acc) + (mo,))
            return
        for idx in range(start, len(pool)):
            mo = pool[idx]
            if mo.order * left > remaining:
                break
            if acc and mo == acc[-1] and not mo.parity:
                continue
            rest = remaining - mo.order
            new_wt = tuple(a - b for a, b in zip(wt, weights[mo]))
            if sum(map(abs, new_wt)) > rest:
                continue
            acc.append(mo)
            rec(idx, left - 1, rest, new_wt, acc)
            acc.pop()

    rec(0, i, order, tuple(weight), [])
    return sorted(out, key=_wkey)


def tensor_basis(d: SuperDim, length: int, weight: tuple | None = None) -> list[Word]:
    """Tensors of basis vectors of the given length, optionally of fixed torus weight."""
    vecs = d.vectors()
    if weight is None:
        return [tuple(t) for t in itertools.product(vecs, repeat=length)]
    wt_of = {v: tuple((1 if v.kind == "p" else -1) if (v.kind != "x" and v.index == k + 1) else 0
                      for k in range(d.n)) for v in vecs}
    out: list = []

    def rec(left: int, wt: tuple, acc: list):
        if left == 0:
            if not any(wt):
                out.append(tuple(acc))
            return
        for v in vecs:
            new = tuple(a - b for a, b in zip(wt, wt_of[v]))
            if sum(map(abs, new)) > left - 1:
                continue
            acc.append(v)
            rec(left - 1, new, acc)
            acc.pop()

    rec(length, tuple(weight), [])
    return out


# ---------------------------------------------------------------------------
# signed orbits and quotients


class SignedOrbits:
    """Signed union-find: ``word ~ sign * root``; a root tied to its own negative is zero."""

    def __init__(self, items: Iterable[Hashable]):
        self.parent = {w: (w, 1) for w in items}
        self.zero: set = set()

    def find(self, w):
        root, sign = w, 1
        path = []
        while True:
            p, s = self.parent[root]
            if p == root:
                break
            path.append((root, sign))
            sign *= s
            root = p
        for node, s_node in path:
            self.parent[node] = (root, s_node * sign)
        return root, sign

    def union(self, a, b, sign: int) -> None:
        """Record ``a ~ sign * b``."""
        ra, sa = self.find(a)
        rb, sb = self.find(b)
        if ra == rb:
            if sa != sign * sb:
                self.zero.add(ra)
            return
        # a = sa ra, b = sb rb, a = sign b  =>  ra = sa * sign * sb * rb
        self.parent[ra] = (rb, sa * sign * sb)
        if ra in self.zero:
            self.zero.discard(ra)
            self.zero.add(rb)


def _wedge_image(word: Word, gen: Mapping) -> tuple[int, Word | None]:
    sign = 1
    factors = []
    for mo in word:
        s, img = substitute(mo, gen)
        sign *= s
        factors.append(img)
    s, w = normalize_word(factors)
    return sign * s, w


def _tensor_image(word: Word, gen: Mapping) -> tuple[int, Word]:
    sign = 1
    out = []
    for v in word:
        s, w = gen.get(v, (1, v))
        sign *= s
        out.append(w)
    return sign, tuple(out)


@dataclass
class RelativeBasis:
    """osp-coinvariants of one bidegree.

    ``ambient`` lists the words the quotient is taken in (orbit
    representatives of weight-zero words, or every word in naive mode);
    ``lookup`` sends any reachable word to ``(ambient index, sign)``.
    """

    d: SuperDim
    kind: str
    i: int
    order: int
    mode: str
    ambient: list
    lookup: dict
    quotient: QuotientBasis
    weight_zero_dim: int = 0

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def selected_words(self) -> list:
        return [self.ambient[k] for k in self.quotient.selected]

    def ambient_vector(self, terms: Mapping) -> dict:
        vec: dict = {}
        for w, c in terms.items():
            hit = self.lookup.get(w)
            if hit is None:
                continue  # nonzero torus weight, or a zero orbit
            idx, s = hit
            vec[idx] = vec.get(idx, 0) + s * c
        return {k: v for k, v in vec.items() if v}

    def project(self, chain: CEChain | Mapping) -> dict:
        """Coordinates of the class of ``chain`` in the quotient basis (sparse)."""
        terms = chain.terms if isinstance(chain, CEChain) else chain
        return self.quotient.project_sparse(self.ambient_vector(terms))

    def to_json(self) -> dict:
        text = word_text if self.kind == "wedge" else (lambda w: "⊗".join(map(str, w)))
        return {
            "kind": self.kind,
            "n": self.d.n,
            "m": self.d.m,
            "i": self.i,
            "order": self.order,
            "mode": self.mode,
            "ambient_dim": len(self.ambient),
            "weight_zero_dim": self.weight_zero_dim,
            "quotient_dim": self.dim,
            "selected": [text(w) for w in self.selected_words],
        }


def _quadratic_orbit_reps(d: SuperDim) -> list[Monomial]:
    quads = list(_monomials_by_order(d, 2))
    orbits = SignedOrbits(quads)
    for gen in weyl_generators(d):
        for mo in quads:
            s, img = substitute(mo, gen)
            orbits.union(mo, img, s)
    return sorted({orbits.find(mo)[0] for mo in quads}, key=lambda mo: mo.key)


def _build(d: SuperDim, kind: str, i: int, order: int, mode: str) -> RelativeBasis:
    if kind == "wedge":
        basis_of = lambda wt: wedge_basis(d, i, order, wt)  # noqa: E731
        action = act_on_word
        image = _wedge_image
    else:
        basis_of = lambda wt: tensor_basis(d, i, wt)  # noqa: E731
        action = act_on_tensor
        image = _tensor_image

    if mode == "naive":
        ambient = basis_of(None)
        lookup = {w: (k, 1) for k, w in enumerate(ambient)}
        rows = []
        for xi in _monomials_by_order(d, 2):
            for w in ambient:
                img = action(xi, w)
                if img:
                    rows.append({lookup[u][0]: c for u, c in img.items()})
        return RelativeBasis(d, kind, i, order, mode, ambient, lookup,
                             quotient_basis(len(ambient), rows), len(ambient))

    zero = (0,) * d.n
    words = basis_of(zero)
    orbits = SignedOrbits(words)
    for gen in weyl_generators(d):
        for w in words:
            s, img = image(w, gen)
            orbits.union(w, img, s)
    roots = {w: orbits.find(w) for w in words}
    dead = {orbits.find(r)[0] for r in orbits.zero}
    reps = sorted({r for r, _ in roots.values() if r not in dead},
                  key=_wkey if kind == "wedge" else None)
    index = {r: k for k, r in enumerate(reps)}
    lookup = {w: (index[r], s) for w, (r, s) in roots.items() if r in index}

    rows = []
    for xi in _quadratic_orbit_reps(d):
        wt = tuple(-a for a in xi.weight(d.n))
        for w in basis_of(wt):
            img = action(xi, w)
            vec: dict = {}
            for u, c in img.items():
                hit = lookup.get(u)
                if hit is not None:
                    vec[hit[0]] = vec.get(hit[0], 0) + hit[1] * c
            vec = {k: v for k, v in vec.items() if v}
            if vec:
                rows.append(vec)
    return RelativeBasis(d, kind, i, order, mode, reps, lookup,
                         quotient_basis(len(reps), rows), len(words))


@lru_cache(maxsize=None)
def coinvariant_quotient(d: SuperDim, i: int, order: int, mode: str = "fast") -> RelativeBasis:
    """osp-coinvariants of the wedge words of length ``i`` and total ``order``."""
    return _build(d, "wedge", i, order, mode)


@lru_cache(maxsize=None)
def tensor_coinvariant_quotient(d: SuperDim, length: int, mode: str = "fast") -> RelativeBasis:
    """osp-coinvariants of ``V^{tensor length}``."""
    return _build(d, "tensor", length, length, mode)


# ---------------------------------------------------------------------------
# the relative complex


@lru_cache(maxsize=None)
def relative_differential_matrix(d: SuperDim, i: int, order: int,
                                 inject_sign_error: bool = False) -> SparseMatrix:
    """Matrix of d from the (i, order) coinvariants to the (i-1, order-2) coinvariants."""
    source = coinvariant_quotient(d, i, order)
    if i < 1 or order < 2:
        return SparseMatrix(0, source.dim)
    target = coinvariant_quotient(d, i - 1, order - 2)
    entries = {}
    for col, word in enumerate(source.selected_words):
        image = ce_differential(CEChain({word: 1}), inject_sign_error)
        for row, v in target.project(image).items():
            entries[(row, col)] = v
    return SparseMatrix(target.dim, source.dim, entries)


def differential_descends(d: SuperDim, i: int, order: int, limit: int | None = None) -> bool:
    """Check that d maps osp-relations to relations: project(d(x.w)) = 0."""
    if i < 2:
        return True
    target = coinvariant_quotient(d, i - 1, order - 2)
    checked = 0
    for xi in _monomials_by_order(d, 2):
        wt = tuple(-a for a in xi.weight(d.n))
        for w in wedge_basis(d, i, order, wt):
            rel = CEChain(act_on_word(xi, w))
            if target.project(ce_differential(rel)):
                return False
            checked += 1
            if limit is not None and checked >= limit:
                return True
    return True


def relative_rank(d: SuperDim, i: int, order: int, inject_sign_error: bool = False) -> int:
    if i < 1 or order < 3 * i:
        return 0
    m = relative_differential_matrix(d, i, order, inject_sign_error)
    return rank(m) if m.rows and m.cols else 0


def relative_betti(d: SuperDim, i: int, order: int, inject_sign_error: bool = False) -> int:
    dim = coinvariant_quotient(d, i, order).dim
    return (dim - relative_rank(d, i, order, inject_sign_error)
            - relative_rank(d, i + 1, order + 2, inject_sign_error))


def relative_report(d: SuperDim, i: int, order: int) -> dict:
    dim = coinvariant_quotient(d, i, order).dim
    rank_d = relative_rank(d, i, order)
    return {"n": d.n, "m": d.m, "i": i, "order": order, "dim": dim, "rank_d": rank_d,
            "betti": dim - rank_d - relative_rank(d, i + 1, order + 2)}

