"""Chord diagrams with their invariants and coinvariants, and the maps Phi and Psi built on them.

Positions in tensors and chord diagrams are 1-based.  A permutation acts on
a tensor by moving the factor in position ``a`` to position ``sigma(a)``,
with the Koszul sign of the odd factors that cross.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .ce_complex import CEChain, ce_differential, coinvariant_quotient, normalize_word, wedge_basis
from .graph_complex import GraphChain, boundary
from .graph_core import CanonicalClass, OrientedGraph, canonical_form, enumerate_graphs
from .super_poly import BasisVector, Monomial, SuperDim, p, q, symplectic_form

ChordDiagram = tuple  # tuple of (i, j) pairs with i < j, sorted by i
OrientedChordDiagram = tuple  # tuple of ordered (i, j) pairs


def enumerate_chords(k: int) -> list[ChordDiagram]:
    """All perfect matchings of {1..2k}; the pair holding the smallest free point comes first."""
    if k < 1:
        raise ValueError("k must be positive")

    def rec(free: list) -> Iterator[tuple]:
        if not free:
            yield ()
            return
        a = free[0]
        for t in range(1, len(free)):
            rest = free[1:t] + free[t + 1:]
            for tail in rec(rest):
                yield ((a, free[t]),) + tail

    return list(rec(list(range(1, 2 * k + 1))))


def hat(c: Sequence[Sequence[int]]) -> OrientedChordDiagram:
    """Canonical orientation: every pair increasing, pairs sorted."""
    return tuple(sorted((min(a, b), max(a, b)) for a, b in c))


def act_on_chords(sigma: Mapping[int, int] | Sequence[int], c: OrientedChordDiagram) -> OrientedChordDiagram:
    s = _perm_map(sigma)
    return tuple((s[a], s[b]) for a, b in c)


def _perm_map(sigma: Mapping[int, int] | Sequence[int]) -> dict:
    if isinstance(sigma, Mapping):
        return dict(sigma)
    return {a + 1: v for a, v in enumerate(sigma)}


@dataclass(frozen=True)
class TensorWord:
    factors: tuple
    coefficient: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))

    def __len__(self) -> int:
        return len(self.factors)


def koszul_sign(sigma: Mapping[int, int] | Sequence[int], factors: Sequence) -> int:
    """Sign of moving the factor at position a to sigma(a)."""
    s = _perm_map(sigma)
    n = len(factors)
    sign = 1
    for a in range(1, n + 1):
        if not factors[a - 1].parity:
            continue
        for b in range(a + 1, n + 1):
            if factors[b - 1].parity and s[a] > s[b]:
                sign = -sign
    return sign


def permute_tensor(sigma: Mapping[int, int] | Sequence[int], t: TensorWord) -> TensorWord:
    s = _perm_map(sigma)
    if sorted(s) != list(range(1, len(t) + 1)) or sorted(s.values()) != sorted(s):
        raise ValueError("sigma is not a permutation of the tensor positions")
    out = [None] * len(t)
    for a, v in enumerate(t.factors, start=1):
        out[s[a] - 1] = v
    return TensorWord(tuple(out), t.coefficient * koszul_sign(s, t.factors))


def sigma_c(c: OrientedChordDiagram) -> dict:
    """i_r -> 2r-1, j_r -> 2r for the stored pair order."""
    out = {}
    for r, (a, b) in enumerate(c, start=1):
        out[a] = 2 * r - 1
        out[b] = 2 * r
    return out


def invert(sigma: Mapping[int, int]) -> dict:
    return {v: k for k, v in sigma.items()}


def kappa(t: TensorWord) -> Fraction:
    if len(t) % 2:
        raise ValueError("kappa needs an even number of factors")
    value = t.coefficient
    for r in range(0, len(t), 2):
        value *= symplectic_form(t.factors[r], t.factors[r + 1])
        if not value:
            return Fraction(0)
    return value


def beta(c: OrientedChordDiagram, t: TensorWord) -> Fraction:
    if 2 * len(c) != len(t):
        raise ValueError("chord diagram and tensor sizes differ")
    return kappa(permute_tensor(sigma_c(c), t))


def u_coinvariant(c: OrientedChordDiagram, d: SuperDim) -> TensorWord:
    k = len(c)
    if k > d.n:
        raise ValueError(f"u_k needs k <= n (k={k}, n={d.n})")
    base = []
    for r in range(1, k + 1):
        base.extend([p(r), q(r)])
    return permute_tensor(invert(sigma_c(c)), TensorWord(tuple(base)))


# ---------------------------------------------------------------------------
# graphs from chord diagrams


def gamma_graph(k_list: Sequence[int], c: OrientedChordDiagram, flip_first: bool = False) -> OrientedGraph:
    """Blocks of consecutive half-edges of sizes k_list, edges the directed chords.

    ``flip_first`` reverses the first chord (negative control only).
    """
    if sum(k_list) != 2 * len(c):
        raise ValueError("block sizes must add up to the number of chord endpoints")
    blocks, start = [], 0
    for k in k_list:
        blocks.append(list(range(start, start + k)))
        start += k
    edges = [(a - 1, b - 1) for a, b in c]
    if flip_first and edges:
        edges[0] = edges[0][::-1]
    return OrientedGraph.build(start, blocks, edges)


def _block_of(k_list: Sequence[int]) -> list[int]:
    out = []
    for t, k in enumerate(k_list):
        out.extend([t] * k)
    return out


def gamma_class(k_list: Sequence[int], c: OrientedChordDiagram, flip_first: bool = False) -> tuple[CanonicalClass, int]:
    """Canonical class and sign of gamma_graph, computed on the vertex multigraph."""
    block = _block_of(k_list)
    edges = [(block[a - 1], block[b - 1]) for a, b in c]
    if flip_first and edges:
        edges[0] = edges[0][::-1]
    return canonical_form(len(k_list), edges)


# ---------------------------------------------------------------------------
# Phi


def lift(word: Sequence[Monomial]) -> tuple[tuple[BasisVector, ...], tuple[int, ...]]:
    """Concatenated normal-order factors of a wedge word, with the block sizes."""
    factors: list = []
    sizes = []
    for mo in word:
        fs = mo.factors()
        factors.extend(fs)
        sizes.append(len(fs))
    return tuple(factors), tuple(sizes)


def nonzero_pairings(factors: Sequence[BasisVector]) -> Iterator[tuple[OrientedChordDiagram, int]]:
    """Hat-oriented chord diagrams with nonzero beta on the tensor, with beta's value."""
    n = len(factors)
    used = [False] * n
    pairs: list = []

    def rec():
        a = next((t for t in range(n) if not used[t]), None)
        if a is None:
            yield tuple(pairs)
            return
        used[a] = True
        for b in range(a + 1, n):
            if used[b]:
                continue
            form = symplectic_form(factors[a], factors[b])
            if not form:
                continue
            used[b] = True
            pairs.append((a + 1, b + 1, form))
            yield from rec()
            pairs.pop()
            used[b] = False
        used[a] = False

    for found in rec():
        c = tuple((a, b) for a, b, _ in found)
        value = 1
        for _, _, f in found:
            value *= f
        value *= koszul_sign(sigma_c(c), factors)
        yield c, value


def phi_tensor(t: TensorWord, k_list: Sequence[int], flip_first: bool = False) -> GraphChain:
    """Sum of beta over hat-oriented chord diagrams times the graph classes, for one tensor."""
    out = GraphChain()
    if len(t) % 2:
        return out
    for c, value in nonzero_pairings(t.factors):
        klass, sign = gamma_class(k_list, c, flip_first)
        if sign:
            out.add_term(klass, t.coefficient * value * sign)
    return out


@lru_cache(maxsize=1 << 16)
def _phi_word(word: tuple, flip_first: bool) -> tuple:
    factors, sizes = lift(word)
    return tuple(sorted(phi_tensor(TensorWord(factors), sizes, flip_first).terms.items()))


def phi(chain: CEChain, d: SuperDim | None = None, flip_first: bool = False) -> GraphChain:
    """The map from wedge chains to graph chains (sum over all chord diagrams)."""
    out = GraphChain()
    for word, coeff in chain.terms.items():
        for klass, v in _phi_word(word, flip_first):
            out.add_term(klass, coeff * v)
    return out


# ---------------------------------------------------------------------------
# Psi


def graph_chord_data(klass: CanonicalClass) -> tuple[tuple[int, ...], OrientedChordDiagram]:
    """(block sizes, oriented chords) with the class equal to gamma_graph of them."""
    g = klass.oriented()
    sizes = tuple(len(v) for v in g.vertices)
    return sizes, tuple((a + 1, b + 1) for a, b in g.edges)


def ceil_map(t: TensorWord, k_list: Sequence[int]) -> CEChain:
    """Image of a tensor under V^{2k} -> S^{k_1} V x ... x S^{k_i} V -> wedge^i."""
    if sum(k_list) != len(t):
        raise ValueError("block sizes must add up to the tensor length")
    factors, sign, start = [], 1, 0
    for k in k_list:
        s, mono = Monomial.from_factors(t.factors[start:start + k])
        if not s:
            return CEChain()
        sign *= s
        factors.append(mono)
        start += k
    s, word = normalize_word(factors)
    if not s:
        return CEChain()
    return CEChain({word: t.coefficient * sign * s})


def psi(klass: CanonicalClass, d: SuperDim) -> CEChain:
    j = klass.num_edges
    if j > d.n:
        raise ValueError(f"psi needs j <= n (j={j}, n={d.n})")
    sizes, c = graph_chord_data(klass)
    return ceil_map(u_coinvariant(c, d), sizes)


def psi_chain(chain: GraphChain, d: SuperDim) -> CEChain:
    out = CEChain()
    for klass, coeff in chain.terms.items():
        out = out + coeff * psi(klass, d)
    return out


# ---------------------------------------------------------------------------
# verification


def _report(d: SuperDim, i: int, j: int, check: str, ambient: int, failures: int, start: float) -> dict:
    return {"n": d.n, "m": d.m, "i": i, "j": j, "check": check, "ambient_dim": ambient,
            "failures": failures, "elapsed_ms": int((time.perf_counter() - start) * 1000)}


def verify_chain_map(d: SuperDim, i: int, j: int, words: Sequence | None = None,
                     inject_sign_error: bool = False, flip_first: bool = False) -> dict:
    """Check Phi(d w) = boundary(Phi w) on every ambient word (or the given words)."""
    start = time.perf_counter()
    if words is None:
        words = wedge_basis(d, i, 2 * j)
    failures = 0
    for w in words:
        chain = CEChain({w: 1})
        lhs = phi(ce_differential(chain, inject_sign_error), d, flip_first)
        rhs = boundary(phi(chain, d, flip_first))
        if lhs != rhs:
            failures += 1
    return _report(d, i, j, "chain_map", len(words), failures, start)


def verify_left_inverse(d: SuperDim, i: int, j: int, flip_first: bool = False) -> dict:
    """Psi(Phi(w)) = w in the coinvariants, for every quotient basis word."""
    start = time.perf_counter()
    basis = coinvariant_quotient(d, i, 2 * j)
    failures = 0
    for pos, w in enumerate(basis.selected_words):
        back = psi_chain(phi(CEChain({w: 1}), d, flip_first), d)
        if basis.project(back) != {pos: 1}:
            failures += 1
    return _report(d, i, j, "left_inverse", basis.dim, failures, start)


def verify_right_inverse(d: SuperDim, i: int, j: int, flip_first: bool = False) -> dict:
    """Phi(Psi(G)) = G for every graph class."""
    start = time.perf_counter()
    classes = enumerate_graphs(i, j)
    failures = sum(1 for g in classes if phi(psi(g, d), d, flip_first) != GraphChain({g: 1}))
    return _report(d, i, j, "right_inverse", len(classes), failures, start)


def duality_matrix(d: SuperDim, k: int) -> list[list[Fraction]]:
    chords = enumerate_chords(k)
    us = [u_coinvariant(hat(c), d) for c in chords]
    return [[beta(hat(c2), u) for c2 in chords] for u in us]


def verify_duality(d: SuperDim, k: int) -> dict:
    start = time.perf_counter()
    mat = duality_matrix(d, k)
    size = len(mat)
    failures = sum(1 for a in range(size) for b in range(size) if mat[a][b] != (1 if a == b else 0))
    return _report(d, 0, k, "duality", size, failures, start)
