"""The graph complex: chains of canonical classes and the contraction differential."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact_linalg import SparseMatrix, as_rational, format_rational, rank
from .graph_core import (
    CanonicalClass,
    OrientedGraph,
    canonicalize,
    contract_edge,
    enumerate_graphs,
)


@dataclass
class GraphChain:
    """Exact linear combination of nonzero canonical classes."""

    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: as_rational(v) for k, v in self.terms.items() if v != 0}

    @classmethod
    def of(cls, item: CanonicalClass | OrientedGraph, coeff=1) -> "GraphChain":
        """Chain of a single graph, re-expressed in its canonical orientation."""
        if isinstance(item, CanonicalClass):
            return cls({item: coeff})
        klass, sign = canonicalize(item)
        return cls({klass: sign * as_rational(coeff)} if sign else {})

    def add_term(self, klass: CanonicalClass, coeff) -> None:
        value = self.terms.get(klass, Fraction(0)) + coeff
        if value:
            self.terms[klass] = value
        else:
            self.terms.pop(klass, None)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "GraphChain") -> "GraphChain":
        out = GraphChain(dict(self.terms))
        for k, v in other.terms.items():
            out.add_term(k, v)
        return out

    def __neg__(self) -> "GraphChain":
        return GraphChain({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "GraphChain") -> "GraphChain":
        return self + (-other)

    def __rmul__(self, scalar) -> "GraphChain":
        return GraphChain({k: v * scalar for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, GraphChain):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def to_json(self) -> list:
        return [[k.label(), format_rational(v)] for k, v in sorted(self.terms.items())]


def contractions(g: OrientedGraph) -> GraphChain:
    """Signed sum of all non-loop edge contractions of one representative."""
    out = GraphChain()
    where = g.vertex_of()
    for k, (a, b) in enumerate(g.edges):
        if where[a] == where[b]:
            continue
        contracted, sign = contract_edge(g, k)
        klass, s = canonicalize(contracted)
        if s:
            out.add_term(klass, sign * s)
    return out


@lru_cache(maxsize=None)
def _class_boundary(klass: CanonicalClass) -> tuple:
    return tuple(sorted(contractions(klass.oriented()).terms.items()))


def boundary(chain: GraphChain) -> GraphChain:
    out = GraphChain()
    for klass, coeff in chain.terms.items():
        for target, c in _class_boundary(klass):
            out.add_term(target, coeff * c)
    return out


def boundary_matrix(i: int, j: int) -> SparseMatrix:
    """Matrix of the differential from bidegree (i, j) to (i-1, j-1)."""
    source = enumerate_graphs(i, j)
    target = enumerate_graphs(i - 1, j - 1) if i >= 1 and j >= 1 else ()
    index = {k: r for r, k in enumerate(target)}
    entries = {}
    for col, klass in enumerate(source):
        for t, c in _class_boundary(klass):
            entries[(index[t], col)] = c
    return SparseMatrix(len(target), len(source), entries)


def boundary_rank(i: int, j: int) -> int:
    if not enumerate_graphs(i, j) or i < 1 or j < 1:
        return 0
    return rank(boundary_matrix(i, j))


def graph_betti(i: int, j: int) -> int:
    """dim ker(d: G_ij -> G_{i-1,j-1}) - rank(d: G_{i+1,j+1} -> G_ij)."""
    dim = len(enumerate_graphs(i, j))
    return dim - boundary_rank(i, j) - boundary_rank(i + 1, j + 1)


def bidegree_report(i: int, j: int) -> dict:
    dim = len(enumerate_graphs(i, j))
    rank_d = boundary_rank(i, j)
    return {"i": i, "j": j, "dim": dim, "rank_d": rank_d,
            "betti": dim - rank_d - boundary_rank(i + 1, j + 1)}

