"""Graphs on half-edges with their orientations and canonical forms.

A graph on ``H`` half-edges (the integers ``0..H-1``) is a partition into
vertices together with a partition into two-element edges.  An orientation
is stored as a concrete representative: an ordering of the vertices and a
direction for each edge.  Two representatives define the same orientation
when the sign of the vertex reordering times ``(-1)^(flipped edges)`` is +1.

Isomorphism classes are computed at the level of vertex multigraphs, since
permuting half-edges inside a vertex or swapping parallel edges never
changes the orientation.  :func:`canonical_form` runs colour refinement and
explores every leaf of the individualisation tree; the leaves carrying the
minimal certificate differ by automorphisms, so their orientation signs
decide whether the class is zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence


class GraphError(ValueError):
    """Raised for structures violating the graph invariants."""


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation listing ``seq`` (a rearrangement of distinct keys)."""
    index = {v: k for k, v in enumerate(sorted(seq))}
    perm = [index[v] for v in seq]
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class Graph:
    """Unoriented graph: vertex blocks and edge pairs over half-edges 0..H-1."""

    H: int
    vertices: tuple
    edges: tuple

    @classmethod
    def build(cls, H: int, vertices: Iterable[Iterable[int]], edges: Iterable[Iterable[int]]) -> "Graph":
        vs = tuple(sorted(tuple(sorted(v)) for v in vertices))
        es = tuple(sorted(tuple(sorted(e)) for e in edges))
        return cls(H, vs, es)

    def vertex_of(self) -> dict:
        return {h: k for k, block in enumerate(self.vertices) for h in block}

    def loops(self) -> list[tuple[int, int]]:
        where = self.vertex_of()
        return [e for e in self.edges if len(e) == 2 and where.get(e[0]) == where.get(e[1])]

    def validate(self) -> list[tuple[int, int]]:
        """Check every invariant; returns the loop edges."""
        return validate(self)


def validate(g: "Graph | OrientedGraph") -> list[tuple[int, int]]:
    """Raise :class:`GraphError` on a malformed graph, otherwise return its loops."""
    if isinstance(g, OrientedGraph):
        g = g.graph
    if g.H % 2:
        raise GraphError(f"odd number of half-edges ({g.H})")
    everything = set(range(g.H))
    seen: list[int] = [h for block in g.vertices for h in block]
    if len(seen) != len(set(seen)) or set(seen) != everything or any(not b for b in g.vertices):
        raise GraphError("vertices do not partition the half-edges")
    seen = [h for e in g.edges for h in e]
    if any(len(e) != 2 for e in g.edges):
        raise GraphError("every edge must contain exactly two half-edges")
    if len(seen) != len(set(seen)) or set(seen) != everything:
        raise GraphError("edges do not partition the half-edges")
    for block in g.vertices:
        if len(block) < 3:
            raise GraphError(f"vertex {list(block)} has valency {len(block)} < 3")
    return g.loops()


@dataclass(frozen=True)
class OrientedGraph:
    """A graph with an orientation representative.

    ``vertices`` lists the vertex blocks in the chosen vertex order and
    ``edges`` lists directed pairs ``(first, second)`` of half-edges.
    """

    H: int
    vertices: tuple
    edges: tuple

    @classmethod
    def build(cls, H: int, vertices: Iterable[Iterable[int]], edges: Iterable[Sequence[int]]) -> "OrientedGraph":
        return cls(H, tuple(tuple(sorted(v)) for v in vertices), tuple(tuple(e) for e in edges))

    @property
    def graph(self) -> Graph:
        return Graph.build(self.H, self.vertices, self.edges)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertex_of(self) -> dict:
        return {h: k for k, block in enumerate(self.vertices) for h in block}

    def vertex_edges(self) -> list[tuple[int, int]]:
        """Directed edges in terms of vertex positions."""
        where = self.vertex_of()
        return [(where[a], where[b]) for a, b in self.edges]

    def relabel(self, perm: Mapping[int, int] | Sequence[int]) -> "OrientedGraph":
        """Rename half-edge ``h`` to ``perm[h]`` (orientation carried along)."""
        return OrientedGraph.build(
            self.H,
            [[perm[h] for h in block] for block in self.vertices],
            [(perm[a], perm[b]) for a, b in self.edges],
        )

    def with_vertex_order(self, order: Sequence[int]) -> "OrientedGraph":
        return OrientedGraph(self.H, tuple(self.vertices[k] for k in order), self.edges)

    def flip_edge(self, k: int) -> "OrientedGraph":
        a, b = self.edges[k]
        edges = list(self.edges)
        edges[k] = (b, a)
        return OrientedGraph(self.H, self.vertices, tuple(edges))

    def to_json(self) -> dict:
        return {
            "H": self.H,
            "vertices": [list(v) for v in self.vertices],
            "edges": [list(e) for e in sorted(self.edges)],
            "vertex_order": list(range(len(self.vertices))),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "OrientedGraph":
        order = doc.get("vertex_order", range(len(doc["vertices"])))
        verts = [doc["vertices"][k] for k in order]
        return cls.build(doc["H"], verts, [tuple(e) for e in doc["edges"]])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def orientation_sign(a: OrientedGraph, b: OrientedGraph) -> int:
    """+1 if the two representatives give the same orientation, else -1."""
    if a.graph != b.graph:
        raise GraphError("orientation_sign needs identical underlying graphs")
    pos_b = {frozenset(block): k for k, block in enumerate(b.vertices)}
    sign = permutation_sign([pos_b[frozenset(block)] for block in a.vertices])
    dirs_b = {frozenset(e): e for e in b.edges}
    for e in a.edges:
        if dirs_b[frozenset(e)] != tuple(e):
            sign = -sign
    return sign


def contract_edge(g: OrientedGraph, e: Sequence[int] | int) -> tuple[OrientedGraph, int]:
    """Contract a non-loop edge.

    Returns ``(g/e, sign)`` where ``g/e`` merges the endpoints of ``e`` into
    its first vertex and ``sign`` is the sign of bringing the orientation
    into the normal form (endpoint of the edge's first half-edge, endpoint
    of its second half-edge, remaining vertices) with ``e`` as stored.
    """
    if isinstance(e, int):
        h, h2 = g.edges[e]
    else:
        target = frozenset(e)
        matches = [pair for pair in g.edges if frozenset(pair) == target]
        if not matches:
            raise GraphError(f"{tuple(e)} is not an edge")
        h, h2 = matches[0]
    where = g.vertex_of()
    v, v2 = where[h], where[h2]
    if v == v2:
        raise GraphError("cannot contract a loop")
    rest = [k for k in range(g.num_vertices) if k not in (v, v2)]
    sign = permutation_sign([v, v2] + rest)
    keep = [t for t in range(g.H) if t not in (h, h2)]
    rename = {t: k for k, t in enumerate(keep)}
    merged = [rename[t] for t in g.vertices[v] + g.vertices[v2] if t not in (h, h2)]
    verts = [merged] + [[rename[t] for t in g.vertices[k]] for k in rest]
    edges = [(rename[a], rename[b]) for a, b in g.edges if {a, b} != {h, h2}]
    return OrientedGraph.build(g.H - 2, verts, edges), sign


# ---------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True, order=True)
class CanonicalClass:
    """Canonical vertex multigraph; edges ``(u, v)`` with ``u <= v``, sorted.

    The orientation of the class is the canonical one: vertices in index
    order and every edge directed from the smaller to the larger index.
    """

    num_vertices: int
    edges: tuple

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.num_vertices, len(self.edges))

    def valencies(self) -> list[int]:
        val = [0] * self.num_vertices
        for u, v in self.edges:
            val[u] += 1
            val[v] += 1
        return val

    def has_loop(self) -> bool:
        return any(u == v for u, v in self.edges)

    def oriented(self) -> OrientedGraph:
        """Half-edge realisation: vertex ``t`` owns a consecutive block of half-edges."""
        val = self.valencies()
        start = [sum(val[:t]) for t in range(self.num_vertices)]
        used = [0] * self.num_vertices
        edges = []
        for u, v in self.edges:
            a = start[u] + used[u]
            used[u] += 1
            b = start[v] + used[v]
            used[v] += 1
            edges.append((a, b))
        verts = [list(range(start[t], start[t] + val[t])) for t in range(self.num_vertices)]
        return OrientedGraph.build(sum(val), verts, edges)

    def label(self) -> str:
        return f"G{self.num_vertices}:" + ",".join(f"{u}{v}" for u, v in self.edges)

    def to_json(self) -> dict:
        return self.oriented().to_json()


def _refine(nv: int, adj: list[dict], colors: list[int]) -> list[int]:
    """Colour refinement to an equitable ordered partition (label independent)."""
    while True:
        sigs = [
            (colors[v], tuple(sorted((colors[w], k) for w, k in adj[v].items())))
            for v in range(nv)
        ]
        ranking = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if len(ranking) == len(set(colors)):
            return new
        colors = new


def _leaves(nv: int, adj: list[dict], colors: list[int]) -> Iterator[list[int]]:
    colors = _refine(nv, adj, colors)
    if len(set(colors)) == nv:
        yield colors
        return
    counts: dict = {}
    for c in colors:
        counts[c] = counts.get(c, 0) + 1
    target = min(c for c, k in counts.items() if k > 1)
    for v in range(nv):
        if colors[v] != target:
            continue
        split = [2 * c + (0 if (w == v or c != target) else 1) for w, c in enumerate(colors)]
        yield from _leaves(nv, adj, split)


def canonical_form(nv: int, edges: Sequence[tuple[int, int]]) -> tuple[CanonicalClass, int]:
    """Canonical class and orientation sign of a vertex multigraph.

    ``edges`` are directed pairs of vertex positions; the vertex order is
    the index order.  The sign is 0 when an automorphism reverses the
    orientation (always the case in the presence of a loop).
    """
    return _canonical_form_cached(nv, tuple(map(tuple, edges)))


@lru_cache(maxsize=1 << 18)
def _canonical_form_cached(nv: int, edges: tuple) -> tuple[CanonicalClass, int]:
    adj: list[dict] = [dict() for _ in range(nv)]
    loops = [0] * nv
    for u, v in edges:
        if u == v:
            loops[u] += 1
        else:
            adj[u][v] = adj[u].get(v, 0) + 1
            adj[v][u] = adj[v].get(u, 0) + 1
    # loops are encoded as a self-entry so refinement sees them
    for v in range(nv):
        if loops[v]:
            adj[v][v] = loops[v]
    degree = [sum(adj[v].values()) + loops[v] for v in range(nv)]
    init = sorted(set(zip(degree, loops)))
    colors = [init.index((degree[v], loops[v])) for v in range(nv)]

    best = None
    signs = set()
    for leaf in _leaves(nv, adj, colors):
        rank = {c: r for r, c in enumerate(sorted(leaf))}
        pos = [rank[c] for c in leaf]
        cert = tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in edges))
        order = sorted(range(nv), key=lambda v: pos[v])
        flips = sum(1 for u, v in edges if pos[u] > pos[v])
        sign = permutation_sign(order) * (-1 if flips & 1 else 1)
        if best is None or cert < best:
            best = cert
            signs = {sign}
        elif cert == best:
            signs.add(sign)
    if best is None:
        best = ()
        signs = {1}
    cls = CanonicalClass(nv, best)
    if any(loops) or len(signs) > 1:
        return cls, 0
    return cls, signs.pop()


def canonicalize(g: OrientedGraph) -> tuple[CanonicalClass, int]:
    """Canonical class of ``g`` and the sign relating ``g`` to it."""
    validate(g)
    return canonical_form(g.num_vertices, g.vertex_edges())


def is_zero_class(g: OrientedGraph) -> bool:
    return canonicalize(g)[1] == 0


# ---------------------------------------------------------------------------
# enumeration


def valency_partitions(total: int, parts: int, least: int = 3) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples of ``parts`` integers >= ``least`` summing to ``total``."""
    def rec(remaining, count, cap):
        if count == 0:
            if remaining == 0:
                yield ()
            return
        hi = min(cap, remaining - least * (count - 1))
        for first in range(hi, least - 1, -1):
            for rest in rec(remaining - first, count - 1, first):
                yield (first,) + rest
    yield from rec(total, parts, total)


def _block_matchings(valency: Sequence[int]) -> Iterator[tuple]:
    """Loop-free perfect matchings of half-edges, up to relabelling inside blocks.

    The first free half-edge is paired with the first free half-edge of a
    later-or-other block; yields tuples of block pairs.
    """
    free = list(valency)
    nv = len(free)
    chosen: list = []

    def rec():
        u = next((k for k in range(nv) if free[k]), None)
        if u is None:
            yield tuple(chosen)
            return
        free[u] -= 1
        for v in range(nv):
            if v != u and free[v]:
                free[v] -= 1
                chosen.append((u, v))
                yield from rec()
                chosen.pop()
                free[v] += 1
        free[u] += 1

    yield from rec()


@lru_cache(maxsize=None)
def enumerate_graphs(i: int, j: int) -> tuple[CanonicalClass, ...]:
    """Nonzero isomorphism classes with ``i`` vertices, ``j`` edges, valency >= 3."""
    if i == 0:
        return (CanonicalClass(0, ()),) if j == 0 else ()
    if 2 * j < 3 * i:
        return ()
    found = set()
    for valency in valency_partitions(2 * j, i):
        seen = set()
        for pairs in _block_matchings(valency):
            key = tuple(sorted(pairs))
            if key in seen:
                continue
            seen.add(key)
            cls, sign = canonical_form(i, key)
            if sign:
                found.add(cls)
    return tuple(sorted(found))


def theta_graph() -> OrientedGraph:
    return OrientedGraph.build(6, [[0, 1, 2], [3, 4, 5]], [(0, 3), (1, 4), (2, 5)])
