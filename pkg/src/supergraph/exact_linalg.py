"""Exact rational linear algebra over sparse matrices.

Everything here works with :class:`fractions.Fraction` (or plain ``int``)
entries; nothing is ever rounded.  Vectors are sparse ``dict`` objects
mapping an index to a nonzero scalar.

The elimination kernel reduces a list of sparse rows to reduced row
echelon form, choosing pivots with a Markowitz-style rule (shortest row,
then sparsest column, ties broken by index).  :func:`rank`,
:func:`kernel_basis` and :func:`quotient_basis` are thin wrappers around it.
For very overdetermined spanning sets :func:`quotient_basis` first selects
a candidate row basis modulo a prime and then certifies the result over
the rationals, so reported numbers are always exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

import numpy as np

Rational = Fraction

#: prime used by the modular pre-pass; small enough that float64 BLAS
#: products of residues stay exact
MODULUS = 1048573


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def format_rational(value) -> str:
    q = as_rational(value)
    return f"{q.numerator}/{q.denominator}"


def sparse_vector(values: Mapping[int, object] | Sequence) -> dict:
    """Normalise a dict or dense sequence to a sparse dict without zeros."""
    if isinstance(values, Mapping):
        items = values.items()
    else:
        items = enumerate(values)
    return {int(k): v for k, v in items if v != 0}


class SparseMatrix:
    """A rows x cols matrix with exact entries stored as ``{(r, c): value}``."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        self.rows = rows
        self.cols = cols
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r}, {c}) outside {rows}x{cols}")
            if v != 0:
                clean[(r, c)] = as_rational(v)
        self.entries = clean

    @classmethod
    def from_dense(cls, data: Sequence[Sequence], cols: int | None = None) -> "SparseMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        entries = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged dense matrix")
            for c, v in enumerate(row):
                if v != 0:
                    entries[(r, c)] = v
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]]) -> "SparseMatrix":
        entries = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                entries[(r, c)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def from_rows(cls, cols: int, rows: Sequence[Mapping[int, object]]) -> "SparseMatrix":
        entries = {}
        for r, row in enumerate(rows):
            for c, v in row.items():
                entries[(r, c)] = v
        return cls(len(rows), cols, entries)

    @classmethod
    def identity(cls, size: int) -> "SparseMatrix":
        return cls(size, size, {(k, k): 1 for k in range(size)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def row_dicts(self) -> list[dict]:
        out: list[dict] = [{} for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def column_dicts(self) -> list[dict]:
        out: list[dict] = [{} for _ in range(self.cols)]
        for (r, c), v in self.entries.items():
            out[c][r] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def apply(self, vec: Mapping[int, object]) -> dict:
        """Matrix times a sparse column vector."""
        cols = self.column_dicts()
        out: dict = {}
        for c, x in vec.items():
            for r, v in cols[c].items():
                out[r] = out.get(r, 0) + v * x
        return {r: v for r, v in out.items() if v != 0}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        return matmul(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[r, c, format_rational(v)] for (r, c), v in sorted(self.entries.items())],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, doc: Mapping) -> "SparseMatrix":
        return cls(doc["rows"], doc["cols"], {(r, c): Fraction(v) for r, c, v in doc["entries"]})


def matmul(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    b_rows = b.row_dicts()
    out: dict = {}
    for (r, k), v in a.entries.items():
        for c, w in b_rows[k].items():
            key = (r, c)
            out[key] = out.get(key, 0) + v * w
    return SparseMatrix(a.rows, b.cols, out)


# ---------------------------------------------------------------------------
# elimination kernel


@dataclass
class Echelon:
    """Reduced row echelon form of a row set.

    ``pivot_rows[c]`` is the normalised row whose pivot sits in column
    ``c``; it has entry 1 there and no entries in any other pivot column.
    """

    ncols: int
    pivot_rows: dict = field(default_factory=dict)
    order: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def free_columns(self) -> list[int]:
        return [c for c in range(self.ncols) if c not in self.pivot_rows]

    def reduce(self, vec: Mapping[int, object]) -> dict:
        """Return ``vec`` minus its component in the row space (pivot-free)."""
        out = dict(vec)
        for c in [c for c in vec if c in self.pivot_rows]:
            x = out.pop(c, 0)
            if x == 0:
                continue
            for k, v in self.pivot_rows[c].items():
                if k == c:
                    continue
                nv = out.get(k, 0) - x * v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return out


def _axpy(target: dict, scale, source: Mapping, skip: int | None = None) -> None:
    """target -= scale * source, dropping cancelled entries."""
    for k, v in source.items():
        if k == skip:
            continue
        nv = target.get(k, 0) - scale * v
        if nv:
            target[k] = nv
        else:
            del target[k]


def echelon(rows: Iterable[Mapping[int, object]], ncols: int) -> Echelon:
    """Reduce ``rows`` to reduced row echelon form with Markowitz pivoting."""
    active: dict[int, dict] = {}
    for idx, row in enumerate(rows):
        clean = {int(c): as_rational(v) for c, v in row.items() if v != 0}
        if clean:
            active[idx] = clean
    col_rows: dict[int, set] = {}
    for idx, row in active.items():
        for c in row:
            col_rows.setdefault(c, set()).add(idx)

    ech = Echelon(ncols)
    while active:
        # shortest row, then sparsest column inside it; deterministic ties
        r = min(active, key=lambda i: (len(active[i]), i))
        row = active.pop(r)
        c = min(row, key=lambda k: (len(col_rows[k]), k))
        for k in row:
            col_rows[k].discard(r)
        inv = 1 / row[c]
        row = {k: v * inv for k, v in row.items()}
        row[c] = Fraction(1)
        for s in sorted(col_rows.get(c, ())):
            other = active[s]
            x = other.pop(c)
            col_rows[c].discard(s)
            before = set(other)
            _axpy(other, x, row, skip=c)
            after = set(other)
            for k in after - before:
                col_rows.setdefault(k, set()).add(s)
            for k in before - after:
                col_rows[k].discard(s)
            if not other:
                del active[s]
        ech.pivot_rows[c] = row
        ech.order.append(c)

    # back substitution, latest pivot first
    seen: set = set()
    for c in reversed(ech.order):
        row = ech.pivot_rows[c]
        for k in [k for k in row if k in seen]:
            x = row.pop(k)
            _axpy(row, x, ech.pivot_rows[k], skip=k)
        seen.add(c)
    return ech


def _matrix_rows(m: SparseMatrix) -> list[dict]:
    return m.row_dicts()


def rank(m: SparseMatrix) -> int:
    """Rank over the rationals."""
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return 0
    return echelon(_matrix_rows(m), m.cols).rank


def kernel_basis(m: SparseMatrix) -> list[dict]:
    """Basis of the right kernel, each vector a sparse dict over columns."""
    ech = echelon(_matrix_rows(m), m.cols)
    basis = []
    for f in ech.free_columns():
        vec = {f: Fraction(1)}
        for c, row in ech.pivot_rows.items():
            v = row.get(f)
            if v:
                vec[c] = -v
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# quotients


@dataclass
class QuotientBasis:
    """Basis of ``ambient / span(spanners)`` by standard basis vectors.

    ``selected`` lists the ambient indices whose classes form the basis;
    :meth:`project` gives the coordinates of any vector's class in it.
    """

    ambient_dim: int
    selected: list
    echelon: Echelon
    position: dict = field(init=False)

    def __post_init__(self):
        self.position = {c: k for k, c in enumerate(self.selected)}

    @property
    def dim(self) -> int:
        return len(self.selected)

    @property
    def relation_rank(self) -> int:
        return self.echelon.rank

    def project_sparse(self, vec: Mapping[int, object]) -> dict:
        reduced = self.echelon.reduce(vec)
        return {self.position[c]: as_rational(v) for c, v in reduced.items() if v != 0}

    def project(self, vec: Mapping[int, object] | Sequence) -> list[Fraction]:
        if not isinstance(vec, Mapping):
            vec = sparse_vector(vec)
        out = [Fraction(0)] * self.dim
        for k, v in self.project_sparse(vec).items():
            out[k] = v
        return out

    def __iter__(self):
        # allows ``selected, projection = quotient_basis(...)``
        return iter((self.selected, self.project))


def _dense_mod(rows: Sequence[Mapping[int, int]], ncols: int, p: int) -> np.ndarray:
    out = np.zeros((len(rows), ncols), dtype=np.int64)
    for r, row in enumerate(rows):
        for c, v in row.items():
            out[r, c] = int(v) % p
    return out


def _mulmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a @ b mod p, exact via chunked float64 BLAS (residues below 2**20)."""
    acc = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    chunk = 4096  # keeps every partial sum below 2**53
    for s in range(0, a.shape[1], chunk):
        prod = a[:, s:s + chunk].astype(np.float64) @ b[s:s + chunk].astype(np.float64)
        acc = (acc + np.mod(prod, p).astype(np.int64)) % p
    return acc


def _reduce_against(block: np.ndarray, basis: np.ndarray, pivots: list, p: int) -> np.ndarray:
    if not pivots:
        return block
    return (block - _mulmod(block[:, pivots], basis, p)) % p


def independent_rows_mod_p(rows: Sequence[Mapping[int, int]], ncols: int, p: int = MODULUS,
                           batch: int = 512) -> list[int]:
    """Indices of a maximal subset of ``rows`` independent modulo ``p``.

    Rows must have integer entries.  The selection is only a heuristic for
    the rational row space; callers certify it exactly.
    """
    basis = np.zeros((0, ncols), dtype=np.int64)
    pivots: list[int] = []
    selected: list[int] = []
    for start in range(0, len(rows), batch):
        if len(pivots) == ncols:
            break
        block = _dense_mod(rows[start:start + batch], ncols, p)
        block = _reduce_against(block, basis, pivots, p)
        live = np.flatnonzero(block.any(axis=1))
        new_rows: list[np.ndarray] = []
        new_piv: list[int] = []
        for r in live:
            vec = block[r]
            for prow, pc in zip(new_rows, new_piv):
                x = vec[pc]
                if x:
                    vec = (vec - x * prow) % p
            nz = np.flatnonzero(vec)
            if nz.size == 0:
                continue
            c = int(nz[0])
            vec = (vec * pow(int(vec[c]), p - 2, p)) % p
            for k in range(len(new_rows)):
                x = new_rows[k][c]
                if x:
                    new_rows[k] = (new_rows[k] - x * vec) % p
            new_rows.append(vec)
            new_piv.append(c)
            selected.append(start + int(r))
        if new_rows:
            new = np.vstack(new_rows)
            if pivots:
                basis = (basis - _mulmod(basis[:, new_piv], new, p)) % p
            basis = np.vstack([basis, new])
            pivots.extend(new_piv)
    return selected


def _integer_rows(rows: Sequence[Mapping]) -> bool:
    for row in rows:
        for v in row.values():
            if isinstance(v, Fraction) and v.denominator != 1:
                return False
            if not isinstance(v, (int, Fraction)):
                return False
    return True


class _IntegerCertifier:
    """Checks exactly, in integer arithmetic, that rows lie in a row space."""

    def __init__(self, ech: Echelon):
        den = 1
        for row in ech.pivot_rows.values():
            for v in row.values():
                den = lcm(den, v.denominator)
        self.den = den
        self.rows = {
            c: {k: int(v * den) for k, v in row.items() if k != c}
            for c, row in ech.pivot_rows.items()
        }

    def in_span(self, vec: Mapping[int, int]) -> bool:
        acc: dict = {}
        den = self.den
        for c, v in vec.items():
            v = int(v)
            prow = self.rows.get(c)
            if prow is None:
                acc[c] = acc.get(c, 0) + v * den
            else:
                for k, w in prow.items():
                    acc[k] = acc.get(k, 0) - v * w
        return not any(acc.values())


def quotient_basis(ambient_dim: int, subspace_spanners: Sequence[Mapping[int, object] | Sequence],
                   modular: bool | None = None) -> QuotientBasis:
    """Basis of ``Q^ambient_dim / span(subspace_spanners)``.

    With ``modular`` (default: automatic for integer spanning sets much
    larger than the ambient space) a candidate row basis is chosen modulo
    :data:`MODULUS`, reduced exactly, and every spanner is then verified to
    project to zero; spanners that fail are added and the loop repeats.
    """
    rows = []
    for s in subspace_spanners:
        if isinstance(s, Mapping):
            vec = {int(k): v for k, v in s.items() if v != 0}
        else:
            if len(s) != ambient_dim:
                raise ValueError("spanner length differs from ambient dimension")
            vec = sparse_vector(s)
        for k in vec:
            if not 0 <= k < ambient_dim:
                raise IndexError(f"spanner index {k} outside ambient dimension {ambient_dim}")
        if vec:
            rows.append(vec)

    if modular is None:
        modular = len(rows) > 2 * ambient_dim + 64 and _integer_rows(rows)
    if not modular:
        ech = echelon(rows, ambient_dim)
        return QuotientBasis(ambient_dim, ech.free_columns(), ech)

    chosen = independent_rows_mod_p(rows, ambient_dim)
    while True:
        ech = echelon([rows[k] for k in chosen], ambient_dim)
        cert = _IntegerCertifier(ech)
        missing = [k for k, row in enumerate(rows) if not cert.in_span(row)]
        if not missing:
            return QuotientBasis(ambient_dim, ech.free_columns(), ech)
        chosen = sorted(set(chosen) | set(missing[:ambient_dim]))
