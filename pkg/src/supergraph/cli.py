"""Command-line workbench for the graph and CE computations and their cross-checks."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

from . import __version__
from .cache import cache_get_or_compute, cache_key
from .ce_complex import (
    coinvariant_quotient,
    relative_betti,
    relative_differential_matrix,
    relative_rank,
)
from .chord_iso import (
    enumerate_chords,
    verify_chain_map,
    verify_duality,
    verify_left_inverse,
    verify_right_inverse,
)
from .exact_linalg import matmul, rank
from .graph_complex import bidegree_report, boundary_matrix, graph_betti
from .graph_core import enumerate_graphs
from .super_poly import SuperDim

log = logging.getLogger("supergraph")

GRAPH_J_LIMIT = 6
TWO_SIDED_LIMITS = {"n": 3, "m": 2}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# individual checks (each returns a report dict with a "failures" count)


def check_boundary_squared(i: int, j: int) -> dict:
    start = time.perf_counter()
    failures = 0
    if i >= 2 and j >= 2:
        failures = matmul(boundary_matrix(i - 1, j - 1), boundary_matrix(i, j)).nnz
    return {"i": i, "j": j, "check": "boundary_squared", "ambient_dim": len(enumerate_graphs(i, j)),
            "failures": failures, "elapsed_ms": _ms(start)}


def check_ce_squared(d: SuperDim, i: int, order: int, inject: bool = False) -> dict:
    start = time.perf_counter()
    failures = 0
    if i >= 2 and order - 2 >= 3 * (i - 1):
        first = relative_differential_matrix(d, i, order, inject)
        second = relative_differential_matrix(d, i - 1, order - 2, inject)
        failures = matmul(second, first).nnz
    return {"n": d.n, "m": d.m, "i": i, "order": order, "check": "ce_squared",
            "ambient_dim": coinvariant_quotient(d, i, order).dim, "failures": failures,
            "elapsed_ms": _ms(start)}


def check_betti(d: SuperDim, i: int, j: int, inject: bool = False) -> dict:
    start = time.perf_counter()
    g = graph_betti(i, j)
    c = relative_betti(d, i, 2 * j, inject)
    return {"n": d.n, "m": d.m, "i": i, "j": j, "check": "betti", "graph_betti": g, "ce_betti": c,
            "failures": int(g != c), "elapsed_ms": _ms(start)}


def _ms(start: float) -> int:
    return int((time.perf_counter() - start) * 1000)


def _bidegree_checks(args: tuple) -> list[dict]:
    n, m, i, j, inject = args
    d = SuperDim(n, m)
    pg, edge = inject == "pg", inject == "edge"
    out = [check_boundary_squared(i, j), check_ce_squared(d, i, 2 * j, pg),
           verify_chain_map(d, i, j, inject_sign_error=pg, flip_first=edge)]
    if j <= n:
        out.append(verify_left_inverse(d, i, j, flip_first=edge))
        out.append(verify_right_inverse(d, i, j, flip_first=edge))
        out.append(check_betti(d, i, j, pg))
    return out


def verify_all(d: SuperDim, max_j: int, inject: str | None = None, threads: int = 1) -> list[dict]:
    """Every check at every bidegree with j <= max_j; deterministic order."""
    reports = [verify_duality(d, k) for k in range(1, min(max_j, d.n) + 1)]
    jobs = [(d.n, d.m, i, j, inject) for j in range(1, max_j + 1) for i in range(1, j + 1)]
    for chunk in _map(_bidegree_checks, jobs, threads):
        reports.extend(chunk)
    return reports


def _map(fn: Callable, items: Sequence, threads: int) -> Iterable:
    if threads <= 1 or len(items) <= 1:
        return map(fn, items)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands (each returns a JSON-able payload)


def cmd_enumerate(a) -> dict:
    classes = enumerate_graphs(a.vertices, a.edges)
    return {"i": a.vertices, "j": a.edges, "count": len(classes),
            "classes": [{"label": k.label(), "graph": k.to_json()} for k in classes]}


def cmd_boundary(a) -> dict:
    m = boundary_matrix(a.vertices, a.edges)
    return {"i": a.vertices, "j": a.edges,
            "source": [k.label() for k in enumerate_graphs(a.vertices, a.edges)],
            "target": [k.label() for k in enumerate_graphs(a.vertices - 1, a.edges - 1)] if a.vertices else [],
            "rank": rank(m) if m.rows and m.cols else 0,
            "matrix": m.to_json()}


def cmd_homology(a) -> list[dict]:
    if a.max_j is not None:
        return [bidegree_report(i, j) for j in range(1, a.max_j + 1) for i in range(1, j + 1)]
    return [bidegree_report(a.vertices, a.edges)]


def cmd_ce_basis(a) -> dict:
    return coinvariant_quotient(SuperDim(a.n, a.m), a.vertices, 2 * a.edges).to_json()


def cmd_ce_matrix(a) -> dict:
    d = SuperDim(a.n, a.m)
    m = relative_differential_matrix(d, a.vertices, 2 * a.edges)
    return {"n": a.n, "m": a.m, "i": a.vertices, "j": a.edges, "rank": relative_rank(d, a.vertices, 2 * a.edges),
            "betti": relative_betti(d, a.vertices, 2 * a.edges), "matrix": m.to_json()}


def cmd_chords(a) -> dict:
    chords = enumerate_chords(a.edges)
    return {"k": a.edges, "count": len(chords), "chords": [[list(p) for p in c] for c in chords]}


def cmd_verify(a) -> list[dict]:
    d = SuperDim(a.n, a.m)
    max_j = a.max_j if a.max_j is not None else a.edges
    if max_j is None:
        raise UsageError("verify needs --max-j or --edges")
    if max_j > d.n and a.what in ("all", "inverses", "betti"):
        log.warning("inverse and Betti checks need j <= n; skipping them for j > %d", d.n)
    inject = a.inject_sign_error
    pg, edge = inject == "pg", inject == "edge"
    if a.what == "all":
        return verify_all(d, max_j, inject, a.threads)
    bidegrees = [(i, j) for j in range(1, max_j + 1) for i in range(1, j + 1)]
    if a.what == "duality":
        return [verify_duality(d, k) for k in range(1, min(max_j, d.n) + 1)]
    if a.what == "boundary-squared":
        return [check_boundary_squared(i, j) for i, j in bidegrees]
    if a.what == "ce-squared":
        return [check_ce_squared(d, i, 2 * j, pg) for i, j in bidegrees]
    if a.what == "chain-map":
        return [verify_chain_map(d, i, j, inject_sign_error=pg, flip_first=edge) for i, j in bidegrees]
    stable = [(i, j) for i, j in bidegrees if j <= d.n]
    if a.what == "inverses":
        return ([verify_left_inverse(d, i, j, flip_first=edge) for i, j in stable]
                + [verify_right_inverse(d, i, j, flip_first=edge) for i, j in stable])
    return [check_betti(d, i, j, pg) for i, j in stable]


COMMANDS = {
    "enumerate": cmd_enumerate,
    "boundary": cmd_boundary,
    "homology": cmd_homology,
    "ce-basis": cmd_ce_basis,
    "ce-matrix": cmd_ce_matrix,
    "chords": cmd_chords,
    "verify": cmd_verify,
}

VERIFY_TARGETS = ["all", "duality", "boundary-squared", "ce-squared", "chain-map", "inverses", "betti"]


# ---------------------------------------------------------------------------
# parsing and output


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="even half-dimension (default 3)")
    common.add_argument("--m", type=int, default=1, help="odd dimension (default 1)")
    common.add_argument("-i", "--vertices", type=int, help="vertex count / wedge length")
    common.add_argument("-j", "--edges", type=int, help="edge count (order 2j on the algebra side)")
    common.add_argument("--max-j", type=int, help="run every bidegree with j up to this bound")
    common.add_argument("--cache-dir", default=os.environ.get("GH_CACHE_DIR"),
                        help="result cache directory (default: $GH_CACHE_DIR)")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--threads", type=int, default=1, help="worker processes over bidegrees")
    common.add_argument("--inject-sign-error", nargs="?", const="pg", choices=["pg", "edge"],
                        help="negative control: corrupt the differential sign (pg) or a chord direction (edge)")

    parser = argparse.ArgumentParser(prog="supergraph", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp.add_argument("what", nargs="?", choices=VERIFY_TARGETS, default="all")
    return parser


def _validate(a) -> None:
    if a.n < 0 or a.m < 0:
        raise UsageError("--n and --m must be non-negative")
    needs_ij = {"enumerate", "boundary", "ce-basis", "ce-matrix"}
    if a.command in needs_ij and (a.vertices is None or a.edges is None):
        raise UsageError(f"{a.command} needs --vertices and --edges")
    if a.command == "homology" and a.max_j is None and (a.vertices is None or a.edges is None):
        raise UsageError("homology needs --vertices and --edges, or --max-j")
    if a.command == "chords" and (a.edges is None or a.edges < 1):
        raise UsageError("chords needs --edges k with k >= 1")
    for name in ("vertices", "edges", "max_j"):
        value = getattr(a, name)
        if value is not None and value < 0:
            raise UsageError(f"--{name.replace('_', '-')} must be non-negative")
    if a.threads < 1:
        raise UsageError("--threads must be positive")
    j = a.max_j if a.max_j is not None else a.edges
    if j is not None:
        if a.command in ("enumerate", "boundary", "homology", "chords") and j > GRAPH_J_LIMIT:
            log.warning("j=%d exceeds the desk-scale bound %d; runtime grows quickly", j, GRAPH_J_LIMIT)
        two_sided = a.command in ("ce-basis", "ce-matrix", "verify")
        if two_sided and (a.n > TWO_SIDED_LIMITS["n"] or a.m > TWO_SIDED_LIMITS["m"]):
            log.warning("(n, m) = (%d, %d) is beyond the default bounds; runtime grows quickly", a.n, a.m)


def _params(a) -> dict:
    keys = ("n", "m", "vertices", "edges", "max_j", "inject_sign_error", "what")
    return {k: getattr(a, k, None) for k in keys}


def _scalar_rows(payload) -> list[dict]:
    rows = payload if isinstance(payload, list) else [payload]
    out = []
    for row in rows:
        out.append({k: v for k, v in row.items() if isinstance(v, (int, float, str, bool)) or v is None})
    return out


def render(payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True)
    rows = _scalar_rows(payload)
    if fmt == "csv":
        fields: list = []
        for row in rows:
            fields.extend(k for k in row if k not in fields)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue().rstrip("\n")
    return "\n".join("  ".join(f"{k}={v}" for k, v in row.items()) for row in rows)


def _failed(command: str, payload) -> bool:
    return command == "verify" and any(r.get("failures") for r in payload)


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = logging.StreamHandler(err)
    handler.setFormatter(logging.Formatter("warning: %(message)s"))
    log.handlers[:] = [handler]
    logging.getLogger("supergraph.cache").handlers[:] = [handler]
    try:
        _validate(a)
        producer = lambda: COMMANDS[a.command](a)  # noqa: E731
        if a.inject_sign_error:
            payload = producer()  # negative controls are never cached
        else:
            payload = cache_get_or_compute(cache_key(a.command, _params(a)), producer, a.cache_dir)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    print(render(payload, a.format), file=out)
    if _failed(a.command, payload):
        failed = sorted({r["check"] for r in payload if r.get("failures")})
        print(f"FAILED checks: {', '.join(failed)}", file=err)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
