"""Content-addressed JSON cache with atomic writes."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from pathlib import Path
from typing import Callable

from . import __version__

log = logging.getLogger(__name__)


def canonical_bytes(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def cache_key(command: str, params: dict, version: str = __version__) -> str:
    blob = canonical_bytes({"command": command, "params": params, "version": version})
    return hashlib.sha256(blob).hexdigest()


def _read(path: Path):
    try:
        doc = json.loads(path.read_text())
        return doc["payload"]
    except (OSError, ValueError, KeyError, TypeError):
        return None


def _write_atomic(path: Path, key: str, payload) -> None:
    entry = {"key": key, "created_at": time.time(), "payload": payload}
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(entry, fh, sort_keys=True, separators=(",", ":"))
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def cache_get_or_compute(key: str, producer: Callable[[], object], cache_dir: str | os.PathLike | None):
    """Return the cached payload for ``key`` or compute, persist and return it.

    Unreadable entries are recomputed and overwritten; an unwritable cache
    directory only produces a warning.
    """
    if cache_dir is None:
        return producer()
    path = Path(cache_dir) / f"{key}.json"
    if path.exists():
        payload = _read(path)
        if payload is not None:
            return payload
        log.warning("cache entry %s is unreadable; recomputing", path.name)
    payload = producer()
    # normalise through JSON so hits and misses return identical values
    payload = json.loads(canonical_bytes(payload))
    try:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        _write_atomic(path, key, payload)
    except OSError as exc:
        log.warning("cannot write cache entry in %s (%s); continuing without cache", cache_dir, exc)
    return payload
