"""Advisory on-disk cache of rendered results.

An entry stores the exact output bytes and exit code of a computation, keyed
by (name, n, window, mode, package version).  Unreadable entries are
recomputed and overwritten with a warning on stderr.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Callable

from . import __version__

ENV_VAR = "REAL_CHROM_CACHE"


def cache_dir(explicit: str | None) -> Path | None:
    path = explicit or os.environ.get(ENV_VAR)
    return Path(path) if path else None


def entry_key(name: str, n, window, mode: str, version: str = __version__) -> dict:
    return {"name": name, "n": n, "window": list(window), "mode": mode, "version": version}


def _path(root: Path, key: dict) -> Path:
    digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:20]
    return root / f"{key['name']}-{digest}.json"


def cached(root: Path | None, key: dict, compute: Callable[[], tuple[str, int]]) -> tuple[str, int]:
    """Return (text, exit code), from the cache when a valid entry exists."""
    if root is None:
        return compute()
    path = _path(root, key)
    if path.exists():
        try:
            blob = json.loads(path.read_text())
            if blob["key"] == key:
                return blob["text"], int(blob["code"])
            raise ValueError("key mismatch")
        except (OSError, ValueError, KeyError, TypeError) as exc:
            print(f"warning: ignoring corrupt cache entry {path}: {exc}", file=sys.stderr)
    text, code = compute()
    try:
        root.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"key": key, "text": text, "code": code}))
        tmp.replace(path)
    except OSError as exc:
        print(f"warning: could not write cache entry {path}: {exc}", file=sys.stderr)
    return text, code
