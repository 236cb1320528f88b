"""On-disk cache of exact series results.

Entries are JSON files named by the SHA-256 of (normalized expression,
operation, order, extra parameters).  The payload is the series text
format.  Loading re-runs a caller-supplied check; entries failing it are
discarded and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from .series import PowerSeries

__all__ = ["SeriesCache", "default_cache_dir", "cache_key"]

SCHEMA = 1


def default_cache_dir() -> Path:
    env = os.environ.get("ITLOG_CACHE_DIR")
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "itlog"


def cache_key(expression: str, operation: str, order: int, extra=None) -> str:
    material = json.dumps([expression, operation, int(order), extra], sort_keys=True, default=str)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


class SeriesCache:
    def __init__(self, directory: str | os.PathLike | None = None, enabled: bool = True):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def get(self, key: str, check: Callable[[PowerSeries], bool] | None = None) -> PowerSeries | None:
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
            if doc.get("schema") != SCHEMA or doc.get("key") != key:
                raise ValueError("stale entry")
            s = PowerSeries.from_text(doc["payload"])
            if check is not None and not check(s):
                raise ValueError("entry failed re-verification")
        except FileNotFoundError:
            self.misses += 1
            return None
        except (OSError, ValueError, KeyError, TypeError):
            self.misses += 1
            try:
                path.unlink()
            except OSError:
                pass
            return None
        self.hits += 1
        return s

    def put(self, key: str, series: PowerSeries, meta: dict | None = None) -> None:
        if not self.enabled:
            return
        doc = {
            "schema": SCHEMA,
            "key": key,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "meta": meta or {},
            "payload": series.to_text(),
        }
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                json.dump(doc, fh)
            os.replace(tmp, self._path(key))
        except OSError:
            # a read-only or missing cache directory only costs recomputation
            pass

    def fetch(self, key: str, compute: Callable[[], PowerSeries], check=None, meta=None) -> PowerSeries:
        s = self.get(key, check)
        if s is None:
            s = compute()
            self.put(key, s, meta)
        return s
