"""Append-only JSON-lines cache of computed results.

Each line is ``{"op": ..., "params": {...}, "version": ..., "value": ...}``.
The key is the operation name, the parameters serialised with sorted keys,
and the package version; the first line recorded for a key wins.
"""

from __future__ import annotations

import json
from pathlib import Path

from .. import __version__


def cache_key(op: str, params: dict, version: str = __version__) -> str:
    return json.dumps([op, params, version], sort_keys=True, separators=(",", ":"))


class ResultCache:
    def __init__(self, path: str | Path, version: str = __version__):
        self.path = Path(path)
        self.version = version
        self.entries: dict[str, object] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    k = cache_key(rec["op"], rec["params"], rec["version"])
                    self.entries.setdefault(k, rec["value"])

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, op: str, params: dict):
        return self.entries.get(cache_key(op, params, self.version))

    def put(self, op: str, params: dict, value) -> None:
        k = cache_key(op, params, self.version)
        if k in self.entries:
            return
        self.entries[k] = value
        rec = {"op": op, "params": params, "version": self.version, "value": value}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")

    def records(self):
        """(op, params, value) for every entry of the current version."""
        for k, v in self.entries.items():
            op, params, version = json.loads(k)
            if version == self.version:
                yield op, params, v

    def fetch(self, op: str, params: dict, compute):
        """Cached value, or compute, store and return it."""
        hit = self.get(op, params)
        if hit is not None:
            return hit
        value = compute()
        self.put(op, params, value)
        return value
