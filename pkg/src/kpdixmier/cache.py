"""On-disk cache of per-degree results.

One JSON file per (spec, module, degree, parameters).  The file name holds a
hash of the key together with the model's convention metadata and the
format version, so a change of either makes old entries unreachable.
Writers take a per-key file lock and replace the file atomically; readers
never see a partial file.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

from filelock import FileLock

FORMAT_VERSION = 1


class ResultCache:
    def __init__(self, directory: str | None):
        self.directory = directory or None
        self.hits = 0
        self.misses = 0

    def _path(self, spec_label: str, module: str, degree, params: dict, conventions: dict) -> str:
        key = json.dumps({"version": FORMAT_VERSION, "spec": spec_label, "module": module,
                          "degree": str(degree), "params": params, "conventions": conventions},
                         sort_keys=True)
        digest = hashlib.sha256(key.encode()).hexdigest()[:20]
        safe = "".join(ch if ch.isalnum() else "_" for ch in spec_label)
        return os.path.join(self.directory, safe, f"{module}-{degree}-{digest}.json")

    def get_or_compute(self, spec_label, module, degree, params, conventions, compute):
        """Return the cached JSON value, computing and storing it on a miss."""
        if not self.directory:
            self.misses += 1
            return compute()
        path = self._path(spec_label, module, degree, params, conventions)
        value = self._read(path)
        if value is not None:
            self.hits += 1
            return value
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with FileLock(path + ".lock"):
            value = self._read(path)
            if value is not None:
                self.hits += 1
                return value
            self.misses += 1
            value = compute()
            fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump({"version": FORMAT_VERSION, "value": value}, fh, sort_keys=True)
            os.replace(tmp, path)
        return value

    @staticmethod
    def _read(path):
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError):
            return None
        if data.get("version") != FORMAT_VERSION:
            return None
        return data["value"]
