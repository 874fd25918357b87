"""Run configuration stored as a simple ``key = value`` text file."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields

CACHE_ENV = "KPDIX_CACHE_DIR"


@dataclass
class Config:
    dmax_small: int = 3  # default window when dim L <= large_threshold
    dmax_large: int = 2
    large_threshold: int = 10
    max_slack: int = 2
    sample_seed: int = 0
    sample_height: int = 3
    axiom_pairs: int = 20
    cache_dir: str = ""
    workers: int = 1

    def default_dmax(self, dim_L: int) -> int:
        return self.dmax_small if dim_L <= self.large_threshold else self.dmax_large

    def resolved_cache_dir(self) -> str:
        return os.environ.get(CACHE_ENV) or self.cache_dir or ""

    def dumps(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in asdict(self).items())

    @classmethod
    def loads(cls, text: str) -> "Config":
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            values[key] = int(val) if types[key] in (int, "int") else val
        return cls(**values)

    @classmethod
    def load(cls, path: str | None) -> "Config":
        if not path:
            return cls()
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())
