"""Content-addressed disk cache for trimmed and untrimmed powers.

Keys hash the canonical serialization of the input with the power and
the trim flag.  Entries hold the canonical serialization of the result,
so a hit is byte-identical to recomputation.  Writers take a file lock
and rename into place, so concurrent processes never see partial files.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from pathlib import Path

from filelock import FileLock

from .core import MetaTransducer, power
from .formats import parse_transducer, serialize_transducer

ENV_VAR = "WANGTRANS_CACHE_DIR"


def cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "wangtrans"


def cache_key(t: MetaTransducer, k: int, do_trim: bool) -> str:
    h = hashlib.sha256()
    h.update(serialize_transducer(t).encode())
    h.update(f"\npower {k} trim={int(do_trim)}\n".encode())
    return h.hexdigest()


def cached_power(t: MetaTransducer, k: int, do_trim: bool, use_cache: bool = True) -> MetaTransducer:
    if not use_cache:
        return power(t, k, do_trim=do_trim)
    root = cache_dir()
    root.mkdir(parents=True, exist_ok=True)
    key = cache_key(t, k, do_trim)
    path = root / f"{key}.transducer"
    with FileLock(str(path) + ".lock"):
        if path.exists():
            return parse_transducer(path.read_text())
        result = power(t, k, do_trim=do_trim)
        fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(serialize_transducer(result))
        os.replace(tmp, path)
    return result
