"""On-disk cache of built density matrices.

One ``.npz`` file per (builder, n) holding the numerator grid and a JSON
metadata record: format version, builder, n, denominator and a SHA-256 content
checksum.  Files that fail to load or verify are rebuilt and overwritten.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path

import numpy as np

from .rho import ExactDensityMatrix, build
from .spin_core import DEFAULT_MAX_N

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
CACHE_ENV_VAR = "FERMISPIN_CACHE_DIR"


def default_cache_dir():
    value = os.environ.get(CACHE_ENV_VAR)
    return Path(value) if value else None


def write_matrix(path, rho, builder):
    """Atomically write ``rho`` to ``path`` (temp file in the same directory, then rename)."""
    path = Path(path)
    meta = {
        "format_version": FORMAT_VERSION,
        "builder": builder,
        "n": rho.n,
        "denom": str(rho.denom),
        "checksum": rho.checksum(),
    }
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            np.savez(fh, numerators=rho.numerators, meta=np.array(json.dumps(meta, sort_keys=True)))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_matrix(path, builder=None, n=None):
    """Load and verify a cache file; raises ``ValueError`` on any mismatch."""
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        numerators = np.array(data["numerators"], dtype=np.int64)
    if meta.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported cache format {meta.get('format_version')!r}")
    if builder is not None and meta["builder"] != builder:
        raise ValueError(f"cache file holds builder {meta['builder']!r}, not {builder!r}")
    if n is not None and meta["n"] != n:
        raise ValueError(f"cache file holds n={meta['n']}, not {n}")
    rho = ExactDensityMatrix(int(meta["n"]), numerators, int(meta["denom"]))
    if rho.checksum() != meta["checksum"]:
        raise ValueError("cache checksum mismatch")
    return rho


class MatrixCache:
    """Serve ``build(builder, n)`` from a directory, falling back to a fresh build.

    ``directory=None`` disables caching.  ``last_status`` records what the most
    recent call did: ``"hit"``, ``"miss"``, ``"rebuilt"`` or ``"disabled"``.
    """

    def __init__(self, directory=None, max_n=DEFAULT_MAX_N):
        self.directory = Path(directory) if directory is not None else None
        self.max_n = max_n
        self.last_status = None
        if self.directory is not None:
            try:
                self.directory.mkdir(parents=True, exist_ok=True)
                probe = tempfile.NamedTemporaryFile(dir=self.directory, delete=True)
                probe.close()
            except OSError as exc:
                log.warning("cache directory %s is not writable (%s); caching disabled", self.directory, exc)
                self.directory = None

    def path_for(self, builder, n):
        return self.directory / f"{builder}-n{n}.npz"

    def get_or_build(self, builder, n):
        if self.directory is None:
            self.last_status = "disabled"
            return build(builder, n, max_n=self.max_n)
        path = self.path_for(builder, n)
        status = "miss"
        if path.exists():
            try:
                rho = read_matrix(path, builder, n)
            except (OSError, ValueError, KeyError) as exc:
                log.warning("discarding corrupt cache file %s: %s", path, exc)
                status = "rebuilt"
            else:
                self.last_status = "hit"
                return rho
        rho = build(builder, n, max_n=self.max_n)
        try:
            write_matrix(path, rho, builder)
        except OSError as exc:
            log.warning("could not write cache file %s: %s", path, exc)
        self.last_status = status
        return rho


def cache_get_or_build(builder, n, cache_dir=None, max_n=DEFAULT_MAX_N):
    return MatrixCache(cache_dir, max_n=max_n).get_or_build(builder, n)
