"""Small shared helpers: named RNG streams, atomic file writes, formatting."""

import os
import tempfile
import zlib

import numpy as np


def named_rng(seed: int, stream: str) -> np.random.Generator:
    """Deterministic generator for a named stream under one global seed.

    Each (seed, stream) pair yields an independent, reproducible stream, so
    adding a consumer never perturbs the draws of existing ones.
    """
    key = zlib.crc32(stream.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal form, stable across runs."""
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file and rename, so readers never see partial files."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-minv-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def as_points(x, dim=None) -> np.ndarray:
    """Coerce input to a (N, d) float array; scalars/1-D become single points."""
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    elif a.ndim == 1:
        a = a.reshape(1, -1) if dim is None or a.size == dim else a.reshape(-1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected points array, got shape {a.shape}")
    return a
