"""Atomic, deterministic output helpers."""

from __future__ import annotations

import os
import tempfile

from . import __version__


def header_line(lam, seed, **extra):
    """One-line provenance header shared by all written reports."""
    lam = lam if isinstance(lam, str) else f"{lam:.6g}"
    parts = [f"thnus {__version__}", f"lambda={lam}", f"seed={seed}"]
    parts += [f"{k}={v}" for k, v in sorted(extra.items())]
    return " ".join(parts)


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
