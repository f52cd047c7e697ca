"""Shared utilities."""

from __future__ import annotations

import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Any

import orjson

_JSON_OPTS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def json_dumps(obj: Any) -> bytes:
    """Encode to JSON bytes. Floats use shortest round-trip repr, so 64-bit values are lossless."""
    return orjson.dumps(obj, option=_JSON_OPTS)


def json_loads(data: str | bytes) -> Any:
    return orjson.loads(data)


def atomic_write_bytes(path: Path | str, data: bytes) -> Path:
    """Write to a temp file next to ``path`` and rename it into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except FileNotFoundError:
            pass
        raise
    return target


def atomic_write_json(path: Path | str, obj: Any) -> Path:
    return atomic_write_bytes(path, json_dumps(obj))


def configure_logging(verbosity: int = 0) -> None:
    """Install one stderr handler on the package logger. 0=WARNING, 1=INFO, 2+=DEBUG."""
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logger = logging.getLogger("headtraj")
    logger.setLevel(level)
    if not any(getattr(h, "_headtraj", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._headtraj = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
