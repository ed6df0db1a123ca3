"""Deterministic persistence of JSON documents and CSV tables."""
from __future__ import annotations

import json
import math
import os
import sys
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Generator, TextIO

import numpy as np

from ..errors import ParseError

STDOUT = "-"


def plain(value: Any) -> Any:
    """Convert numpy scalars, arrays, complex numbers and tuples to JSON-ready values.

    Complex numbers become {"re", "im"} pairs and non-finite floats become null.
    """

    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [plain(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": plain(float(value.real)), "im": plain(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


def dumps_document(document: Dict[str, Any]) -> str:
    """Sorted keys and shortest round-trip floats, so equal inputs give equal bytes."""

    return json.dumps(plain(document), sort_keys=True, indent=2, allow_nan=False) + "\n"


@contextmanager
def output_stream(path: str | Path | None) -> Generator[TextIO, None, None]:
    """Write to ``path`` atomically, or to standard output for None and "-"."""

    if path is None or str(path) == STDOUT:
        yield sys.stdout
        sys.stdout.flush()
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            yield stream
        os.replace(temp_name, target)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise


def save_text(text: str, path: str | Path | None) -> None:
    with output_stream(path) as stream:
        stream.write(text)


def save_document(document: Dict[str, Any], path: str | Path | None) -> None:
    save_text(dumps_document(document), path)


def load_document(path: str | Path) -> Dict[str, Any]:
    """Read a JSON object; a missing file raises FileNotFoundError, bad JSON ParseError."""

    text = Path(path).read_text(encoding="utf-8")
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno}).") from exc
    if not isinstance(document, dict):
        raise ParseError(f"{path}: expected a JSON object.")
    return document
