"""CSV / JSON output with atomic replacement."""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

MANIFEST_SCHEMA_VERSION = 1


def fmt(v) -> str:
    # repr round-trips floats exactly
    if isinstance(v, float):
        return repr(v)
    return str(v)


def atomic_write_text(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def write_manifest(path, command: str, config: dict, outputs: Sequence[str], version: str,
                   conventions: dict | None = None) -> Path:
    doc = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "tool": "cqsm",
        "version": version,
        "command": command,
        "config": config,
        "master_seed": config.get("seed"),
        "conventions": conventions or {},
        "outputs": list(outputs),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema_version") != MANIFEST_SCHEMA_VERSION:
        raise ValueError(f"unsupported manifest schema {doc.get('schema_version')!r}")
    return doc
