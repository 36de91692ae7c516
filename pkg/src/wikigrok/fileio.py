"""Shared file plumbing: atomic writes, deterministic CSV/TSV, timestamps, config.

Every artifact the pipeline writes goes through :func:`atomic_write_text` (temp file
in the target directory + rename) so a crashed run never leaves a half-written file,
and re-running a stage on unchanged inputs reproduces byte-identical output.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence


class DataError(ValueError):
    """Invalid or missing input data (CLI exit code 2)."""


class UsageError(ValueError):
    """Bad invocation: unknown flags, missing arguments (CLI exit code 1)."""


class TransportError(RuntimeError):
    """Network-level failure talking to an external endpoint (CLI exit code 3)."""


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write ``text`` to ``path`` atomically (temp file + rename, same directory)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt_value(value: object) -> str:
    """Render one cell deterministically.

    Floats use ``%.10g`` (stable, locale-free); None becomes the empty string;
    bools become 1/0; everything else is str().
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".10g")
    return str(value)


def render_table(header: Sequence[str], rows: Iterable[Sequence[object]],
                 delimiter: str = ",") -> str:
    """Render a header + rows into CSV/TSV text with LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([fmt_value(cell) for cell in row])
    return buf.getvalue()


def write_table(path: str | Path, header: Sequence[str],
                rows: Iterable[Sequence[object]], delimiter: str = ",") -> None:
    """Atomically write a delimited table with a header row (UTF-8, LF)."""
    atomic_write_text(path, render_table(header, rows, delimiter=delimiter))


def read_table(path: str | Path, delimiter: str = ",") -> tuple[list[str], list[list[str]]]:
    """Read a delimited table, returning (header, rows). Raises DataError if absent."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing input file: {path}")
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        return header, [row for row in reader]


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601-ish timestamp into a naive UTC datetime.

    Accepts ``YYYY-MM-DD``, ``YYYY-MM-DD HH:MM:SS``, ``YYYY-MM-DDTHH:MM:SS``,
    optional trailing ``Z`` or numeric UTC offset. Aware timestamps are converted
    to UTC and the tzinfo dropped, so all comparisons happen on one clock.
    """
    cleaned = text.strip()
    if not cleaned:
        raise ValueError("empty timestamp")
    if cleaned.endswith("Z"):
        cleaned = cleaned[:-1] + "+00:00"
    parsed = datetime.fromisoformat(cleaned)
    if parsed.tzinfo is not None:
        parsed = parsed.astimezone(timezone.utc).replace(tzinfo=None)
    return parsed


def load_config(path: str | Path) -> dict[str, str]:
    """Load a flat ``key = value`` config file.

    Blank lines and ``#`` comments are ignored; keys are case-sensitive; values
    keep internal whitespace. Later duplicate keys override earlier ones.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing config file: {path}")
    config: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return config
