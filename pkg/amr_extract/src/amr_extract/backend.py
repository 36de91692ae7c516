"""Pluggable parsing backends.

A backend turns one sentence into a meaning graph and lists the
predicate-argument frames found in it. The production backend would wrap a
neural AMR parser; it is deliberately not a dependency of this package.
What ships is StubParser, a table-driven stand-in that makes the whole
pipeline deterministic for tests and fixtures.
"""

import importlib.resources
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence


class ParserError(Exception):
    """A backend failed on one sentence; callers skip the sentence and tally."""


@dataclass(frozen=True)
class Mention:
    """An argument mention as the parser saw it: surface text plus category."""

    text: str
    category: str


@dataclass(frozen=True)
class ArgumentFrame:
    """One predicate with its agent (ARG0) and patient (ARG1) mentions.

    Either side may be None when the parser found no filler for that role;
    such frames are never emitted downstream.
    """

    predicate: str
    agent: Optional[Mention]
    patient: Optional[Mention]


class ParserBackend(Protocol):
    def parse(self, sentence: str) -> object:
        """Parse one sentence into an opaque meaning graph."""

    def argument_frames(self, graph: object) -> list[ArgumentFrame]:
        """List the agent-patient frames present in a parsed graph."""


# A table cell holding this marker means "role unfilled".
ABSENT = "-"
# A table row whose predicate is this marker simulates a parser crash.
FAIL_MARKER = "!parse-error"


class StubParser:
    """Deterministic lookup-table backend.

    ``frames`` maps exact sentence text to the frames its "parse" contains;
    sentences absent from the table parse cleanly to zero frames. Sentences
    in ``failures`` raise ParserError, exercising the skip-and-tally path.
    """

    def __init__(self, frames: dict[str, Sequence[ArgumentFrame]],
                 failures: Sequence[str] = ()):
        self._frames = {key: tuple(value) for key, value in frames.items()}
        self._failures = frozenset(failures)

    def parse(self, sentence: str) -> dict:
        if sentence in self._failures:
            raise ParserError(f"stub backend is scripted to fail on: {sentence!r}")
        return {"sentence": sentence,
                "frames": self._frames.get(sentence, ())}

    def argument_frames(self, graph: object) -> list[ArgumentFrame]:
        if not isinstance(graph, dict) or "frames" not in graph:
            raise ParserError(f"not a stub graph: {graph!r}")
        return list(graph["frames"])


def load_stub_table(path: str | Path) -> StubParser:
    """Build a StubParser from a TSV table.

    Columns: sentence, predicate, arg0, arg0_category, arg1, arg1_category.
    ``-`` marks an unfilled role or missing category; a predicate of
    ``!parse-error`` marks the sentence as a scripted failure. Lines starting
    with ``#`` and blank lines are ignored. Repeated sentences accumulate
    frames in file order.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing stub table: {path}")
    frames: dict[str, list[ArgumentFrame]] = {}
    failures: list[str] = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 tab-separated fields")
        sentence, predicate, arg0, cat0, arg1, cat1 = (p.strip() for p in parts)
        if not sentence or not predicate:
            raise ValueError(f"{path}:{lineno}: sentence and predicate are required")
        if predicate == FAIL_MARKER:
            failures.append(sentence)
            continue
        agent = Mention(arg0, "" if cat0 == ABSENT else cat0) if arg0 != ABSENT else None
        patient = Mention(arg1, "" if cat1 == ABSENT else cat1) if arg1 != ABSENT else None
        frames.setdefault(sentence, []).append(
            ArgumentFrame(predicate=predicate, agent=agent, patient=patient))
    return StubParser({k: tuple(v) for k, v in frames.items()}, failures)


def bundled_table_path() -> Path:
    """Path of the stub table that covers the bundled fixture pages."""
    return Path(str(importlib.resources.files("amr_extract") / "data" / "stub_frames.tsv"))


def get_backend(name: str, table: Optional[str | Path] = None) -> ParserBackend:
    """Resolve a backend by name.

    Only ``stub`` ships with this package; asking for anything else reports
    that the neural backend is an optional install rather than guessing.
    """
    if name == "stub":
        return load_stub_table(table if table is not None else bundled_table_path())
    raise ValueError(
        f"backend {name!r} is not installed; only the deterministic "
        f"'stub' backend ships with this package"
    )
