"""Parse raw platform artifacts into normalized records and pair pages.

Inputs handled here:

- snapshot HTML files (``<slug>.html``) from the generative platform, classified
  as Missing / Verbatim / Rewritten from their visible text;
- sitemap XML (page URL listing);
- per-slug edit-request response documents (JSON);
- per-page daily pageview dump lines: ``project title date count``,
  whitespace-separated, date as YYYY-MM-DD or YYYYMMDD;
- revision-history TSV slices with configurable column positions
  (defaults: title, editor_id, timestamp, is_revert).

Every parser is single-pass, stateless, and accounts for each input line:
nothing is silently discarded — filtered and malformed lines are tallied.
"""

from __future__ import annotations

import enum
import json
import re
import time
import threading
from dataclasses import dataclass, field
from datetime import datetime
from html.parser import HTMLParser
from typing import Iterable, Optional
from urllib.parse import unquote
from xml.etree import ElementTree

from .fileio import parse_timestamp

# Exact visible-text markers, matched on the whitespace-normalized text layer
# after tag stripping (markup changes around them must not break detection).
MISSING_MARKER = "This page doesn't exist... yet"
CC_FOOTER = (
    "The content is adapted from Wikipedia, licensed under "
    "Creative Commons Attribution-ShareAlike 4.0 License"
)

# A missing page is "marker plus site chrome": at most this much other visible
# text. Anything beyond that is article content and the page is not Missing.
_CHROME_ALLOWANCE = 200


class MalformedPageError(ValueError):
    """Snapshot is empty or not parseable HTML at all (distinct from Missing)."""


class AmbiguityError(ValueError):
    """Two distinct names collapse to one normalized key."""


class ParseError(ValueError):
    """Structured payload does not match the expected schema."""


class PageStatus(enum.Enum):
    MISSING = "Missing"
    VERBATIM = "Verbatim"
    REWRITTEN = "Rewritten"


class MatchKind(enum.Enum):
    EXACT = "Exact"
    NORMALIZED = "Normalized"


@dataclass(frozen=True)
class RawGrokipediaPage:
    slug: str
    html: str
    fetched_at: float


@dataclass(frozen=True)
class PageViewRecord:
    title: str
    date: str  # YYYY-MM-DD
    views: int


@dataclass(frozen=True)
class RevisionRecord:
    title: str
    editor_id: str
    timestamp: datetime
    is_revert: bool


@dataclass(frozen=True)
class EditRequest:
    slug: str
    author_id: str
    created_at: datetime
    proposed_change: str
    reviewer_feedback: str = ""


@dataclass(frozen=True)
class PagePairing:
    wiki_title: str
    grok_slug: str
    match_kind: MatchKind


@dataclass
class ParseDiagnostics:
    """Line accounting for a parsed stream: parsed + filtered + skipped = total."""

    total_lines: int = 0
    parsed: int = 0
    filtered: int = 0  # well-formed but outside the month/window filter
    skipped: int = 0   # malformed (tallied, never silently dropped)
    skipped_examples: list[str] = field(default_factory=list)

    def note_skip(self, line: str) -> None:
        self.skipped += 1
        if len(self.skipped_examples) < 5:
            self.skipped_examples.append(line[:200])


@dataclass(frozen=True)
class MatchResult:
    pairings: tuple[PagePairing, ...]
    unmatched_titles: tuple[str, ...]
    unmatched_slugs: tuple[str, ...]


class _TextExtractor(HTMLParser):
    """Collect visible text, skipping script/style subtrees."""

    _INVISIBLE = {"script", "style", "noscript", "template"}

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._suppress = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._INVISIBLE:
            self._suppress += 1

    def handle_endtag(self, tag):
        if tag in self._INVISIBLE and self._suppress:
            self._suppress -= 1

    def handle_data(self, data):
        if not self._suppress and data:
            self.chunks.append(data)


def visible_text(html: str) -> str:
    """Tag-stripped, whitespace-normalized visible text of an HTML document."""
    extractor = _TextExtractor()
    extractor.feed(html)
    extractor.close()
    return " ".join(" ".join(extractor.chunks).split())


def classify_grokipedia_page(html: str) -> PageStatus:
    """Classify a snapshot as Missing / Verbatim / Rewritten.

    Missing: the visible text contains the exact missing-page marker and
    nothing else beyond a small chrome allowance. Verbatim: the exact
    Creative Commons attribution footer is present. Rewritten: anything else.
    An empty snapshot raises MalformedPageError (a failed fetch is an error,
    never a page).
    """
    if not html or not html.strip():
        raise MalformedPageError("empty snapshot: nothing to classify")
    text = visible_text(html)
    if MISSING_MARKER in text:
        residue = text.replace(MISSING_MARKER, "").strip()
        if len(residue) <= _CHROME_ALLOWANCE:
            return PageStatus.MISSING
    if CC_FOOTER in text:
        return PageStatus.VERBATIM
    return PageStatus.REWRITTEN


def normalize_title(name: str, case_insensitive: bool = False) -> str:
    """Normalize a title/slug for cross-platform matching.

    Trim whitespace, percent-decode, map underscores to spaces, collapse runs
    of whitespace. Comparison stays case-sensitive unless requested otherwise
    (titles are case-sensitive after their first character).
    """
    cleaned = unquote(name.strip()).replace("_", " ")
    cleaned = " ".join(cleaned.split())
    return cleaned.casefold() if case_insensitive else cleaned


_DATE_COMPACT = re.compile(r"^(\d{4})(\d{2})(\d{2})$")
_DATE_DASHED = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")


def _parse_day(token: str) -> Optional[str]:
    match = _DATE_DASHED.match(token) or _DATE_COMPACT.match(token)
    if not match:
        return None
    year, month, day = match.groups()
    if not (1 <= int(month) <= 12 and 1 <= int(day) <= 31):
        return None
    return f"{year}-{month}-{day}"


def parse_pageviews(
    lines: Iterable[str],
    month_filter: str,
) -> tuple[list[PageViewRecord], ParseDiagnostics]:
    """Parse per-page daily pageview lines, keeping one calendar month.

    Line format: ``project title date count`` (whitespace-separated; extra
    trailing fields ignored). ``month_filter`` is ``YYYY-MM``. Counts are
    aggregated per (title, date); titles are normalized (underscores to
    spaces, percent-decoded). Malformed lines are skipped and tallied.
    """
    if not re.match(r"^\d{4}-\d{2}$", month_filter):
        raise ValueError(f"month_filter must be YYYY-MM, got {month_filter!r}")
    diagnostics = ParseDiagnostics()
    totals: dict[tuple[str, str], int] = {}
    for raw in lines:
        line = raw.rstrip("\n")
        diagnostics.total_lines += 1
        parts = line.split()
        if len(parts) < 4:
            diagnostics.note_skip(line)
            continue
        _, title_token, date_token, count_token = parts[0], parts[1], parts[2], parts[3]
        day = _parse_day(date_token)
        if day is None or not count_token.isdigit():
            diagnostics.note_skip(line)
            continue
        if not day.startswith(month_filter):
            diagnostics.filtered += 1
            continue
        title = normalize_title(title_token)
        if not title:
            diagnostics.note_skip(line)
            continue
        totals[(title, day)] = totals.get((title, day), 0) + int(count_token)
        diagnostics.parsed += 1
    records = [
        PageViewRecord(title=t, date=d, views=v)
        for (t, d), v in sorted(totals.items())
    ]
    return records, diagnostics


@dataclass(frozen=True)
class RevisionColumns:
    """Column positions inside the revision-history TSV."""

    title: int = 0
    editor: int = 1
    timestamp: int = 2
    is_revert: int = 3


_TRUE_TOKENS = {"true", "t", "1", "yes"}
_FALSE_TOKENS = {"false", "f", "0", "no", ""}


def parse_revision_history(
    lines: Iterable[str],
    window: tuple[datetime, datetime],
    columns: RevisionColumns = RevisionColumns(),
) -> tuple[list[RevisionRecord], ParseDiagnostics]:
    """Parse a revision-history TSV slice, keeping rows inside [start, end].

    ``is_revert`` is taken from the dump's own revert annotation column
    (true/false tokens), never re-derived. Rows with unparseable timestamps or
    revert flags are skipped and tallied.
    """
    start, end = window
    if start > end:
        raise ValueError("window start is after window end")
    needed = max(columns.title, columns.editor, columns.timestamp, columns.is_revert)
    diagnostics = ParseDiagnostics()
    records: list[RevisionRecord] = []
    for raw in lines:
        line = raw.rstrip("\n")
        diagnostics.total_lines += 1
        if not line.strip():
            diagnostics.note_skip(line)
            continue
        parts = line.split("\t")
        if len(parts) <= needed:
            diagnostics.note_skip(line)
            continue
        try:
            timestamp = parse_timestamp(parts[columns.timestamp])
        except ValueError:
            diagnostics.note_skip(line)
            continue
        revert_token = parts[columns.is_revert].strip().lower()
        if revert_token in _TRUE_TOKENS:
            is_revert = True
        elif revert_token in _FALSE_TOKENS:
            is_revert = False
        else:
            diagnostics.note_skip(line)
            continue
        title = normalize_title(parts[columns.title])
        if not title:
            diagnostics.note_skip(line)
            continue
        if not (start <= timestamp <= end):
            diagnostics.filtered += 1
            continue
        records.append(RevisionRecord(
            title=title,
            editor_id=parts[columns.editor].strip(),
            timestamp=timestamp,
            is_revert=is_revert,
        ))
        diagnostics.parsed += 1
    return records, diagnostics


_EDIT_LIST_KEYS = ("edits", "editRequests", "edit_requests", "requests")
_FIELD_ALIASES = {
    "author_id": ("author_id", "authorId", "author"),
    "created_at": ("created_at", "createdAt", "timestamp"),
    "proposed_change": ("proposed_change", "proposedChange", "change", "content"),
    "reviewer_feedback": ("reviewer_feedback", "reviewerFeedback", "feedback"),
}


def _pick(item: dict, canonical: str) -> Optional[object]:
    for alias in _FIELD_ALIASES[canonical]:
        if alias in item:
            return item[alias]
    return None


def parse_edit_requests(payload: str | dict | list) -> list[EditRequest]:
    """Parse one slug's edit-request response document into records.

    The payload is JSON: either a top-level list of edit objects or an object
    holding the list under ``edits``/``editRequests`` (plus a top-level
    ``slug``). Each edit needs author_id, created_at, and proposed_change
    (camelCase aliases accepted); reviewer_feedback defaults to empty. A
    missing required field raises ParseError naming the canonical field.
    """
    if isinstance(payload, str):
        try:
            document = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise ParseError(f"payload is not valid JSON: {exc}") from None
    else:
        document = payload

    top_slug = ""
    if isinstance(document, dict):
        top_slug = str(document.get("slug", "") or "")
        items = None
        for key in _EDIT_LIST_KEYS:
            if key in document:
                items = document[key]
                break
        if items is None:
            raise ParseError(
                "edit list absent (expected one of: " + ", ".join(_EDIT_LIST_KEYS) + ")"
            )
    elif isinstance(document, list):
        items = document
    else:
        raise ParseError("payload must be a JSON object or list")

    if not isinstance(items, list):
        raise ParseError("edit list is not a list")

    requests_out: list[EditRequest] = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ParseError(f"edit #{i} is not an object")
        slug = str(item.get("slug", "") or top_slug)
        if not slug:
            raise ParseError("slug absent")
        author = _pick(item, "author_id")
        if author is None or str(author) == "":
            raise ParseError("author_id absent")
        created = _pick(item, "created_at")
        if created is None:
            raise ParseError("created_at absent")
        try:
            created_at = parse_timestamp(str(created))
        except ValueError as exc:
            raise ParseError(f"created_at unparseable: {exc}") from None
        change = _pick(item, "proposed_change")
        if change is None:
            raise ParseError("proposed_change absent")
        feedback = _pick(item, "reviewer_feedback")
        requests_out.append(EditRequest(
            slug=slug,
            author_id=str(author),
            created_at=created_at,
            proposed_change=str(change),
            reviewer_feedback="" if feedback is None else str(feedback),
        ))
    return requests_out


def match_titles(
    wiki_titles: Iterable[str],
    grok_slugs: Iterable[str],
    case_insensitive: bool = False,
) -> MatchResult:
    """Pair titles with slugs by exact match after normalization.

    Pairs are one-to-one; two titles (or two slugs) normalizing to the same key
    raise AmbiguityError listing the collision. match_kind is Exact when the
    literal strings are identical, Normalized otherwise. Output is sorted by
    wiki title; unmatched names are reported separately, sorted.
    """
    titles = sorted(set(wiki_titles))
    slugs = sorted(set(grok_slugs))

    def keyed(names: list[str], side: str) -> dict[str, str]:
        mapping: dict[str, str] = {}
        for name in names:
            key = normalize_title(name, case_insensitive=case_insensitive)
            if key in mapping and mapping[key] != name:
                raise AmbiguityError(
                    f"two {side} normalize to {key!r}: {mapping[key]!r} and {name!r}"
                )
            mapping[key] = name
        return mapping

    title_by_key = keyed(titles, "wiki titles")
    slug_by_key = keyed(slugs, "slugs")

    pairings = []
    for key in sorted(title_by_key):
        if key in slug_by_key:
            title, slug = title_by_key[key], slug_by_key[key]
            kind = MatchKind.EXACT if title == slug else MatchKind.NORMALIZED
            pairings.append(PagePairing(wiki_title=title, grok_slug=slug, match_kind=kind))
    matched_titles = {p.wiki_title for p in pairings}
    matched_slugs = {p.grok_slug for p in pairings}
    pairings.sort(key=lambda p: p.wiki_title)
    return MatchResult(
        pairings=tuple(pairings),
        unmatched_titles=tuple(t for t in titles if t not in matched_titles),
        unmatched_slugs=tuple(s for s in slugs if s not in matched_slugs),
    )


def parse_sitemap(xml_text: str) -> list[str]:
    """Extract page slugs from sitemap XML (last path segment of each <loc>)."""
    try:
        root = ElementTree.fromstring(xml_text)
    except ElementTree.ParseError as exc:
        raise ParseError(f"sitemap is not valid XML: {exc}") from None
    slugs = []
    seen = set()
    for element in root.iter():
        if element.tag.endswith("loc") and element.text:
            slug = element.text.strip().rstrip("/").rsplit("/", 1)[-1]
            if slug and slug not in seen:
                seen.add(slug)
                slugs.append(slug)
    return slugs


class RateLimiter:
    """Thread-safe minimum-interval gate for outbound requests."""

    def __init__(self, min_interval: float) -> None:
        self._interval = max(0.0, min_interval)
        self._lock = threading.Lock()
        self._next_at = 0.0

    def wait(self) -> None:
        if self._interval == 0.0:
            return
        with self._lock:
            now = time.monotonic()
            delay = self._next_at - now
            self._next_at = max(now, self._next_at) + self._interval
        if delay > 0:
            time.sleep(delay)
