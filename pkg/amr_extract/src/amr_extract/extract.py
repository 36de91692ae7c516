"""Turn sentences into triplet records and drive whole-manifest runs."""

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from amr_extract.backend import Mention, ParserBackend, ParserError
from amr_extract.records import (
    ExtractionRecord,
    ManifestEntry,
    read_manifest,
    write_triplet_file,
)
from amr_extract.segment import split_sentences

# Arguments that are not content entities: pronouns first…
PRONOUNS = frozenset({
    "i", "you", "he", "she", "it", "we", "they",
    "me", "him", "her", "us", "them",
    "my", "your", "his", "its", "our", "their", "mine", "yours", "hers",
    "ours", "theirs",
    "myself", "yourself", "himself", "herself", "itself",
    "ourselves", "yourselves", "themselves",
    "this", "that", "these", "those",
    "who", "whom", "whose", "which", "what",
})
# …then generic placeholders that name nobody in particular.
GENERIC_PLACEHOLDERS = frozenset({
    "one", "ones", "someone", "somebody", "something",
    "anyone", "anybody", "anything", "everyone", "everybody", "everything",
    "no one", "nobody", "nothing", "none",
    "people", "person", "thing", "things", "others", "other", "some", "many",
})
# Digit-led tokens, allowing separators, decimals, and percent/ordinal tails.
_NUMERAL = re.compile(r"[+-]?\d[\d,.:–-]*(%|st|nd|rd|th)?$", re.IGNORECASE)

_ARTICLE = re.compile(r"^(the|a|an)\s+", re.IGNORECASE)


def is_content_entity(mention: Mention) -> bool:
    """True when a mention can stand as a node in the narrative graph.

    Pronouns, numerals, and generic placeholders are dropped, as are
    mentions the parser left untyped or empty.
    """
    text = mention.text.strip()
    if not text or not mention.category.strip():
        return False
    bare = _ARTICLE.sub("", text).strip().lower()
    if bare in PRONOUNS or bare in GENERIC_PLACEHOLDERS:
        return False
    if _NUMERAL.fullmatch(bare.replace(" ", "")):
        return False
    return True


def _records_from_frames(frames, *, platform: str, domain: str, page: str,
                         sentence_index: int) -> list[ExtractionRecord]:
    records = []
    for frame in frames:
        if frame.agent is None or frame.patient is None:
            continue
        if not (is_content_entity(frame.agent) and is_content_entity(frame.patient)):
            continue
        records.append(ExtractionRecord(
            platform=platform, domain=domain, page=page,
            sentence_index=sentence_index,
            predicate=frame.predicate,
            arg0=frame.agent.text.strip(),
            arg1=frame.patient.text.strip(),
            arg0_type=frame.agent.category.strip(),
            arg1_type=frame.patient.category.strip(),
        ))
    return records


def extract_triplets(sentence: str, parser: ParserBackend, *,
                     platform: str = "", domain: str = "", page: str = "",
                     sentence_index: int = 0) -> list[ExtractionRecord]:
    """Extract the well-formed agent-patient relations of one sentence.

    A frame is emitted only when both roles are filled by content entities;
    everything else is dropped. Parser failures propagate as ParserError so
    page-level callers can skip the sentence and count it.
    """
    if not sentence.strip():
        return []
    frames = parser.argument_frames(parser.parse(sentence))
    return _records_from_frames(frames, platform=platform, domain=domain,
                                page=page, sentence_index=sentence_index)


@dataclass(frozen=True)
class TypeAssignment:
    """The semantic type chosen for an entity, with its tie flag."""

    entity_type: str
    tied: bool


def assign_entity_types(occurrences: list[str]) -> TypeAssignment:
    """Pick the modal category; break ties lexicographically and flag them.

    Flagged entities are surfaced in the run summary so a curator can settle
    them instead of trusting the arbitrary (if deterministic) tiebreak.
    """
    if not occurrences:
        raise ValueError("no type occurrences for entity")
    counts = Counter(occurrences)
    top = max(counts.values())
    leaders = sorted(category for category, n in counts.items() if n == top)
    return TypeAssignment(entity_type=leaders[0], tied=len(leaders) > 1)


@dataclass
class PageResult:
    """What one page contributed: records plus the bookkeeping around them."""

    records: list[ExtractionRecord]
    n_sentences: int
    n_parse_failures: int
    n_dropped_frames: int


def extract_page(text: str, parser: ParserBackend, *,
                 platform: str, domain: str, page: str) -> PageResult:
    """Segment a page and extract every sentence, skipping parser failures.

    A ParserError on one sentence never aborts the page: the sentence is
    counted in n_parse_failures and extraction continues.
    """
    sentences = split_sentences(text)
    records: list[ExtractionRecord] = []
    failures = 0
    dropped = 0
    for index, sentence in enumerate(sentences):
        try:
            frames = parser.argument_frames(parser.parse(sentence))
        except ParserError:
            failures += 1
            continue
        found = _records_from_frames(frames, platform=platform, domain=domain,
                                     page=page, sentence_index=index)
        dropped += len(frames) - len(found)
        records.extend(found)
    return PageResult(records=records, n_sentences=len(sentences),
                      n_parse_failures=failures, n_dropped_frames=dropped)


@dataclass
class RunSummary:
    """Totals for one manifest run, returned by run_manifest."""

    n_pages: int = 0
    n_sentences: int = 0
    n_records: int = 0
    n_parse_failures: int = 0
    n_dropped_frames: int = 0
    # (platform, entity) pairs whose modal type was a tie, for curation
    tie_flagged: list[tuple[str, str]] = field(default_factory=list)


def _apply_modal_types(records: list[ExtractionRecord]) -> tuple[list[ExtractionRecord], list[tuple[str, str]]]:
    """Replace per-occurrence categories with each entity's modal type.

    Occurrences pool across pages within one platform (the same scope the
    downstream graph builder resolves entities in), over both argument slots.
    """
    occurrences: dict[tuple[str, str], list[str]] = {}
    for record in records:
        occurrences.setdefault((record.platform, record.arg0), []).append(record.arg0_type)
        occurrences.setdefault((record.platform, record.arg1), []).append(record.arg1_type)
    assigned: dict[tuple[str, str], str] = {}
    flagged: list[tuple[str, str]] = []
    for key in sorted(occurrences):
        assignment = assign_entity_types(occurrences[key])
        assigned[key] = assignment.entity_type
        if assignment.tied:
            flagged.append(key)
    retyped = [
        ExtractionRecord(
            platform=r.platform, domain=r.domain, page=r.page,
            sentence_index=r.sentence_index, predicate=r.predicate,
            arg0=r.arg0, arg1=r.arg1,
            arg0_type=assigned[(r.platform, r.arg0)],
            arg1_type=assigned[(r.platform, r.arg1)],
        )
        for r in records
    ]
    return retyped, flagged


def run_manifest(manifest_path: str | Path, parser: ParserBackend,
                 out_path: str | Path) -> RunSummary:
    """Extract every page a manifest lists and write the triplet file.

    Entity types are settled corpus-wide (modal per platform+entity) before
    writing, and records are sorted by (page, sentence index), so two runs
    over the same inputs produce byte-identical output.
    """
    entries = read_manifest(manifest_path)
    summary = RunSummary(n_pages=len(entries))
    collected: list[ExtractionRecord] = []
    for entry in entries:
        if not entry.path.exists():
            raise FileNotFoundError(
                f"manifest names a missing article file: {entry.path}")
        text = entry.path.read_text(encoding="utf-8")
        result = extract_page(text, parser, platform=entry.platform,
                              domain=entry.domain, page=entry.page)
        collected.extend(result.records)
        summary.n_sentences += result.n_sentences
        summary.n_parse_failures += result.n_parse_failures
        summary.n_dropped_frames += result.n_dropped_frames
    retyped, flagged = _apply_modal_types(collected)
    summary.n_records = len(retyped)
    summary.tie_flagged = flagged
    write_triplet_file(out_path, retyped)
    return summary
