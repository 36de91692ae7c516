"""The triplet file contract and the manifest that drives a run.

The output format is fixed by the downstream narrative pipeline: a
tab-separated file whose header and column order must match TRIPLET_FIELDS
exactly. Records additionally carry the sentence index within their page so
output order is reproducible, but that index is not part of the file.
"""

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

TRIPLET_FIELDS = ("platform", "domain", "page", "predicate",
                  "arg0", "arg1", "arg0_type", "arg1_type")
PLATFORMS = ("human", "generative")
DOMAINS = ("us_politics", "geopolitics")

MANIFEST_FIELDS = ("platform", "domain", "page", "path")


@dataclass(frozen=True)
class ExtractionRecord:
    """One extracted relation, pinned to its source sentence."""

    platform: str
    domain: str
    page: str
    sentence_index: int
    predicate: str
    arg0: str
    arg1: str
    arg0_type: str
    arg1_type: str

    def contract_row(self) -> tuple[str, ...]:
        """The record as a row of the shared triplet file (no sentence index)."""
        return (self.platform, self.domain, self.page, self.predicate,
                self.arg0, self.arg1, self.arg0_type, self.arg1_type)


def validate_record(record: ExtractionRecord) -> None:
    """Reject records the downstream reader would refuse or mangle."""
    if record.platform not in PLATFORMS:
        raise ValueError(f"unknown platform {record.platform!r}")
    if record.domain not in DOMAINS:
        raise ValueError(f"unknown domain {record.domain!r}")
    if not record.page:
        raise ValueError("empty page title")
    if not record.predicate or not record.arg0 or not record.arg1:
        raise ValueError(
            f"predicate/arg0/arg1 must be non-empty, got "
            f"({record.predicate!r}, {record.arg0!r}, {record.arg1!r})"
        )
    if record.sentence_index < 0:
        raise ValueError(f"negative sentence index {record.sentence_index}")
    for field in record.contract_row():
        if "\t" in field or "\n" in field or "\r" in field:
            raise ValueError(f"field contains tab/newline: {field!r}")


@dataclass(frozen=True)
class ManifestEntry:
    platform: str
    domain: str
    page: str
    path: Path


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """Read the run manifest: TSV with header platform/domain/page/path.

    Relative article paths are resolved against the manifest's directory,
    so a fixture tree can be checked in and addressed portably.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing manifest: {path}")
    base = path.parent
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter="\t")
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty manifest") from None
        if tuple(header) != MANIFEST_FIELDS:
            raise ValueError(
                f"{path}: expected columns {MANIFEST_FIELDS}, got {tuple(header)}"
            )
        entries = []
        for i, row in enumerate(reader, 2):
            if len(row) != len(MANIFEST_FIELDS):
                raise ValueError(f"{path}:{i}: expected {len(MANIFEST_FIELDS)} fields")
            platform, domain, page, rel = (cell.strip() for cell in row)
            if platform not in PLATFORMS:
                raise ValueError(f"{path}:{i}: unknown platform {platform!r}")
            if domain not in DOMAINS:
                raise ValueError(f"{path}:{i}: unknown domain {domain!r}")
            if not page or not rel:
                raise ValueError(f"{path}:{i}: page and path must be non-empty")
            article = Path(rel)
            if not article.is_absolute():
                article = base / article
            entries.append(ManifestEntry(platform, domain, page, article))
    if not entries:
        raise ValueError(f"{path}: manifest lists no pages")
    return entries


def render_triplet_file(records: list[ExtractionRecord]) -> str:
    """Render records as the shared TSV contract, sorted for determinism.

    Sorting is by (page, sentence_index) and stable, so records from the same
    sentence keep extraction order and same-named pages on two platforms keep
    manifest order.
    """
    for record in records:
        validate_record(record)
    ordered = sorted(records, key=lambda r: (r.page, r.sentence_index))
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(list(TRIPLET_FIELDS))
    for record in ordered:
        writer.writerow(list(record.contract_row()))
    return buf.getvalue()


def write_triplet_file(path: str | Path, records: list[ExtractionRecord]) -> None:
    """Atomically write the triplet file (UTF-8, LF line endings)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = render_triplet_file(records)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
