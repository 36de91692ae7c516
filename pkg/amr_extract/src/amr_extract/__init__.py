"""Triplet extraction adapter: article text -> (predicate, ARG0, ARG1) files.

The narrative-analysis pipeline consumes a tab-separated triplet file; this
package produces that file from plain-text articles. Parsing sits behind a
two-method backend interface so the heavyweight neural AMR model stays an
optional install — a deterministic table-driven stub ships for tests and CI.
"""

from amr_extract.backend import (
    ArgumentFrame,
    Mention,
    ParserBackend,
    ParserError,
    StubParser,
    get_backend,
    load_stub_table,
)
from amr_extract.extract import (
    PageResult,
    RunSummary,
    TypeAssignment,
    assign_entity_types,
    extract_page,
    extract_triplets,
    is_content_entity,
    run_manifest,
)
from amr_extract.records import (
    DOMAINS,
    PLATFORMS,
    TRIPLET_FIELDS,
    ExtractionRecord,
    ManifestEntry,
    read_manifest,
    write_triplet_file,
)
from amr_extract.segment import split_sentences

__all__ = [
    "ArgumentFrame",
    "DOMAINS",
    "ExtractionRecord",
    "ManifestEntry",
    "Mention",
    "PLATFORMS",
    "PageResult",
    "ParserBackend",
    "ParserError",
    "RunSummary",
    "StubParser",
    "TRIPLET_FIELDS",
    "TypeAssignment",
    "assign_entity_types",
    "extract_page",
    "extract_triplets",
    "get_backend",
    "is_content_entity",
    "load_stub_table",
    "read_manifest",
    "run_manifest",
    "split_sentences",
    "write_triplet_file",
]
