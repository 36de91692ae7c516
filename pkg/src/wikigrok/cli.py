"""Pipeline orchestration: subcommands over on-disk artifacts.

Stages communicate only through files (every intermediate is inspectable and
diffable), outputs are written atomically, and re-running a stage on unchanged
inputs reproduces byte-identical bytes. Exit codes: 0 success, 1 usage error,
2 data error, 3 transport error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from urllib.parse import urlparse

from . import complexity as complexity_mod
from . import features as features_mod
from . import framing as framing_mod
from . import glm as glm_mod
from . import ingest as ingest_mod
from . import narrative as narrative_mod
from .fileio import (
    DataError,
    TransportError,
    UsageError,
    atomic_write_text,
    load_config,
    parse_timestamp,
    read_table,
    write_table,
)
from .stats import average_ranks, spearman

logger = logging.getLogger(__name__)

# artifact filename -> subcommand that produces it (for actionable errors)
_PRODUCERS = {
    "pages.tsv": "ingest",
    "titles.tsv": "ingest",
    "pageviews.tsv": "ingest",
    "revisions.tsv": "ingest",
    "edits.tsv": "ingest",
    "features.tsv": "features",
    "coefficients_inclusion.csv": "fit-inclusion",
    "coefficients_rewrite.csv": "fit-rewrite",
    "complexity.csv": "complexity",
    "balances.csv": "narrative",
    "displacements.csv": "narrative",
    "graph_metrics.csv": "narrative",
    "framing_scores.csv": "framing",
}


def _require(path: Path) -> Path:
    if not path.exists():
        producer = _PRODUCERS.get(path.name)
        hint = f": run {producer} first" if producer else ""
        raise DataError(f"missing input artifact {path}{hint}")
    return path


class _Parser(argparse.ArgumentParser):
    """argparse that signals usage problems via exceptions (exit code 1)."""

    def error(self, message):
        raise UsageError(message)


def _parse_bool(text: str) -> bool:
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _cfg(args, config: dict[str, str], name: str, default=None, cast=None):
    """Resolve one option: command-line flag, else config-file key, else default.

    Flags are built with ``default=None`` so an untouched flag falls through to
    the config file; config values (strings) go through ``cast``.
    """
    value = getattr(args, name.replace("-", "_"), None)
    if value is None and name in config:
        raw = config[name]
        if cast is not None:
            try:
                value = cast(raw)
            except (TypeError, ValueError):
                raise UsageError(f"bad config value for {name}: {raw!r}") from None
        else:
            value = raw
    if value is None:
        return default
    return value


def _need(args, config, name: str, cast=None):
    value = _cfg(args, config, name, cast=cast)
    if value is None:
        raise UsageError(f"--{name} is required (flag or config)")
    return value


def _build_parser() -> _Parser:
    parser = _Parser(prog="wikigrok", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, default=None,
                        help="key = value config file; flags override it")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the synthetic-data generators used in demos/tests")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    p = sub.add_parser("fetch", help="walk a sitemap and snapshot each page politely")
    p.add_argument("--sitemap", default=None, help="sitemap XML path or URL")
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--limit", type=int, default=None,
                   help="stop after N pages (default: all)")
    p.add_argument("--delay", type=float, default=None,
                   help="minimum seconds between requests (default 1.0)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None)

    p = sub.add_parser("ingest", help="parse raw artifacts into normalized tables")
    p.add_argument("--grok-dir", type=Path, default=None, help="directory of <slug>.html")
    p.add_argument("--pageviews", type=Path, default=None)
    p.add_argument("--revisions", type=Path, default=None)
    p.add_argument("--edits-dir", type=Path, default=None,
                   help="directory of per-slug edit-request JSON responses")
    p.add_argument("--wiki-titles", type=Path, default=None,
                   help="one title per line; default: titles seen in the dumps")
    p.add_argument("--month", default=None, help="pageview month, YYYY-MM")
    p.add_argument("--window-start", default=None)
    p.add_argument("--window-end", default=None)
    p.add_argument("--case-insensitive-match", action="store_true", default=None)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("features", help="join tables into per-page feature records")
    p.add_argument("--ingest-dir", type=Path, default=None)
    p.add_argument("--references", type=Path, default=None,
                   help="TSV of title<TAB>reference count")
    p.add_argument("--exclude-zero-views", action="store_true", default=None,
                   help="drop zero-view pages before discretization (default: keep)")
    p.add_argument("--out", type=Path, default=None)

    for name, help_text in (
        ("fit-inclusion", "logistic fit: does a page have a counterpart?"),
        ("fit-rewrite", "logistic fit: was an included page rewritten?"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--features", type=Path, default=None)
        p.add_argument("--interaction", choices=("score", "full"), default=None)
        p.add_argument("--ridge", action="store_true", default=None,
                       help="tiny L2 stabilization for separated/small corpora")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("complexity", help="editor/page fitness-complexity per platform")
    p.add_argument("--ingest-dir", type=Path, default=None)
    p.add_argument("--min-edits", type=int, default=None,
                   help="per-platform threshold for a page to enter (default 2)")
    p.add_argument("--accepted-only", action="store_true", default=None,
                   help="count only edit requests that drew reviewer feedback")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--out", type=Path, default=None, help="output directory")

    p = sub.add_parser("narrative", help="signed narrative graphs, balances, displacement")
    p.add_argument("--triplets", type=Path, default=None)
    p.add_argument("--aliases", type=Path, default=None)
    p.add_argument("--page-context", type=Path, default=None)
    p.add_argument("--polarity", type=Path, default=None,
                   help="predicate->polarity TSV (default: bundled curated table)")
    p.add_argument("--decile-mode", choices=("combined", "separate"), default=None)
    p.add_argument("--out", type=Path, default=None, help="output directory")

    p = sub.add_parser("framing", help="LLM framing scores over lead sections")
    p.add_argument("--ingest-dir", type=Path, default=None)
    p.add_argument("--wiki-articles", type=Path, default=None,
                   help="directory of <title>.txt article files")
    p.add_argument("--grok-dir", type=Path, default=None)
    p.add_argument("--endpoint", default=None, help="chat-completion URL")
    p.add_argument("--model", default=None,
                   help=f"model name (default {framing_mod.DEFAULT_MODEL})")
    p.add_argument("--min-chars", type=int, default=None,
                   help=f"lead eligibility threshold (default {framing_mod.DEFAULT_MIN_CHARS})")
    p.add_argument("--retries", type=int, default=None,
                   help="total attempts per sentence before it is Unscored (default 3)")
    p.add_argument("--concurrency", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--cache", type=Path, default=None, help="per-sentence cache directory")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("report", help="join module outputs into figure-backing tables")
    p.add_argument("--artifacts", type=Path, default=None,
                   help="directory holding the pipeline outputs")
    p.add_argument("--leaning", type=Path, default=None,
                   help="optional TSV of page<TAB>leaning labels")
    p.add_argument("--out", type=Path, default=None, help="output directory")

    return parser


# ---------------------------------------------------------------------------
# fetch
# ---------------------------------------------------------------------------

def _sitemap_urls(xml_text: str) -> list[tuple[str, str]]:
    """(url, slug) pairs from sitemap <loc> entries, deduplicated by slug."""
    from xml.etree import ElementTree
    try:
        root = ElementTree.fromstring(xml_text)
    except ElementTree.ParseError as exc:
        raise DataError(f"sitemap is not valid XML: {exc}") from None
    pairs = []
    seen = set()
    for element in root.iter():
        if element.tag.endswith("loc") and element.text:
            url = element.text.strip()
            slug = url.rstrip("/").rsplit("/", 1)[-1]
            if slug and slug not in seen:
                seen.add(slug)
                pairs.append((url, slug))
    return pairs


def _cmd_fetch(args, config) -> int:
    import requests

    sitemap_source = str(_need(args, config, "sitemap"))
    out_dir = Path(_cfg(args, config, "out", "snapshots"))
    limit = _cfg(args, config, "limit", 0, int)
    delay = _cfg(args, config, "delay", 1.0, float)
    workers = _cfg(args, config, "workers", 4, int)
    timeout = _cfg(args, config, "timeout", 30.0, float)

    out_dir.mkdir(parents=True, exist_ok=True)
    if urlparse(sitemap_source).scheme in ("http", "https"):
        try:
            response = requests.get(sitemap_source, timeout=timeout)
            response.raise_for_status()
        except requests.RequestException as exc:
            raise TransportError(f"cannot fetch sitemap: {exc}") from None
        xml_text = response.text
    else:
        path = Path(sitemap_source)
        if not path.exists():
            raise DataError(f"missing sitemap file: {path}")
        xml_text = path.read_text(encoding="utf-8")

    pairs = _sitemap_urls(xml_text)
    if limit:
        pairs = pairs[:limit]
    limiter = ingest_mod.RateLimiter(delay)
    failures: list[tuple[str, str]] = []

    def grab(pair: tuple[str, str]) -> None:
        url, slug = pair
        limiter.wait()
        try:
            response = requests.get(url, timeout=timeout)
            response.raise_for_status()
        except requests.RequestException as exc:
            failures.append((slug, str(exc)))
            return
        atomic_write_text(out_dir / f"{slug}.html", response.text)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        list(pool.map(grab, pairs))

    write_table(out_dir / "fetch_errors.tsv", ("slug", "error"),
                sorted(failures), delimiter="\t")
    print(f"fetched {len(pairs) - len(failures)}/{len(pairs)} pages into {out_dir}")
    if failures:
        print(f"{len(failures)} failures listed in {out_dir / 'fetch_errors.tsv'}")
    return 0


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------

def _cmd_ingest(args, config) -> int:
    grok_dir = Path(_need(args, config, "grok-dir"))
    pageviews_path = Path(_need(args, config, "pageviews"))
    revisions_path = Path(_need(args, config, "revisions"))
    month = str(_need(args, config, "month"))
    window_start = str(_need(args, config, "window-start"))
    window_end = str(_need(args, config, "window-end"))
    edits_dir = _cfg(args, config, "edits-dir")
    wiki_titles_path = _cfg(args, config, "wiki-titles")
    case_insensitive = _cfg(args, config, "case-insensitive-match", False, _parse_bool)
    out_dir = Path(_cfg(args, config, "out", "out"))
    window = (parse_timestamp(window_start), parse_timestamp(window_end))

    # 1. classify snapshots
    if not grok_dir.is_dir():
        raise DataError(f"snapshot directory not found: {grok_dir}")
    statuses: dict[str, ingest_mod.PageStatus] = {}
    snapshot_errors: list[list[str]] = []
    for html_path in sorted(grok_dir.glob("*.html")):
        slug = html_path.stem
        try:
            statuses[slug] = ingest_mod.classify_grokipedia_page(
                html_path.read_text(encoding="utf-8"))
        except ingest_mod.MalformedPageError as exc:
            snapshot_errors.append([slug, str(exc)])

    # 2. dumps
    if not pageviews_path.exists():
        raise DataError(f"missing pageview dump: {pageviews_path}")
    if not revisions_path.exists():
        raise DataError(f"missing revision dump: {revisions_path}")
    with open(pageviews_path, encoding="utf-8") as handle:
        views, view_diag = ingest_mod.parse_pageviews(handle, month)
    with open(revisions_path, encoding="utf-8") as handle:
        revisions, rev_diag = ingest_mod.parse_revision_history(handle, window)

    # 3. edit requests (windowed like revisions)
    edits: list[ingest_mod.EditRequest] = []
    edits_filtered = 0
    if edits_dir is not None:
        edits_dir = Path(edits_dir)
        if not edits_dir.is_dir():
            raise DataError(f"edit-request directory not found: {edits_dir}")
        for json_path in sorted(edits_dir.glob("*.json")):
            parsed = ingest_mod.parse_edit_requests(
                json_path.read_text(encoding="utf-8"))
            for request in parsed:
                if window[0] <= request.created_at <= window[1]:
                    edits.append(request)
                else:
                    edits_filtered += 1

    # 4. title universe and pairing
    if wiki_titles_path is not None:
        titles = {
            ingest_mod.normalize_title(line)
            for line in Path(wiki_titles_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        }
    else:
        titles = {v.title for v in views} | {r.title for r in revisions}
    match = ingest_mod.match_titles(titles, set(statuses),
                                    case_insensitive=case_insensitive)
    title_by_slug = {p.grok_slug: p.wiki_title for p in match.pairings}

    # 5. artifacts
    write_table(out_dir / "pages.tsv", ("slug", "title", "status", "matched"),
                [(slug, title_by_slug.get(slug, ""), statuses[slug].value,
                  1 if slug in title_by_slug else 0)
                 for slug in sorted(statuses)], delimiter="\t")
    write_table(out_dir / "titles.tsv", ("title",),
                [(t,) for t in sorted(titles)], delimiter="\t")
    write_table(out_dir / "pageviews.tsv", ("title", "date", "views"),
                [(v.title, v.date, v.views) for v in views], delimiter="\t")
    write_table(out_dir / "revisions.tsv",
                ("title", "editor_id", "timestamp", "is_revert"),
                [(r.title, r.editor_id, r.timestamp.isoformat(), r.is_revert)
                 for r in sorted(revisions,
                                 key=lambda r: (r.title, r.timestamp.isoformat(),
                                                r.editor_id))],
                delimiter="\t")
    write_table(out_dir / "edits.tsv",
                ("slug", "author_id", "created_at", "has_feedback"),
                [(e.slug, e.author_id, e.created_at.isoformat(),
                  1 if e.reviewer_feedback else 0)
                 for e in sorted(edits,
                                 key=lambda e: (e.slug, e.created_at.isoformat(),
                                                e.author_id))],
                delimiter="\t")
    write_table(out_dir / "unmatched.tsv", ("kind", "name"),
                [("title", t) for t in match.unmatched_titles]
                + [("slug", s) for s in match.unmatched_slugs], delimiter="\t")
    diagnostics = {
        "snapshots": {"classified": len(statuses), "errors": snapshot_errors},
        "pageviews": {k: v for k, v in vars(view_diag).items()},
        "revisions": {k: v for k, v in vars(rev_diag).items()},
        "edit_requests": {"kept": len(edits), "outside_window": edits_filtered},
        "pairings": len(match.pairings),
    }
    atomic_write_text(out_dir / "diagnostics.json",
                      json.dumps(diagnostics, indent=2, sort_keys=True) + "\n")
    print(f"ingested {len(statuses)} snapshots, {len(views)} pageview records, "
          f"{len(revisions)} revisions, {len(edits)} edit requests -> {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# features
# ---------------------------------------------------------------------------

def _read_references(path: Path) -> dict[str, int]:
    refs: dict[str, int] = {}
    header, rows = read_table(path, delimiter="\t")
    if header and len(header) >= 2 and header[1].strip().isdigit():
        rows = [header] + rows  # headerless file: first line is data
    for row in rows:
        if len(row) >= 2 and row[1].strip().isdigit():
            refs[ingest_mod.normalize_title(row[0])] = int(row[1])
    return refs


def _cmd_features(args, config) -> int:
    ingest_dir = Path(_cfg(args, config, "ingest-dir", "out"))
    out_path = Path(_cfg(args, config, "out", ingest_dir / "features.tsv"))
    references_path = _cfg(args, config, "references")
    exclude_zero = _cfg(args, config, "exclude-zero-views", False, _parse_bool)

    _, title_rows = read_table(_require(ingest_dir / "titles.tsv"), delimiter="\t")
    titles = [row[0] for row in title_rows if row]
    _, view_rows = read_table(_require(ingest_dir / "pageviews.tsv"), delimiter="\t")
    _, revision_rows = read_table(_require(ingest_dir / "revisions.tsv"), delimiter="\t")
    _, page_rows = read_table(_require(ingest_dir / "pages.tsv"), delimiter="\t")

    views = defaultdict(int)
    for title, _, count in view_rows:
        views[title] += int(count)
    edit_counts = defaultdict(int)
    revert_counts = defaultdict(int)
    for title, _, _, is_revert in revision_rows:
        edit_counts[title] += 1
        if is_revert == "1":
            revert_counts[title] += 1
    references = _read_references(Path(references_path)) if references_path else {}

    status_by_title: dict[str, str] = {}
    for _, title, status, matched in page_rows:
        if matched == "1" and title:
            status_by_title[title] = status

    records = []
    for title in sorted(titles):
        if exclude_zero and views.get(title, 0) == 0:
            continue
        status = status_by_title.get(title)
        included = status is not None and status != ingest_mod.PageStatus.MISSING.value
        rewritten = (status == ingest_mod.PageStatus.REWRITTEN.value) if included else None
        records.append(features_mod.PageRecord(
            title=title,
            views_raw=views.get(title, 0),
            references_raw=references.get(title, 0),
            edits_raw=edit_counts.get(title, 0),
            reverts_raw=revert_counts.get(title, 0),
            included=included,
            rewritten=rewritten,
        ))
    if not records:
        raise DataError("no pages left to featurize")
    records = features_mod.attach_levels(records)

    write_table(out_path, (
        "title", "views_raw", "references_raw", "edits_raw", "reverts_raw",
        "views_level", "references_level", "edits_level", "reverts_level",
        "included", "rewritten",
    ), [(
        r.title, int(r.views_raw), int(r.references_raw), int(r.edits_raw),
        int(r.reverts_raw), r.views_level.label, r.references_level.label,
        r.edits_level.label, r.reverts_level.label,
        1 if r.included else 0,
        "" if r.rewritten is None else (1 if r.rewritten else 0),
    ) for r in records], delimiter="\t")
    print(f"wrote {len(records)} feature rows -> {out_path}")
    return 0


def _read_feature_records(path: Path) -> list[features_mod.PageRecord]:
    header, rows = read_table(_require(path), delimiter="\t")
    records = []
    for row in rows:
        (title, views_raw, references_raw, edits_raw, reverts_raw,
         views_level, references_level, edits_level, reverts_level,
         included, rewritten) = row
        records.append(features_mod.PageRecord(
            title=title,
            views_raw=float(views_raw),
            references_raw=float(references_raw),
            edits_raw=float(edits_raw),
            reverts_raw=float(reverts_raw),
            views_level=features_mod.ActivityLevel.from_label(views_level),
            references_level=features_mod.ActivityLevel.from_label(references_level),
            edits_level=features_mod.ActivityLevel.from_label(edits_level),
            reverts_level=features_mod.ActivityLevel.from_label(reverts_level),
            included=included == "1",
            rewritten=None if rewritten == "" else rewritten == "1",
        ))
    return records


# ---------------------------------------------------------------------------
# fit-inclusion / fit-rewrite
# ---------------------------------------------------------------------------

def _write_coefficients(path: Path, coeffs: glm_mod.CoefficientSet) -> None:
    write_table(path, ("label", "estimate", "std_error", "z_value", "p_value"),
                [(label, float(est), float(se), float(z), float(p))
                 for label, est, se, z, p in zip(
                     coeffs.labels, coeffs.estimates, coeffs.standard_errors,
                     coeffs.z_values, coeffs.p_values)])


def _cmd_fit(args, config, outcome_name: str) -> int:
    features_path = Path(_cfg(args, config, "features", "out/features.tsv"))
    default_out = features_path.parent / f"coefficients_{outcome_name}.csv"
    out_path = Path(_cfg(args, config, "out", default_out))
    interaction = _cfg(args, config, "interaction", "score")
    ridge = _cfg(args, config, "ridge", False, _parse_bool)
    tol = _cfg(args, config, "tol", 1e-8, float)
    max_iter = _cfg(args, config, "max-iter", 100, int)
    records = _read_feature_records(features_path)

    if outcome_name == "inclusion":
        outcome = [r.included for r in records]
    else:
        records = [r for r in records if r.included and r.rewritten is not None]
        outcome = [bool(r.rewritten) for r in records]
    if not records:
        raise DataError("no rows to fit")
    design = glm_mod.encode_design(records, interaction=interaction)
    coeffs = glm_mod.fit_logistic(design, outcome, tol=tol,
                                  max_iter=max_iter, ridge=ridge)
    _write_coefficients(out_path, coeffs)
    for note in coeffs.notes:
        logger.info("%s", note)
    status = "converged" if coeffs.converged else "NOT converged"
    print(f"{outcome_name} fit over {len(records)} rows, "
          f"{len(coeffs.labels)} columns: {status} after {coeffs.iterations} "
          f"iterations (log-likelihood {coeffs.log_likelihood:.4f}) -> {out_path}")
    return 0


# ---------------------------------------------------------------------------
# complexity
# ---------------------------------------------------------------------------

def _cmd_complexity(args, config) -> int:
    ingest_dir = Path(_cfg(args, config, "ingest-dir", "out"))
    out_dir = Path(_cfg(args, config, "out", ingest_dir))
    min_edits = _cfg(args, config, "min-edits", 2, int)
    accepted_only = _cfg(args, config, "accepted-only", False, _parse_bool)
    tol = _cfg(args, config, "tol", 1e-9, float)
    max_iter = _cfg(args, config, "max-iter", 1000, int)

    _, page_rows = read_table(_require(ingest_dir / "pages.tsv"), delimiter="\t")
    title_by_slug = {slug: title for slug, title, status, matched in page_rows
                     if matched == "1" and status != ingest_mod.PageStatus.MISSING.value}
    paired_titles = set(title_by_slug.values())

    _, revision_rows = read_table(_require(ingest_dir / "revisions.tsv"), delimiter="\t")
    human_events = [(editor, title) for title, editor, _, _ in revision_rows if editor]

    _, edit_rows = read_table(_require(ingest_dir / "edits.tsv"), delimiter="\t")
    generative_events = []
    for slug, author, _, has_feedback in edit_rows:
        if accepted_only and has_feedback != "1":
            continue
        title = title_by_slug.get(slug)
        if title and author:
            generative_events.append((author, title))

    # A page enters only when it clears the threshold on *both* platforms.
    counts_human = defaultdict(int)
    for _, title in human_events:
        counts_human[title] += 1
    counts_generative = defaultdict(int)
    for _, title in generative_events:
        counts_generative[title] += 1
    eligible = {t for t in paired_titles
                if counts_human[t] >= min_edits
                and counts_generative[t] >= min_edits}
    if not eligible:
        raise DataError(f"no pages with >= {min_edits} edits on both platforms")

    result_human = complexity_mod.fitness_complexity(
        complexity_mod.build_bipartite(human_events, eligible, min_edits),
        tol=tol, max_iter=max_iter)
    result_generative = complexity_mod.fitness_complexity(
        complexity_mod.build_bipartite(generative_events, eligible, min_edits),
        tol=tol, max_iter=max_iter)

    q_human = result_human.complexity_by_page()
    q_generative = result_generative.complexity_by_page()
    common = sorted(set(q_human) & set(q_generative))
    if not common:
        raise DataError("no pages survived on both platforms")
    q_human = {p: q_human[p] for p in common}
    q_generative = {p: q_generative[p] for p in common}
    deltas = complexity_mod.rank_delta(q_human, q_generative)
    ranks_human = dict(zip(common, average_ranks([q_human[p] for p in common])))
    ranks_generative = dict(zip(common, average_ranks([q_generative[p] for p in common])))

    write_table(out_dir / "complexity.csv",
                ("page", "complexity_a", "complexity_b", "rank_a", "rank_b", "rank_delta"),
                [(p, q_human[p], q_generative[p], float(ranks_human[p]),
                  float(ranks_generative[p]), deltas[p]) for p in common])
    write_table(out_dir / "fitness_human.csv", ("editor", "fitness"),
                sorted(result_human.fitness_by_editor().items()))
    write_table(out_dir / "fitness_generative.csv", ("editor", "fitness"),
                sorted(result_generative.fitness_by_editor().items()))
    for label, res in (("human", result_human), ("generative", result_generative)):
        status = "converged" if res.converged else "NOT converged"
        print(f"{label}: {len(res.pages)} pages x {len(res.editors)} editors, "
              f"{status} after {res.iterations} iterations")
    print(f"wrote {len(common)} common pages -> {out_dir / 'complexity.csv'}")
    return 0


# ---------------------------------------------------------------------------
# narrative
# ---------------------------------------------------------------------------

def bundled_polarity_path() -> Path:
    return Path(__file__).resolve().parent / "data" / "polarity_map.tsv"


def _cmd_narrative(args, config) -> int:
    triplets_path = Path(_need(args, config, "triplets"))
    out_dir = Path(_cfg(args, config, "out", "out"))
    polarity_path = Path(_cfg(args, config, "polarity", bundled_polarity_path()))
    aliases_path = _cfg(args, config, "aliases")
    page_context_path = _cfg(args, config, "page-context")
    decile_mode = _cfg(args, config, "decile-mode", "combined")

    triplets = narrative_mod.read_triplets(triplets_path)
    alias_map = narrative_mod.load_alias_map(Path(aliases_path)) if aliases_path else {}
    page_context = (narrative_mod.load_page_context(Path(page_context_path))
                    if page_context_path else {})
    polarity_map = narrative_mod.load_polarity_map(polarity_path)
    triplets = narrative_mod.normalize_entities(triplets, alias_map, page_context)
    entity_types = narrative_mod.modal_entity_types(triplets)

    by_group = defaultdict(list)
    for t in triplets:
        by_group[(t.domain, t.platform)].append(t)

    balance_rows = []
    displacement_rows = []
    metric_rows = []
    graphs: dict[tuple[narrative_mod.Domain, narrative_mod.Platform],
                 narrative_mod.NarrativeGraph] = {}
    for (domain, platform), group in sorted(
            by_group.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)):
        graph = narrative_mod.build_graph(group, entity_types, polarity_map)
        graphs[(domain, platform)] = graph
        write_table(
            out_dir / f"edges_{domain.value}_{platform.value}.tsv",
            ("source", "target", "polarity", "weight"),
            sorted((src, dst, pol.value, weight)
                   for (src, dst, pol), weight in graph.edges.items()),
            delimiter="\t")
        for node in sorted(graph.nodes):
            balance = narrative_mod.sentiment_balance(graph, node)
            balance_rows.append((domain.value, platform.value, node,
                                 balance.ds_out, balance.ds_in,
                                 narrative_mod.sentiment_mass(graph, node)))
        for polarity in narrative_mod.Polarity:
            metrics = narrative_mod.graph_metrics(graph, polarity)
            metric_rows.append((domain.value, platform.value, polarity.value,
                                metrics.edge_density, metrics.degree_gini,
                                metrics.reciprocity, metrics.cycle_count))

    for domain in narrative_mod.Domain:
        human = graphs.get((domain, narrative_mod.Platform.HUMAN))
        generative = graphs.get((domain, narrative_mod.Platform.GENERATIVE))
        if human is None or generative is None:
            continue
        top_human = narrative_mod.top_decile_nodes(human, mode=decile_mode)
        top_generative = narrative_mod.top_decile_nodes(generative, mode=decile_mode)
        for node in sorted(top_human & top_generative):
            displacement = narrative_mod.role_displacement(
                narrative_mod.sentiment_balance(human, node),
                narrative_mod.sentiment_balance(generative, node))
            displacement_rows.append((
                domain.value, node, displacement.d_out, displacement.d_in,
                1 if displacement.complete else 0))

    write_table(out_dir / "balances.csv",
                ("domain", "platform", "node", "ds_out", "ds_in", "sentiment_mass"),
                balance_rows)
    write_table(out_dir / "displacements.csv",
                ("domain", "node", "d_out", "d_in", "complete"),
                displacement_rows)
    write_table(out_dir / "graph_metrics.csv",
                ("domain", "platform", "polarity", "edge_density", "degree_gini",
                 "reciprocity", "cycle_count"),
                metric_rows)
    print(f"built {len(graphs)} graphs; wrote balances/displacements/metrics -> {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# framing
# ---------------------------------------------------------------------------

def _cmd_framing(args, config) -> int:
    ingest_dir = Path(_cfg(args, config, "ingest-dir", "out"))
    wiki_articles = Path(_need(args, config, "wiki-articles"))
    grok_dir = Path(_need(args, config, "grok-dir"))
    endpoint = str(_need(args, config, "endpoint"))
    model = str(_cfg(args, config, "model", framing_mod.DEFAULT_MODEL))
    min_chars = _cfg(args, config, "min-chars", framing_mod.DEFAULT_MIN_CHARS, int)
    retries = _cfg(args, config, "retries", framing_mod.DEFAULT_RETRIES, int)
    concurrency = _cfg(args, config, "concurrency", framing_mod.DEFAULT_CONCURRENCY, int)
    timeout = _cfg(args, config, "timeout", 60.0, float)
    cache_dir = _cfg(args, config, "cache")
    out_path = Path(_cfg(args, config, "out", ingest_dir / "framing_scores.csv"))

    client = framing_mod.ClientConfig(
        endpoint=endpoint, model=model, retries=retries, timeout=timeout,
        concurrency=concurrency, cache_dir=Path(cache_dir) if cache_dir else None)

    _, page_rows = read_table(_require(ingest_dir / "pages.tsv"), delimiter="\t")
    pairs = [(title, slug) for slug, title, status, matched in page_rows
             if matched == "1" and status != ingest_mod.PageStatus.MISSING.value]

    score_rows = []
    excluded_rows = []
    for title, slug in sorted(pairs):
        sides = (
            ("human", wiki_articles / f"{title}.txt", "wikitext"),
            ("generative", grok_dir / f"{slug}.html", "html"),
        )
        for platform, path, convention in sides:
            if not path.exists():
                excluded_rows.append((title, platform,
                                      f"article file absent: {path.name}"))
                continue
            lead = framing_mod.extract_lead(
                path.read_text(encoding="utf-8"), convention,
                title=title, platform=platform)
            if not lead.eligible(min_chars):
                excluded_rows.append((
                    title, platform,
                    f"lead too short: {lead.char_count} < {min_chars}"))
                continue
            sentences = framing_mod.split_sentences(lead.text)
            annotations = framing_mod.annotate_sentences(client, sentences)
            score = framing_mod.framing_score(annotations, lead, min_chars=min_chars)
            score_rows.append((score.page, score.platform,
                               score.laudatory_fraction, score.conflict_fraction,
                               score.n_sentences, score.n_unscored))

    write_table(out_path, ("page", "platform", "laudatory", "conflict", "n", "unscored"),
                sorted(score_rows, key=lambda r: (r[0], r[1])))
    write_table(out_path.parent / "framing_excluded.tsv", ("page", "platform", "reason"),
                sorted(excluded_rows), delimiter="\t")
    print(f"scored {len(score_rows)} leads ({len(excluded_rows)} excluded) -> {out_path}")
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _cmd_report(args, config) -> int:
    artifacts = Path(_cfg(args, config, "artifacts", "out"))
    out_dir = Path(_cfg(args, config, "out", artifacts / "report"))
    leaning_path = _cfg(args, config, "leaning")

    records = _read_feature_records(artifacts / "features.tsv")

    # inclusion/rewrite shares per factor level (selection overview)
    share_rows = []
    for factor, attr in (("V", "views_level"), ("E", "edits_level"),
                         ("R", "references_level"), ("Rv", "reverts_level")):
        for level in features_mod.ActivityLevel:
            group = [r for r in records if getattr(r, attr) == level]
            included = [r for r in group if r.included]
            rewritable = [r for r in included if r.rewritten is not None]
            rewritten = [r for r in rewritable if r.rewritten]
            share_rows.append((
                factor, level.label, len(group), len(included),
                len(included) / len(group) if group else None,
                len(rewritten),
                len(rewritten) / len(rewritable) if rewritable else None,
            ))
    write_table(out_dir / "report_selection_shares.csv",
                ("factor", "level", "n_pages", "n_included", "included_share",
                 "n_rewritten", "rewritten_share"), share_rows)

    # coefficient tables from both fits
    coefficient_rows = []
    for model_name in ("inclusion", "rewrite"):
        path = _require(artifacts / f"coefficients_{model_name}.csv")
        _, rows = read_table(path)
        coefficient_rows.extend([(model_name, *row) for row in rows])
    write_table(out_dir / "report_coefficients.csv",
                ("model", "label", "estimate", "std_error", "z_value", "p_value"),
                coefficient_rows)

    # editor fractions and per-page daily-view concentration
    _, page_rows = read_table(_require(artifacts / "pages.tsv"), delimiter="\t")
    title_by_slug = {slug: title for slug, title, status, matched in page_rows
                     if matched == "1" and status != ingest_mod.PageStatus.MISSING.value}
    _, revision_rows = read_table(_require(artifacts / "revisions.tsv"), delimiter="\t")
    _, edit_rows = read_table(_require(artifacts / "edits.tsv"), delimiter="\t")
    _, view_rows = read_table(_require(artifacts / "pageviews.tsv"), delimiter="\t")

    human_editors = defaultdict(set)
    for title, editor, _, _ in revision_rows:
        if editor:
            human_editors[title].add(editor)
    generative_editors = defaultdict(set)
    for slug, author, _, _ in edit_rows:
        title = title_by_slug.get(slug)
        if title and author:
            generative_editors[title].add(author)
    total_human = len(set().union(*human_editors.values())) if human_editors else 0
    total_generative = (len(set().union(*generative_editors.values()))
                        if generative_editors else 0)
    daily_views = defaultdict(list)
    for title, _, count in view_rows:
        daily_views[title].append(int(count))

    activity_rows = []
    for title in sorted(set(title_by_slug.values())):
        fraction_human = (features_mod.editor_fraction(human_editors[title], total_human)
                          if total_human else None)
        fraction_generative = (
            features_mod.editor_fraction(generative_editors[title], total_generative)
            if total_generative else None)
        days = daily_views.get(title, [])
        views_gini = (features_mod.gini_index(days)
                      if days and any(v > 0 for v in days) else None)
        activity_rows.append((title, fraction_human, fraction_generative, views_gini))
    write_table(out_dir / "report_editor_activity.csv",
                ("page", "editor_fraction_human", "editor_fraction_generative",
                 "views_gini"), activity_rows)

    # complexity comparison (already a plot table; re-alias the columns)
    _, complexity_rows = read_table(_require(artifacts / "complexity.csv"))
    write_table(out_dir / "report_complexity.csv",
                ("page", "complexity_human", "complexity_generative",
                 "rank_human", "rank_generative", "rank_delta"), complexity_rows)

    _, displacement_rows = read_table(_require(artifacts / "displacements.csv"))
    write_table(out_dir / "report_displacements.csv",
                ("domain", "node", "d_out", "d_in", "complete"), displacement_rows)
    _, metric_rows = read_table(_require(artifacts / "graph_metrics.csv"))
    write_table(out_dir / "report_graph_metrics.csv",
                ("domain", "platform", "polarity", "edge_density", "degree_gini",
                 "reciprocity", "cycle_count"), metric_rows)

    # framing scatter with optional leaning labels
    _, framing_rows = read_table(_require(artifacts / "framing_scores.csv"))
    leaning = {}
    if leaning_path:
        _, leaning_rows = read_table(Path(leaning_path), delimiter="\t")
        leaning = {row[0]: row[1] for row in leaning_rows if len(row) >= 2}
    by_page: dict[str, dict[str, tuple[float, float]]] = defaultdict(dict)
    for page, platform, laudatory, conflict, _, _ in framing_rows:
        by_page[page][platform] = (float(laudatory), float(conflict))
    framing_out = []
    for page in sorted(by_page):
        human = by_page[page].get("human")
        generative = by_page[page].get("generative")
        framing_out.append((
            page,
            human[0] if human else None, generative[0] if generative else None,
            human[1] if human else None, generative[1] if generative else None,
            leaning.get(page, ""),
        ))
    write_table(out_dir / "report_framing.csv",
                ("page", "laudatory_human", "laudatory_generative",
                 "conflict_human", "conflict_generative", "leaning"), framing_out)

    # rank correlations backing the scatter captions
    correlation_rows = []

    def correlate(name: str, xs: list[float], ys: list[float]) -> None:
        try:
            result = spearman(xs, ys)
            correlation_rows.append((name, result.rho, result.p_value, result.n))
        except ValueError:
            correlation_rows.append((name, None, None, len(xs)))

    if complexity_rows:
        correlate("complexity_rank",
                  [float(r[1]) for r in complexity_rows],
                  [float(r[2]) for r in complexity_rows])
    both = [page for page in sorted(by_page)
            if "human" in by_page[page] and "generative" in by_page[page]]
    if both:
        correlate("framing_laudatory",
                  [by_page[p]["human"][0] for p in both],
                  [by_page[p]["generative"][0] for p in both])
        correlate("framing_conflict",
                  [by_page[p]["human"][1] for p in both],
                  [by_page[p]["generative"][1] for p in both])
    write_table(out_dir / "report_correlations.csv",
                ("quantity", "rho", "p_value", "n"), correlation_rows)

    print(f"wrote report tables -> {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "fetch": _cmd_fetch,
    "ingest": _cmd_ingest,
    "features": _cmd_features,
    "fit-inclusion": lambda a, c: _cmd_fit(a, c, "inclusion"),
    "fit-rewrite": lambda a, c: _cmd_fit(a, c, "rewrite"),
    "complexity": _cmd_complexity,
    "narrative": _cmd_narrative,
    "framing": _cmd_framing,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO, format="%(message)s")
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        config = load_config(args.config) if args.config else {}
        return _COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 3
    except (DataError, ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
