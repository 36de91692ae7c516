"""Lead-section framing scores via a structured-output LLM endpoint.

Per page: take the lead (text before the first heading), drop pages whose lead
is shorter than 500 characters, split into sentences with a deterministic
rule-based splitter, ask a local chat-completion endpoint to label every
sentence on two binary dimensions (laudatory framing, conflict/controversy) at
temperature 0, and aggregate the fractions over scored sentences.

Responses are cached per (sentence, prompt, model) content hash, so reruns are
free and a run interrupted by a transport failure resumes where it stopped.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import requests

from .fileio import TransportError, atomic_write_text

logger = logging.getLogger(__name__)

DEFAULT_MIN_CHARS = 500
DEFAULT_RETRIES = 3       # total attempts per sentence before it is Unscored
DEFAULT_CONCURRENCY = 4
DEFAULT_MODEL = "gemma3:4b"

LAUDATORY_KEY = "laudatory_framing"
CONFLICT_KEY = "conflict_controversy"

# The annotation instruction, with one slot for the sentence under evaluation.
PROMPT_TEMPLATE = """You are an automated text analysis system.

Task:

Analyze the framing of the provided text snippet. Do NOT evaluate factual accuracy, topic, or intent beyond framing.

Dimensions to evaluate:

- laudatory_framing: Does the text praise, admire, or glorify something or someone?
- conflict_controversy: Does the text focus on disputes, disagreements, or controversies, rather than merely mentioning them?

Output:

Return only a valid JSON assigning 1 if the snippet exhibits the dimension, or 0 otherwise.

Text: {sentence}"""

RESPONSE_SCHEMA = {
    "type": "object",
    "properties": {
        LAUDATORY_KEY: {"type": "integer", "enum": [0, 1]},
        CONFLICT_KEY: {"type": "integer", "enum": [0, 1]},
    },
    "required": [LAUDATORY_KEY, CONFLICT_KEY],
}


@dataclass(frozen=True)
class LeadSection:
    title: str
    platform: str
    text: str
    char_count: int

    def eligible(self, min_chars: int = DEFAULT_MIN_CHARS) -> bool:
        return self.char_count >= min_chars


@dataclass(frozen=True)
class SentenceAnnotation:
    sentence: str
    laudatory: Optional[int]
    conflict: Optional[int]
    status: str  # "Scored" | "Unscored"


@dataclass(frozen=True)
class FramingScore:
    page: str
    platform: str
    laudatory_fraction: float
    conflict_fraction: float
    n_sentences: int
    n_unscored: int


@dataclass
class ClientConfig:
    endpoint: str
    model: str = DEFAULT_MODEL
    temperature: float = 0.0
    retries: int = DEFAULT_RETRIES
    timeout: float = 60.0
    concurrency: int = DEFAULT_CONCURRENCY
    cache_dir: Optional[Path] = None
    # transport(url, payload, timeout) -> parsed JSON response; swap in tests.
    transport: Callable[[str, dict, float], dict] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.transport is None:
            self.transport = _http_transport


# ---------------------------------------------------------------------------
# Lead extraction and sentence splitting
# ---------------------------------------------------------------------------

_WIKITEXT_HEADING = re.compile(r"^\s*==", re.MULTILINE)
_HTML_HEADING = re.compile(r"<h[1-6][\s>/]", re.IGNORECASE)


def extract_lead(article: str, convention: str, title: str = "",
                 platform: str = "") -> LeadSection:
    """Everything before the first heading, whitespace-trimmed.

    ``convention`` is "wikitext" (headings are lines starting with ``==``) or
    "html" (first ``<h1>``–``<h6>`` tag; the lead substring is then
    tag-stripped). An article that *starts* with a heading yields an empty,
    ineligible lead; an empty article is an error.
    """
    if not article or not article.strip():
        raise ValueError("empty article: nothing to extract a lead from")
    if convention == "wikitext":
        match = _WIKITEXT_HEADING.search(article)
        lead = article[:match.start()] if match else article
    elif convention == "html":
        match = _HTML_HEADING.search(article)
        raw = article[:match.start()] if match else article
        from .ingest import visible_text
        lead = visible_text(raw)
    else:
        raise ValueError(f"unknown heading convention {convention!r}")
    lead = lead.strip()
    return LeadSection(title=title, platform=platform, text=lead,
                       char_count=len(lead))


# Tokens (lowercased, trailing dot removed) after which a period does not end a
# sentence. Single capital letters are deliberately NOT guarded: "A. B? C!"
# must split into three sentences.
DEFAULT_ABBREVIATIONS = frozenset({
    "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "mt", "gen", "col",
    "lt", "sgt", "rev", "hon", "pres", "gov", "sen", "rep", "etc", "vs",
    "cf", "ca", "approx", "inc", "ltd", "co", "corp", "dept", "univ",
    "e.g", "i.e", "u.s", "u.k", "u.n", "d.c", "no", "fig", "vol", "pp",
})

_TERMINAL_RUN = re.compile(r"[.!?]+")
_OPENERS = "\"'“‘([«"


def _token_before(text: str, index: int) -> str:
    """The word (letters/dots) immediately preceding position ``index``."""
    j = index
    while j > 0 and (text[j - 1].isalnum() or text[j - 1] in ".&"):
        j -= 1
    return text[j:index]


def split_sentences(text: str,
                    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS) -> list[str]:
    """Deterministic rule-based sentence segmentation.

    Splits after runs of terminal punctuation (., !, ?) followed by whitespace
    and an uppercase letter, digit, or opening quote/bracket (or end of text).
    A single period does not split when the preceding token is on the
    abbreviation guard list or the period sits between digits (decimals).
    Joining the output with spaces reconstructs the input modulo whitespace.
    """
    if not text or not text.strip():
        return []
    sentences: list[str] = []
    start = 0
    for match in _TERMINAL_RUN.finditer(text):
        end = match.end()
        # absorb closing quotes/brackets
        while end < len(text) and text[end] in "\"'”’)]»":
            end += 1
        if end < len(text) and not text[end].isspace():
            continue  # mid-token punctuation (decimals, URLs): no boundary
        run = match.group()
        if run == ".":
            token = _token_before(text, match.start())
            if token and token.rstrip(".").lower() in abbreviations:
                continue
            if token and token[-1].isdigit():
                nxt = text[end:].lstrip()
                if nxt and nxt[0].isdigit():
                    continue
        nxt = text[end:].lstrip()
        if nxt and not (nxt[0].isupper() or nxt[0].isdigit() or nxt[0] in _OPENERS):
            continue
        piece = text[start:end].strip()
        if piece:
            sentences.append(piece)
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


# ---------------------------------------------------------------------------
# Structured-output annotation client
# ---------------------------------------------------------------------------

def _http_transport(url: str, payload: dict, timeout: float) -> dict:
    """POST JSON to a chat-completion endpoint; network failures are transport errors."""
    try:
        response = requests.post(url, json=payload, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"endpoint unreachable: {exc}") from None
    if response.status_code >= 400:
        # An HTTP error is a bad *answer*, not a dead endpoint: let the retry
        # loop count it as a non-conforming attempt.
        return {"_http_status": response.status_code}
    try:
        return response.json()
    except ValueError:
        return {"_undecodable": True}


def build_request(config: ClientConfig, sentence: str) -> dict:
    """One chat-completion request body (ollama-style; extra keys are ignored
    by OpenAI-compatible servers that accept top-level temperature)."""
    return {
        "model": config.model,
        "messages": [
            {"role": "user", "content": PROMPT_TEMPLATE.format(sentence=sentence)},
        ],
        "stream": False,
        "options": {"temperature": config.temperature},
        "format": RESPONSE_SCHEMA,
    }


def _response_content(document: dict) -> Optional[str]:
    """Pull the assistant message text out of an ollama- or OpenAI-shaped reply."""
    if not isinstance(document, dict):
        return None
    message = document.get("message")
    if isinstance(message, dict) and isinstance(message.get("content"), str):
        return message["content"]
    choices = document.get("choices")
    if isinstance(choices, list) and choices:
        first = choices[0]
        if isinstance(first, dict):
            message = first.get("message")
            if isinstance(message, dict) and isinstance(message.get("content"), str):
                return message["content"]
    return None


def _parse_labels(content: str) -> Optional[tuple[int, int]]:
    """Validate the structured output: exactly the two keys, integer 0/1 values."""
    try:
        document = json.loads(content)
    except (json.JSONDecodeError, TypeError):
        return None
    if not isinstance(document, dict):
        return None
    if set(document.keys()) != {LAUDATORY_KEY, CONFLICT_KEY}:
        return None
    values = []
    for key in (LAUDATORY_KEY, CONFLICT_KEY):
        v = document[key]
        if type(v) is not int or v not in (0, 1):
            return None
        values.append(v)
    return values[0], values[1]


def cache_key(config: ClientConfig, sentence: str) -> str:
    """Content hash of sentence + prompt + model (what determines the answer)."""
    prompt = PROMPT_TEMPLATE.format(sentence=sentence)
    digest = hashlib.sha256()
    digest.update(config.model.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt.encode("utf-8"))
    return digest.hexdigest()


def _cache_path(config: ClientConfig, sentence: str) -> Optional[Path]:
    if config.cache_dir is None:
        return None
    return Path(config.cache_dir) / (cache_key(config, sentence) + ".json")


def _cache_load(config: ClientConfig, sentence: str) -> Optional[tuple[int, int]]:
    path = _cache_path(config, sentence)
    if path is None or not path.exists():
        return None
    try:
        stored = json.loads(path.read_text(encoding="utf-8"))
        return _parse_labels(json.dumps({
            LAUDATORY_KEY: stored[LAUDATORY_KEY],
            CONFLICT_KEY: stored[CONFLICT_KEY],
        }))
    except (ValueError, KeyError, TypeError):
        return None  # unreadable cache entry: re-request


def _cache_store(config: ClientConfig, sentence: str, labels: tuple[int, int]) -> None:
    path = _cache_path(config, sentence)
    if path is None:
        return
    payload = {
        LAUDATORY_KEY: labels[0],
        CONFLICT_KEY: labels[1],
        "sentence": sentence,
        "model": config.model,
    }
    atomic_write_text(path, json.dumps(payload, ensure_ascii=False, sort_keys=True))


def _annotate_one(config: ClientConfig, sentence: str) -> SentenceAnnotation:
    cached = _cache_load(config, sentence)
    if cached is not None:
        return SentenceAnnotation(sentence, cached[0], cached[1], "Scored")
    payload = build_request(config, sentence)
    attempts = max(1, config.retries)
    for _ in range(attempts):
        document = config.transport(config.endpoint, payload, config.timeout)
        content = _response_content(document)
        labels = _parse_labels(content) if content is not None else None
        if labels is not None:
            _cache_store(config, sentence, labels)
            return SentenceAnnotation(sentence, labels[0], labels[1], "Scored")
    logger.warning("sentence unscored after %d attempts: %.60s...", attempts, sentence)
    return SentenceAnnotation(sentence, None, None, "Unscored")


def annotate_sentences(config: ClientConfig,
                       sentences: Sequence[str]) -> list[SentenceAnnotation]:
    """Score sentences on the two framing dimensions, one request per sentence.

    Identical sentences are annotated once; cached sentences issue no request.
    Requests run with bounded concurrency (config.concurrency). A transport
    failure aborts the run (already-scored sentences stay cached, so the run
    is resumable); non-conforming responses are retried up to config.retries
    total attempts and then marked Unscored.
    """
    if not sentences:
        return []
    unique = list(dict.fromkeys(sentences))
    results: dict[str, SentenceAnnotation] = {}
    if config.concurrency <= 1 or len(unique) == 1:
        for sentence in unique:
            results[sentence] = _annotate_one(config, sentence)
    else:
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            futures = {s: pool.submit(_annotate_one, config, s) for s in unique}
            errors: list[BaseException] = []
            for sentence, future in futures.items():
                try:
                    results[sentence] = future.result()
                except BaseException as exc:  # noqa: BLE001 - re-raised below
                    errors.append(exc)
            if errors:
                raise errors[0]
    return [results[s] for s in sentences]


def framing_score(annotations: Sequence[SentenceAnnotation],
                  lead: LeadSection,
                  min_chars: int = DEFAULT_MIN_CHARS) -> FramingScore:
    """Aggregate per-sentence labels into per-page fractions over Scored sentences.

    Raises ValueError for an ineligible lead (< min_chars; callers record the
    exclusion) and for a page where no sentence could be scored.
    """
    if not lead.eligible(min_chars):
        raise ValueError(
            f"lead ineligible: {lead.char_count} chars < {min_chars} minimum"
        )
    scored = [a for a in annotations if a.status == "Scored"]
    if not scored:
        raise ValueError("page unscorable: zero scored sentences")
    laudatory = sum(a.laudatory for a in scored) / len(scored)
    conflict = sum(a.conflict for a in scored) / len(scored)
    return FramingScore(
        page=lead.title,
        platform=lead.platform,
        laudatory_fraction=laudatory,
        conflict_fraction=conflict,
        n_sentences=len(annotations),
        n_unscored=len(annotations) - len(scored),
    )
