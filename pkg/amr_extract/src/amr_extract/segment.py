"""Deterministic rule-based sentence segmentation.

Indices into the returned list are the sentence indices recorded on extracted
triplets, so this splitter must be stable: same text in, same pieces out,
across runs and machines. That is why it is a small rule set rather than a
learned model.
"""

import re

# Tokens that end with a period without ending a sentence. Matched against
# the lowercased word preceding the candidate boundary, trailing dot removed.
ABBREVIATIONS = frozenset({
    "mr", "mrs", "ms", "dr", "prof", "rev", "hon", "st", "jr", "sr",
    "sen", "rep", "gov", "gen", "col", "sgt", "capt", "lt",
    "vs", "etc", "approx", "dept", "univ", "assn", "bros", "inc", "ltd",
    "co", "corp", "no", "nos", "fig", "figs", "vol", "ch", "pp", "ed",
    "e.g", "i.e", "cf", "al", "u.s", "u.k", "u.n", "d.c",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec", "mon", "tue", "wed", "thu", "fri", "sat", "sun",
})

# terminator run, optional closing quotes/brackets, then whitespace
_BOUNDARY = re.compile(r'([.!?]+)(["\'”’)\]]*)(\s+)')
# a new sentence opens with a capital, a digit, or opening punctuation
_OPENER = re.compile(r'["\'“‘(\[A-Z0-9]')
_LAST_WORD = re.compile(r'(\S+)$')


def _ends_with_abbreviation(prefix: str) -> bool:
    match = _LAST_WORD.search(prefix)
    if not match:
        return False
    word = match.group(1).rstrip(".").lstrip('("\'[“‘').lower()
    if not word:
        return False
    if word in ABBREVIATIONS:
        return True
    # single-letter initials ("J. Smith") and dotted acronyms ("U.S.")
    return len(word) == 1 and word.isalpha() or bool(re.fullmatch(r"(\w\.)+\w", word))


def split_sentences(text: str) -> list[str]:
    """Split prose into sentences; pieces are stripped and never empty.

    A terminator ends a sentence only when followed by whitespace and an
    uppercase letter, digit, or opening quote/bracket, and when the word
    before it is not a known abbreviation, an initial, or a dotted acronym.
    Closing quotes and brackets stay attached to the sentence they close.
    """
    pieces: list[str] = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        next_char = text[match.end():match.end() + 1]
        if not next_char or not _OPENER.match(next_char):
            continue
        if match.group(1).endswith(".") and _ends_with_abbreviation(
                text[:match.start(1)] + match.group(1)[:-1]):
            continue
        pieces.append(text[start:match.end(2)])
        start = match.end()
    pieces.append(text[start:])
    return [piece.strip() for piece in pieces if piece.strip()]
