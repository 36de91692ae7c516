"""Deterministic synthetic demo corpus for the pipeline.

Generates every raw input the CLI ingests — snapshot HTML, pageview and
revision dumps, edit-request JSON, reference counts, extraction triplets,
curation tables — small enough to check into a test fixture but shaped like
the real thing: heavy-tailed activity counts, nested editor/page incidence,
a mix of missing/verbatim/rewritten counterparts, malformed dump lines, and
narrative graphs whose two platform versions disagree in sentiment.

Same seed, same bytes: everything flows from one ``random.Random``.

    python -m wikigrok.synth --seed 42 --out demo_corpus
"""

from __future__ import annotations

import argparse
import json
import math
import random
from datetime import datetime, timedelta
from pathlib import Path

from .fileio import atomic_write_text, render_table
from .ingest import CC_FOOTER, MISSING_MARKER
from .narrative import Domain, Platform, Triplet, write_triplets

MONTH = "2025-11"
WINDOW_START = "2025-10-27"
WINDOW_END = "2025-11-24"

TITLES = [
    "Aurora Initiative", "Basalt Accord", "Brightwater", "Cinder Valley Dam",
    "Corvid Broadcasting", "Delmar Froste", "Elowen Park", "Ferrostead",
    "Glass Harbor Treaty", "Halcyon Array", "Ilya Morrow", "Juniper Syndicate",
    "Kestrel Point", "Lumen Foundry", "Merrow Island", "Northgate Tunnel",
    "Oriel Observatory", "Pallas Exchange", "Quarry Lane Riots", "Rimeholt",
    "Selene Vault", "Tallow Creek", "Umber Pass", "Vesper Grid",
]
MATCHED_TITLES = TITLES[:18]          # have a generative counterpart page
MISSING_TITLES = {"Delmar Froste", "Kestrel Point"}
VERBATIM_TITLES = {
    "Basalt Accord", "Corvid Broadcasting", "Ferrostead",
    "Halcyon Array", "Merrow Island", "Pallas Exchange",
}
EXTRA_SLUGS = ["Zephyr_Archive", "Orrin_Codex"]   # no wiki counterpart
ZERO_VIEW_TITLES = {"Tallow Creek", "Vesper Grid"}
SHORT_WIKI_LEADS = {"Elowen Park", "Merrow Island"}
SHORT_GROK_LEADS = {"Northgate Tunnel"}

WIKI_EDITORS = [
    "Quillon", "MossWren", "Harrower", "Tessellate",
    "VioletNorth", "Gatekeep", "Smolder", "Antiphon",
]
GROK_AUTHORS = [
    "ForgeUnit7", "LatticeBot", "VermilionQ",
    "Archive9", "CalderaOps", "NimbusEdit",
]

_WORDS = (
    "the a its regional municipal early later annual former central coastal "
    "northern industrial civic projected restored original combined expanded "
    "council charter reservoir corridor archive census ledger festival quarry "
    "foundry harbor station district assembly commission survey network grid "
    "terminal expansion renovation settlement pipeline ferry orchard granite "
    "remained opened closed operated funded served linked housed reported "
    "approved rebuilt supplied measured crossed bordered preceded followed "
    "during beside beyond under across within toward near against along"
).split()

_FEEDBACK = ["Merged after review", "Needs sources",
             "Duplicate of an earlier request", ""]


def slug_for(title: str) -> str:
    return title.replace(" ", "_")


# ---------------------------------------------------------------------------
# Prose
# ---------------------------------------------------------------------------

def _sentence(rng: random.Random) -> str:
    words = [rng.choice(_WORDS) for _ in range(rng.randint(8, 14))]
    terminal = rng.choice([".", ".", ".", ".", ".", ".", "!", "?"])
    return " ".join(words).capitalize() + terminal


def _paragraph(rng: random.Random, min_chars: int) -> str:
    pieces = [_sentence(rng)]
    while sum(len(p) for p in pieces) + len(pieces) - 1 < min_chars:
        pieces.append(_sentence(rng))
    return " ".join(pieces)


def _wiki_article(rng: random.Random, title: str) -> str:
    lead = _paragraph(rng, 180 if title in SHORT_WIKI_LEADS else 650)
    return (
        f"{lead}\n\n"
        f"== History ==\n{_paragraph(rng, 320)}\n\n"
        f"== Reception ==\n{_paragraph(rng, 200)}\n"
    )


def _grok_html(rng: random.Random, title: str) -> str:
    if title in MISSING_TITLES:
        return (
            "<html><head><title>Not found</title>"
            "<script>var tracker = 0;</script></head>"
            "<body><nav>Home Search About</nav>"
            f"<main><h1>{MISSING_MARKER}</h1></main></body></html>"
        )
    lead = _paragraph(rng, 220 if title in SHORT_GROK_LEADS else 680)
    body = _paragraph(rng, 360)
    footer = f"<p>{CC_FOOTER}</p>" if title in VERBATIM_TITLES else ""
    return (
        f"<html><head><title>{title}</title>"
        "<style>p { margin: 0 }</style><script>var nav = 1;</script></head>"
        "<body><nav>Home Search About</nav>"
        f"<p>{lead}</p>"
        f"<h2>Background</h2><p>{body}</p>{footer}"
        "</body></html>"
    )


# ---------------------------------------------------------------------------
# Activity dumps
# ---------------------------------------------------------------------------

def _pageview_lines(rng: random.Random) -> list[str]:
    lines = []
    for title in TITLES:
        if title in ZERO_VIEW_TITLES:
            continue
        base = int(math.exp(rng.gauss(4.0, 1.4))) + 1
        for day in sorted(rng.sample(range(1, 29), rng.randint(12, 24))):
            count = max(1, int(base * rng.uniform(0.4, 1.8)))
            lines.append(f"en.wikipedia {slug_for(title)} 2025-11-{day:02d} {count}")
    # split counts on one day (aggregated per title+date downstream)
    for title in TITLES[:3]:
        lines.append(f"en.wikipedia {slug_for(title)} 2025-11-05 17")
    # compact date form, same month
    lines.append(f"en.wikipedia {slug_for(TITLES[2])} 20251107 33")
    # outside the requested month
    lines.append(f"en.wikipedia {slug_for(TITLES[0])} 2025-10-31 40")
    lines.append(f"en.wikipedia {slug_for(TITLES[1])} 20251201 25")
    # malformed rows a real dump slice would contain
    lines.append("en.wikipedia Broken_Page 2025-13-40 12")
    lines.append("en.wikipedia Short_Line 2025-11-02")
    lines.append("en.wikipedia Bad_Count 2025-11-03 seven")
    rng.shuffle(lines)
    return lines


def _window_timestamp(rng: random.Random) -> str:
    start = datetime(2025, 10, 27)
    moment = start + timedelta(seconds=rng.randint(0, 27 * 86400))
    return moment.isoformat()


def _revision_lines(rng: random.Random) -> list[str]:
    true_tokens = ["true", "1", "t", "yes"]
    false_tokens = ["false", "0", "f", "no"]
    lines = []
    for i, title in enumerate(TITLES):
        # earlier titles attract more of the editor pool (roughly nested
        # incidence, with dropout so no two pages share an identical editor set)
        pool = WIKI_EDITORS[: max(1, round((24 - i) * len(WIKI_EDITORS) / 26))]
        events = 0
        for j, editor in enumerate(pool):
            if j > 0 and rng.random() < 0.3:
                continue
            for _ in range(rng.randint(1, 3)):
                revert = rng.random() < 0.12
                token = rng.choice(true_tokens if revert else false_tokens)
                lines.append(
                    f"{slug_for(title)}\t{editor}\t{_window_timestamp(rng)}\t{token}"
                )
                events += 1
        while events < 2:  # every page needs at least two in-window edits
            lines.append(
                f"{slug_for(title)}\t{rng.choice(pool)}\t{_window_timestamp(rng)}\tfalse"
            )
            events += 1
    # exact window boundaries (the window is closed on both ends)
    lines.append(f"{slug_for(TITLES[0])}\t{WIKI_EDITORS[0]}\t2025-10-27T00:00:00\tfalse")
    lines.append(f"{slug_for(TITLES[0])}\t{WIKI_EDITORS[1]}\t2025-11-24T00:00:00\tfalse")
    # outside the window
    lines.append(f"{slug_for(TITLES[1])}\t{WIKI_EDITORS[0]}\t2025-10-20T10:00:00\tfalse")
    lines.append(f"{slug_for(TITLES[2])}\t{WIKI_EDITORS[1]}\t2025-11-30T10:00:00\ttrue")
    # malformed rows
    lines.append(f"{slug_for(TITLES[3])}\t{WIKI_EDITORS[2]}\tnot-a-date\tfalse")
    lines.append(f"{slug_for(TITLES[4])}\t{WIKI_EDITORS[3]}\t2025-11-10T09:00:00\tmaybe")
    lines.append("OnlyTitle")
    rng.shuffle(lines)
    return lines


def _edit_request_document(rng: random.Random, slug: str, index: int) -> dict | list:
    pool = GROK_AUTHORS[: max(2, len(GROK_AUTHORS) - index // 3)]
    items = []
    for k in range(2 + index % 4):
        author = pool[0] if k == 0 else rng.choice(pool)
        created = _window_timestamp(rng)
        change = _sentence(rng)
        feedback = rng.choice(_FEEDBACK)
        items.append((author, created, change, feedback))
    if index % 3 == 0 and items:
        # one request outside the analysis window
        items.append((pool[0], "2025-10-05T12:00:00", _sentence(rng), ""))

    shape = index % 3
    if shape == 0:
        return {"slug": slug, "edits": [
            {"author_id": a, "created_at": c, "proposed_change": p,
             "reviewer_feedback": f}
            for a, c, p, f in items
        ]}
    if shape == 1:
        return [
            {"slug": slug, "authorId": a, "createdAt": c,
             "proposedChange": p, "reviewerFeedback": f}
            for a, c, p, f in items
        ]
    return {"slug": slug, "editRequests": [
        {"author": a, "timestamp": c, "change": p, "feedback": f}
        for a, c, p, f in items
    ]}


def _reference_rows(rng: random.Random) -> list[tuple[str, int]]:
    rows = []
    for i, title in enumerate(TITLES):
        count = 0 if i % 11 == 10 else int(math.exp(rng.gauss(2.6, 1.0)))
        rows.append((title, count))
    return rows


# ---------------------------------------------------------------------------
# Narrative triplets: two platform versions of two domains
# ---------------------------------------------------------------------------

_ENTITY_TYPES = {
    "Adrian Vex": "PERSON", "Corin Vex": "PERSON", "Mira Solen": "PERSON",
    "Tobin Ash": "PERSON", "Lena Quarry": "PERSON", "Dray Holloway": "PERSON",
    "Petra Nim": "PERSON", "Omar Ketch": "PERSON",
    "Silver Caucus": "ORG", "Ninth Circle PAC": "ORG", "Verity Board": "ORG",
    "Mill City": "GPE",
    "North Coalition Forces": "ORG", "Unity Accord Council": "ORG",
    "Cobalt Pact": "ORG", "Iron Meridian": "ORG",
    "Sable Republic": "GPE", "Thornmark": "GPE", "Port Malin": "GPE",
    "Fen Territory": "GPE",
    "Eben Carro": "PERSON", "Rivka Dunn": "PERSON", "General Oster": "PERSON",
    "Marlo Reyes": "PERSON",
    "Juno Farrow": "PERSON",
}

_PREDICATES = {
    "S": ["SUPPORT", "PRAISE", "ENDORSE", "DEFEND", "HELP", "ASCRIBE"],
    "C": ["ATTACK", "CRITICIZE", "ACCUSE", "CONDEMN", "OPPOSE", "SUE"],
    "N": ["SAY", "MEET", "VISIT", "ANNOUNCE", "MENTION"],
}

_SOURCE_PAGES = {
    Domain.US_POLITICS: ["Aurora Initiative", "Quarry Lane Riots",
                         "Corvid Broadcasting", "Ilya Morrow"],
    Domain.GEOPOLITICS: ["Glass Harbor Treaty", "Basalt Accord",
                         "Umber Pass", "Merrow Island"],
}

# (agent, target, polarity tag, weight) per domain+platform. The human and
# generative versions deliberately disagree about who draws support and who
# draws conflict, so the displacement analysis has something to find.
_EDGES = {
    (Domain.US_POLITICS, Platform.HUMAN): [
        ("Mira Solen", "Adrian Vex", "C", 4),
        ("Tobin Ash", "Adrian Vex", "C", 3),
        ("Lena Quarry", "Adrian Vex", "C", 2),
        ("Adrian Vex", "Verity Board", "C", 2),
        ("Adrian Vex", "Silver Caucus", "S", 2),
        ("Silver Caucus", "Adrian Vex", "S", 2),
        ("Corin Vex", "Adrian Vex", "S", 1),
        ("Petra Nim", "Mira Solen", "S", 2),
        ("Mira Solen", "Petra Nim", "S", 1),
        ("Dray Holloway", "Ninth Circle PAC", "C", 2),
        ("Ninth Circle PAC", "Dray Holloway", "C", 1),
        ("Omar Ketch", "Mill City", "N", 2),
        ("Verity Board", "Mill City", "N", 1),
        ("Omar Ketch", "Lena Quarry", "S", 1),
        ("Lena Quarry", "Petra Nim", "S", 1),
        ("Petra Nim", "Omar Ketch", "S", 1),
    ],
    (Domain.US_POLITICS, Platform.GENERATIVE): [
        ("Mira Solen", "Adrian Vex", "S", 4),
        ("Tobin Ash", "Adrian Vex", "S", 2),
        ("Silver Caucus", "Adrian Vex", "S", 3),
        ("Adrian Vex", "Silver Caucus", "S", 1),
        ("Lena Quarry", "Adrian Vex", "C", 1),
        ("Adrian Vex", "Mill City", "N", 2),
        ("Corin Vex", "Adrian Vex", "S", 2),
        ("Dray Holloway", "Ninth Circle PAC", "C", 1),
        ("Petra Nim", "Verity Board", "N", 2),
        ("Omar Ketch", "Lena Quarry", "S", 1),
        ("Mira Solen", "Tobin Ash", "C", 1),
        ("Verity Board", "Mill City", "N", 1),
        ("Omar Ketch", "Petra Nim", "S", 1),
    ],
    (Domain.GEOPOLITICS, Platform.HUMAN): [
        ("North Coalition Forces", "Sable Republic", "C", 4),
        ("Sable Republic", "North Coalition Forces", "C", 3),
        ("Thornmark", "Sable Republic", "C", 2),
        ("Unity Accord Council", "Sable Republic", "S", 2),
        ("Eben Carro", "Unity Accord Council", "S", 1),
        ("Cobalt Pact", "Thornmark", "S", 2),
        ("Rivka Dunn", "General Oster", "C", 2),
        ("General Oster", "Rivka Dunn", "C", 2),
        ("Sable Republic", "Port Malin", "S", 2),
        ("Port Malin", "Fen Territory", "S", 1),
        ("Fen Territory", "Sable Republic", "S", 1),
        ("Marlo Reyes", "Iron Meridian", "N", 2),
        ("Iron Meridian", "North Coalition Forces", "C", 1),
        ("Eben Carro", "Thornmark", "N", 1),
    ],
    (Domain.GEOPOLITICS, Platform.GENERATIVE): [
        ("North Coalition Forces", "Sable Republic", "C", 2),
        ("Sable Republic", "Unity Accord Council", "S", 3),
        ("Unity Accord Council", "Sable Republic", "S", 2),
        ("Thornmark", "Sable Republic", "S", 2),
        ("Cobalt Pact", "Sable Republic", "S", 1),
        ("Eben Carro", "Sable Republic", "S", 1),
        ("Rivka Dunn", "General Oster", "C", 1),
        ("General Oster", "Port Malin", "N", 2),
        ("Port Malin", "Fen Territory", "N", 1),
        ("Marlo Reyes", "Iron Meridian", "S", 1),
        ("Iron Meridian", "Thornmark", "N", 1),
        ("Fen Territory", "Sable Republic", "N", 1),
    ],
}

# Alias forms sprinkled over emitted mentions; the curation tables below fold
# them back onto the canonical names.
_ALIAS_FORMS = {"Adrian Vex": ["A. Vex", "Vex"],
                "Mira Solen": ["Solen"],
                "North Coalition Forces": ["NCF"]}

ALIAS_ROWS = [
    ("A. Vex", "Adrian Vex"),
    ("Vex", "Adrian Vex"),
    ("Solen", "Mira Solen"),
    ("NCF", "North Coalition Forces"),
]
PAGE_CONTEXT_ROWS = [
    ("Corin Vex", "Vex", "Corin Vex"),
]
LEANING_ROWS = [
    ("Aurora Initiative", "left"),
    ("Glass Harbor Treaty", "center"),
    ("Ilya Morrow", "right"),
]


def _emit_triplets(rng: random.Random) -> list[Triplet]:
    triplets: list[Triplet] = []
    for (domain, platform), edges in _EDGES.items():
        pages = _SOURCE_PAGES[domain]
        counters = {"S": 0, "C": 0, "N": 0}
        for agent, target, tag, weight in edges:
            for _ in range(weight):
                predicate = _PREDICATES[tag][counters[tag] % len(_PREDICATES[tag])]
                counters[tag] += 1
                page = pages[(counters["S"] + counters["C"] + counters["N"]) % len(pages)]
                arg0, arg1 = agent, target
                # hub mentions sometimes appear under an alias form
                if weight >= 3 and arg1 in _ALIAS_FORMS and rng.random() < 0.5:
                    arg1 = rng.choice(_ALIAS_FORMS[arg1])
                if weight >= 3 and arg0 in _ALIAS_FORMS and rng.random() < 0.3:
                    arg0 = rng.choice(_ALIAS_FORMS[arg0])
                t0 = _ENTITY_TYPES[agent]
                t1 = _ENTITY_TYPES[target]
                if weight >= 3 and counters[tag] % 5 == 0:
                    t1 = ""  # extractor missed one type; the mode absorbs it
                triplets.append(Triplet(
                    predicate=predicate, arg0=arg0, arg1=arg1, source_page=page,
                    platform=platform, domain=domain, arg0_type=t0, arg1_type=t1,
                ))

    # a page-scoped ambiguity: on the 'Corin Vex' page, bare 'Vex' is Corin
    triplets.append(Triplet(
        predicate="SUPPORT", arg0="Vex", arg1="Adrian Vex",
        source_page="Corin Vex", platform=Platform.HUMAN,
        domain=Domain.US_POLITICS, arg0_type="PERSON", arg1_type="PERSON",
    ))
    # entity typed differently per platform: excluded from the shared backbone
    triplets.append(Triplet(
        predicate="MEET", arg0="Adrian Vex", arg1="Beacon",
        source_page="Aurora Initiative", platform=Platform.HUMAN,
        domain=Domain.US_POLITICS, arg0_type="PERSON", arg1_type="ORG",
    ))
    triplets.append(Triplet(
        predicate="PRAISE", arg0="Mira Solen", arg1="Beacon",
        source_page="Ilya Morrow", platform=Platform.GENERATIVE,
        domain=Domain.US_POLITICS, arg0_type="PERSON", arg1_type="GPE",
    ))
    # entity seen on one platform only: also outside the backbone
    triplets.append(Triplet(
        predicate="PRAISE", arg0="Juno Farrow", arg1="Adrian Vex",
        source_page="Quarry Lane Riots", platform=Platform.GENERATIVE,
        domain=Domain.US_POLITICS, arg0_type="PERSON", arg1_type="PERSON",
    ))
    triplets.append(Triplet(
        predicate="ATTACK", arg0="North Coalition Forces", arg1="Beacon",
        source_page="Umber Pass", platform=Platform.HUMAN,
        domain=Domain.GEOPOLITICS, arg0_type="ORG", arg1_type="ORG",
    ))
    return triplets


# ---------------------------------------------------------------------------
# Corpus assembly
# ---------------------------------------------------------------------------

def generate_corpus(seed: int, out_dir: Path) -> None:
    """Write the complete demo corpus under ``out_dir`` (created if needed)."""
    rng = random.Random(seed)
    out_dir = Path(out_dir)

    for title in TITLES:
        atomic_write_text(out_dir / "wiki_articles" / f"{title}.txt",
                          _wiki_article(rng, title))
    for title in MATCHED_TITLES:
        atomic_write_text(out_dir / "grok" / f"{slug_for(title)}.html",
                          _grok_html(rng, title))
    for slug in EXTRA_SLUGS:
        title = slug.replace("_", " ")
        atomic_write_text(out_dir / "grok" / f"{slug}.html",
                          _grok_html(rng, title))

    atomic_write_text(out_dir / "pageviews.txt",
                      "\n".join(_pageview_lines(rng)) + "\n")
    atomic_write_text(out_dir / "revisions.tsv",
                      "\n".join(_revision_lines(rng)) + "\n")
    atomic_write_text(out_dir / "wiki_titles.txt", "\n".join(TITLES) + "\n")

    slugs_with_requests = [slug_for(t) for t in MATCHED_TITLES] + [EXTRA_SLUGS[0]]
    for i, slug in enumerate(slugs_with_requests):
        document = _edit_request_document(rng, slug, i)
        atomic_write_text(out_dir / "edit_requests" / f"{slug}.json",
                          json.dumps(document, indent=2) + "\n")

    atomic_write_text(out_dir / "references.tsv",
                      render_table(("title", "references"),
                                   _reference_rows(rng), delimiter="\t"))

    write_triplets(out_dir / "triplets.tsv", _emit_triplets(rng))
    atomic_write_text(out_dir / "aliases.tsv",
                      "".join(f"{a}\t{c}\n" for a, c in ALIAS_ROWS))
    atomic_write_text(out_dir / "page_context.tsv",
                      "".join(f"{p}\t{a}\t{c}\n" for p, a, c in PAGE_CONTEXT_ROWS))
    atomic_write_text(out_dir / "leaning.tsv",
                      render_table(("page", "leaning"), LEANING_ROWS, delimiter="\t"))

    urls = [f"https://grokipedia.example/page/{slug_for(t)}" for t in MATCHED_TITLES]
    urls += [f"https://grokipedia.example/page/{s}" for s in EXTRA_SLUGS]
    sitemap = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<urlset xmlns="http://www.sitemaps.org/schemas/sitemap/0.9">\n'
        + "".join(f"  <url><loc>{u}</loc></url>\n" for u in urls)
        + "</urlset>\n"
    )
    atomic_write_text(out_dir / "sitemap.xml", sitemap)

    atomic_write_text(out_dir / "pipeline.cfg", (
        "# analysis window shared by every stage\n"
        f"month = {MONTH}\n"
        f"window-start = {WINDOW_START}\n"
        f"window-end = {WINDOW_END}\n"
    ))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="generate the deterministic demo corpus")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args(argv)
    generate_corpus(args.seed, args.out)
    print(f"demo corpus (seed {args.seed}) -> {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
