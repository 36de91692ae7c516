"""Signed, directed, weighted narrative multigraphs from predicate–ARG0–ARG1 triplets.

Entities are canonicalized through curated alias maps (page-scoped context
first, then global aliases), restricted to the "shared semantic backbone" —
entities whose modal semantic type is identical and non-empty on both
platforms — and connected by agent→target edges whose polarity comes from a
curated predicate table. Edge weight is relation frequency; parallel edges
exist only across distinct polarities.
"""

from __future__ import annotations

import enum
import logging
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .features import gini_index
from .fileio import DataError, read_table, write_table

logger = logging.getLogger(__name__)


class Platform(enum.Enum):
    HUMAN = "human"
    GENERATIVE = "generative"


class Domain(enum.Enum):
    US_POLITICS = "us_politics"
    GEOPOLITICS = "geopolitics"
    CONSPIRACY = "conspiracy"


class Polarity(enum.Enum):
    SUPPORTIVE = "Supportive"
    CONFLICTIVE = "Conflictive"
    NEUTRAL = "Neutral"


TRIPLET_FIELDS = (
    "platform", "domain", "page", "predicate",
    "arg0", "arg1", "arg0_type", "arg1_type",
)


@dataclass(frozen=True)
class Triplet:
    predicate: str
    arg0: str
    arg1: str
    source_page: str
    platform: Platform
    domain: Domain
    arg0_type: str = ""
    arg1_type: str = ""


@dataclass(frozen=True)
class SentimentBalance:
    """Directional sentiment balances; a side is None when it has no signed mass."""

    ds_out: Optional[float]
    ds_in: Optional[float]


@dataclass(frozen=True)
class RoleDisplacement:
    """Per-component difference of balances, human minus generative.

    A component is None (and ``complete`` False) when either side's balance is
    undefined there; such nodes get flagged rather than imputed to zero,
    because zero means "balanced", not "no data".
    """

    d_out: Optional[float]
    d_in: Optional[float]

    @property
    def complete(self) -> bool:
        return self.d_out is not None and self.d_in is not None


@dataclass(frozen=True)
class GraphMetrics:
    edge_density: float
    degree_gini: float
    reciprocity: float
    cycle_count: int


@dataclass(frozen=True)
class NarrativeGraph:
    platform: Platform
    domain: Domain
    nodes: dict[str, str]                          # canonical name -> semantic type
    edges: dict[tuple[str, str, Polarity], int]    # (agent, target, polarity) -> weight
    dropped_triplets: int = 0                      # outside the shared backbone


# ---------------------------------------------------------------------------
# Triplet file contract (shared with the extraction adapter)
# ---------------------------------------------------------------------------

def read_triplets(path: str | Path) -> list[Triplet]:
    """Read the TSV triplet file: header + one record per line.

    Columns: platform, domain, page, predicate, arg0, arg1, arg0_type,
    arg1_type. Unknown platform/domain values or empty predicate/arg0/arg1
    raise DataError (the file is a machine-written contract, not free text).
    """
    header, rows = read_table(path, delimiter="\t")
    if tuple(header) != TRIPLET_FIELDS:
        raise DataError(
            f"{path}: expected columns {TRIPLET_FIELDS}, got {tuple(header)}"
        )
    triplets = []
    for i, row in enumerate(rows, 2):
        if len(row) != len(TRIPLET_FIELDS):
            raise DataError(f"{path}:{i}: expected {len(TRIPLET_FIELDS)} fields")
        platform_s, domain_s, page, predicate, arg0, arg1, t0, t1 = row
        try:
            platform = Platform(platform_s)
            domain = Domain(domain_s)
        except ValueError:
            raise DataError(
                f"{path}:{i}: unknown platform/domain {platform_s!r}/{domain_s!r}"
            ) from None
        if not predicate or not arg0 or not arg1:
            raise DataError(f"{path}:{i}: predicate/arg0/arg1 must be non-empty")
        triplets.append(Triplet(
            predicate=predicate, arg0=arg0, arg1=arg1, source_page=page,
            platform=platform, domain=domain, arg0_type=t0, arg1_type=t1,
        ))
    return triplets


def write_triplets(path: str | Path, triplets: Sequence[Triplet]) -> None:
    """Write triplets in the shared TSV contract (stable field order)."""
    rows = [
        (t.platform.value, t.domain.value, t.source_page, t.predicate,
         t.arg0, t.arg1, t.arg0_type, t.arg1_type)
        for t in triplets
    ]
    write_table(path, TRIPLET_FIELDS, rows, delimiter="\t")


# ---------------------------------------------------------------------------
# Curation files
# ---------------------------------------------------------------------------

def _curation_rows(path: str | Path, n_fields: int) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing curation file: {path}")
    rows = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != n_fields or any(not p.strip() for p in parts):
            raise DataError(f"{path}:{lineno}: expected {n_fields} tab-separated fields")
        rows.append([p.strip() for p in parts])
    return rows


def load_alias_map(path: str | Path) -> dict[str, str]:
    """Load global ``alias<TAB>canonical`` rows; conflicting targets are an error."""
    mapping: dict[str, str] = {}
    for alias, canonical in _curation_rows(path, 2):
        if alias in mapping and mapping[alias] != canonical:
            raise DataError(
                f"{path}: alias {alias!r} maps to both {mapping[alias]!r} and {canonical!r}"
            )
        mapping[alias] = canonical
    return mapping


def load_page_context(path: str | Path) -> dict[tuple[str, str], str]:
    """Load page-scoped ``page<TAB>alias<TAB>canonical`` disambiguation rows."""
    mapping: dict[tuple[str, str], str] = {}
    for page, alias, canonical in _curation_rows(path, 3):
        key = (page, alias)
        if key in mapping and mapping[key] != canonical:
            raise DataError(
                f"{path}: ({page!r}, {alias!r}) maps to both "
                f"{mapping[key]!r} and {canonical!r}"
            )
        mapping[key] = canonical
    return mapping


def load_polarity_map(path: str | Path) -> dict[str, Polarity]:
    """Load ``predicate<TAB>polarity`` rows (Supportive/Conflictive/Neutral)."""
    mapping: dict[str, Polarity] = {}
    by_label = {p.value.lower(): p for p in Polarity}
    for predicate, polarity_s in _curation_rows(path, 2):
        polarity = by_label.get(polarity_s.strip().lower())
        if polarity is None:
            raise DataError(
                f"{path}: unknown polarity {polarity_s!r} for predicate {predicate!r}"
            )
        if predicate in mapping and mapping[predicate] != polarity:
            raise DataError(f"{path}: predicate {predicate!r} has conflicting polarities")
        mapping[predicate] = polarity
    return mapping


# ---------------------------------------------------------------------------
# Canonicalization and the shared semantic backbone
# ---------------------------------------------------------------------------

def normalize_entities(
    triplets: Iterable[Triplet],
    alias_map: Mapping[str, str],
    page_context: Mapping[tuple[str, str], str],
) -> list[Triplet]:
    """Canonicalize arg0/arg1 mentions.

    Page-scoped disambiguation applies first (an ambiguous family name inside a
    specific page), then the global alias map; unmapped mentions pass through
    unchanged.
    """
    def canonical(page: str, mention: str) -> str:
        step1 = page_context.get((page, mention), mention)
        return alias_map.get(step1, step1)

    return [
        replace(t,
                arg0=canonical(t.source_page, t.arg0),
                arg1=canonical(t.source_page, t.arg1))
        for t in triplets
    ]


def assign_polarity(predicate: str, mapping: Mapping[str, Polarity]) -> Polarity:
    """Table lookup; predicates absent from the table are Neutral."""
    return mapping.get(predicate, Polarity.NEUTRAL)


def modal_entity_types(triplets: Iterable[Triplet]) -> dict[Platform, dict[str, str]]:
    """Per-platform modal semantic type for every entity mention.

    Each (entity, type) occurrence on arg0/arg1 counts once; empty types are
    ignored. The most frequent type wins; ties break lexicographically.
    """
    counts: dict[Platform, dict[str, Counter]] = {p: {} for p in Platform}
    for t in triplets:
        for entity, entity_type in ((t.arg0, t.arg0_type), (t.arg1, t.arg1_type)):
            if not entity_type:
                continue
            counts[t.platform].setdefault(entity, Counter())[entity_type] += 1
    result: dict[Platform, dict[str, str]] = {p: {} for p in Platform}
    for platform, per_entity in counts.items():
        for entity, counter in per_entity.items():
            top_count = max(counter.values())
            candidates = sorted(t for t, c in counter.items() if c == top_count)
            result[platform][entity] = candidates[0]
    return result


def shared_backbone(entity_types: Mapping[Platform, Mapping[str, str]]) -> dict[str, str]:
    """Entities whose semantic type is identical and non-empty on both platforms."""
    human = entity_types.get(Platform.HUMAN, {})
    generative = entity_types.get(Platform.GENERATIVE, {})
    return {
        entity: human[entity]
        for entity in human
        if entity in generative and human[entity] and human[entity] == generative[entity]
    }


# ---------------------------------------------------------------------------
# Graph construction and node-level measures
# ---------------------------------------------------------------------------

def build_graph(
    triplets: Sequence[Triplet],
    entity_types: Mapping[Platform, Mapping[str, str]],
    polarity_map: Mapping[str, Polarity],
) -> NarrativeGraph:
    """Fold one platform+domain's canonicalized triplets into a signed multigraph.

    Nodes are restricted to the shared semantic backbone; triplets with either
    endpoint outside it are dropped (tallied on the graph and logged). Edge
    weight counts identical (agent, target, polarity) relations; the same
    ordered pair may carry up to three parallel edges, one per polarity.
    """
    if not triplets:
        raise ValueError("no triplets to build a graph from")
    platforms = {t.platform for t in triplets}
    domains = {t.domain for t in triplets}
    if len(platforms) > 1 or len(domains) > 1:
        raise ValueError(
            f"triplets span platforms {sorted(p.value for p in platforms)} "
            f"and domains {sorted(d.value for d in domains)}; build one graph at a time"
        )
    backbone = shared_backbone(entity_types)

    edges: dict[tuple[str, str, Polarity], int] = {}
    nodes: dict[str, str] = {}
    dropped = 0
    for t in triplets:
        if t.arg0 not in backbone or t.arg1 not in backbone:
            dropped += 1
            continue
        polarity = assign_polarity(t.predicate, polarity_map)
        key = (t.arg0, t.arg1, polarity)
        edges[key] = edges.get(key, 0) + 1
        nodes[t.arg0] = backbone[t.arg0]
        nodes[t.arg1] = backbone[t.arg1]
    if dropped:
        logger.info("dropped %d triplet(s) outside the shared semantic backbone", dropped)

    return NarrativeGraph(
        platform=next(iter(platforms)),
        domain=next(iter(domains)),
        nodes=nodes,
        edges=edges,
        dropped_triplets=dropped,
    )


def _signed_sums(graph: NarrativeGraph, node: str) -> tuple[int, int, int, int]:
    """(out_sup, out_con, in_sup, in_con) weighted sums for one node."""
    out_sup = out_con = in_sup = in_con = 0
    for (src, dst, polarity), weight in graph.edges.items():
        if polarity == Polarity.SUPPORTIVE:
            if src == node:
                out_sup += weight
            if dst == node:
                in_sup += weight
        elif polarity == Polarity.CONFLICTIVE:
            if src == node:
                out_con += weight
            if dst == node:
                in_con += weight
    return out_sup, out_con, in_sup, in_con


def sentiment_balance(graph: NarrativeGraph, node: str) -> SentimentBalance:
    """Directional (supportive − conflictive)/(supportive + conflictive) balances.

    Either component is None when the node carries no signed mass in that
    direction (the balance is undefined, not zero). Unknown nodes are an error.
    """
    if node not in graph.nodes:
        raise ValueError(f"node {node!r} not in graph")
    out_sup, out_con, in_sup, in_con = _signed_sums(graph, node)
    ds_out = (out_sup - out_con) / (out_sup + out_con) if out_sup + out_con else None
    ds_in = (in_sup - in_con) / (in_sup + in_con) if in_sup + in_con else None
    return SentimentBalance(ds_out=ds_out, ds_in=ds_in)


def sentiment_mass(graph: NarrativeGraph, node: str) -> int:
    """Total signed (supportive + conflictive) edge weight touching a node, in+out."""
    out_sup, out_con, in_sup, in_con = _signed_sums(graph, node)
    return out_sup + out_con + in_sup + in_con


def top_decile_nodes(graph: NarrativeGraph, mode: str = "combined") -> set[str]:
    """Nodes in the top 10% by sentiment mass, inclusive of boundary ties.

    mode="combined" (default) ranks by in+out signed mass; mode="separate"
    ranks incoming and outgoing mass independently and returns the union of
    the two decile sets. The decile size is floor(n/10); nodes with zero
    signed mass are never retained, so a graph with no signed edges yields an
    empty set.
    """
    if mode not in ("combined", "separate"):
        raise ValueError(f"unknown decile mode {mode!r}")
    names = sorted(graph.nodes)
    if not names:
        return set()

    def decile(mass: Mapping[str, int]) -> set[str]:
        k = len(names) // 10
        if k == 0:
            return set()
        ranked = sorted(names, key=lambda n: (-mass[n], n))
        boundary = mass[ranked[k - 1]]
        return {n for n in names if mass[n] >= boundary and mass[n] > 0}

    if mode == "combined":
        return decile({n: sentiment_mass(graph, n) for n in names})

    masses = {n: _signed_sums(graph, n) for n in names}
    out_mass = {n: m[0] + m[1] for n, m in masses.items()}
    in_mass = {n: m[2] + m[3] for n, m in masses.items()}
    return decile(out_mass) | decile(in_mass)


def role_displacement(
    balance_human: SentimentBalance,
    balance_generative: SentimentBalance,
) -> RoleDisplacement:
    """Component-wise human-minus-generative balance difference.

    A component is None whenever either side is undefined there; callers flag
    such nodes instead of plotting them.
    """
    d_out = (balance_human.ds_out - balance_generative.ds_out
             if balance_human.ds_out is not None and balance_generative.ds_out is not None
             else None)
    d_in = (balance_human.ds_in - balance_generative.ds_in
            if balance_human.ds_in is not None and balance_generative.ds_in is not None
            else None)
    return RoleDisplacement(d_out=d_out, d_in=d_in)


# ---------------------------------------------------------------------------
# Structural metrics on one polarity layer
# ---------------------------------------------------------------------------

def graph_metrics(graph: NarrativeGraph, polarity_layer: Polarity) -> GraphMetrics:
    """Density, degree Gini, reciprocity, and short-cycle census of one layer.

    All four metrics work on the layer's directed simple projection between
    distinct nodes (self-loops are excluded; simple cycles have distinct
    nodes by definition). Degree concentration uses weighted total (in+out)
    degree across every node of the graph. An empty layer returns all zeros.
    """
    n = len(graph.nodes)
    simple: set[tuple[str, str]] = set()
    degree: dict[str, float] = {name: 0.0 for name in graph.nodes}
    for (src, dst, polarity), weight in graph.edges.items():
        if polarity != polarity_layer or src == dst:
            continue
        simple.add((src, dst))
        degree[src] += weight
        degree[dst] += weight

    if not simple:
        return GraphMetrics(edge_density=0.0, degree_gini=0.0,
                            reciprocity=0.0, cycle_count=0)

    density = len(simple) / (n * (n - 1)) if n >= 2 else 0.0
    degrees = [degree[name] for name in sorted(degree)]
    degree_gini = gini_index(degrees) if any(d > 0 for d in degrees) else 0.0
    reciprocated = sum(1 for (u, v) in simple if (v, u) in simple)
    reciprocity = reciprocated / len(simple)
    cycles = _count_short_cycles(simple)
    return GraphMetrics(edge_density=density, degree_gini=degree_gini,
                        reciprocity=reciprocity, cycle_count=cycles)


def _count_short_cycles(simple: set[tuple[str, str]]) -> int:
    """Exhaustively count simple directed cycles of length 2-4.

    Each cycle is counted once by anchoring at its lexicographically smallest
    node and walking forward from there.
    """
    adjacency: dict[str, set[str]] = {}
    for u, v in simple:
        adjacency.setdefault(u, set()).add(v)

    count = 0
    for u, v in simple:
        if u < v and (v, u) in simple:
            count += 1
    for u in sorted(adjacency):
        for v in adjacency.get(u, ()):
            if v <= u:
                continue
            for w in adjacency.get(v, ()):
                if w <= u or w == v:
                    continue
                if u in adjacency.get(w, ()):
                    count += 1
    for u in sorted(adjacency):
        for v in adjacency.get(u, ()):
            if v <= u:
                continue
            for w in adjacency.get(v, ()):
                if w <= u or w == v:
                    continue
                for z in adjacency.get(w, ()):
                    if z <= u or z in (v, w):
                        continue
                    if u in adjacency.get(z, ()):
                        count += 1
    return count
