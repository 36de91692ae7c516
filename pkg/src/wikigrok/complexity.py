"""Editor–page fitness–complexity: bipartite construction, fixed point, rank deltas.

Editors play the role competitive agents usually play in economic-complexity
models and pages play the role of products: an editor's fitness is the sum of
the complexities of the pages they edited, and a page's complexity is the
harmonic-style inverse of its editors' inverse fitnesses, so pages touched only
by low-fitness editors are pulled down. Both vectors start at all ones, both
updates read the previous iteration's values, and both are renormalized to mean
1 every iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Tuple

import numpy as np

from .stats import average_ranks


@dataclass(frozen=True)
class BipartiteMatrix:
    editors: tuple[str, ...]   # sorted editor ids, row index
    pages: tuple[str, ...]     # sorted page titles, column index
    m: np.ndarray              # binary incidence, shape (editors, pages)


@dataclass(frozen=True)
class FitnessComplexityResult:
    editors: tuple[str, ...]
    pages: tuple[str, ...]
    fitness: np.ndarray
    complexity: np.ndarray
    iterations: int
    converged: bool

    def complexity_by_page(self) -> dict[str, float]:
        return {page: float(q) for page, q in zip(self.pages, self.complexity)}

    def fitness_by_editor(self) -> dict[str, float]:
        return {editor: float(f) for editor, f in zip(self.editors, self.fitness)}


def build_bipartite(
    edits: Iterable[Tuple[str, str]],
    paired_pages: set[str],
    min_edits: int = 2,
) -> BipartiteMatrix:
    """Build the binary editor×page incidence from (editor_id, page) events.

    Pages are kept only if they belong to ``paired_pages`` (pages existing on
    both platforms; the caller intersects the two platforms' eligibility when
    the threshold must hold on each) and accumulated at least ``min_edits``
    edit events here. M_ep is 1 iff editor e touched page p at least once.
    All-zero rows/columns are pruned iteratively. Events with an empty editor
    or page id are ignored.

    Raises ValueError when nothing survives filtering.
    """
    edit_counts: dict[str, int] = {}
    incidence: set[Tuple[str, str]] = set()
    for editor, page in edits:
        if not editor or not page:
            continue
        edit_counts[page] = edit_counts.get(page, 0) + 1
        incidence.add((editor, page))

    eligible = {p for p, c in edit_counts.items() if p in paired_pages and c >= min_edits}
    kept = {(e, p) for (e, p) in incidence if p in eligible}
    if not kept:
        raise ValueError("no eligible pages after pairing and min-edit filtering")

    editors = sorted({e for e, _ in kept})
    pages = sorted({p for _, p in kept})
    m = np.zeros((len(editors), len(pages)))
    editor_index = {e: i for i, e in enumerate(editors)}
    page_index = {p: j for j, p in enumerate(pages)}
    for e, p in kept:
        m[editor_index[e], page_index[p]] = 1.0

    # Iteratively prune empty rows/columns (dropping one side can empty the other).
    while True:
        row_keep = m.sum(axis=1) > 0
        col_keep = m.sum(axis=0) > 0
        if row_keep.all() and col_keep.all():
            break
        m = m[row_keep][:, col_keep]
        editors = [e for e, k in zip(editors, row_keep) if k]
        pages = [p for p, k in zip(pages, col_keep) if k]
        if m.size == 0:
            raise ValueError("no eligible pages after pruning empty rows/columns")

    return BipartiteMatrix(editors=tuple(editors), pages=tuple(pages), m=m)


def fitness_complexity(
    matrix: BipartiteMatrix,
    tol: float = 1e-9,
    max_iter: int = 1000,
) -> FitnessComplexityResult:
    """Run the fitness–complexity fixed point on a pruned incidence matrix.

    Per iteration (both updates read the previous iteration's vectors):

        F~_e = sum_p M_ep * Q_p          (editor fitness)
        Q~_p = 1 / sum_e M_ep * (1/F_e)  (page complexity)

    followed by dividing each vector by its mean. Iteration stops when the
    largest elementwise change of both normalized vectors falls below ``tol``;
    hitting ``max_iter`` first returns converged=False rather than raising.
    """
    m = matrix.m
    if m.size == 0:
        raise ValueError("empty incidence matrix")
    if (m.sum(axis=1) == 0).any() or (m.sum(axis=0) == 0).any():
        raise ValueError("incidence matrix has empty rows or columns; prune first")

    fitness = np.ones(m.shape[0])
    complexity = np.ones(m.shape[1])
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_fitness = m @ complexity
        new_complexity = 1.0 / (m.T @ (1.0 / fitness))
        new_fitness /= new_fitness.mean()
        new_complexity /= new_complexity.mean()
        change = max(
            float(np.max(np.abs(new_fitness - fitness))),
            float(np.max(np.abs(new_complexity - complexity))),
        )
        fitness, complexity = new_fitness, new_complexity
        if change < tol:
            converged = True
            break

    return FitnessComplexityResult(
        editors=matrix.editors,
        pages=matrix.pages,
        fitness=fitness,
        complexity=complexity,
        iterations=iterations,
        converged=converged,
    )


def rank_delta(
    q_a: Mapping[str, float],
    q_b: Mapping[str, float],
) -> dict[str, float]:
    """Signed per-page rank difference between two complexity assignments.

    Pages are ranked by increasing complexity on each platform (average ranks
    for ties); the delta is rank_A - rank_B. Both mappings must cover exactly
    the same pages.
    """
    only_a = sorted(set(q_a) - set(q_b))
    only_b = sorted(set(q_b) - set(q_a))
    if only_a or only_b:
        raise ValueError(
            "page sets differ: "
            f"only in A: {only_a or '[]'}; only in B: {only_b or '[]'}"
        )
    pages = sorted(q_a)
    ranks_a = average_ranks([q_a[p] for p in pages])
    ranks_b = average_ranks([q_b[p] for p in pages])
    return {p: float(ra - rb) for p, ra, rb in zip(pages, ranks_a, ranks_b)}
