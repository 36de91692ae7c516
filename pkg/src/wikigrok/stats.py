"""Rank-correlation utilities shared by the complexity and framing comparisons."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import t as t_dist

# |rho| this close to 1 is treated as the degenerate (perfectly monotone) case,
# where the t statistic blows up and a permutation bound is reported instead.
_DEGENERATE_EPS = 1e-12

# Exact permutation p-values enumerate n! orderings; past n=10 that is >3.6M
# permutations and the caller should use the t approximation.
_EXACT_MAX_N = 10


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int
    method: str


def average_ranks(values) -> np.ndarray:
    """1-based ranks with ties sharing their average rank.

    >>> list(average_ranks([10, 20, 20, 30]))
    [1.0, 2.5, 2.5, 4.0]
    """
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        # positions i..j (0-based) share the average of ranks i+1..j+1
        ranks[order[i:j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def spearman(x, y, method: str = "t") -> CorrelationResult:
    """Spearman rank correlation with average-rank tie handling.

    rho is the Pearson correlation of the two rank vectors. The p-value comes
    from the t-distribution approximation with n-2 degrees of freedom
    (method="t", default), or from exhaustive permutation of one rank vector
    (method="exact", only for n <= 10). When |rho| = 1 the t statistic is
    undefined and the permutation bound min(1, 2/n!) is reported instead.

    Raises ValueError for length mismatch, n < 3, or a constant input vector.
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("x and y must be 1-D sequences of equal length")
    n = len(xs)
    if n < 3:
        raise ValueError(f"need at least 3 observations, got {n}")
    if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
        raise ValueError("inputs must be finite")
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise ValueError("constant input vector: ranks are degenerate")
    if method not in ("t", "exact"):
        raise ValueError(f"unknown method {method!r}")

    rx = average_ranks(xs)
    ry = average_ranks(ys)
    rx_c = rx - rx.mean()
    ry_c = ry - ry.mean()
    denom = math.sqrt(float(rx_c @ rx_c) * float(ry_c @ ry_c))
    rho = float(rx_c @ ry_c) / denom
    rho = max(-1.0, min(1.0, rho))

    if method == "exact":
        if n > _EXACT_MAX_N:
            raise ValueError(f"exact permutation p-value limited to n <= {_EXACT_MAX_N}")
        p = _exact_permutation_p(rx_c, ry_c, abs(rho))
        return CorrelationResult(rho=rho, p_value=p, n=n, method="exact")

    if 1.0 - abs(rho) < _DEGENERATE_EPS:
        p = min(1.0, 2.0 / math.factorial(n))
        return CorrelationResult(rho=rho, p_value=p, n=n, method="degenerate")

    t_stat = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(t_dist.sf(abs(t_stat), n - 2))
    return CorrelationResult(rho=rho, p_value=min(1.0, p), n=n, method="t")


def _exact_permutation_p(rx_c: np.ndarray, ry_c: np.ndarray, abs_rho: float) -> float:
    """Two-sided exact p: fraction of permutations with |rho| >= observed."""
    n = len(rx_c)
    denom = math.sqrt(float(rx_c @ rx_c) * float(ry_c @ ry_c))
    threshold = abs_rho * denom - 1e-12
    total = math.factorial(n)
    hits = 0
    chunk = 100_000
    perm_iter = itertools.permutations(ry_c)
    while True:
        block = list(itertools.islice(perm_iter, chunk))
        if not block:
            break
        dots = np.abs(np.asarray(block) @ rx_c)
        hits += int(np.count_nonzero(dots >= threshold))
    return hits / total
