"""Rank-correlation checks against closed forms and scipy as an oracle."""

import math
import random

import numpy as np
import pytest
import scipy.stats

from wikigrok.stats import average_ranks, spearman


def test_average_ranks_no_ties():
    assert list(average_ranks([10.0, 30.0, 20.0])) == [1.0, 3.0, 2.0]


def test_average_ranks_with_ties():
    # two values tied for ranks 2 and 3 share 2.5
    assert list(average_ranks([1.0, 5.0, 5.0, 9.0])) == [1.0, 2.5, 2.5, 4.0]


def test_average_ranks_all_equal():
    assert list(average_ranks([7.0] * 5)) == [3.0] * 5


def test_spearman_perfect_agreement():
    x = [1.0, 2.0, 3.0, 4.0, 5.0]
    result = spearman(x, [v * 10 + 3 for v in x])
    assert result.rho == pytest.approx(1.0, abs=1e-12)


def test_spearman_perfect_reversal():
    x = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6]
    result = spearman(x, [-v for v in x])
    assert result.rho == pytest.approx(-1.0, abs=1e-12)


def test_spearman_degenerate_p_is_permutation_bound():
    # |rho| = 1 would blow up the t formula; the permutation bound 2/n! is
    # reported instead.
    result = spearman([1.0, 2.0, 3.0, 4.0], [2.0, 4.0, 6.0, 8.0])
    assert result.p_value == pytest.approx(2.0 / math.factorial(4))


def test_spearman_degenerate_smallest_n():
    result = spearman([1.0, 2.0, 3.0], [5.0, 6.0, 7.0])
    assert result.p_value == pytest.approx(1.0 / 3.0)
    assert result.method == "degenerate"


def test_spearman_tied_fixture_matches_hand_ranks():
    # 8 elements, one tie in x. Oracle: average ranks by hand, then Pearson.
    x = [12.0, 7.0, 7.0, 30.0, 1.0, 18.0, 25.0, 3.0]
    y = [40.0, 11.0, 19.0, 80.0, 2.0, 44.0, 61.0, 9.0]
    rx = [5.0, 3.5, 3.5, 8.0, 1.0, 6.0, 7.0, 2.0]  # the two 7s share (3+4)/2
    assert list(average_ranks(x)) == rx
    ry = average_ranks(y)
    expected = float(np.corrcoef(rx, ry)[0, 1])
    result = spearman(x, y)
    assert result.rho == pytest.approx(expected, abs=1e-12)
    oracle = scipy.stats.spearmanr(x, y)
    assert result.rho == pytest.approx(float(oracle.statistic), abs=1e-12)


def test_spearman_matches_scipy_on_random_data():
    rng = random.Random(423)
    for trial in range(20):
        n = rng.randrange(12, 60)
        x = [rng.gauss(0.0, 3.0) for _ in range(n)]
        y = [rng.gauss(0.0, 3.0) for _ in range(n)]
        if trial % 3 == 0:  # inject ties
            x = [round(v) * 1.0 for v in x]
            y = [round(v) * 1.0 for v in y]
        result = spearman(x, y)
        oracle = scipy.stats.spearmanr(x, y)
        assert result.rho == pytest.approx(float(oracle.statistic), abs=1e-10)
        assert result.p_value == pytest.approx(float(oracle.pvalue), rel=1e-6)


def test_spearman_exact_permutation_small_n():
    # For n <= 10 an exact permutation p-value is available behind the flag.
    x = [1.0, 2.0, 3.0, 4.0, 5.0]
    y = [2.0, 1.0, 4.0, 3.0, 5.0]
    result = spearman(x, y, method="exact")
    # enumerate all 120 permutations ourselves
    import itertools

    observed = abs(result.rho)
    count = 0
    total = 0
    for perm in itertools.permutations(y):
        total += 1
        if abs(spearman(x, list(perm)).rho) >= observed - 1e-12:
            count += 1
    assert result.p_value == pytest.approx(count / total, abs=1e-12)


def test_spearman_invariance_under_monotone_transform():
    rng = random.Random(99)
    x = [rng.uniform(0.1, 50.0) for _ in range(30)]
    y = [rng.uniform(0.1, 50.0) for _ in range(30)]
    base = spearman(x, y)
    warped = spearman([math.log(v) for v in x], [v ** 3 for v in y])
    assert warped.rho == pytest.approx(base.rho, abs=1e-12)


def test_spearman_symmetry_and_reversal_antisymmetry():
    rng = random.Random(7)
    x = [rng.random() for _ in range(25)]
    y = [rng.random() for _ in range(25)]
    assert spearman(x, y).rho == pytest.approx(spearman(y, x).rho, abs=1e-12)
    assert spearman(x, [-v for v in y]).rho == pytest.approx(
        -spearman(x, y).rho, abs=1e-12
    )


def test_spearman_rejects_mismatched_or_tiny_input():
    with pytest.raises(ValueError):
        spearman([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        spearman([1.0], [1.0])


def test_spearman_rejects_constant_input():
    with pytest.raises(ValueError):
        spearman([3.0, 3.0, 3.0], [1.0, 2.0, 3.0])
