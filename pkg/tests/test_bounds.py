"""Deterministic bound formulas: worked examples, homogeneity, internal
consistency, and the exact symmetric-mean checks against brute force."""

import math

import numpy as np
import pytest

from ordstat import (BoundReport, agmean_bound, averaged_cdf_quantile,
                     comparison_constant, dist, greedy_partition,
                     kmin_expectation_lower, kmin_median_lower_dependent,
                     kmin_tail_upper, low_est_check, maclaurin_check,
                     malzeit_ratio, mc, min_expectation_bounds,
                     min_probability_lower, quantile_lower_bound,
                     sum_kmin_bounds, tail_sums, truncation_threshold, w_constant)
from ordstat.bounds import (dependent_comparison_reported, elementary_symmetric,
                            kmin_expectation_upper_reported)

import oracles

AB = math.sqrt(2.0 / math.pi)


# -- tail sums ----------------------------------------------------------------


def test_tail_sums_examples():
    assert np.allclose(tail_sums([1, 2, 4]).b, [1.75, 0.75, 0.25], rtol=0, atol=0)
    assert tail_sums([1.0]).b[0] == 1.0
    n = 17
    seq = tail_sums(np.ones(n))
    assert np.array_equal(seq.b, np.arange(n, 0, -1, dtype=float))
    # strictly decreasing, endpoints
    assert np.all(np.diff(seq.b) < 0)


def test_tail_sums_matches_fsum():
    rng = mc.generator(5, stream=3)
    for _ in range(50):
        x = np.sort(np.exp(rng.uniform(-6, 6, int(rng.integers(1, 200)))))
        seq = tail_sums(x)
        for j in (0, seq.n // 2, seq.n - 1):
            assert seq.b[j] == pytest.approx(math.fsum(1.0 / x[j:]), rel=1e-15)


def test_tail_sums_validation():
    with pytest.raises(ValueError):
        tail_sums([2.0, 1.0])
    with pytest.raises(ValueError):
        tail_sums([0.0, 1.0])
    with pytest.raises(ValueError):
        tail_sums([])


# -- greedy partition -----------------------------------------------------------


def test_greedy_partition_traces():
    part = greedy_partition([1, 1, 1, 1], 2)
    assert part.pivot_m == 1 and part.boundaries == (0, 2, 4)
    part = greedy_partition([4, 1, 1, 1, 1], 2)
    assert part.pivot_m == 1 and part.boundaries == (0, 1, 5)
    part = greedy_partition([10, 1, 1, 1], 2)
    assert part.pivot_m == 2 and part.boundaries == (0, 1, 4)


def test_greedy_partition_validation():
    with pytest.raises(ValueError):
        greedy_partition([1, 2, 3], 2)  # increasing
    with pytest.raises(ValueError):
        greedy_partition([1, 1], 3)  # k > n
    with pytest.raises(ValueError):
        greedy_partition([1, 0], 1)  # nonpositive


def test_greedy_partition_postconditions_random():
    rng = mc.generator(21, stream=4)
    rtol = 1e-12
    for _ in range(400):
        n = int(rng.integers(1, 120))
        a = np.sort(np.exp(rng.uniform(-4, 4, n)))[::-1]
        k = int(rng.integers(1, n + 1))
        part = greedy_partition(a, k)
        m = part.pivot_m
        btail = np.cumsum(a[::-1])[::-1]
        assert part.k == k and part.n == n
        for j in range(1, m):
            assert a[j - 1] * (k + 1 - j) > btail[j - 1]
        assert a[m - 1] * (k + 1 - m) <= btail[m - 1] * (1 + rtol)
        starts = np.fromiter((s for s, _ in part.blocks()), dtype=np.intp)
        sums = np.add.reduceat(a, starts)
        assert np.all(sums[m - 1:] >= btail[m - 1] / (2 * (k + 1 - m)) * (1 - rtol))
        j = np.arange(1, k + 1)
        assert np.min(sums) >= 0.5 * np.min(btail[:k] / (k + 1 - j)) * (1 - rtol)


# -- minimum bounds ---------------------------------------------------------------


def test_min_probability_lower_examples():
    assert min_probability_lower([1.0], 1.0, 0.3) == 0.3
    assert min_probability_lower([1, 1], 1.0, 10.0) == 1.0
    assert min_probability_lower([1, 2, 4], AB, 0.1) == pytest.approx(0.13963, abs=1e-5)


def test_min_expectation_bounds_examples():
    rep = min_expectation_bounds([1.0], AB, AB, 2.0)
    assert rep.lower == pytest.approx(math.pi / 6, rel=1e-12)
    assert rep.upper == pytest.approx(math.pi, rel=1e-12)
    assert rep.lower <= 1.0 <= rep.upper  # E g^2 = 1 lies inside
    rep = min_expectation_bounds([1.0], 1.0, 1.0, 1.0)
    assert rep.lower == 0.5 and rep.upper == 1.0  # exponential attains the upper
    assert rep.params["median_lower"] == 0.5
    assert rep.params["median_upper"] == pytest.approx(math.log(2.0), rel=1e-15)


def test_min_expectation_homogeneity():
    p = 1.7
    base = min_expectation_bounds([1, 2, 3], 1.0, 0.8, p)
    scaled = min_expectation_bounds([2, 4, 6], 1.0, 0.8, p)
    assert scaled.lower == pytest.approx(2 ** p * base.lower, rel=1e-12)
    assert scaled.upper == pytest.approx(2 ** p * base.upper, rel=1e-12)


def test_malzeit_ratio_values():
    assert malzeit_ratio(1, 1, 1) == 2.0
    assert malzeit_ratio(1, 1, 2) == 6.0
    assert malzeit_ratio(2, 1, 1) == 4.0


# -- k-th minimum bounds -----------------------------------------------------------


def test_kmin_tail_upper_values():
    # at = 1/2, k = 1 gives 1/sqrt(2 pi)
    t = 0.5 / (1.0 * math.e * 1.0)
    assert kmin_tail_upper([1.0], 1.0, 1, t) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-12)
    assert kmin_tail_upper([1, 1], 1.0, 2, 0.1) == pytest.approx(0.0286253, abs=1e-6)
    # t -> 0 decays like t^k
    small = kmin_tail_upper([1, 1], 1.0, 2, 1e-8)
    tiny = kmin_tail_upper([1, 1], 1.0, 2, 1e-9)
    assert small / tiny == pytest.approx(100.0, rel=1e-4)
    # clamped beyond the pole
    assert kmin_tail_upper([1, 1], 1.0, 2, 10.0) == 1.0


def test_kmin_expectation_lower_values():
    # tail-sum arithmetic for x = [1, 100, 100], k = 2, p = 1
    assert kmin_expectation_lower([1, 100, 100], 1.0, 2, 1.0) == pytest.approx(50 / 8, rel=1e-12)
    # unit weights, k = n: max_j (n+1-j)/b_j = 1
    n = 9
    assert kmin_expectation_lower(np.ones(n), 1.0, n, 1.0) == pytest.approx(1 / 8, rel=1e-12)
    # k = 1 routes to the sharper minimum bound
    assert kmin_expectation_lower([1, 2], 1.0, 1, 2.0) == pytest.approx(
        min_expectation_bounds([1, 2], 1.0, 1.0, 2.0).lower, rel=1e-15)


def test_quantile_lower_bound_values():
    assert quantile_lower_bound([1, 1, 2, 2], 1.0, 2) == pytest.approx(1 / 3, rel=1e-12)
    seq = [0.5, 1.5, 4.0]
    assert quantile_lower_bound(seq, 2.0, 1) == pytest.approx(
        1.0 / (4.0 * tail_sums(seq).b[0]), rel=1e-12)
    assert quantile_lower_bound(np.array(seq) * 3.0, 2.0, 2) == pytest.approx(
        3.0 * quantile_lower_bound(seq, 2.0, 2), rel=1e-12)


def test_averaged_cdf_quantile_uniform_closed_form():
    x = [1, 1, 2, 2]
    dists = [dist.uniform01()] * 4
    q = averaged_cdf_quantile(dists, x, (2 - 0.5) / 4)
    assert q == pytest.approx(0.5, abs=1e-9)
    # general k: closed form max_j (k - j + 1/2)/b_j
    rng = mc.generator(3, stream=5)
    for _ in range(20):
        n = int(rng.integers(1, 12))
        xs = np.sort(np.exp(rng.uniform(-1, 1, n)))
        k = int(rng.integers(1, n + 1))
        seq = tail_sums(xs)
        j = np.arange(1, k + 1)
        expect = np.max((k - j + 0.5) / seq.b[:k])
        got = averaged_cdf_quantile([dist.uniform01()] * n, xs, (k - 0.5) / n)
        assert got == pytest.approx(expect, rel=1e-7)


def test_averaged_cdf_quantile_reductions():
    d = dist.exponential()
    assert averaged_cdf_quantile([d], [1.0], 0.5) == pytest.approx(math.log(2.0), abs=1e-9)
    # identical dists created equal weights reduce to the scalar quantile
    got = averaged_cdf_quantile([d] * 5, np.ones(5) * 2.0, 0.3)
    assert got == pytest.approx(2.0 * d.quantile(0.3), abs=1e-9)
    with pytest.raises(ValueError):
        averaged_cdf_quantile([d], [1.0], 1.0)
    with pytest.raises(ValueError):
        averaged_cdf_quantile([d, d], [1.0], 0.5)


def test_quantile_claim_dominates_bound():
    # averaged-cdf quantile at (k-1/2)/n dominates the closed-form lower bound
    rng = mc.generator(17, stream=6)
    kinds = [dist.half_normal(), dist.exponential(), dist.uniform01(),
             dist.gen_exponential(2.0)]
    for _ in range(25):
        n = int(rng.integers(1, 14))
        xs = np.sort(np.exp(rng.uniform(-1.5, 1.5, n)))
        k = int(rng.integers(1, n + 1))
        dists = [kinds[int(rng.integers(0, len(kinds)))] for _ in range(n)]
        alpha = max(d.alpha for d in dists)
        q = averaged_cdf_quantile(dists, xs, (k - 0.5) / n)
        assert q >= quantile_lower_bound(xs, alpha, k) * (1 - 1e-9)


def test_truncation_threshold_examples():
    assert truncation_threshold([dist.half_normal()], 0.2) == pytest.approx(0.2533, abs=1e-3)
    assert truncation_threshold([dist.uniform01()], 0.5) == 0.5
    assert truncation_threshold([dist.uniform01(), dist.exponential()], 0.5) == 0.5
    # t0 >= delta/alpha under the small-ball condition
    for d in (dist.half_normal(), dist.exponential(2.0), dist.gen_exponential(3.0)):
        for delta in (0.1, 0.4, 0.8):
            assert truncation_threshold([d], delta) >= delta / d.alpha - 1e-12


def test_kmin_median_lower_dependent_values():
    got = kmin_median_lower_dependent([1, 1, 2, 2], 1.0, 0.5, 2.0, 2)
    assert got == pytest.approx(1 / 12, rel=1e-12)
    # delta -> 1, A -> 1 recovers the quantile bound
    base = quantile_lower_bound([1, 1, 2, 2], 1.0, 2)
    got = kmin_median_lower_dependent([1, 1, 2, 2], 1.0, 1 - 1e-12, 1 + 1e-12, 2)
    assert got == pytest.approx(base, rel=1e-9)
    # monotone in delta and A
    lo = kmin_median_lower_dependent([1, 2], 1.0, 0.2, 3.0, 1)
    hi = kmin_median_lower_dependent([1, 2], 1.0, 0.4, 3.0, 1)
    assert hi > lo
    assert kmin_median_lower_dependent([1, 2], 1.0, 0.2, 5.0, 1) < lo


# -- sum of k smallest bounds --------------------------------------------------------


def test_w_constant_value():
    assert w_constant(1.0, 1.0) == 9.0
    assert w_constant(2.0, 1.0) == 4.5


def test_sum_kmin_bounds_example():
    rep = sum_kmin_bounds([1, 1], AB, AB, 1.0, 2)
    assert rep.params["S"] == pytest.approx(2.0, rel=1e-15)
    assert rep.lower == pytest.approx(1.0 / (16 * AB), rel=1e-12)
    assert rep.upper == pytest.approx(9.0 * 2.0 / AB, rel=1e-12)
    true_mean = 2.0 * math.sqrt(2.0 / math.pi)
    assert rep.lower <= true_mean <= rep.upper
    # k = 1 reduces to a single-term sum
    rep1 = sum_kmin_bounds([1, 3], 1.0, 0.9, 2.0, 1)
    b1 = tail_sums([1, 3]).b[0]
    assert rep1.params["S"] == pytest.approx(b1 ** -2.0, rel=1e-14)


def test_sum_kmin_homogeneity():
    x = [0.3, 1.0, 5.0]
    for p in (1.0, 2.0):
        base = sum_kmin_bounds(x, 1.0, 0.7, p, 2)
        scaled = sum_kmin_bounds(np.array(x) * 4.0, 1.0, 0.7, p, 2)
        assert scaled.lower == pytest.approx(4 ** p * base.lower, rel=1e-12)
        assert scaled.upper == pytest.approx(4 ** p * base.upper, rel=1e-12)
        assert scaled.params["refined_upper"] == pytest.approx(
            4 ** p * base.params["refined_upper"], rel=1e-12)


def test_refined_upper_never_exceeds_w_form():
    rng = mc.generator(8, stream=7)
    for _ in range(10_000):
        n = int(rng.integers(1, 60))
        x = np.sort(np.exp(rng.uniform(-3, 3, n)))
        k = int(rng.integers(1, n + 1))
        p = float(rng.choice([0.5, 1.0, 2.0, 3.0]))
        rep = sum_kmin_bounds(x, 1.0, 0.8, p, k)
        assert rep.params["refined_upper"] <= rep.upper * (1 + 1e-12)
        assert rep.lower <= rep.params["refined_upper"] * (1 + 1e-12)


def test_low_est_check_cases():
    trip = low_est_check(np.ones(6), 1.0, 3)
    assert trip.passed
    assert trip.left == pytest.approx(4.0, rel=1e-12)
    assert trip.middle == pytest.approx(1.15, rel=1e-12)
    assert trip.right == pytest.approx(0.375, rel=1e-12)
    # k = 1 reduces to 4^p/b^p >= 1/b^p >= 2^{-1-p}/b^p
    trip = low_est_check([2.0], 3.0, 1)
    assert trip.left == pytest.approx(4 ** 3 * 8, rel=1e-12)
    assert trip.middle == pytest.approx(8.0, rel=1e-12)
    assert trip.right == pytest.approx(8.0 / 16.0, rel=1e-12)


def test_comparison_constant_values():
    assert comparison_constant(1.0, 1.0, 0.3, 3.0, 1.0) == pytest.approx(1920.0, rel=1e-12)
    assert comparison_constant(1.0, 1.0, 0.3, 3.0, 2.0) == pytest.approx(1_228_800.0, rel=1e-12)
    base = comparison_constant(1.0, 1.0, 0.3, 3.0, 1.0)
    assert comparison_constant(1.0, 1.0, 0.3, 4.0, 1.0) > base   # increasing in A
    assert comparison_constant(1.0, 1.0, 0.4, 3.0, 1.0) < base   # decreasing in delta
    assert comparison_constant(1.0, 2.0, 0.3, 3.0, 1.0) < base   # decreasing in beta


def test_report_only_bounds_flagged():
    rep = kmin_expectation_upper_reported([1, 2, 3], 1.0, 2, 1.0)
    assert not rep.assertable
    rep = dependent_comparison_reported(1.0, 1.0, 0.3, 3.0, 1.0, 4)
    assert not rep.assertable


def test_bound_report_validation_and_serialization():
    with pytest.raises(ValueError):
        BoundReport("broken", 2.0, 1.0)
    rep = sum_kmin_bounds([1, 2], 1.0, 1.0, 1.0, 2)
    row = rep.to_csv_row()
    assert row[0] == "sum-kmin-sandwich" and row[1] == "2"
    blob = rep.to_json_dict()
    assert blob["citation"] and blob["lower"] <= blob["upper"]


# -- symmetric means -------------------------------------------------------------


def test_elementary_symmetric_against_bruteforce():
    rng = mc.generator(31, stream=8)
    for _ in range(20):
        n = int(rng.integers(1, 9))
        a = rng.uniform(0, 2, n)
        e = elementary_symmetric(a)
        for ell in range(1, n + 1):
            assert e[ell] == oracles.elementary_symmetric_bruteforce(a, ell)


def test_maclaurin_examples():
    assert maclaurin_check([1, 1, 1], 2)          # equality: 3 = 3
    assert maclaurin_check([1, 2, 3], 2)          # e_2 = 11 <= 12
    with pytest.raises(ValueError):
        maclaurin_check([1, 2], 3)
    with pytest.raises(ValueError):
        maclaurin_check([-1, 2], 1)
    with pytest.raises(ValueError):
        maclaurin_check(list(range(30)), 2)


def test_agmean_example_and_domain():
    assert agmean_bound([0.01] * 10, 5)
    with pytest.raises(ValueError):
        agmean_bound([1.0] * 10, 2)  # s >= 1
