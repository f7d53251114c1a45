"""Acceptance gate: every advertised inequality certified at full scale.

Each test runs one certification suite at its pinned seed and scale, prints a
single PASS/FAIL line, and fails loudly with the violating instances.  Run
with ``pytest tests/test_acceptance.py -v -s`` to see the lines; the same
checks are reachable from the command line via ``ordstat verify --suite all``.
"""

import time

from ordstat import verify


def _gate(tag: str, results, extra: str = "") -> None:
    failed = [r for r in results if not r.passed]
    status = "PASS" if not failed else "FAIL"
    suffix = f" | {extra}" if extra else ""
    print(f"ACCEPTANCE {tag}: {status} ({len(results) - len(failed)}/{len(results)} checks){suffix}")
    assert not failed, "\n".join(r.line() for r in failed)


def test_a01_sum_kmin_sandwich_50_instances():
    t0 = time.monotonic()
    results = verify.suite_sandwich(instances=50, samples=200_000, seed=7)
    elapsed = time.monotonic() - t0
    _gate("A1 order-statistic sum sandwich", results, f"runtime {elapsed:.1f}s")
    assert elapsed < 60.0


def test_a02_minimum_tail_bounds_20_sequences():
    results = verify.suite_min_bounds(sequences=20, samples=40_000, seed=13,
                                      n_max=32, grid_points=20)
    _gate("A2 minimum tail bounds on 20-point grids", results)


def test_a03_selection_kernel_bit_exact():
    results = verify.suite_kernel(vectors=10_000, n_max=100, seed=3)
    _gate("A3 selection kernel vs full-sort oracle", results,
          f"checks {results[0].detail['checks']}")


def test_a04_greedy_partition_postconditions():
    results = verify.suite_partition(sequences=1000, n_max=200, seed=5)
    _gate("A4 greedy partition postconditions", results)


def test_a05_majorization_of_propagated_variances():
    results = verify.suite_majorization(matrices=1000, n_max=32, seed=13)
    _gate("A5 majorization under Haar transforms", results)


def test_a06_diagonal_vs_rotated_comparison():
    results = verify.suite_mz(instances=200, n_max=16, samples=100_000, seed=17)
    detail = results[0].detail
    _gate("A6 diagonal-vs-rotated ratio vs explicit constant", results,
          f"max ratio {detail['max_ratio']:.4f}, above-1 count {detail['ratio_above_1']}")


def test_a07_reverse_linear_nonlinear_inequality():
    results = verify.suite_lastprop(instances=20, samples=50_000, seed=19,
                                    n_max=32, u=1.0 / 20.0)
    _gate("A7 reverse linear-vs-nonlinear inequality", results)


def test_a08_approximation_error_scalings():
    results = verify.suite_scalings(samples=200_000, seed=23)
    _gate("A8 approximation error scaling laws", results)


def test_a09_regularity_machinery():
    results = verify.suite_regularity(seed=29, symmetric_instances=1000,
                                      low_est_instances=10_000)
    _gate("A9 regularity checks (cdf decay, symmetric means, calculus)", results)


def test_a10_dependence_gap():
    results = verify.suite_dep_gap(samples=20_000, seed=31, n=128, k=64)
    _gate("A10 dependence gap for the k-th minimum", results)
