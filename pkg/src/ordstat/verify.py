"""Certification suites: seeded Monte Carlo and exact checks for every bound.

Each suite draws a reproducible batch of instances, evaluates the relevant
deterministic bounds, runs the Monte Carlo engine at a pinned seed, and
returns one :class:`CheckResult` per check (or per instance batch).  Suites are
the single implementation behind both ``ordstat verify`` and the acceptance
test module; all tolerances are fixed here.

Stochastic gates use a 3-standard-error margin throughout.  Instance i of a
suite runs under stream i (or seed+i where an operation owns its streams), so
every number is a pure function of the suite's (seed, samples) arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import approx, bounds, mc, ostat, transform
from .dist import SQRT_2_OVER_PI, check_cdf_decay, exponential, half_normal

# cdf-decay parameters validated for the half-normal on the default grid
DECAY_DELTA = 0.3
DECAY_A = 3.0

SCENARIO_STREAM = 0x5CE0


@dataclass
class CheckResult:
    suite: str
    label: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extras = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                           for k, v in self.detail.items())
        return f"{status} {self.suite}: {self.label}" + (f" [{extras}]" if extras else "")


def _loguniform(rng: np.random.Generator, lo: float, hi: float, size: int) -> np.ndarray:
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def _random_x(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.sort(_loguniform(rng, 0.1, 10.0, n))


# -- 1. sandwich for sums of smallest order statistics -------------------------


def suite_sandwich(instances: int = 50, samples: int = 200_000, seed: int = 7,
                   n: int | None = None, k: int | None = None, p: float | None = None,
                   threads: int | None = None) -> list[CheckResult]:
    """MC mean of sum_{j<=k} j-min |x_i xi_i|^p inside the explicit sandwich.

    Half-normal coordinates (alpha = beta = sqrt(2/pi)); x log-uniform in
    [0.1, 10]; n in 4..64, k <= n, p in {1, 2} unless pinned by the arguments.
    """
    scen = mc.generator(seed, SCENARIO_STREAM)
    ab = SQRT_2_OVER_PI
    results = []
    for i in range(instances):
        ni = n if n is not None else int(scen.integers(4, 65))
        ki = k if k is not None else int(scen.integers(1, ni + 1))
        pi = p if p is not None else float(scen.choice([1.0, 2.0]))
        x = _random_x(scen, ni)
        if ki > ni:
            raise ValueError(f"k={ki} exceeds n={ni}")
        model = mc.independent_scaled([half_normal()] * ni, x)
        report = bounds.sum_kmin_bounds(x, ab, ab, pi, ki)
        verdict = mc.check_sandwich(model, report, ki, pi, samples, seed,
                                    stream=i, threads=threads)
        est = verdict.estimate
        results.append(CheckResult(
            "sandwich", f"n={ni} k={ki} p={pi:g}", verdict.passed,
            {"lower": report.lower, "mean": est.mean, "upper": report.upper,
             "stderr": est.stderr, "samples": samples, "seed": seed},
        ))
    return results


# -- 2. tail bounds for the minimum --------------------------------------------


def suite_min_bounds(sequences: int = 20, samples: int = 40_000, seed: int = 13,
                     n_max: int = 32, grid_points: int = 20,
                     threads: int | None = None) -> list[CheckResult]:
    """Empirical P(min <= t) vs alpha*b*t and P(min > t) vs exp(-beta*b*t),
    pointwise within 3 binomial standard errors on a 20-point grid."""
    results = []
    for d_idx, dist in enumerate((half_normal(), exponential())):
        scen = mc.generator(seed, SCENARIO_STREAM + 1 + d_idx)
        for s in range(sequences):
            ns = int(scen.integers(2, n_max + 1))
            x = _random_x(scen, ns)
            seq = bounds.tail_sums(x)
            b1 = seq.b[0]
            grid = np.geomspace(0.1, 3.0, grid_points) / b1
            model = mc.independent_scaled([dist] * ns, x)
            ecdf = mc.empirical_cdf(model, mc.Statistic.KMIN, 1, grid, samples,
                                    seed, stream=d_idx * sequences + s,
                                    threads=threads)
            low_ok = ecdf.probs <= np.minimum(1.0, dist.alpha * b1 * grid) + 3.0 * ecdf.stderr
            upp_ok = (1.0 - ecdf.probs) <= np.exp(-dist.beta * b1 * grid) + 3.0 * ecdf.stderr
            passed = bool(np.all(low_ok) and np.all(upp_ok))
            results.append(CheckResult(
                "min-bounds", f"{dist.name} n={ns} seq={s}", passed,
                {"bad_points": int(np.sum(~low_ok) + np.sum(~upp_ok)),
                 "samples": samples, "seed": seed},
            ))
    return results


# -- 3. selection kernel vs full-sort oracle ------------------------------------


def suite_kernel(vectors: int = 10_000, n_max: int = 100, seed: int = 3) -> list[CheckResult]:
    """sum_k_smallest and jth_min must match the full-sort oracle bit-exactly,
    for every k, on random vectors (ties included via rounding)."""
    scen = mc.generator(seed, SCENARIO_STREAM + 3)
    powers = (1.0, 2.0, 2.5)
    mismatches = 0
    checked = 0
    for i in range(vectors):
        n = int(scen.integers(1, n_max + 1))
        v = scen.standard_normal(n) * 10.0 ** scen.uniform(-2, 2)
        if scen.random() < 0.2:
            v = np.round(v, 1)  # create ties
        p = powers[i % len(powers)]
        w_sorted = np.sort(ostat.abs_pow(v, p))
        v_sorted = np.sort(v)
        for k in range(1, n + 1):
            checked += 2
            if ostat.jth_min(v, k) != v_sorted[k - 1]:
                mismatches += 1
            if ostat.sum_k_smallest(v, k, p) != float(np.sum(w_sorted[:k])):
                mismatches += 1
    return [CheckResult("kernel", f"{vectors} vectors, all k", mismatches == 0,
                        {"checks": checked, "mismatches": mismatches, "seed": seed})]


# -- 4. greedy partition postconditions -----------------------------------------


def suite_partition(sequences: int = 1000, n_max: int = 200, seed: int = 5) -> list[CheckResult]:
    """Pivot minimality, interval structure, per-block quota, and the global
    min-block bound, all at relative tolerance 1e-12."""
    scen = mc.generator(seed, SCENARIO_STREAM + 4)
    rtol = 1e-12
    bad = 0
    for _ in range(sequences):
        n = int(scen.integers(1, n_max + 1))
        a = np.sort(_loguniform(scen, 1e-3, 1e3, n))[::-1]
        k = int(scen.integers(1, n + 1))
        part = bounds.greedy_partition(a, k)
        m = part.pivot_m
        btail = np.cumsum(a[::-1])[::-1]
        ok = part.k == k and part.n == n
        # pivot minimality (equality accepted at m)
        ok &= all(a[j - 1] * (k + 1 - j) > btail[j - 1] for j in range(1, m))
        ok &= a[m - 1] * (k + 1 - m) <= btail[m - 1] * (1.0 + rtol)
        sums = np.add.reduceat(a, np.fromiter((s for s, _ in part.blocks()), dtype=np.intp))
        quota = btail[m - 1] / (2.0 * (k + 1 - m))
        ok &= bool(np.all(sums[m - 1:] >= quota * (1.0 - rtol)))
        j = np.arange(1, k + 1)
        global_floor = 0.5 * float(np.min(btail[:k] / (k + 1 - j)))
        ok &= bool(np.min(sums) >= global_floor * (1.0 - rtol))
        bad += not ok
    return [CheckResult("partition", f"{sequences} sequences", bad == 0,
                        {"violations": bad, "seed": seed})]


# -- 5. majorization under orthogonal propagation --------------------------------


def suite_majorization(matrices: int = 1000, n_max: int = 32, seed: int = 13) -> list[CheckResult]:
    """Haar transforms x random variances: prefix dominance, total equality,
    and doubly stochastic row/column sums, all at 1e-9."""
    scen = mc.generator(seed, SCENARIO_STREAM + 5)
    bad = 0
    for i in range(matrices):
        n = int(scen.integers(2, n_max + 1))
        T = transform.random_orthogonal(n, seed + i)
        a = _loguniform(scen, 1e-2, 1e2, n)
        if scen.random() < 0.1:
            a[scen.integers(0, n)] = 0.0
        b = transform.propagate_variances(T, a)
        rep = transform.majorization_check(np.sort(a)[::-1], b, tol=1e-9)
        W = np.asarray(T) ** 2
        ds_ok = (np.max(np.abs(W.sum(axis=0) - 1.0)) <= 1e-9
                 and np.max(np.abs(W.sum(axis=1) - 1.0)) <= 1e-9)
        bad += not (rep.passed and ds_ok)
    return [CheckResult("majorization", f"{matrices} Haar matrices", bad == 0,
                        {"violations": bad, "seed": seed})]


# -- 6. diagonal vs rotated comparison -------------------------------------------


def suite_mz(instances: int = 200, n_max: int = 16, samples: int = 100_000,
             seed: int = 17, threads: int | None = None) -> list[CheckResult]:
    """Empirical lhs/rhs ratio never exceeds the explicit chain constant at
    p = 2; the conjectured ratio <= 1 is tallied and reported, never gated."""
    ab = SQRT_2_OVER_PI
    constant = bounds.comparison_constant(ab, ab, DECAY_DELTA, DECAY_A, 2.0)
    scen = mc.generator(seed, SCENARIO_STREAM + 6)
    worst = -math.inf
    exceed_constant = 0
    above_one = 0
    unreliable = 0
    for i in range(instances):
        n = int(scen.integers(2, n_max + 1))
        k = int(scen.integers(1, n))
        var = _loguniform(scen, 0.1, 10.0, n)
        T = transform.random_orthogonal(n, seed + 1000 + i)
        res = transform.mz_ratio(var, T, k, samples, seed + i, threads=threads)
        if not res.reliable:
            unreliable += 1
            continue
        worst = max(worst, res.ratio)
        if res.ratio > constant + 3.0 * res.ratio_stderr:
            exceed_constant += 1
        if res.ratio > 1.0 + 3.0 * res.ratio_stderr:
            above_one += 1
    return [CheckResult(
        "mz", f"{instances} instances, p=2", exceed_constant == 0 and unreliable == 0,
        {"constant": constant, "max_ratio": worst, "ratio_above_1": above_one,
         "unreliable": unreliable, "samples": samples, "seed": seed},
    )]


# -- 7. reverse linear-vs-nonlinear inequality ------------------------------------


def suite_lastprop(instances: int = 20, samples: int = 50_000, seed: int = 19,
                   n_max: int = 32, u: float = 1.0 / 20.0,
                   threads: int | None = None) -> list[CheckResult]:
    """u * E0(X, 2m) <= E(X, m) + 3 SE for diagonal and rotated Gaussian models,
    plus the quadrature values of the median-mass constants."""
    results = []
    g_const = approx.wrd_constant(half_normal())
    results.append(CheckResult("lastprop", "median-mass constant, Gaussian >= 1/20",
                               g_const >= 1.0 / 20.0, {"value": g_const}))
    e_const = approx.wrd_constant(exponential())
    results.append(CheckResult("lastprop", "median-mass constant, exponential >= 1/48",
                               e_const >= 1.0 / 48.0, {"value": e_const}))
    scen = mc.generator(seed, SCENARIO_STREAM + 7)
    for i in range(instances):
        n = int(scen.integers(4, n_max + 1))
        m = int(scen.integers(1, (n - 1) // 2 + 1))
        var = _loguniform(scen, 0.1, 10.0, n)
        if i % 2 == 0:
            model = mc.gaussian_diagonal(var)
        else:
            T = transform.random_orthogonal(n, seed + 500 + i)
            model = mc.rotated_gaussian(var, T)
        verdict = approx.check_lastprop(model, m, samples, seed, u=u, stream=i,
                                        threads=threads)
        results.append(CheckResult(
            "lastprop", f"{model.kind.value} n={n} m={m}", verdict.passed,
            {"u_E0_2m": u * verdict.linear_2m, "E_m": verdict.estimate.mean,
             "stderr": verdict.estimate.stderr, "samples": samples, "seed": seed},
        ))
    return results


# -- 8. scaling laws of the approximation errors ----------------------------------


def suite_scalings(samples: int = 200_000, seed: int = 23,
                   threads: int | None = None) -> list[CheckResult]:
    """Standard Gaussian: E0(X, n-k/2) = k/2 exactly; E(X, n-k) follows the
    k^3/n^2 scaling within the calibrated band; the E0/E ratio grows with n."""
    results = []
    exact_ok = all(approx.linear_error(np.ones(n), n - k // 2) == k / 2.0
                   for n, k in ((32, 8), (64, 16), (128, 8)))
    results.append(CheckResult("scalings", "E0(X, n-k/2) = k/2 exactly", exact_ok, {}))

    def nonlin(n: int, k: int, stream: int) -> mc.McEstimate:
        return approx.nonlinear_error(mc.gaussian_diagonal(np.ones(n)), n - k,
                                      samples, seed, stream=stream, threads=threads)

    e64 = nonlin(64, 16, 0)
    e32 = nonlin(32, 8, 1)
    ratio = e64.mean / e32.mean
    results.append(CheckResult(
        "scalings", "E(64, 48)/E(32, 24) in [1, 4] (predicted 2)",
        1.0 <= ratio <= 4.0,
        {"ratio": ratio, "e64": e64.mean, "e32": e32.mean, "samples": samples,
         "seed": seed},
    ))
    e128 = nonlin(128, 8, 2)
    e32b = nonlin(32, 8, 3)
    r128 = (8 / 2.0) / e128.mean
    r32 = (8 / 2.0) / e32b.mean
    results.append(CheckResult(
        "scalings", "E0/E ratio at (128, 8) >= 2x ratio at (32, 8)",
        r128 >= 2.0 * r32,
        {"ratio_128": r128, "ratio_32": r32, "samples": samples, "seed": seed},
    ))
    return results


# -- 9. regularity machinery -------------------------------------------------------


def suite_regularity(seed: int = 29, symmetric_instances: int = 1000,
                     low_est_instances: int = 10_000) -> list[CheckResult]:
    """cdf-decay validation for the half-normal, exact symmetric-mean checks,
    and the calculus inequalities tying sum-form and max-form functionals."""
    results = []
    hn = half_normal()
    passes = check_cdf_decay(hn, DECAY_DELTA, DECAY_A).passed
    fails = not check_cdf_decay(hn, DECAY_DELTA, 2.0).passed
    results.append(CheckResult(
        "regularity", "cdf-decay half-normal: (0.3, 3) passes, (0.3, 2) fails",
        passes and fails, {}))

    scen = mc.generator(seed, SCENARIO_STREAM + 9)
    bad_sym = 0
    for _ in range(symmetric_instances):
        n = int(scen.integers(1, 26))
        a = scen.uniform(0.0, 1.0, n)
        ell = int(scen.integers(1, n + 1))
        if not bounds.maclaurin_check(a, ell):
            bad_sym += 1
        k = int(scen.integers(1, n + 1))
        target = scen.uniform(0.05, 0.95)
        scaled = a * (target * k / (math.e * max(float(np.sum(a)), 1e-300)))
        if not bounds.agmean_bound(scaled, k):
            bad_sym += 1
    results.append(CheckResult(
        "regularity", f"symmetric means on {symmetric_instances} instances (exact DP)",
        bad_sym == 0, {"violations": bad_sym, "seed": seed}))

    bad_low = 0
    rtol = 1e-12
    for _ in range(low_est_instances):
        n = int(scen.integers(1, 51))
        x = _random_x(scen, n)
        k = int(scen.integers(1, n + 1))
        p = float(scen.choice([0.5, 1.0, 2.0, 3.0]))
        trip = bounds.low_est_check(x, p, k)
        if not (trip.left >= trip.middle * (1.0 - rtol)
                and trip.middle >= trip.right * (1.0 - rtol)):
            bad_low += 1
    results.append(CheckResult(
        "regularity", f"sum/max functional inequalities on {low_est_instances} instances",
        bad_low == 0, {"violations": bad_low, "seed": seed}))
    return results


# -- 10. dependence gap --------------------------------------------------------------


def suite_dep_gap(samples: int = 20_000, seed: int = 31, n: int = 128, k: int = 64,
                  threads: int | None = None) -> list[CheckResult]:
    """x = (1,...,1, n^2,...,n^2): the independent median of the k-th smallest
    exceeds the comonotone one by a factor >= 2, and the dependent median lower
    bound holds for both models."""
    ab = SQRT_2_OVER_PI
    x = np.concatenate([np.ones(k), np.full(n - k, float(n) ** 2)])
    ind = mc.independent_scaled([half_normal()] * n, x)
    com = mc.comonotone(half_normal(), x)
    est_ind = mc.estimate_kth_min(ind, k, samples, seed, stream=0, threads=threads)
    est_com = mc.estimate_kth_min(com, k, samples, seed, stream=1, threads=threads)
    ratio = est_ind.median / est_com.median
    results = [CheckResult(
        "dep-gap", f"median ratio independent/comonotone >= 2 (n={n}, k={k})",
        ratio >= 2.0,
        {"ratio": ratio, "med_independent": est_ind.median,
         "med_comonotone": est_com.median, "samples": samples, "seed": seed},
    )]
    bound = bounds.kmin_median_lower_dependent(x, ab, DECAY_DELTA, DECAY_A, k)
    for name, est in (("independent", est_ind), ("comonotone", est_com)):
        results.append(CheckResult(
            "dep-gap", f"dependent median lower bound, {name} model",
            bound <= est.median_ci[1],
            {"bound": bound, "median": est.median, "ci_hi": est.median_ci[1],
             "samples": samples, "seed": seed},
        ))
    return results


SUITES = {
    "sandwich": suite_sandwich,
    "min-bounds": suite_min_bounds,
    "kernel": suite_kernel,
    "partition": suite_partition,
    "majorization": suite_majorization,
    "mz": suite_mz,
    "lastprop": suite_lastprop,
    "scalings": suite_scalings,
    "regularity": suite_regularity,
    "dep-gap": suite_dep_gap,
}
