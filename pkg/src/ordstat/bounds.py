"""Closed-form bounds for order statistics of scaled random vectors.

Everything here is deterministic.  The central object is a sorted positive
weight sequence x_1 <= ... <= x_n with cached reciprocal tail sums

    b_j = sum_{i=j}^n 1/x_i,

through which all bounds are expressed.  For a coordinate law satisfying the
small-ball condition P(xi <= t) <= alpha*t and/or the exponential-tail
condition P(xi > t) <= exp(-beta*t) (see :mod:`ordstat.dist`), this module
evaluates:

* tail/median/expectation bounds for the minimum of (x_i xi_i),
* a tail bound and expectation lower bound for the k-th smallest entry,
* quantile and median lower bounds that tolerate arbitrary dependence,
* the two-sided sandwich for E sum_{j<=k} (j-th smallest of |x_i xi_i|^p)
  with the explicit constants (1/2)(16 alpha)^{-p} and
  W(beta, p) = beta^{-p} Gamma(1+p)(1 + 2*4^p),
* the end-to-end comparison constant 6 (32 A alpha / (delta beta))^p Gamma(1+p),
* the greedy interval partition behind the refined upper bound, and
* exact symmetric-mean (Maclaurin) checks used by the k-min tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ostat import IntervalPartition


def _kahan_suffix_sums(values: np.ndarray) -> np.ndarray:
    """Compensated running sums from the right: out[j] = sum_{i>=j} values[i]."""
    n = values.size
    out = np.empty(n, dtype=np.float64)
    total = 0.0
    carry = 0.0
    for i in range(n - 1, -1, -1):
        y = values[i] - carry
        t = total + y
        carry = (t - total) - y
        total = t
        out[i] = total
    return out


def _kahan_prefix_sums(values: np.ndarray) -> np.ndarray:
    """Compensated running sums from the left: out[j] = sum_{i<=j} values[i]."""
    n = values.size
    out = np.empty(n, dtype=np.float64)
    total = 0.0
    carry = 0.0
    for i in range(n):
        y = values[i] - carry
        t = total + y
        carry = (t - total) - y
        total = t
        out[i] = total
    return out


@dataclass(frozen=True)
class ScaledSequence:
    """Sorted positive weights with cached reciprocal tail sums b_j = sum_{i>=j} 1/x_i."""

    x: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.x.setflags(write=False)
        self.b.setflags(write=False)

    @property
    def n(self) -> int:
        return self.x.size


def tail_sums(x) -> ScaledSequence:
    """Validate a sorted positive weight sequence and cache its tail sums."""
    if isinstance(x, ScaledSequence):
        return x
    arr = np.array(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("weights must form a nonempty 1-D sequence")
    if not np.all(np.isfinite(arr)) or not np.all(arr > 0.0):
        raise ValueError("weights must be finite and strictly positive")
    if np.any(np.diff(arr) < 0.0):
        raise ValueError("weights must be sorted in non-decreasing order")
    return ScaledSequence(arr, _kahan_suffix_sums(1.0 / arr))


@dataclass(frozen=True)
class BoundReport:
    """A named inequality with its deterministic lower/upper values.

    ``assertable=False`` marks report-only bounds whose leading constant is not
    pinned down; they are emitted for inspection and never gate a verdict.
    """

    name: str
    lower: float
    upper: float
    params: dict = field(default_factory=dict)
    citation: str = ""
    assertable: bool = True

    def __post_init__(self):
        if math.isfinite(self.lower) and math.isfinite(self.upper) and self.lower > self.upper:
            raise ValueError(f"bound report {self.name!r}: lower {self.lower} > upper {self.upper}")

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "lower": self.lower,
            "upper": self.upper,
            "params": dict(self.params),
            "citation": self.citation,
            "assertable": self.assertable,
        }

    def to_csv_row(self) -> list[str]:
        fmt = lambda v: format(float(v), ".17g")
        params = dict(self.params)
        k = params.get("k", "")
        p = params.get("p", "")
        rest = ";".join(f"{key}={fmt(val)}" for key, val in sorted(params.items())
                        if key not in ("k", "p"))
        return [self.name, str(k), str(p) if p == "" else fmt(p),
                fmt(self.lower), fmt(self.upper), rest, self.citation]

    CSV_HEADER = ("name", "k", "p", "lower", "upper", "params", "citation")


# -- greedy partition --------------------------------------------------------


def greedy_partition(a, k: int) -> IntervalPartition:
    """Interval partition of 1..n into k blocks for non-increasing positive a.

    The pivot m <= k is the smallest index with a_m <= b_m/(k+1-m), where
    b_m = sum_{i>=m} a_i (equality accepted).  Blocks before the pivot are the
    singletons {j}; the rest of the range is cut greedily at quota multiples
    of b_m/(k+1-m), which guarantees every block sum is at least
    b_m / (2(k+1-m)) and, along the way,
    min_j (block sum) >= (1/2) min_{j<=k} b_j/(k+1-j).
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("sequence must be 1-D and nonempty")
    if not np.all(np.isfinite(arr)) or not np.all(arr > 0.0):
        raise ValueError("sequence entries must be finite and positive")
    if np.any(np.diff(arr) > 0.0):
        raise ValueError("sequence must be non-increasing")
    n = arr.size
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")

    btail = _kahan_suffix_sums(arr)
    m = k
    for j in range(1, k + 1):
        if arr[j - 1] * (k + 1 - j) <= btail[j - 1]:
            m = j
            break

    blocks_left = k + 1 - m
    quota = btail[m - 1] / blocks_left
    boundaries = list(range(m))  # n_0 .. n_{m-1} = 0, 1, ..., m-1

    if blocks_left == 1:
        boundaries.append(n)
        return IntervalPartition(tuple(boundaries), m)

    prefix = _kahan_prefix_sums(arr[m - 1:])  # sums over indices m..m-1+len
    prev = m - 1
    for ell in range(1, blocks_left):
        cut = m - 1 + int(np.searchsorted(prefix, ell * quota, side="right"))
        # the construction guarantees room for the remaining blocks; the
        # clamps only matter when a cut lands exactly on a rounding boundary
        cut = max(cut, prev + 1)
        cut = min(cut, n - (blocks_left - ell))
        boundaries.append(cut)
        prev = cut
    boundaries.append(n)
    return IntervalPartition(tuple(boundaries), m)


# -- bounds for the minimum --------------------------------------------------


def min_probability_lower(x, alpha: float, t: float) -> float:
    """P(min_i x_i xi_i <= t) <= min(1, alpha * b_1 * t) under the small-ball condition."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    seq = tail_sums(x)
    return min(1.0, alpha * seq.b[0] * t)


def min_expectation_bounds(x, alpha: float, beta: float, p: float) -> BoundReport:
    """Two-sided bounds on E min_i |x_i xi_i|^p, with median bounds alongside.

    lower  = 1 / ((1+p) alpha^p b^p)      (dependence allowed)
    upper  = Gamma(1+p) / (beta^p b^p)    (independence required)
    median in [ (2 alpha b)^{-p}, (ln 2 / (beta b))^p ]
    """
    if p <= 0:
        raise ValueError("p must be positive")
    seq = tail_sums(x)
    b1 = seq.b[0]
    lower = 1.0 / ((1.0 + p) * (alpha * b1) ** p)
    upper = math.gamma(1.0 + p) / (beta * b1) ** p
    return BoundReport(
        name="min-expectation",
        lower=lower,
        upper=upper,
        params={
            "k": 1, "p": p, "alpha": alpha, "beta": beta, "b1": b1,
            "median_lower": (2.0 * alpha * b1) ** -p,
            "median_upper": (math.log(2.0) / (beta * b1)) ** p,
        },
        citation="minimum expectation sandwich (small-ball + exponential tail)",
    )


def malzeit_ratio(alpha: float, beta: float, p: float) -> float:
    """Gamma(2+p) (alpha/beta)^p: dependent-vs-independent ratio bound for E min^p."""
    return math.gamma(2.0 + p) * (alpha / beta) ** p


# -- bounds for the k-th smallest --------------------------------------------


def kmin_tail_upper(x, alpha: float, k: int, t: float) -> float:
    """P(k-th smallest of |x_i xi_i| <= t) <= (2 pi k)^{-1/2} (at)^k / (1 - at).

    Here a = alpha * e * b_1 / k; the display holds for 0 < t < 1/a and is
    clamped to 1 elsewhere (it bounds a probability).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    seq = tail_sums(x)
    if not 1 <= k <= seq.n:
        raise ValueError(f"k={k} out of range 1..{seq.n}")
    a = alpha * math.e * seq.b[0] / k
    at = a * t
    if at >= 1.0:
        return 1.0
    val = (at ** k) / ((1.0 - at) * math.sqrt(2.0 * math.pi * k))
    return min(1.0, val)


def kmin_expectation_lower(x, alpha: float, k: int, p: float) -> float:
    """Lower bound on E (k-th smallest of |x_i xi_i|)^p for independent coordinates.

    For k >= 2 this is the p-th power of
        (2^{1/p} 4 alpha)^{-1} max_{j<=k} (k+1-j)/b_j;
    the case k = 1 is routed to the sharper minimum bound 1/((1+p) alpha^p b^p).
    """
    if p <= 0:
        raise ValueError("p must be positive")
    seq = tail_sums(x)
    if not 1 <= k <= seq.n:
        raise ValueError(f"k={k} out of range 1..{seq.n}")
    if k == 1:
        return 1.0 / ((1.0 + p) * (alpha * seq.b[0]) ** p)
    j = np.arange(1, k + 1)
    best = float(np.max((k + 1 - j) / seq.b[:k]))
    return best ** p / (2.0 * 4.0 ** p * alpha ** p)


def quantile_lower_bound(x, alpha: float, k: int) -> float:
    """(2 alpha)^{-1} max_{j<=k} (k-j+1)/b_j, a lower bound on the averaged-cdf
    quantile of order (k-1/2)/n; dependence between coordinates is allowed."""
    seq = tail_sums(x)
    if not 1 <= k <= seq.n:
        raise ValueError(f"k={k} out of range 1..{seq.n}")
    j = np.arange(1, k + 1)
    return float(np.max((k - j + 1) / seq.b[:k])) / (2.0 * alpha)


def averaged_cdf_quantile(dists, x, r: float) -> float:
    """Left quantile of F(t) = (1/n) sum_i F_i(t/x_i) by bisection.

    ``dists`` supplies the cdf of each coordinate factor xi_i; the averaged cdf
    mixes the laws of the scaled coordinates |x_i xi_i|.
    """
    seq = tail_sums(x)
    dists = list(dists)
    if len(dists) != seq.n:
        raise ValueError(f"need {seq.n} distributions, got {len(dists)}")
    if not 0.0 <= r < 1.0:
        raise ValueError("quantile order must lie in [0, 1)")
    xs = seq.x

    def favg(t: float) -> float:
        return float(np.mean([d.cdf(t / xi) for d, xi in zip(dists, xs)]))

    if r == 0.0 or favg(0.0) >= r:
        return 0.0
    hi = float(np.max(xs))
    for _ in range(200):
        if favg(hi) >= r:
            break
        hi *= 2.0
    else:
        raise ValueError("failed to bracket the averaged quantile")
    lo = 0.0
    tol = 1e-10 * float(np.max(xs))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if favg(mid) >= r:
            hi = mid
        else:
            lo = mid
    return hi


def truncation_threshold(dists, delta: float) -> float:
    """t_0 = min_i sup{t > 0 : F_i(t) <= delta}; >= delta/alpha under the
    small-ball condition with parameter alpha."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    dists = list(dists)
    if not dists:
        raise ValueError("need at least one distribution")
    return min(float(d.quantile(delta)) for d in dists)


def kmin_median_lower_dependent(x, alpha: float, delta: float, A: float, k: int) -> float:
    """Med(k-th smallest of |x_i xi_i|) >= (delta/(2 A alpha)) max_{j<=k} (k-j+1)/b_j.

    Requires only the marginal small-ball and cdf-decay(delta, A) conditions;
    the coordinates may be arbitrarily dependent.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not A > 1.0:
        raise ValueError("A must exceed 1")
    return quantile_lower_bound(x, alpha, k) * delta / A


# -- bounds for sums of order statistics --------------------------------------


def w_constant(beta: float, p: float) -> float:
    """W(beta, p) = beta^{-p} Gamma(1+p) (1 + 2*4^p)."""
    return math.gamma(1.0 + p) * (1.0 + 2.0 * 4.0 ** p) / beta ** p


def sum_kmin_bounds(x, alpha: float, beta: float, p: float, k: int) -> BoundReport:
    """Sandwich for E sum_{j<=k} (j-th smallest of |x_i xi_i|^p).

    With S = sum_{j<=k} ((k-j+1)/b_j)^p,

        (1/2) (16 alpha)^{-p} S  <=  E  <=  W(beta, p) S.

    The params carry the slightly sharper upper bound
    beta^{-p} Gamma(1+p) [ sum_{j<m} x_j^p + 2^p (k-m+1)^{1+p} / b_m^p ]
    built from the greedy-partition pivot m for a = 1/x; it never exceeds the
    W-form value.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    seq = tail_sums(x)
    n = seq.n
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    j = np.arange(1, k + 1)
    terms = ((k - j + 1) / seq.b[:k]) ** p
    S = float(np.sum(terms))
    lower = 0.5 * S / (16.0 * alpha) ** p
    upper = w_constant(beta, p) * S

    part = greedy_partition(1.0 / seq.x, k)
    m = part.pivot_m
    gp = math.gamma(1.0 + p)
    refined = (gp / beta ** p) * (
        float(np.sum(seq.x[: m - 1] ** p))
        + 2.0 ** p * (k - m + 1) ** (1.0 + p) / seq.b[m - 1] ** p
    )
    return BoundReport(
        name="sum-kmin-sandwich",
        lower=lower,
        upper=upper,
        params={
            "k": k, "p": p, "alpha": alpha, "beta": beta, "n": n,
            "S": S, "pivot_m": m, "refined_upper": refined,
            "W": w_constant(beta, p),
        },
        citation="order-statistic sum sandwich with explicit constants",
    )


@dataclass(frozen=True)
class LowEstTriple:
    """The three calculus expressions tying max-form and sum-form functionals."""

    left: float     # 4^p sum_{l<=k} max_{j<=l} ((l-j+1)/b_j)^p
    middle: float   # sum_{j<=k} ((k-j+1)/b_j)^p
    right: float    # 2^{-1-p} max_{j<=k} (k-j+1)^{1+p} / b_j^p
    left_ok: bool
    right_ok: bool

    @property
    def passed(self) -> bool:
        return self.left_ok and self.right_ok


def low_est_check(x, p: float, k: int) -> LowEstTriple:
    """Evaluate and verify left >= middle >= right for the displayed expressions."""
    if p <= 0:
        raise ValueError("p must be positive")
    seq = tail_sums(x)
    if not 1 <= k <= seq.n:
        raise ValueError(f"k={k} out of range 1..{seq.n}")
    b = seq.b[:k]
    j = np.arange(1, k + 1)
    middle = float(np.sum(((k - j + 1) / b) ** p))
    right = float(np.max((k - j + 1) ** (1.0 + p) / b ** p)) / 2.0 ** (1.0 + p)
    # ratio matrix M[l-1, j-1] = (l-j+1)/b_j on the lower triangle j <= l
    ell = j[:, None]
    ratios = np.where(ell >= j[None, :], (ell - j[None, :] + 1) / b[None, :], 0.0)
    left = 4.0 ** p * float(np.sum(np.max(ratios, axis=1) ** p))
    return LowEstTriple(left, middle, right, left >= middle, middle >= right)


def comparison_constant(alpha: float, beta: float, delta: float, A: float, p: float) -> float:
    """6 (32 A alpha / (delta beta))^p Gamma(1+p): the explicit constant comparing
    E sum_{j<=k} j-min |x_i xi_i|^p for independent coordinates against the same
    sum for arbitrarily dependent coordinates with matching marginal conditions."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not A > 1.0:
        raise ValueError("A must exceed 1")
    return 6.0 * (32.0 * A * alpha / (delta * beta)) ** p * math.gamma(1.0 + p)


# -- report-only bounds (leading constant not pinned down) ---------------------


def kmin_expectation_upper_reported(x, beta: float, k: int, p: float) -> BoundReport:
    """(E k-min^p)^{1/p} <= C(p,k) beta^{-1} max_j (k+1-j)/b_j with unspecified
    absolute constant; emitted with C(p,k) = max(p, ln(k+1)) and flagged
    non-assertable."""
    seq = tail_sums(x)
    if not 1 <= k <= seq.n:
        raise ValueError(f"k={k} out of range 1..{seq.n}")
    j = np.arange(1, k + 1)
    best = float(np.max((k + 1 - j) / seq.b[:k]))
    cpk = max(p, math.log(k + 1.0))
    return BoundReport(
        name="kmin-expectation-upper",
        lower=0.0,
        upper=(cpk * best / beta) ** p,
        params={"k": k, "p": p, "beta": beta, "Cpk": cpk},
        citation="k-th minimum moment upper bound (unspecified constant set to 1)",
        assertable=False,
    )


def dependent_comparison_reported(alpha: float, beta: float, delta: float, A: float,
                                  p: float, k: int) -> BoundReport:
    """Ratio bound (E k-min independent)^{1/p} <= C 2^{1/p} A alpha/(beta delta)
    max(p, ln(k+1)) (E k-min dependent)^{1/p}; unspecified C set to 1,
    non-assertable."""
    ratio_root = 2.0 ** (1.0 / p) * A * alpha / (beta * delta) * max(p, math.log(k + 1.0))
    return BoundReport(
        name="dependent-comparison-kmin",
        lower=0.0,
        upper=ratio_root ** p,
        params={"k": k, "p": p, "alpha": alpha, "beta": beta, "delta": delta, "A": A},
        citation="k-th minimum dependent/independent ratio (unspecified constant set to 1)",
        assertable=False,
    )


# -- symmetric means ----------------------------------------------------------


def elementary_symmetric(a) -> list[Fraction]:
    """e_0..e_n of the values in exact rational arithmetic (O(n^2) recurrence)."""
    vals = [Fraction(float(v)) for v in a]
    n = len(vals)
    e = [Fraction(0)] * (n + 1)
    e[0] = Fraction(1)
    for i, v in enumerate(vals, start=1):
        for j in range(i, 0, -1):
            e[j] += v * e[j - 1]
    return e


def maclaurin_check(a, ell: int) -> bool:
    """Exact check of e_ell(a) <= C(n, ell) * (mean a)^ell for nonnegative a."""
    vals = list(a)
    n = len(vals)
    if not 1 <= ell <= n:
        raise ValueError(f"ell={ell} out of range 1..{n}")
    if n > 25:
        raise ValueError("exact symmetric-polynomial check is limited to n <= 25")
    if any(v < 0 for v in vals):
        raise ValueError("values must be nonnegative")
    e = elementary_symmetric(vals)
    mean = Fraction(sum(Fraction(float(v)) for v in vals), n)
    return e[ell] <= math.comb(n, ell) * mean ** ell


def agmean_bound(a, k: int) -> bool:
    """Check sum_{l>=k} e_l(a) < (2 pi k)^{-1/2} s^k/(1-s) with s = (e/k) sum a_i.

    Requires 0 < s < 1.  The left side is evaluated in exact rationals; the
    right side involves e and pi and is evaluated in floating point.
    """
    vals = list(a)
    n = len(vals)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range 1..{n}")
    if n > 25:
        raise ValueError("exact symmetric-polynomial check is limited to n <= 25")
    if any(v < 0 for v in vals):
        raise ValueError("values must be nonnegative")
    s = math.e / k * float(sum(Fraction(float(v)) for v in vals))
    if not 0.0 < s < 1.0:
        raise ValueError("requires 0 < (e/k) sum a_i < 1")
    e = elementary_symmetric(vals)
    lhs = float(sum(e[k:], Fraction(0)))
    rhs = s ** k / ((1.0 - s) * math.sqrt(2.0 * math.pi * k))
    return lhs < rhs
