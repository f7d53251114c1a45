"""Seeded Monte Carlo engine for order-statistic functionals of random vectors.

Randomness comes from Philox-4x64 counter-based bit generators keyed by
(seed, stream, chunk): chunk c of stream s under seed uses the 128-bit key
``[seed, (s << 32) | c]``, so disjoint (seed, stream, chunk) triples yield
independent streams and results are reproducible regardless of scheduling.
Samples are produced in fixed chunks of ``CHUNK_SIZE`` draws and combined in
chunk order, which makes every estimate a pure function of
(model, statistic, samples, seed, stream).  Continuous draws use numpy
Generator's exact samplers (ziggurat normals/exponentials, rejection gammas),
so bit-level reproducibility holds per numpy version.

Estimates report the sample mean with its standard error, and the sample
median with a 99% order-statistic (binomial) confidence interval.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from .dist import DistributionSpec
from .ostat import abs_pow
from .bounds import BoundReport, tail_sums

CHUNK_SIZE = 1 << 14

ORTHO_TOL = 1e-10


def generator(seed: int, stream: int = 0, chunk: int = 0) -> np.random.Generator:
    """The Generator for one (seed, stream, chunk) cell of the key space."""
    key = np.array(
        [seed % (1 << 64), ((stream % (1 << 32)) << 32) | (chunk % (1 << 32))],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


class ModelKind(enum.Enum):
    INDEPENDENT_SCALED = "independent-scaled"
    GAUSSIAN_DIAGONAL = "gaussian-diagonal"
    ROTATED_GAUSSIAN = "rotated-gaussian"
    COMONOTONE = "comonotone"


@dataclass(frozen=True)
class VectorModel:
    """Recipe for sampling an n-dimensional random vector; build via the factories."""

    kind: ModelKind
    n: int
    dists: tuple[DistributionSpec, ...] | None = None
    x: np.ndarray | None = None
    variances: np.ndarray | None = None
    transform: np.ndarray | None = None

    def describe(self) -> str:
        return f"{self.kind.value}(n={self.n})"


def independent_scaled(dists, x) -> VectorModel:
    """Coordinates x_i * xi_i with xi_i independent with laws ``dists``."""
    seq = tail_sums(x)
    dists = tuple(dists)
    if len(dists) != seq.n:
        raise ValueError(f"need {seq.n} distributions, got {len(dists)}")
    return VectorModel(ModelKind.INDEPENDENT_SCALED, seq.n, dists=dists, x=seq.x)


def gaussian_diagonal(variances) -> VectorModel:
    """Centered Gaussian vector with independent coordinates of the given variances."""
    var = np.array(variances, dtype=np.float64)
    if var.ndim != 1 or var.size == 0 or np.any(var < 0) or not np.all(np.isfinite(var)):
        raise ValueError("variances must be a nonempty 1-D nonnegative sequence")
    var.setflags(write=False)
    return VectorModel(ModelKind.GAUSSIAN_DIAGONAL, var.size, variances=var)


def rotated_gaussian(variances, transform) -> VectorModel:
    """T applied to a diagonal Gaussian vector; T must be orthogonal to 1e-10."""
    var = np.array(variances, dtype=np.float64)
    if var.ndim != 1 or var.size == 0 or np.any(var < 0) or not np.all(np.isfinite(var)):
        raise ValueError("variances must be a nonempty 1-D nonnegative sequence")
    T = np.array(np.asarray(transform), dtype=np.float64)
    n = var.size
    if T.shape != (n, n):
        raise ValueError(f"transform must be {n}x{n}, got {T.shape}")
    err = float(np.max(np.abs(T.T @ T - np.eye(n))))
    if err > ORTHO_TOL:
        raise ValueError(f"transform is not orthogonal: max |T'T - I| = {err:g}")
    var.setflags(write=False)
    T.setflags(write=False)
    return VectorModel(ModelKind.ROTATED_GAUSSIAN, n, variances=var, transform=T)


def comonotone(dist: DistributionSpec, x) -> VectorModel:
    """Coordinates x_i * xi with a single scalar draw xi shared by all of them."""
    seq = tail_sums(x)
    return VectorModel(ModelKind.COMONOTONE, seq.n, dists=(dist,), x=seq.x)


def _sample_batch(model: VectorModel, rng: np.random.Generator, size: int) -> np.ndarray:
    if model.kind is ModelKind.INDEPENDENT_SCALED:
        out = np.empty((size, model.n))
        for i, d in enumerate(model.dists):
            out[:, i] = d.sample(rng, size) * model.x[i]
        return out
    if model.kind is ModelKind.GAUSSIAN_DIAGONAL:
        return rng.standard_normal((size, model.n)) * np.sqrt(model.variances)
    if model.kind is ModelKind.ROTATED_GAUSSIAN:
        base = rng.standard_normal((size, model.n)) * np.sqrt(model.variances)
        return base @ model.transform.T
    # comonotone: one scalar draw per sample
    xi = model.dists[0].sample(rng, size)
    return np.outer(xi, model.x)


def sample_vector(model: VectorModel, rng: np.random.Generator) -> np.ndarray:
    """One draw from the model as a 1-D array."""
    return _sample_batch(model, rng, 1)[0]


class Statistic(enum.Enum):
    KMIN = "k-min"
    SUM_KMIN = "sum-k-min"


def _chunk_statistic(model, statistic, k, p, rng, size) -> np.ndarray:
    batch = _sample_batch(model, rng, size)
    if statistic is Statistic.KMIN:
        return np.partition(np.abs(batch), k - 1, axis=1)[:, k - 1]
    w = abs_pow(batch, p)
    part = np.partition(w, k - 1, axis=1)[:, :k]
    return np.sort(part, axis=1).sum(axis=1)


def _collect(model, statistic, k, p, samples, seed, stream, threads) -> np.ndarray:
    if not 1 <= k <= model.n:
        raise ValueError(f"k={k} out of range 1..{model.n}")
    if samples < 1:
        raise ValueError("samples must be positive")
    sizes = [CHUNK_SIZE] * (samples // CHUNK_SIZE)
    if samples % CHUNK_SIZE:
        sizes.append(samples % CHUNK_SIZE)

    def run(args):
        chunk_index, size = args
        rng = generator(seed, stream, chunk_index)
        return _chunk_statistic(model, statistic, k, p, rng, size)

    jobs = list(enumerate(sizes))
    if threads is not None and threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    return np.concatenate(parts)


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean/median with uncertainty, tagged by (samples, seed)."""

    mean: float
    stderr: float
    median: float
    median_ci: tuple[float, float]
    samples: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "median": self.median,
            "median_ci": list(self.median_ci),
            "samples": self.samples,
            "seed": self.seed,
        }

    CSV_HEADER = ("mean", "stderr", "median", "median_lo", "median_hi", "samples", "seed")

    def to_csv_row(self) -> list[str]:
        fmt = lambda v: format(float(v), ".17g")
        return [fmt(self.mean), fmt(self.stderr), fmt(self.median),
                fmt(self.median_ci[0]), fmt(self.median_ci[1]),
                str(self.samples), str(self.seed)]


def _median_ci_indices(n: int, level: float = 0.99) -> tuple[int, int]:
    """1-based order-statistic indices (r, s) with P(v_(r) <= Med <= v_(s)) >= level."""
    tail = (1.0 - level) / 2.0
    r = int(_scipy_stats.binom.ppf(tail, n, 0.5))
    while r > 0 and _scipy_stats.binom.cdf(r - 1, n, 0.5) > tail:
        r -= 1
    r = max(r, 1)
    s = min(n + 1 - r, n)
    return r, s


def _estimate_from_values(values: np.ndarray, seed: int) -> McEstimate:
    n = values.size
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    svals = np.sort(values)
    median = float(np.median(svals))
    r, s = _median_ci_indices(n)
    return McEstimate(mean, stderr, median, (float(svals[r - 1]), float(svals[s - 1])),
                      n, seed)


def estimate_sum_kmin(model: VectorModel, k: int, p: float, samples: int, seed: int,
                      stream: int = 0, threads: int | None = None) -> McEstimate:
    """Estimate E sum_{j<=k} (j-th smallest of |coordinate|^p)."""
    if samples < 1000:
        raise ValueError("use at least 10^3 samples")
    values = _collect(model, Statistic.SUM_KMIN, k, p, samples, seed, stream, threads)
    return _estimate_from_values(values, seed)


def estimate_kth_min(model: VectorModel, k: int, samples: int, seed: int,
                     stream: int = 0, threads: int | None = None) -> McEstimate:
    """Estimate the law of the k-th smallest |coordinate| (mean and median)."""
    if samples < 1000:
        raise ValueError("use at least 10^3 samples")
    values = _collect(model, Statistic.KMIN, k, 1.0, samples, seed, stream, threads)
    return _estimate_from_values(values, seed)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Empirical P(statistic <= t) on a grid, with binomial standard errors."""

    grid: np.ndarray
    probs: np.ndarray
    stderr: np.ndarray
    samples: int
    seed: int

    def __call__(self, t: float) -> float:
        """Step-function evaluation of the empirical cdf."""
        i = int(np.searchsorted(self.grid, t, side="right")) - 1
        return float(self.probs[i]) if i >= 0 else 0.0


def empirical_cdf(model: VectorModel, statistic: Statistic | str, k: int, grid,
                  samples: int, seed: int, p: float = 1.0, stream: int = 0,
                  threads: int | None = None) -> EmpiricalCdf:
    """Empirical cdf of the k-min or sum-k-min statistic on the given grid."""
    statistic = Statistic(statistic)
    grid = np.sort(np.asarray(grid, dtype=np.float64))
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    values = _collect(model, statistic, k, p, samples, seed, stream, threads)
    probs = np.searchsorted(np.sort(values), grid, side="right") / values.size
    stderr = np.sqrt(probs * (1.0 - probs) / values.size)
    return EmpiricalCdf(grid, probs, stderr, values.size, seed)


@dataclass(frozen=True)
class SandwichVerdict:
    """Outcome of checking an MC mean against a deterministic bound report."""

    passed: bool
    estimate: McEstimate
    lower: float
    upper: float
    lower_ok: bool
    upper_ok: bool


def check_sandwich(model: VectorModel, report: BoundReport, k: int, p: float,
                   samples: int, seed: int, stream: int = 0,
                   threads: int | None = None) -> SandwichVerdict:
    """Pass iff lower <= mean + 3 SE and mean - 3 SE <= upper (tiny relative slack)."""
    if report.upper < report.lower:
        raise ValueError("bound report has upper < lower")
    if not report.assertable:
        raise ValueError(f"report {report.name!r} is not assertable")
    est = estimate_sum_kmin(model, k, p, samples, seed, stream, threads)
    lower_ok = report.lower * (1.0 - 1e-9) <= est.mean + 3.0 * est.stderr
    upper_ok = est.mean - 3.0 * est.stderr <= report.upper * (1.0 + 1e-9)
    return SandwichVerdict(lower_ok and upper_ok, est, report.lower, report.upper,
                           lower_ok, upper_ok)
