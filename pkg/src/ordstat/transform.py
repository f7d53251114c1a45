"""Orthogonal transforms, variance propagation, and majorization checks.

An orthogonal T maps a diagonal-covariance Gaussian vector with variances a to
one with coordinate variances b_i = sum_j T_ij^2 a_j.  Because (T_ij^2) is
doubly stochastic, the non-increasing rearrangement of a majorizes that of b:
prefix sums dominate and totals agree.  This module samples Haar-distributed
orthogonal matrices, propagates variances, verifies majorization, and runs the
diagonal-vs-rotated comparison experiment for sums of the k smallest squared
coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mc

ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class OrthogonalMatrix:
    """Validated orthogonal matrix; ``np.asarray`` works on instances."""

    entries: np.ndarray

    def __post_init__(self):
        T = self.entries
        if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
            raise ValueError("matrix must be square and nonempty")
        n = T.shape[0]
        err = float(np.max(np.abs(T.T @ T - np.eye(n))))
        if err > ORTHO_TOL:
            raise ValueError(f"not orthogonal: max |T'T - I| = {err:g}")
        row_err = float(np.max(np.abs(np.linalg.norm(T, axis=1) - 1.0)))
        col_err = float(np.max(np.abs(np.linalg.norm(T, axis=0) - 1.0)))
        if max(row_err, col_err) > ORTHO_TOL:
            raise ValueError("rows/columns are not unit-norm")
        T.setflags(write=False)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype) if dtype else np.asarray(self.entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def random_orthogonal(n: int, seed: int) -> OrthogonalMatrix:
    """Haar-distributed orthogonal matrix: QR of an iid Gaussian matrix with the
    diagonal of R normalized to be positive."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = mc.generator(seed, stream=0xA11, chunk=0)
    g = rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return OrthogonalMatrix(np.array(q * signs))


def propagate_variances(T, a) -> np.ndarray:
    """b_i = sum_j T_ij^2 a_j, returned sorted non-increasing."""
    T = np.asarray(T, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or T.shape != (a.size, a.size):
        raise ValueError("dimension mismatch between transform and variances")
    if np.any(a < 0):
        raise ValueError("variances must be nonnegative")
    b = (T * T) @ a
    return np.sort(b)[::-1]


@dataclass(frozen=True)
class VariancePair:
    """Source and propagated variances, both sorted non-increasing.

    Construction asserts the majorization invariants: equal totals to relative
    1e-9 and prefix dominance to 1e-9 * sum(a).
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        rep = majorization_check(self.a, self.b, tol=1e-9)
        if not rep.passed:
            raise ValueError(f"variance pair violates majorization: {rep}")


@dataclass(frozen=True)
class MajorizationReport:
    passed: bool
    worst_prefix_margin: float
    total_gap: float


def majorization_check(a_sorted, b_sorted, tol: float = 1e-9) -> MajorizationReport:
    """Verify prefix dominance sum_{i<=l} a >= sum_{i<=l} b and equal totals.

    Margins are compared against ``tol * sum(a)``; both inputs must be sorted
    non-increasing.
    """
    a = np.asarray(a_sorted, dtype=np.float64)
    b = np.asarray(b_sorted, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError("inputs must be 1-D of equal nonzero length")
    if np.any(np.diff(a) > 0) or np.any(np.diff(b) > 0):
        raise ValueError("inputs must be sorted non-increasing")
    margins = np.cumsum(a) - np.cumsum(b)
    scale = float(np.sum(a))
    slack = tol * max(scale, 1e-300)
    worst = float(np.min(margins[:-1])) if a.size > 1 else 0.0
    total_gap = float(margins[-1])
    passed = worst >= -slack and abs(total_gap) <= slack
    return MajorizationReport(passed, worst, total_gap)


@dataclass(frozen=True)
class MzResult:
    """Diagonal (lhs) vs rotated (rhs) estimates of E sum_{j<=k} j-min coord^2."""

    lhs: mc.McEstimate
    rhs: mc.McEstimate
    ratio: float
    ratio_stderr: float
    reliable: bool


def mz_ratio(variances, T, k: int, samples: int, seed: int,
             threads: int | None = None) -> MzResult:
    """Estimate both sides of the diagonal-vs-rotated comparison at p = 2.

    The two estimates use disjoint streams of the same seed, so they are
    independent; the ratio's standard error comes from the first-order delta
    method.  When the rhs mean is within 3 SE of zero the ratio is flagged
    unreliable.
    """
    var = np.asarray(variances, dtype=np.float64)
    n = var.size
    if not 1 <= k < n:
        raise ValueError(f"k={k} must satisfy 1 <= k < n={n}")
    lhs_model = mc.gaussian_diagonal(var)
    rhs_model = mc.rotated_gaussian(var, T)
    lhs = mc.estimate_sum_kmin(lhs_model, k, 2.0, samples, seed, stream=0, threads=threads)
    rhs = mc.estimate_sum_kmin(rhs_model, k, 2.0, samples, seed, stream=1, threads=threads)
    reliable = rhs.mean - 3.0 * rhs.stderr > 0.0
    if rhs.mean > 0.0:
        ratio = lhs.mean / rhs.mean
        ratio_stderr = math.hypot(lhs.stderr / rhs.mean,
                                  lhs.mean * rhs.stderr / rhs.mean ** 2)
    else:
        ratio = math.inf if lhs.mean > 0.0 else 0.0
        ratio_stderr = math.inf
        reliable = False
    return MzResult(lhs, rhs, ratio, ratio_stderr, reliable)


# -- dense text serialization --------------------------------------------------


def write_matrix(path, M) -> None:
    """Dense row-major text format: first line n, then n rows of n decimals."""
    M = np.asarray(M, dtype=np.float64)
    n = M.shape[0]
    with open(path, "w") as fh:
        fh.write(f"{n}\n")
        for row in M:
            fh.write(" ".join(format(v, ".17g") for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        n = int(fh.readline().strip())
        rows = [[float(tok) for tok in fh.readline().split()] for _ in range(n)]
    M = np.array(rows, dtype=np.float64)
    if M.shape != (n, n):
        raise ValueError(f"expected {n}x{n} matrix, got shape {M.shape}")
    return M
