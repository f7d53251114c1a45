"""Karhunen-Loeve basis and linear vs nonlinear m-term approximation errors.

For a centered random vector X in R^n with coordinate second moments v_i, the
linear m-term error keeps the m largest-variance coordinates,

    E0(X, m) = sum of the n-m smallest v_i,

while the nonlinear error keeps each sample's m largest coordinates,

    E(X, m)  = E sum_{j<=n-m} (j-th smallest of X_i^2),

so E(X, m) <= E0(X, m) always.  A reverse inequality u * E0(X, 2m) <= E(X, m)
holds for m < n/2 whenever every coordinate satisfies the median-mass condition

    u * E X_i^2 <= integral_0^inf max(P(X_i^2 >= tau) - 1/2, 0) dtau,

whose best constant is computed here by quadrature (>= 1/20 for Gaussian
coordinates, >= 1/48 for exponential-type ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import mc
from .dist import DistributionSpec, half_normal


@dataclass(frozen=True)
class CovarianceModel:
    """Symmetric positive-semidefinite covariance matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        M = self.matrix
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise ValueError("covariance must be square and nonempty")
        asym = float(np.max(np.abs(M - M.T)))
        if asym > 1e-10 * max(1.0, float(np.max(np.abs(M)))):
            raise ValueError(f"covariance is not symmetric: max |M - M'| = {asym:g}")
        trace = float(np.trace(M))
        lo = float(np.min(np.linalg.eigvalsh(0.5 * (M + M.T))))
        if lo < -1e-10 * max(trace, 1.0):
            raise ValueError(f"covariance has negative eigenvalue {lo:g}")
        M.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KlBasis:
    """Orthonormal eigenbasis (columns) with non-increasing eigenvalues."""

    vectors: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        V, w = self.vectors, self.eigenvalues
        n = V.shape[0]
        if V.shape != (n, n) or w.shape != (n,):
            raise ValueError("basis shape mismatch")
        if np.any(np.diff(w) > 1e-12 * max(1.0, abs(float(w[0])))):
            raise ValueError("eigenvalues must be non-increasing")
        ortho = float(np.max(np.abs(V.T @ V - np.eye(n))))
        if ortho > 1e-9:
            raise ValueError(f"basis not orthonormal: {ortho:g}")
        V.setflags(write=False)
        w.setflags(write=False)


def kl_basis(cov: CovarianceModel | np.ndarray) -> KlBasis:
    """Eigendecomposition sorted by non-increasing eigenvalue.

    Sign convention: the largest-magnitude entry of each eigenvector is made
    positive (first occurrence on ties), so the output is deterministic.
    """
    if not isinstance(cov, CovarianceModel):
        cov = CovarianceModel(np.array(cov, dtype=np.float64))
    M = 0.5 * (cov.matrix + cov.matrix.T)
    w, V = np.linalg.eigh(M)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    for i in range(V.shape[1]):
        col = V[:, i]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            V[:, i] = -col
    trace = float(np.trace(M))
    recon = float(np.max(np.abs((V * w) @ V.T - M)))
    if recon > 1e-8 * max(trace, 1.0):
        raise ValueError(f"eigendecomposition reconstruction error {recon:g}")
    return KlBasis(np.array(V), np.array(w))


def linear_error(variances_in_basis, m: int) -> float:
    """E0(X, m): exact sum of the n-m smallest coordinate variances."""
    v = np.asarray(variances_in_basis, dtype=np.float64)
    n = v.size
    if not 0 <= m < n:
        raise ValueError(f"m={m} out of range 0..{n - 1}")
    return math.fsum(np.sort(v)[: n - m])


def nonlinear_error(model: mc.VectorModel, m: int, samples: int, seed: int,
                    stream: int = 0, threads: int | None = None) -> mc.McEstimate:
    """E(X, m): Monte Carlo estimate of the sum of the n-m smallest squared coordinates."""
    n = model.n
    if not 0 <= m < n:
        raise ValueError(f"m={m} out of range 0..{n - 1}")
    return mc.estimate_sum_kmin(model, n - m, 2.0, samples, seed, stream, threads)


def wrd_constant(dist: DistributionSpec) -> float:
    """Best u with u E X^2 <= integral_0^inf max(P(X^2 >= tau) - 1/2, 0) dtau.

    ``dist`` is the law of |X|.  The integrand vanishes beyond the median M of
    X^2, and substituting tau = s^2 gives

        u = (2 int_0^sqrt(M) s P(|X| > s) ds - M/2) / E X^2,

    evaluated by adaptive quadrature to relative 1e-8.  Invariant under scaling
    of X; returns +inf for a degenerate (zero) coordinate.
    """
    ex2 = dist.second_moment()
    if ex2 == 0.0:
        return math.inf
    root_m = float(dist.quantile(0.5))
    integral, _ = integrate.quad(lambda s: 2.0 * s * dist.sf(s), 0.0, root_m,
                                 epsrel=1e-8, epsabs=0.0, limit=200)
    return (integral - 0.5 * root_m ** 2) / ex2


def second_moments(model: mc.VectorModel) -> np.ndarray:
    """Coordinate second moments E X_i^2 of a sampling model."""
    if model.kind is mc.ModelKind.GAUSSIAN_DIAGONAL:
        return np.asarray(model.variances, dtype=np.float64)
    if model.kind is mc.ModelKind.ROTATED_GAUSSIAN:
        T = model.transform
        return (T * T) @ model.variances
    if model.kind is mc.ModelKind.INDEPENDENT_SCALED:
        return np.array([xi ** 2 * d.second_moment()
                         for xi, d in zip(model.x, model.dists)])
    return model.x ** 2 * model.dists[0].second_moment()


def model_wrd_constant(model: mc.VectorModel) -> float:
    """min over coordinates of the median-mass constant (scale invariance makes
    Gaussian models a single quadrature of the standard half-normal)."""
    if model.kind in (mc.ModelKind.GAUSSIAN_DIAGONAL, mc.ModelKind.ROTATED_GAUSSIAN):
        return wrd_constant(half_normal())
    return min(wrd_constant(d) for d in set(model.dists))


@dataclass(frozen=True)
class LastpropVerdict:
    passed: bool
    u: float
    linear_2m: float
    estimate: mc.McEstimate


def check_lastprop(model: mc.VectorModel, m: int, samples: int, seed: int,
                   u: float | None = None, stream: int = 0,
                   threads: int | None = None) -> LastpropVerdict:
    """Check u * E0(X, 2m) <= E(X, m) + 3 SE for m < n/2.

    ``u`` defaults to the model's computed median-mass constant.
    """
    n = model.n
    if not 0 <= m < n / 2:
        raise ValueError(f"m={m} must satisfy m < n/2 = {n / 2}")
    if u is None:
        u = model_wrd_constant(model)
    e0 = linear_error(second_moments(model), 2 * m)
    est = nonlinear_error(model, m, samples, seed, stream, threads)
    passed = u * e0 <= est.mean + 3.0 * est.stderr
    return LastpropVerdict(passed, u, e0, est)
