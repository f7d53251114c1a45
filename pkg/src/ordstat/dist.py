"""Scalar distributions of nonnegative random variables and their regularity conditions.

Every distribution here is the law of a nonnegative scalar ``xi`` used as a
coordinate factor ``x_i * xi_i``.  Each kind carries the pair ``(alpha, beta)``
for which it satisfies the two regularity conditions

* small-ball:        P(xi <= t) <= alpha * t      for all t >= 0,
* exponential tail:  P(xi >  t) <= exp(-beta * t) for all t >= 0,

which can hold simultaneously only when alpha >= beta.  A third, optional
condition controls cdf decay near zero: F(t) >= 2 F(t/A) whenever F(t) <= delta,
for user-supplied delta in (0,1) and A > 1.  The conditions are verified
numerically on a log grid by the ``check_*`` functions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special


SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

# Default verification grid: log-spaced, dense enough that the margins'
# analytic monotonicity near 0 and infinity covers the gaps.
GRID_LO = 1e-6
GRID_HI = 50.0
GRID_SIZE = 10_000


def default_grid(size: int = GRID_SIZE, lo: float = GRID_LO, hi: float = GRID_HI) -> np.ndarray:
    return np.geomspace(lo, hi, size)


class Kind(enum.Enum):
    HALF_NORMAL = "half-normal"
    EXPONENTIAL = "exponential"
    UNIFORM01 = "uniform"
    GEN_EXPONENTIAL = "gen-exp"


@dataclass(frozen=True)
class DistributionSpec:
    """A scalar distribution plus its regularity parameters.

    ``param`` is the kind's single shape/scale parameter: sigma for
    half-normal, rate for exponential, q for gen-exponential, unused for
    uniform.  ``delta``/``decay_A`` are optional cdf-decay parameters; they are
    never canonical and must be validated via :func:`check_cdf_decay`.
    """

    kind: Kind
    param: float
    alpha: float
    beta: float
    delta: float | None = None
    decay_A: float | None = None

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")
        if self.alpha < self.beta:
            raise ValueError(
                f"alpha={self.alpha} < beta={self.beta}: the two conditions "
                "force alpha >= beta"
            )
        if self.delta is not None and not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.decay_A is not None and not (self.decay_A > 1.0):
            raise ValueError("decay_A must exceed 1")

    # -- analytic cdf / quantile / sampling ---------------------------------

    def cdf(self, t):
        """Exact cdf of the nonnegative variable, vectorized over ``t``."""
        t = np.asarray(t, dtype=np.float64)
        tp = np.maximum(t, 0.0)
        if self.kind is Kind.HALF_NORMAL:
            out = special.erf(tp / (self.param * math.sqrt(2.0)))
        elif self.kind is Kind.EXPONENTIAL:
            out = -np.expm1(-self.param * tp)
        elif self.kind is Kind.UNIFORM01:
            out = np.minimum(tp, 1.0)
        else:
            q = self.param
            out = special.gammainc(1.0 / q, tp ** q)
        return out if out.shape else float(out)

    def sf(self, t):
        """Survival function P(xi > t)."""
        t = np.asarray(t, dtype=np.float64)
        tp = np.maximum(t, 0.0)
        if self.kind is Kind.HALF_NORMAL:
            out = special.erfc(tp / (self.param * math.sqrt(2.0)))
        elif self.kind is Kind.EXPONENTIAL:
            out = np.exp(-self.param * tp)
        elif self.kind is Kind.UNIFORM01:
            out = 1.0 - np.minimum(tp, 1.0)
        else:
            q = self.param
            out = special.gammaincc(1.0 / q, tp ** q)
        return out if out.shape else float(out)

    def quantile(self, r):
        """Left-continuous generalized inverse inf{t : F(t) >= r}, r in [0, 1)."""
        r = np.asarray(r, dtype=np.float64)
        if np.any(r < 0.0) or np.any(r >= 1.0):
            raise ValueError("quantile order must lie in [0, 1)")
        if self.kind is Kind.HALF_NORMAL:
            out = self.param * math.sqrt(2.0) * special.erfinv(r)
        elif self.kind is Kind.EXPONENTIAL:
            out = -np.log1p(-r) / self.param
        elif self.kind is Kind.UNIFORM01:
            out = r.copy()
        else:
            q = self.param
            out = special.gammaincinv(1.0 / q, r) ** (1.0 / q)
        return out if out.shape else float(out)

    def sample(self, rng: np.random.Generator, size=None):
        """Draw from the distribution using numpy's exact samplers."""
        if self.kind is Kind.HALF_NORMAL:
            return self.param * np.abs(rng.standard_normal(size))
        if self.kind is Kind.EXPONENTIAL:
            return rng.standard_exponential(size) / self.param
        if self.kind is Kind.UNIFORM01:
            return rng.random(size)
        q = self.param
        return rng.standard_gamma(1.0 / q, size) ** (1.0 / q)

    def second_moment(self) -> float:
        """E xi^2 in closed form."""
        if self.kind is Kind.HALF_NORMAL:
            return self.param ** 2
        if self.kind is Kind.EXPONENTIAL:
            return 2.0 / self.param ** 2
        if self.kind is Kind.UNIFORM01:
            return 1.0 / 3.0
        q = self.param
        return math.gamma(3.0 / q) / (q * math.gamma(1.0 + 1.0 / q))

    @property
    def name(self) -> str:
        if self.kind is Kind.GEN_EXPONENTIAL:
            return f"gen-exp:{self.param:g}"
        if self.kind is Kind.HALF_NORMAL and self.param != 1.0:
            return f"half-normal(sigma={self.param:g})"
        if self.kind is Kind.EXPONENTIAL and self.param != 1.0:
            return f"exponential(rate={self.param:g})"
        return self.kind.value


# -- constructors ------------------------------------------------------------


def half_normal(sigma: float = 1.0, delta: float | None = None,
                decay_A: float | None = None) -> DistributionSpec:
    """|sigma * g| for standard Gaussian g; alpha = beta = sqrt(2/pi)/sigma."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    ab = SQRT_2_OVER_PI / sigma
    return DistributionSpec(Kind.HALF_NORMAL, sigma, ab, ab, delta, decay_A)


def exponential(rate: float = 1.0, delta: float | None = None,
                decay_A: float | None = None) -> DistributionSpec:
    """Exponential with the given rate; alpha = beta = rate."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    return DistributionSpec(Kind.EXPONENTIAL, rate, rate, rate, delta, decay_A)


def uniform01(delta: float | None = None, decay_A: float | None = None) -> DistributionSpec:
    """Uniform on [0, 1]; alpha = 1 exactly and beta = 1 (1 - t <= e^{-t})."""
    return DistributionSpec(Kind.UNIFORM01, 0.0, 1.0, 1.0, delta, decay_A)


def gen_exponential(q: float, delta: float | None = None,
                    decay_A: float | None = None) -> DistributionSpec:
    """Density c_q exp(-s^q) on s >= 0 with c_q = 1/Gamma(1+1/q); alpha = beta = c_q."""
    if not q >= 1.0:
        raise ValueError("q must be >= 1")
    c_q = 1.0 / math.gamma(1.0 + 1.0 / q)
    return DistributionSpec(Kind.GEN_EXPONENTIAL, q, c_q, c_q, delta, decay_A)


_FACTORIES = {
    Kind.HALF_NORMAL: half_normal,
    Kind.EXPONENTIAL: exponential,
    Kind.UNIFORM01: uniform01,
    Kind.GEN_EXPONENTIAL: gen_exponential,
}


def make_distribution(kind: Kind | str, **params) -> DistributionSpec:
    """Build a DistributionSpec by kind, attaching the canonical (alpha, beta)."""
    if isinstance(kind, str):
        try:
            kind = Kind(kind)
        except ValueError:
            raise ValueError(f"unknown distribution kind {kind!r}") from None
    return _FACTORIES[kind](**params)


def from_name(name: str) -> DistributionSpec:
    """Parse a CLI/config name: half-normal, exponential, uniform, gen-exp:q."""
    name = name.strip()
    if name.startswith("gen-exp:"):
        return gen_exponential(q=float(name.split(":", 1)[1]))
    if name == "half-normal":
        return half_normal()
    if name == "exponential":
        return exponential()
    if name == "uniform":
        return uniform01()
    raise ValueError(f"unknown distribution name {name!r}")


# -- condition checkers ------------------------------------------------------


@dataclass(frozen=True)
class ConditionReport:
    """Worst-case margin of a condition over a finite grid; passed <=> margin >= 0."""

    passed: bool
    worst_t: float
    worst_margin: float
    grid_size: int


def _report(grid: np.ndarray, lhs: np.ndarray, rhs: np.ndarray) -> ConditionReport:
    """Margin lhs - rhs per grid point; |differences| below a few ulps of the
    operand scale are indistinguishable from zero at double precision and are
    snapped to it, so condition-attaining equality cases still pass."""
    margins = lhs - rhs
    noise = 32.0 * np.finfo(np.float64).eps * (np.abs(lhs) + np.abs(rhs))
    margins = np.where(np.abs(margins) <= noise, 0.0, margins)
    i = int(np.argmin(margins))
    worst = float(margins[i])
    return ConditionReport(worst >= 0.0, float(grid[i]), worst, int(grid.size))


def check_alpha_condition(dist: DistributionSpec, alpha: float,
                          grid: np.ndarray | None = None) -> ConditionReport:
    """Margin alpha*t - F(t), minimized over the grid."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("condition grid must be nonempty")
    return _report(grid, alpha * grid, np.asarray(dist.cdf(grid)))


def check_beta_condition(dist: DistributionSpec, beta: float,
                         grid: np.ndarray | None = None) -> ConditionReport:
    """Margin exp(-beta*t) - P(xi > t), minimized over the grid."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("condition grid must be nonempty")
    return _report(grid, np.exp(-beta * grid), np.asarray(dist.sf(grid)))


def check_cdf_decay(dist: DistributionSpec, delta: float, A: float,
                    grid: np.ndarray | None = None) -> ConditionReport:
    """Margin F(t) - 2 F(t/A) over grid points where F(t) <= delta."""
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    if not A > 1.0:
        raise ValueError("A must exceed 1")
    grid = default_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    cdf = np.asarray(dist.cdf(grid))
    mask = cdf <= delta
    if not np.any(mask):
        raise ValueError("no grid point satisfies F(t) <= delta; refine the grid")
    sub = grid[mask]
    return _report(sub, cdf[mask], 2.0 * np.asarray(dist.cdf(sub / A)))
