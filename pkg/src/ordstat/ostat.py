"""Exact order-statistic kernels over 1-D samples.

A sample vector is any finite 1-D array of reals.  ``jth_min`` selects the
j-th smallest entry (1-based), ``sum_k_smallest`` sums the k smallest values of
|v_i|^p, and ``sum_partition_min`` evaluates the partition relaxation

    sum_{j<=k} (j-th smallest of w)  <=  sum_j min_{i in A_j} w_i

for any partition (A_j) of the index range into consecutive blocks.

Selection uses introselect (expected linear time); the selected values are then
sorted ascending and summed, so the result is bit-identical to summing the
prefix of a full sort.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("sample vector must be 1-D and nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample vector entries must be finite")
    return arr


def abs_pow(values: np.ndarray, p: float) -> np.ndarray:
    """|values|^p elementwise, with integer p in {1,2,3,4} specialized."""
    if p <= 0:
        raise ValueError("power p must be positive")
    w = np.abs(values)
    if p == 1:
        return w
    if p == 2:
        return w * w
    if p == 3:
        return w * w * w
    if p == 4:
        w2 = w * w
        return w2 * w2
    return w ** p


def jth_min(v, j: int) -> float:
    """The j-th smallest entry of v, 1 <= j <= n, without a full sort."""
    arr = _as_vector(v)
    if not 1 <= j <= arr.size:
        raise ValueError(f"order index j={j} out of range 1..{arr.size}")
    return float(np.partition(arr, j - 1)[j - 1])


def sum_k_smallest(v, k: int, p: float = 1.0) -> float:
    """Sum of the k smallest values of |v_i|^p."""
    arr = _as_vector(v)
    if not 1 <= k <= arr.size:
        raise ValueError(f"k={k} out of range 1..{arr.size}")
    w = abs_pow(arr, p)
    smallest = np.sort(np.partition(w, k - 1)[:k])
    return float(np.sum(smallest))


@dataclass(frozen=True)
class IntervalPartition:
    """Consecutive index blocks A_j = (n_{j-1}, n_j], 1-based, covering 1..n.

    ``boundaries`` is the sequence 0 = n_0 < n_1 < ... < n_k = n; ``pivot_m``
    marks the first block that may contain more than one index: A_j = {j} for
    every j < pivot_m.
    """

    boundaries: tuple[int, ...]
    pivot_m: int

    def __post_init__(self):
        b = self.boundaries
        if len(b) < 2 or b[0] != 0:
            raise ValueError("boundaries must start at 0 and define >= 1 block")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError("boundaries must be strictly increasing")
        if not 1 <= self.pivot_m <= self.k:
            raise ValueError("pivot_m out of range")
        if any(b[j] != j for j in range(self.pivot_m)):
            raise ValueError("blocks before pivot_m must be singletons {j}")

    @property
    def k(self) -> int:
        return len(self.boundaries) - 1

    @property
    def n(self) -> int:
        return self.boundaries[-1]

    def blocks(self):
        """Yield (start, stop) 0-based half-open index ranges."""
        b = self.boundaries
        for j in range(self.k):
            yield b[j], b[j + 1]


def sum_partition_min(v, part: IntervalPartition, p: float = 1.0) -> float:
    """sum_j min_{i in A_j} |v_i|^p; always >= sum_k_smallest(v, k, p)."""
    arr = _as_vector(v)
    if part.n != arr.size:
        raise ValueError(f"partition covers 1..{part.n} but vector has length {arr.size}")
    w = abs_pow(arr, p)
    starts = np.fromiter((s for s, _ in part.blocks()), dtype=np.intp)
    return float(np.sum(np.minimum.reduceat(w, starts)))
