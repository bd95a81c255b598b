"""Batch-means estimator of the autocorrelation time."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeries, FailedEstimate, TooShort
from .series import Method, TauEstimate, as_series


@dataclass(frozen=True)
class BatchPlan:
    batch_size: int
    num_batches: int
    tail_policy: str = "drop-tail"

    def check(self, n: int) -> None:
        if self.batch_size < 1:
            raise TooShort(f"batch size must be positive, got {self.batch_size}")
        if self.num_batches < 2:
            raise TooShort(f"need at least 2 batches, got {self.num_batches}")
        if self.batch_size * self.num_batches > n:
            raise TooShort(
                f"{self.num_batches} batches of {self.batch_size} exceed n={n}"
            )


def _icbrt_sq(n: int) -> int:
    """Largest integer m with m**3 <= n**2, i.e. floor(n ** (2/3)) exactly."""
    target = n * n
    m = int(round(n ** (2.0 / 3.0)))
    while m ** 3 > target:
        m -= 1
    while (m + 1) ** 3 <= target:
        m += 1
    return m


def default_plan(n: int) -> BatchPlan:
    """Batches of size floor(n^(2/3)); the count follows from the size."""
    if n < 8:
        raise TooShort(f"batch means needs n >= 8, got {n}")
    m = _icbrt_sq(n)
    plan = BatchPlan(batch_size=m, num_batches=n // m)
    if plan.num_batches < 2:
        raise TooShort(f"n={n} gives fewer than 2 batches")
    return plan


def plan_for_batch_size(n: int, batch_size: int) -> BatchPlan:
    if batch_size < 1:
        raise TooShort(f"batch size must be positive, got {batch_size}")
    plan = BatchPlan(batch_size=batch_size, num_batches=n // batch_size)
    plan.check(n)
    return plan


def _var(v: np.ndarray) -> float:
    vc = v - v.mean()
    return float(np.dot(vc, vc) / v.size)


def batch_means_tau(series, plan: BatchPlan | None = None) -> TauEstimate:
    """Estimate tau as ``m * s_m^2 / s^2``.

    Elements past the last full batch are dropped before both variances are
    computed, so numerator and denominator see the same data.
    """
    series = as_series(series)
    n = series.n
    if n < 2 or series.values.min() == series.values.max():
        raise DegenerateSeries("series has zero variance")
    if plan is None:
        plan = default_plan(n)
    plan.check(n)
    m, b = plan.batch_size, plan.num_batches
    x = series.values[: m * b]
    s2 = _var(x)
    if not s2 > 0:
        raise DegenerateSeries("truncated series has zero variance")
    # with m == 1 the batch means are x itself, so tau is exactly 1
    sm2 = _var(x.reshape(b, m).mean(axis=1))
    if not sm2 > 0:
        raise FailedEstimate("all batch means are equal")
    tau = float(m * sm2 / s2)
    return TauEstimate(
        tau=tau,
        method=Method.BATCH_MEANS,
        n_used=n,
        detail={"batch_size": m, "num_batches": b, "dropped": n - m * b},
    )
