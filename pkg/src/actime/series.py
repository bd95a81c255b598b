"""Time-series container, moment statistics and the sample ACF."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import BadLength, DegenerateSeries

# Below this length the ACF is summed directly; above it an FFT is used.
FFT_THRESHOLD = 1024


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A finite, immutable, real-valued scalar sequence.

    ``meta`` holds provenance such as the generator kind, RNG algorithm and
    sampler acceptance rate.
    """

    values: np.ndarray
    label: str | None = None
    seed: int | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < 1:
            raise BadLength("a series needs at least one value")
        if not np.all(np.isfinite(values)):
            raise ValueError("series contains NaN or infinite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    def with_values(self, values, label: str | None = None) -> TimeSeries:
        return TimeSeries(
            values,
            label=self.label if label is None else label,
            seed=self.seed,
            meta=dict(self.meta),
        )


def as_series(x) -> TimeSeries:
    if isinstance(x, TimeSeries):
        return x
    return TimeSeries(x)


class Method(str, enum.Enum):
    BATCH_MEANS = "batch-means"
    SPECTRUM_FIT = "spectrum-fit"
    IPS = "ips"
    IMS = "ims"
    ICS = "ics"
    AR = "ar"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TauEstimate:
    """Point estimate of the autocorrelation time, in chain steps."""

    tau: float
    method: Method
    n_used: int
    detail: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise ValueError(f"tau must be positive and finite, got {self.tau}")


@dataclass(frozen=True, eq=False)
class AcfVector:
    """Sample autocorrelations at lags ``0..len(rho)-1``."""

    rho: np.ndarray
    n: int
    s2: float

    @property
    def max_lag(self) -> int:
        return self.rho.size - 1


def mean(series) -> float:
    return float(np.mean(as_series(series).values))


def variance(series) -> float:
    """Variance with the 1/n normalizer."""
    x = as_series(series).values
    if x.size < 2:
        raise DegenerateSeries("variance needs at least two values")
    if x.min() == x.max():
        return 0.0
    xc = x - x.mean()
    return float(np.dot(xc, xc) / x.size)


def _autocov_direct(xc: np.ndarray, max_lag: int) -> np.ndarray:
    n = xc.size
    return np.array([np.dot(xc[: n - k], xc[k:]) for k in range(max_lag + 1)]) / n


def _autocov_fft(xc: np.ndarray, max_lag: int) -> np.ndarray:
    n = xc.size
    # zero-pad to avoid circular wrap-around
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conjugate(f), nfft)[: max_lag + 1]
    return acov / n


def sample_acf(series, max_lag: int, method: str = "auto") -> AcfVector:
    """Sample autocorrelation function up to ``max_lag``.

    Uses the biased 1/n autocovariance, so ``rho[0] == 1`` and the implied
    Toeplitz matrix is positive semi-definite.

    Parameters
    ----------
    series : TimeSeries or array_like
    max_lag : int
        Largest lag, ``0 <= max_lag <= n - 1``.
    method : {"auto", "direct", "fft"}
        ``auto`` sums directly for short series and uses the FFT otherwise.
    """
    x = as_series(series).values
    n = x.size
    if n < 2:
        raise DegenerateSeries("ACF needs at least two values")
    if not 0 <= max_lag <= n - 1:
        raise BadLength(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    xc = x - x.mean()
    s2 = float(np.dot(xc, xc) / n)
    if s2 <= 0.0 or x.min() == x.max():
        raise DegenerateSeries("series has zero variance")
    if method == "auto":
        method = "fft" if n > FFT_THRESHOLD else "direct"
    if method == "direct":
        acov = _autocov_direct(xc, max_lag)
    elif method == "fft":
        acov = _autocov_fft(xc, max_lag)
    else:
        raise ValueError(f"unknown ACF method {method!r}")
    rho = acov / s2
    rho[0] = 1.0
    return AcfVector(rho=rho, n=n, s2=s2)


def prefix(series: TimeSeries, length: int) -> TimeSeries:
    series = as_series(series)
    if not 1 <= length <= series.n:
        raise BadLength(f"prefix length must lie in [1, {series.n}], got {length}")
    return TimeSeries(
        series.values[:length], label=series.label, seed=series.seed,
        meta=dict(series.meta),
    )


def require_variance(series: TimeSeries) -> float:
    s2 = variance(series)
    if s2 <= 0.0:
        raise DegenerateSeries("series has zero variance")
    return s2


# -- file formats -----------------------------------------------------------

def read_series(path, label: str | None = None) -> TimeSeries:
    """Read a one-column text file or an ``index,value`` CSV."""
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    if lines and lines[0].replace(" ", "").lower() == "index,value":
        values = [float(ln.split(",")[1]) for ln in lines[1:]]
    else:
        values = [float(ln) for ln in lines]
    return TimeSeries(values, label=label or path.stem)


def write_series(series, path) -> None:
    np.savetxt(path, as_series(series).values, fmt="%.17g")


def write_series_csv(series, path) -> None:
    with open(path, "w") as fh:
        fh.write("index,value\n")
        for i, v in enumerate(as_series(series).values):
            fh.write(f"{i},{float(v)!r}\n")
