"""Initial positive, monotone and convex sequence estimators.

All three sum the paired autocorrelations ``rho[2m] + rho[2m+1]`` up to the
last positive pair; IMS and ICS first smooth the retained pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeries, TooShort
from .series import AcfVector, Method, TauEstimate, as_series, sample_acf

# Floor for estimates that would otherwise be nonpositive (antithetic chains).
TAU_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class GammaSequence:
    gamma: np.ndarray
    truncation_m: int  # -1 when the very first pair is nonpositive

    @property
    def retained(self) -> np.ndarray:
        return self.gamma[: self.truncation_m + 1]


def gamma_pairs(acf: AcfVector | np.ndarray) -> GammaSequence:
    rho = acf.rho if isinstance(acf, AcfVector) else np.asarray(acf, dtype=float)
    if rho.size < 2:
        raise ValueError("need autocorrelations at lags 0 and 1 at least")
    npairs = rho.size // 2  # an unpaired final lag is ignored
    gamma = rho[0 : 2 * npairs : 2] + rho[1 : 2 * npairs : 2]
    nonpos = np.flatnonzero(gamma <= 0)
    trunc = int(nonpos[0]) - 1 if nonpos.size else npairs - 1
    return GammaSequence(gamma=gamma, truncation_m=trunc)


def greatest_convex_minorant(values) -> np.ndarray:
    """Lower convex hull of the points ``(i, values[i])``, evaluated at each i."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("empty sequence")
    hull: list[int] = []
    for i in range(v.size):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or above the chord from a to i
            if (v[b] - v[a]) * (i - a) >= (v[i] - v[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    out = np.interp(np.arange(v.size), hull, v[hull])
    return np.minimum(out, v)


def smooth_gamma(retained: np.ndarray, kind: Method) -> np.ndarray:
    if retained.size == 0 or kind is Method.IPS:
        return retained.copy()
    monotone = np.minimum.accumulate(retained)
    if kind is Method.IMS:
        return monotone
    if kind is Method.ICS:
        # convexify the monotone sequence so that ICS <= IMS <= IPS
        return greatest_convex_minorant(monotone)
    raise ValueError(f"not an initial-sequence method: {kind}")


def series_gamma(series) -> GammaSequence:
    series = as_series(series)
    n = series.n
    if n < 2 or series.values.min() == series.values.max():
        raise DegenerateSeries("series has zero variance")
    if n < 4:
        raise TooShort(f"initial sequence estimators need n >= 4, got {n}")
    return gamma_pairs(sample_acf(series, n - 2))


def tau_from_gamma(g: GammaSequence, kind: Method) -> tuple[float, bool]:
    """``2 * sum(smoothed pairs) - 1``, floored at ``TAU_FLOOR``.

    Returns the estimate and whether the floor was applied.
    """
    tau = 2.0 * float(np.sum(smooth_gamma(g.retained, kind))) - 1.0
    if tau < TAU_FLOOR:
        return TAU_FLOOR, True
    return tau, False


def _initial_sequence_tau(series, kind: Method) -> TauEstimate:
    series = as_series(series)
    g = series_gamma(series)
    tau, clamped = tau_from_gamma(g, kind)
    return TauEstimate(
        tau=tau,
        method=kind,
        n_used=series.n,
        detail={
            "truncation_m": g.truncation_m,
            "truncation_lag": 2 * g.truncation_m + 1,
            "clamped": clamped,
        },
    )


def ips_tau(series) -> TauEstimate:
    return _initial_sequence_tau(series, Method.IPS)


def ims_tau(series) -> TauEstimate:
    return _initial_sequence_tau(series, Method.IMS)


def ics_tau(series) -> TauEstimate:
    return _initial_sequence_tau(series, Method.ICS)


def gamma_table(series, kind: Method = Method.ICS) -> list[tuple[int, float, float]]:
    """Rows ``(m, gamma_raw, gamma_smoothed)`` over the retained pairs."""
    g = series_gamma(series)
    sm = smooth_gamma(g.retained, kind)
    return [(m, float(g.gamma[m]), float(sm[m])) for m in range(sm.size)]
