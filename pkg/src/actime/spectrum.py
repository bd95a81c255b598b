"""Autocorrelation time from a regression on the low-frequency log periodogram."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeries, FailedEstimate, TooShort
from .series import Method, TauEstimate, as_series, require_variance

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True, eq=False)
class Periodogram:
    """Raw periodogram at Fourier frequencies ``j/n``, ``j = 1..(n-1)//2``."""

    freqs: np.ndarray
    power: np.ndarray
    n: int
    nyquist_power: float = 0.0  # only nonzero for even n; kept for Parseval


@dataclass(frozen=True, eq=False)
class SpectrumFitResult:
    i0_hat: float
    order: int
    n_points: int
    coeffs: np.ndarray


def periodogram(series) -> Periodogram:
    """``I(f_j) = |sum_t (x_t - mean) exp(-2 pi i f_j t)|^2 / n``.

    With this scaling ``I`` estimates the spectral density normalized so
    that white noise of variance s2 has flat spectrum s2, and
    ``sum_j 2 I(f_j) / n + nyquist_power / n == s2``.
    """
    series = as_series(series)
    n = series.n
    if n < 8:
        raise TooShort(f"periodogram needs n >= 8, got {n}")
    require_variance(series)
    x = series.values
    xc = x - x.mean()
    dft = np.fft.rfft(xc)
    full = (dft.real ** 2 + dft.imag ** 2) / n
    nfreq = (n - 1) // 2
    j = np.arange(1, nfreq + 1)
    nyq = float(full[n // 2]) if n % 2 == 0 else 0.0
    return Periodogram(freqs=j / n, power=full[1 : nfreq + 1], n=n, nyquist_power=nyq)


def regression_points(n: int, order: int) -> int:
    return max(order + 2, math.isqrt(n))


def fit_log_spectrum(pgram: Periodogram, order: int = 1) -> SpectrumFitResult:
    """OLS fit of ``log I + gamma`` on a polynomial in frequency.

    Only the lowest ``max(order + 2, floor(sqrt(n)))`` frequencies are used,
    and that window may cover at most half of the available frequencies;
    otherwise the fit would no longer describe the low end of the spectrum
    and ``FailedEstimate`` is raised.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    k = regression_points(pgram.n, order)
    available = pgram.freqs.size
    if k > available // 2:
        raise FailedEstimate(
            f"n={pgram.n}: {k} regression frequencies needed, "
            f"only {available // 2} low frequencies available"
        )
    f = pgram.freqs[:k]
    power = pgram.power[:k]
    if np.any(power <= 0):
        raise FailedEstimate("zero periodogram ordinate in regression window")
    # log of an exponential variate has mean log(mean) - gamma
    y = np.log(power) + EULER_GAMMA
    design = np.vander(f, order + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    i0 = math.exp(coeffs[0])
    if not (i0 > 0 and math.isfinite(i0)):
        raise FailedEstimate("spectrum at zero is not finite")
    return SpectrumFitResult(i0_hat=i0, order=order, n_points=k, coeffs=coeffs)


def spectrum_fit_tau(series, order: int = 1) -> TauEstimate:
    series = as_series(series)
    if series.n < 2:
        raise DegenerateSeries("series too short for a variance")
    s2 = require_variance(series)
    n = series.n
    if regression_points(n, order) > ((n - 1) // 2) // 2:
        raise FailedEstimate(f"n={n} is too short for an order-{order} spectrum fit")
    fit = fit_log_spectrum(periodogram(series), order)
    return TauEstimate(
        tau=fit.i0_hat / s2,
        method=Method.SPECTRUM_FIT,
        n_used=n,
        detail={"order": order, "n_points": fit.n_points, "i0_hat": fit.i0_hat},
    )
