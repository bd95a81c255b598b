"""AR(p) fitting by Yule-Walker, AIC order selection and the AR estimate of tau."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from .errors import (
    DegenerateSeries,
    NearUnitRoot,
    SingularSystem,
    TooManyRejections,
    TooShort,
    Unstable,
)
from .series import AcfVector, Method, TauEstimate, as_series, sample_acf

MAX_CONDITION = 1e12
UNIT_ROOT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class ArFit:
    order: int
    pi: np.ndarray
    sigma_a2: float
    coeff_cov: np.ndarray
    mu: float
    s2: float
    rho: np.ndarray  # sample autocorrelations at lags 0..order
    n: int


@dataclass(frozen=True)
class TauInterval:
    estimate: TauEstimate
    lower: float
    upper: float
    level: float
    n_draws: int
    n_rejected: int = 0
    order: int = 0
    detail: dict = field(default_factory=dict)


def default_max_order(n: int) -> int:
    return max(0, min(n - 2, math.ceil(10 * math.log10(n))))


def levinson_durbin(rho: np.ndarray, max_order: int):
    """Solve the Yule-Walker equations for every order up to ``max_order``.

    Returns ``(coeffs, ratios)`` where ``coeffs[p]`` are the AR(p)
    coefficients and ``ratios[p] = sigma_a^2(p) / s^2``.  The recursion
    stops early once the prediction error collapses, since higher orders
    are then numerically singular.
    """
    coeffs = [np.zeros(0)]
    ratios = [1.0]
    phi = np.zeros(0)
    v = 1.0
    for k in range(1, max_order + 1):
        kappa = (rho[k] - np.dot(phi, rho[k - 1 : 0 : -1])) / v
        phi = np.append(phi - kappa * phi[::-1], kappa)
        v = v * (1.0 - kappa * kappa)
        if not v > 1e-14:
            break
        coeffs.append(phi)
        ratios.append(v)
    return coeffs, np.array(ratios)


def _check_series(series):
    series = as_series(series)
    if series.n < 2 or series.values.min() == series.values.max():
        raise DegenerateSeries("series has zero variance")
    return series


def _fit_from_acf(acf: AcfVector, p: int, mu: float) -> ArFit:
    rho = acf.rho[: p + 1]
    if p == 0:
        return ArFit(0, np.zeros(0), acf.s2, np.zeros((0, 0)), mu, acf.s2, rho, acf.n)
    R = toeplitz(rho[:p])
    cond = np.linalg.cond(R)
    if not cond <= MAX_CONDITION:
        raise SingularSystem(f"Yule-Walker matrix condition number {cond:.3g}")
    coeffs, ratios = levinson_durbin(rho, p)
    if len(coeffs) <= p:
        raise SingularSystem(f"prediction error vanishes before order {p}")
    pi = coeffs[p]
    ratio = 1.0 - float(np.dot(rho[1:], pi))
    cov = ratio * np.linalg.inv(R) / acf.n
    return ArFit(p, pi, acf.s2 * ratio, (cov + cov.T) / 2, mu, acf.s2, rho, acf.n)


def yule_walker(series, p: int) -> ArFit:
    series = _check_series(series)
    n = series.n
    if not 0 <= p <= n - 2:
        raise TooShort(f"order must lie in [0, {n - 2}], got {p}")
    fit = _fit_from_acf(sample_acf(series, p), p, float(series.values.mean()))
    if p and spectral_radius(fit.pi) >= 1.0:
        raise Unstable("fitted AR model is not stationary")
    return fit


def aic_path(series, max_order: int | None = None):
    """AIC values ``n ln sigma_a^2(p) + 2p`` for ``p = 0..max_order``."""
    series = _check_series(series)
    n = series.n
    p_max = default_max_order(n) if max_order is None else min(max_order, n - 2)
    p_max = max(p_max, 0)
    acf = sample_acf(series, p_max)
    _, ratios = levinson_durbin(acf.rho, p_max)
    sigma2 = acf.s2 * ratios
    return n * np.log(sigma2) + 2 * np.arange(sigma2.size), sigma2


def select_order_aic(series, max_order: int | None = None) -> int:
    aic, _ = aic_path(series, max_order)
    return int(np.argmin(aic))  # first minimum, so ties go to smaller p


def companion(pi: np.ndarray) -> np.ndarray:
    p = pi.shape[-1]
    c = np.zeros(pi.shape[:-1] + (p, p))
    c[..., 0, :] = pi
    if p > 1:
        idx = np.arange(p - 1)
        c[..., idx + 1, idx] = 1.0
    return c


def spectral_radius(pi) -> np.ndarray | float:
    pi = np.asarray(pi, dtype=float)
    if pi.shape[-1] == 0:
        return np.zeros(pi.shape[:-1]) if pi.ndim > 1 else 0.0
    r = np.abs(np.linalg.eigvals(companion(pi))).max(axis=-1)
    return r if pi.ndim > 1 else float(r)


def _stationary_rho(pi: np.ndarray) -> np.ndarray:
    """Solve for rho_1..rho_p given AR coefficients; batched over leading axes."""
    p = pi.shape[-1]
    batch = pi.shape[:-1]
    A = np.broadcast_to(np.eye(p), batch + (p, p)).copy()
    b = np.zeros(batch + (p,))
    for k in range(1, p + 1):
        for j in range(1, p + 1):
            lag = abs(k - j)
            if lag == 0:
                b[..., k - 1] += pi[..., j - 1]
            else:
                A[..., k - 1, lag - 1] -= pi[..., j - 1]
    return np.linalg.solve(A, b[..., None])[..., 0]


def implied_acf(fit, max_lag: int) -> AcfVector:
    """Theoretical ACF of the fitted AR process at lags ``0..max_lag``.

    ``fit`` may be an :class:`ArFit` or a plain coefficient vector.
    """
    pi = np.asarray(fit.pi if isinstance(fit, ArFit) else fit, dtype=float)
    p = pi.size
    if p and spectral_radius(pi) >= 1.0:
        raise Unstable("AR coefficients are not stationary")
    rho = np.zeros(max(max_lag, p) + 1)
    rho[0] = 1.0
    if p:
        rho[1 : p + 1] = _stationary_rho(pi)
        for k in range(p + 1, rho.size):
            rho[k] = np.dot(pi, rho[k - p : k][::-1])
    n = fit.n if isinstance(fit, ArFit) else 0
    s2 = fit.s2 if isinstance(fit, ArFit) else 1.0
    return AcfVector(rho=rho[: max_lag + 1], n=n, s2=s2)


def tau_from_coeffs(pi, rho) -> float | np.ndarray:
    """``(1 - rho_{1:p} . pi) / (1 - sum(pi))^2``; batched over leading axes."""
    pi = np.asarray(pi, dtype=float)
    rho = np.asarray(rho, dtype=float)
    num = 1.0 - np.sum(rho * pi, axis=-1)
    den = 1.0 - np.sum(pi, axis=-1)
    return num / den ** 2


def ar_tau(series, order: int | None = None, max_order: int | None = None) -> TauEstimate:
    series = _check_series(series)
    p = select_order_aic(series, max_order) if order is None else order
    fit = yule_walker(series, p)
    return _tau_estimate(fit)


def _tau_estimate(fit: ArFit) -> TauEstimate:
    if fit.order == 0:
        tau = 1.0
    else:
        den = 1.0 - float(np.sum(fit.pi))
        if abs(den) < UNIT_ROOT_TOL:
            raise NearUnitRoot(f"1 - sum(pi) = {den:.3g}")
        tau = float(tau_from_coeffs(fit.pi, fit.rho[1:]))
    return TauEstimate(
        tau=tau,
        method=Method.AR,
        n_used=fit.n,
        detail={"order": fit.order, "sigma_a2": fit.sigma_a2},
    )


def ar_tau_ci(
    series,
    level: float = 0.95,
    n_draws: int = 1000,
    seed: int = 0,
    order: int | None = None,
    max_order: int | None = None,
) -> TauInterval:
    """Point estimate and Monte Carlo percentile interval for tau.

    Coefficient vectors are drawn from the asymptotic normal distribution of
    the Yule-Walker estimate.  Draws that are not stationary are discarded
    and counted; each retained draw is mapped to tau through its own
    stationary autocorrelations.
    """
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if n_draws < 100:
        raise ValueError(f"n_draws must be at least 100, got {n_draws}")
    series = _check_series(series)
    p = select_order_aic(series, max_order) if order is None else order
    fit = yule_walker(series, p)
    est = _tau_estimate(fit)
    if p == 0:
        return TauInterval(est, 1.0, 1.0, level, n_draws, 0, 0)
    rng = np.random.default_rng(seed)
    draws = rng.multivariate_normal(fit.pi, fit.coeff_cov, size=n_draws, method="eigh")
    stable = spectral_radius(draws) < 1.0
    n_rejected = int(n_draws - stable.sum())
    if 2 * n_rejected > n_draws:
        raise TooManyRejections(f"{n_rejected} of {n_draws} draws were not stationary")
    kept = draws[stable]
    taus = tau_from_coeffs(kept, _stationary_rho(kept))
    lower, upper = np.quantile(taus, [(1 - level) / 2, (1 + level) / 2])
    return TauInterval(
        est, float(lower), float(upper), level, n_draws, n_rejected, p,
        detail={"draws_kept": int(stable.sum())},
    )
