"""Uniform entry point over the estimators."""

from __future__ import annotations

from .ar import ar_tau
from .batch_means import batch_means_tau, plan_for_batch_size
from .initial_seq import ics_tau, ims_tau, ips_tau
from .series import Method, TauEstimate, as_series
from .spectrum import spectrum_fit_tau

# The four methods compared by the benchmark harness.
DEFAULT_METHODS = (Method.BATCH_MEANS, Method.SPECTRUM_FIT, Method.ICS, Method.AR)


def estimate(
    series,
    method: Method | str,
    *,
    batch_size: int | None = None,
    order: int = 1,
    max_order: int | None = None,
) -> TauEstimate:
    """Estimate tau with ``method``; keyword options apply to one method each.

    ``batch_size`` is for batch means, ``order`` (1 or 2) for the spectrum
    fit and ``max_order`` caps the AIC search of the AR method.
    """
    series = as_series(series)
    method = Method(method)
    if method is Method.BATCH_MEANS:
        plan = None if batch_size is None else plan_for_batch_size(series.n, batch_size)
        return batch_means_tau(series, plan)
    if method is Method.SPECTRUM_FIT:
        return spectrum_fit_tau(series, order)
    if method is Method.IPS:
        return ips_tau(series)
    if method is Method.IMS:
        return ims_tau(series)
    if method is Method.ICS:
        return ics_tau(series)
    return ar_tau(series, max_order=max_order)
