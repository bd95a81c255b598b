"""Estimators of the autocorrelation time of Markov chain output."""

from .ar import ArFit, TauInterval, ar_tau, ar_tau_ci, implied_acf, select_order_aic, yule_walker
from .batch_means import BatchPlan, batch_means_tau, default_plan
from .errors import (
    ActimeError,
    BadLength,
    ConfigError,
    DegenerateSeries,
    FailedEstimate,
    NearUnitRoot,
    SingularSystem,
    TooManyRejections,
    TooShort,
    Unstable,
)
from .estimate import DEFAULT_METHODS, estimate
from .initial_seq import gamma_pairs, greatest_convex_minorant, ics_tau, ims_tau, ips_tau
from .series import AcfVector, Method, TauEstimate, TimeSeries, mean, prefix, sample_acf, variance
from .spectrum import periodogram, spectrum_fit_tau

__version__ = "0.1.0"
