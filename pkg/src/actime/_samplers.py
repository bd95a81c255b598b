"""Compiled inner loops for the benchmark generators.

Every loop draws from a ``numpy.random.Generator`` passed in from Python, so
a series is a deterministic function of its seed.
"""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def arch_innovations(rng, n, a0, base, coef):
    a = np.empty(n)
    prev = a0
    for t in range(n):
        prev = math.sqrt(base + coef * prev * prev) * rng.standard_normal()
        a[t] = prev
    return a


@numba.njit(cache=True)
def metropolis_gauss(rng, n, x0, sd):
    """Random-walk Metropolis on N(0, 1); returns states and accept count."""
    out = np.empty(n)
    x = x0
    lp = -0.5 * x * x
    accepted = 0
    for t in range(n):
        y = x + sd * rng.standard_normal()
        ly = -0.5 * y * y
        if math.log(rng.random()) < ly - lp:
            x = y
            lp = ly
            accepted += 1
        out[t] = x
    return out, accepted


@numba.njit(cache=True)
def _mixture_logpdf(x, w, mu, sd):
    # log-sum-exp over components
    m = -np.inf
    vals = np.empty(w.size)
    for k in range(w.size):
        z = (x - mu[k]) / sd[k]
        vals[k] = math.log(w[k]) - math.log(sd[k]) - 0.5 * z * z
        if vals[k] > m:
            m = vals[k]
    s = 0.0
    for k in range(w.size):
        s += math.exp(vals[k] - m)
    return m + math.log(s)


@numba.njit(cache=True)
def metropolis_mixture(rng, n, x0, prop_sd, w, mu, sd):
    out = np.empty(n)
    x = x0
    lp = _mixture_logpdf(x, w, mu, sd)
    accepted = 0
    for t in range(n):
        y = x + prop_sd * rng.standard_normal()
        ly = _mixture_logpdf(y, w, mu, sd)
        if math.log(rng.random()) < ly - lp:
            x = y
            lp = ly
            accepted += 1
        out[t] = x
    return out, accepted


@numba.njit(cache=True)
def slice_step(logf, params, x0, w, max_steps, rng):
    """One univariate slice-sampling update with stepping out and shrinkage.

    ``logf(x, params)`` is the log density up to a constant.  The initial
    interval of width ``w`` is placed at random around ``x0`` and expanded
    by at most ``max_steps`` steps in total.  Returns ``(x1, n_evals)``.
    """
    evals = 1
    logy = logf(x0, params) - rng.standard_exponential()
    left = x0 - w * rng.random()
    right = left + w
    j = int(math.floor(max_steps * rng.random()))
    k = max_steps - 1 - j
    while j > 0:
        evals += 1
        if not logy < logf(left, params):
            break
        left -= w
        j -= 1
    while k > 0:
        evals += 1
        if not logy < logf(right, params):
            break
        right += w
        k -= 1
    while True:
        x1 = left + rng.random() * (right - left)
        evals += 1
        if logy < logf(x1, params):
            return x1, evals
        if x1 < x0:
            left = x1
        else:
            right = x1


@numba.njit
def slice_chain(logf, params, x0, w, max_steps, rng, n):
    out = np.empty(n)
    x = x0
    for t in range(n):
        x, _ = slice_step(logf, params, x, w, max_steps, rng)
        out[t] = x
    return out


@numba.njit(cache=True)
def std_normal_logpdf(x, params):
    return -0.5 * x * x


# Hierarchical normal-means model.  The log variance v of the group means
# carries an N(prior_mean, prior_sd^2) prior; the grand mean mu a flat one.
#   y_j ~ N(theta_j, sigma_j^2),  theta_j ~ N(mu, exp(v))

@numba.njit(cache=True)
def _theta_logpdf(theta, p):
    # p = (y_j, sigma_j^2, mu, exp(v))
    return -0.5 * (p[0] - theta) ** 2 / p[1] - 0.5 * (theta - p[2]) ** 2 / p[3]


@numba.njit(cache=True)
def _mu_logpdf(mu, p):
    # p = (sum theta, sum theta^2, J, exp(v))
    ss = p[1] - 2.0 * mu * p[0] + p[2] * mu * mu
    return -0.5 * ss / p[3]


@numba.njit(cache=True)
def _logvar_logpdf(v, p):
    # p = (sum of squared deviations, J, prior mean, prior sd)
    z = (v - p[2]) / p[3]
    return -0.5 * p[1] * v - 0.5 * p[0] * math.exp(-v) - 0.5 * z * z


@numba.njit
def hierarchical_slice(rng, n, y, sigma2, prior_mean, prior_sd, w_theta, w_mu, w_v,
                       max_steps, theta0, mu0, v0):
    """Componentwise slice sampling over (theta_1..theta_J, mu, v).

    Records the log-variance coordinate after every full sweep.
    """
    J = y.size
    theta = theta0.copy()
    mu = mu0
    v = v0
    out = np.empty(n)
    evals = 0
    pt = np.empty(4)
    pm = np.empty(4)
    pv = np.empty(4)
    for t in range(n):
        ev = math.exp(v)
        for j in range(J):
            pt[0] = y[j]
            pt[1] = sigma2[j]
            pt[2] = mu
            pt[3] = ev
            theta[j], e = slice_step(_theta_logpdf, pt, theta[j], w_theta, max_steps, rng)
            evals += e
        pm[0] = theta.sum()
        pm[1] = (theta * theta).sum()
        pm[2] = J
        pm[3] = ev
        mu, e = slice_step(_mu_logpdf, pm, mu, w_mu, max_steps, rng)
        evals += e
        pv[0] = ((theta - mu) ** 2).sum()
        pv[1] = J
        pv[2] = prior_mean
        pv[3] = prior_sd
        v, e = slice_step(_logvar_logpdf, pv, v, w_v, max_steps, rng)
        evals += e
        out[t] = v
    return out, evals
