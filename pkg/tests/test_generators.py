import numba
import numpy as np
import pytest
from scipy import stats

from actime.errors import NonStationaryParam, Overflow
from actime.generators import (
    ALL_KINDS,
    GROUP_SD,
    GROUP_Y,
    RNG_ALGORITHM,
    SeriesKind,
    SeriesSpec,
    bimodal_components,
    exp_transform,
    gen_ar1,
    gen_ar1_arch1,
    gen_ar2,
    gen_bimodal_met,
    gen_met_gauss,
    gen_stepout_logvar,
    generate,
    oracle_tau,
    reference_truth,
    slice_sample,
)
from actime.initial_seq import ics_tau
from actime.series import TimeSeries, sample_acf
from actime.spectrum import periodogram

from .conftest import bench


@numba.njit
def std_normal(x, p):
    return -0.5 * x * x


def mixture_cdf(x):
    w, mu, sd = bimodal_components()
    return sum(wi * stats.norm.cdf(x, m, s) for wi, m, s in zip(w, mu, sd))


def logvar_marginal_cdf(prior_mean=3.0, prior_sd=2.0):
    """CDF of the log variance with group means and grand mean integrated out."""
    v = np.linspace(-12.0, 12.0, 200_001)
    V = GROUP_SD ** 2 + np.exp(v)[:, None]
    prec = (1.0 / V).sum(axis=1)
    mu_hat = (GROUP_Y / V).sum(axis=1) / prec
    logp = (-0.5 * np.log(V).sum(axis=1) - 0.5 * np.log(prec)
            - 0.5 * ((GROUP_Y - mu_hat[:, None]) ** 2 / V).sum(axis=1)
            - 0.5 * ((v - prior_mean) / prior_sd) ** 2)
    c = np.cumsum(np.exp(logp - logp.max()))
    c /= c[-1]
    return lambda x: np.interp(x, v, c)


class TestDeterminism:
    @pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
    def test_same_seed_same_bits(self, kind):
        a = generate(SeriesSpec(kind, 2000, seed=11))
        b = generate(SeriesSpec(kind, 2000, seed=11))
        assert a.values.tobytes() == b.values.tobytes()
        assert a.meta["rng"] == RNG_ALGORITHM

    @pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
    def test_seeds_differ(self, kind):
        a = generate(SeriesSpec(kind, 500, seed=1))
        b = generate(SeriesSpec(kind, 500, seed=2))
        assert not np.array_equal(a.values, b.values)

    @pytest.mark.parametrize("kind", ALL_KINDS, ids=str)
    def test_finite_and_labelled(self, kind):
        s = generate(SeriesSpec(kind, 5000, seed=0))
        assert isinstance(s, TimeSeries)
        assert s.n == 5000 and np.all(np.isfinite(s.values))
        assert s.label and s.meta["kind"] == str(kind)


class TestSpecValidation:
    def test_unknown_param(self):
        with pytest.raises(ValueError):
            SeriesSpec(SeriesKind.AR1, 10, params={"phi2": 0.1})

    def test_bad_length(self):
        with pytest.raises(ValueError):
            SeriesSpec(SeriesKind.AR1, 0)

    def test_kind_coerced(self):
        assert SeriesSpec("ar2", 5).kind is SeriesKind.AR2

    @pytest.mark.parametrize("phi", [1.0, -1.0, 1.3])
    def test_nonstationary_ar1(self, phi):
        with pytest.raises(NonStationaryParam):
            gen_ar1(10, phi=phi)

    def test_nonstationary_ar2(self):
        with pytest.raises(NonStationaryParam):
            gen_ar2(10, phi1=1.5, phi2=-0.4)
        with pytest.raises(NonStationaryParam):
            SeriesSpec(SeriesKind.AR2, 10, params={"phi1": 1.0, "phi2": 0.0})


class TestArSeries:
    def test_iid_limit(self):
        x = gen_ar1(100_000, phi=0.0, seed=1).values
        assert abs(x.mean()) < 0.02
        assert x.var() == pytest.approx(1.0, abs=0.02)

    def test_stationary_start(self):
        r1 = [sample_acf(gen_ar1(100, phi=0.5, seed=s), 1).rho[1] for s in range(200)]
        assert 0.42 <= np.mean(r1) <= 0.52

    def test_stationary_variance_at_start(self):
        first = np.array([gen_ar1(1, phi=0.98, seed=s).values[0] for s in range(4000)])
        assert first.var() == pytest.approx(1 / (1 - 0.98 ** 2), rel=0.08)

    def test_ar2_period(self):
        pg = periodogram(bench("ar2", 500_000, 7))
        f = pg.freqs[np.argmax(pg.power)]
        assert 1 / 75 <= f <= 1 / 45

    def test_ar2_zero_coefficients_is_iid(self):
        x = gen_ar2(50_000, phi1=0.0, phi2=0.0, seed=2)
        assert abs(sample_acf(x, 1).rho[1]) < 0.02

    def test_arch_lag_one(self):
        x = bench("ar1-arch1", 500_000, 7)
        assert sample_acf(x, 1).rho[1] == pytest.approx(0.98, abs=0.01)

    def test_arch_squared_innovations_correlated(self):
        z = bench("ar1-arch1", 500_000, 7).values
        a = z[1:] - 0.98 * z[:-1]
        assert sample_acf(a, 1).rho[1] < 0.05  # innovations themselves uncorrelated
        assert sample_acf(a * a, 1).rho[1] > 0.1

    def test_arch_defaults_match_generate(self):
        s = generate(SeriesSpec(SeriesKind.AR1_ARCH1, 100, seed=4))
        assert np.array_equal(s.values, gen_ar1_arch1(100, seed=4).values)


class TestMetropolis:
    def test_acceptance_rate_recorded(self):
        rate = gen_met_gauss(20_000, seed=0).meta["acceptance_rate"]
        assert 0 < rate < 1

    def test_wide_proposals_mix_slower(self):
        taus, rates = [], []
        for sd in (5.0, 50.0, 500.0):
            s = gen_met_gauss(400_000, proposal_sd=sd, seed=3)
            taus.append(ics_tau(s).tau)
            rates.append(s.meta["acceptance_rate"])
        assert taus[0] < taus[1] < taus[2]
        assert rates[0] > rates[1] > rates[2]

    def test_bad_proposal(self):
        with pytest.raises(ValueError):
            gen_met_gauss(10, proposal_sd=0.0)

    def test_met_gauss_matches_target(self):
        x = gen_met_gauss(500_000, seed=0).values
        assert stats.kstest(x, "norm").statistic < 0.01

    def test_bimodal_matches_target(self):
        # the chain has tau near 200, so one run of 5e5 is too short for a
        # 0.01 KS bound; ten independent runs are pooled
        x = np.concatenate([gen_bimodal_met(500_000, seed=s).values for s in range(10)])
        assert stats.kstest(x, mixture_cdf).statistic < 0.01

    def test_bimodal_histogram(self):
        x = bench("bimodal-met", 500_000, 7).values
        counts, edges = np.histogram(x, bins=np.linspace(-4, 6, 41))
        peaks = [i for i in range(1, 39) if counts[i] > counts[i - 1] and counts[i] >= counts[i + 1]]
        centers = (edges[:-1] + edges[1:]) / 2
        big = [centers[i] for i in peaks if counts[i] > 0.02 * x.size]
        assert len(big) == 2
        assert abs(big[0]) < 0.5 and abs(big[1] - 4) < 0.5
        assert x.min() < 0 and x.max() > 4


class TestSliceSampler:
    def test_standard_normal(self):
        x = slice_sample(std_normal, 0.0, 100_000, width=1.0, seed=5)
        assert -0.02 <= x.mean() <= 0.02
        assert 0.95 <= x.var() <= 1.05

    @pytest.mark.parametrize("width,max_steps", [(0.1, 3), (10.0, 100)])
    def test_poor_widths_still_correct(self, width, max_steps):
        x = slice_sample(std_normal, 3.0, 200_000, width=width, seed=6, max_steps=max_steps)
        assert stats.kstest(x[1000:], "norm").statistic < 0.03

    def test_deterministic(self):
        a = slice_sample(std_normal, 0.0, 1000, seed=9)
        b = slice_sample(std_normal, 0.0, 1000, seed=9)
        assert np.array_equal(a, b)

    def test_hierarchical_marginal(self):
        cdf = logvar_marginal_cdf()
        x = np.concatenate([gen_stepout_logvar(500_000, seed=s).values for s in range(4)])
        assert stats.kstest(x, cdf).statistic < 0.01

    def test_evaluations_recorded(self):
        s = gen_stepout_logvar(1000, seed=0, burn_in=0)
        assert s.meta["evals_per_sweep"] >= 10 * 2


class TestExpTransform:
    def test_zeros(self):
        out = exp_transform(TimeSeries([0.0, 0.0], label="z"))
        assert out.values.tolist() == [1.0, 1.0]
        assert out.label == "exp(z)"

    def test_round_trip(self, rng):
        y = rng.uniform(0.1, 50, 100)
        out = exp_transform(TimeSeries(np.log(y)))
        np.testing.assert_allclose(out.values, y, rtol=1e-12)

    def test_overflow(self):
        with pytest.raises(Overflow):
            exp_transform(TimeSeries([1.0, 800.0]))

    def test_stepout_var_is_exp_of_logvar(self):
        v = generate(SeriesSpec(SeriesKind.STEPOUT_LOGVAR, 300, seed=3))
        w = generate(SeriesSpec(SeriesKind.STEPOUT_VAR, 300, seed=3))
        assert np.array_equal(w.values, np.exp(v.values))
        assert w.label == "Stepout-Var"


class TestTruth:
    @pytest.mark.parametrize("kind,params,expected", [
        ("ar1", {}, 99.0),
        ("ar1", {"phi": 0.5}, 3.0),
        ("ar1", {"phi": 0.0}, 1.0),
        ("ar1-arch1", {}, 99.0),
        ("ar2", {"phi1": 0.0, "phi2": 0.0}, 1.0),
        ("ar2", {}, 1.9949748743718594),
    ])
    def test_analytic(self, kind, params, expected):
        rec = oracle_tau(SeriesSpec(kind, 10, params=params))
        assert rec.provenance == "analytic"
        assert rec.tau_true == pytest.approx(expected, rel=1e-9)

    def test_published_values_recorded(self):
        assert reference_truth("ar1").published_value == 99.0
        assert reference_truth("met-gauss").published_value == 8.0

    def test_no_published_value_for_other_parameters(self):
        assert reference_truth("ar1", {"phi": 0.9}).published_value is None
        assert reference_truth("ar1", {"phi": 0.98}).published_value == 99.0

    @pytest.mark.parametrize("kind,lo,hi", [
        ("met-gauss", 7, 9),
        ("bimodal-met", 150, 250),
        ("stepout-logvar", 100, 300),
        ("stepout-var", 50, 200),
    ])
    def test_stored_reference(self, kind, lo, hi):
        rec = reference_truth(kind)
        assert rec.provenance == "oracle-estimated"
        assert lo <= rec.tau_true <= hi

    def test_stored_reference_needs_defaults(self):
        with pytest.raises(ValueError):
            reference_truth("met-gauss", {"proposal_sd": 2.0})

    @pytest.mark.slow
    @pytest.mark.parametrize("kind,lo,hi", [
        ("met-gauss", 7, 9),
        ("bimodal-met", 150, 250),
        ("stepout-logvar", 100, 300),
        ("stepout-var", 50, 200),
    ])
    def test_oracle(self, kind, lo, hi):
        rec = oracle_tau(SeriesSpec(kind, 1, seed=100), 1_000_000, 5)
        assert rec.provenance == "oracle-estimated"
        assert lo <= rec.tau_true <= hi
        assert "median of 5" in rec.oracle_detail

    def test_transform_changes_tau(self):
        assert reference_truth("stepout-var").tau_true < 0.75 * reference_truth("stepout-logvar").tau_true
