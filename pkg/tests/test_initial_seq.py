import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from actime.errors import DegenerateSeries
from actime.initial_seq import (
    TAU_FLOOR,
    gamma_pairs,
    greatest_convex_minorant,
    ics_tau,
    ims_tau,
    ips_tau,
    series_gamma,
    smooth_gamma,
    tau_from_gamma,
)
from actime.series import Method

from .conftest import bench


def brute_force_minorant(v):
    """Lower envelope as the minimum over all chords spanning each index."""
    v = np.asarray(v, dtype=float)
    m = v.size
    out = v.copy()
    for i in range(m):
        for j in range(i + 1):
            for k in range(i, m):
                if j == k:
                    continue
                val = v[j] + (v[k] - v[j]) * (i - j) / (k - j)
                out[i] = min(out[i], val)
    return out


class TestGammaPairs:
    def test_white_noise(self):
        g = gamma_pairs(np.array([1.0, 0, 0, 0, 0, 0]))
        assert g.gamma[0] == 1.0
        assert g.truncation_m == 0

    def test_geometric_acf(self):
        phi = 0.98
        rho = phi ** np.arange(200)
        g = gamma_pairs(rho)
        m = np.arange(100)
        np.testing.assert_allclose(g.gamma, phi ** (2 * m) * (1 + phi), rtol=1e-12)
        assert g.truncation_m == 99

    def test_direct_arithmetic(self):
        g = gamma_pairs(np.array([1.0, 0.5, -0.3, -0.3]))
        np.testing.assert_allclose(g.gamma, [1.5, -0.6])
        assert g.truncation_m == 0

    def test_odd_final_lag_ignored(self):
        g = gamma_pairs(np.array([1.0, 0.5, 0.2, 0.1, 0.05]))
        assert g.gamma.size == 2

    def test_zero_pair_truncates(self):
        assert gamma_pairs(np.array([1.0, 0.2, 0.1, -0.1])).truncation_m == 0

    def test_first_pair_nonpositive(self):
        g = gamma_pairs(np.array([1.0, -1.0, 0.5, 0.2]))
        assert g.truncation_m == -1
        assert tau_from_gamma(g, Method.IPS) == (TAU_FLOOR, True)


class TestSmoothing:
    def test_running_minimum(self):
        out = smooth_gamma(np.array([1.0, 0.8, 0.9]), Method.IMS)
        assert out.tolist() == [1.0, 0.8, 0.8]

    @pytest.mark.parametrize("kind", [Method.IPS, Method.IMS, Method.ICS])
    def test_exact_white_noise(self, kind):
        g = gamma_pairs(np.array([1.0] + [0.0] * 9))
        assert tau_from_gamma(g, kind) == (1.0, False)


class TestConvexMinorant:
    def test_convex_input_unchanged(self):
        v = [3, 1, 0.5, 0.4]
        assert greatest_convex_minorant(v).tolist() == v

    def test_example(self):
        expected = brute_force_minorant([1.0, 0.9, 0.2])
        np.testing.assert_allclose(expected, [1.0, 0.6, 0.2])
        np.testing.assert_allclose(greatest_convex_minorant([1.0, 0.9, 0.2]), expected)

    def test_single(self):
        assert greatest_convex_minorant([5.0]).tolist() == [5.0]

    def test_empty(self):
        with pytest.raises(ValueError):
            greatest_convex_minorant([])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=50))
    def test_matches_brute_force(self, v):
        out = greatest_convex_minorant(v)
        np.testing.assert_allclose(out, brute_force_minorant(v), atol=1e-9)
        assert np.all(out <= np.asarray(v))
        assert np.all(np.diff(out, 2) >= -1e-9)


class TestEstimators:
    def test_constant(self):
        for f in (ips_tau, ims_tau, ics_tau):
            with pytest.raises(DegenerateSeries):
                f(np.full(100, 3.0))

    def test_alternating_series(self):
        x = np.tile([1.0, -1.0], 500)
        g = series_gamma(x)
        assert g.gamma[0] == pytest.approx(1 / 1000)
        est = ips_tau(x)
        assert 0 < est.tau < 1

    @pytest.mark.parametrize("f", [ips_tau, ims_tau, ics_tau])
    def test_ar1(self, ar1_long, f):
        assert 70 <= f(ar1_long).tau <= 130

    def test_ics_fails_on_ar2(self, ar2_long):
        assert ics_tau(ar2_long).tau > 10

    def test_detail(self, ar1_long):
        d = ics_tau(ar1_long).detail
        assert d["truncation_lag"] == 2 * d["truncation_m"] + 1

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(4, 3000), st.floats(-0.95, 0.99))
    def test_ordering(self, seed, n, phi):
        rng = np.random.default_rng(seed)
        from scipy.signal import lfilter

        x = lfilter([1.0], [1.0, -phi], rng.standard_normal(n))
        ips, ims, ics = ips_tau(x).tau, ims_tau(x).tau, ics_tau(x).tau
        assert ics <= ims + 1e-12
        assert ims <= ips + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(30, 3000))
    def test_ics_sequence_shape(self, seed, n):
        x = np.random.default_rng(seed).standard_normal(n).cumsum()
        g = series_gamma(x)
        sm = smooth_gamma(g.retained, Method.ICS)
        assert np.all(sm > 0)
        assert np.all(np.diff(sm) <= 1e-12)
        assert np.all(np.diff(sm, 2) >= -1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(10, 2000), st.floats(0.01, 100),
           st.booleans(), st.floats(-1e3, 1e3))
    def test_affine_invariance(self, seed, n, a, neg, b):
        x = np.random.default_rng(seed).standard_normal(n).cumsum()
        a = -a if neg else a
        for f in (ips_tau, ims_tau, ics_tau):
            assert f(a * x + b).tau == pytest.approx(f(x).tau, rel=1e-10)


def test_ar1_benchmark_median():
    taus = [ics_tau(bench("ar1", 500_000, s)).tau for s in range(5)]
    assert np.median(taus) == pytest.approx(99, rel=0.2)
