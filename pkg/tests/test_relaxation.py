from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.linalg import expm

from devcorr.errors import NegativeTime, ZeroRate
from devcorr.relaxation import (
    NA23_PARAMS,
    RelaxationParams,
    evolve,
    longitudinal_magnetization,
    longitudinal_model,
    r_coefficients,
    time_constants,
    time_series,
    transverse_magnetization,
)
from devcorr.states import bell_pseudopure, equilibrium_deviation
from oracles import random_deviation

EQ = np.diag([3.0, 1.0, -1.0, -3.0])
seeds = st.integers(0, 2**32 - 1)


def generator_matrix(p: RelaxationParams) -> np.ndarray:
    """Linear generator for (populations - equilibrium), written from the rates:
    the three population combinations decay with 2CJ2, 2C(J1+J2), 2CJ1 and
    the total stays zero."""
    # rows: combinations (sum, R2-type, R1-type, R3-type) in terms of populations
    basis = np.array([[1, 1, 1, 1], [1, 1, -1, -1], [-1, 1, 1, -1], [1, -1, 1, -1]], dtype=float)
    rates = np.diag([0.0, 2 * p.C * p.J2, 2 * p.C * (p.J1 + p.J2), 2 * p.C * p.J1])
    return -np.linalg.solve(basis, rates @ basis)


class TestRCoefficients:
    def test_equilibrium(self):
        assert r_coefficients(EQ).as_tuple() == (0.0, 0.0, 0.0)

    def test_bell(self):
        # diag (1/4, -1/4, -1/4, 1/4)
        assert_allclose(r_coefficients(bell_pseudopure("psi+")).as_tuple(), (-1.0, -8.0, -4.0))


class TestEvolve:
    def test_identity_at_zero(self):
        d0 = random_deviation(np.random.default_rng(0))
        assert_allclose(np.asarray(evolve(d0, NA23_PARAMS, 0.0)), d0, atol=1e-12)

    def test_asymptote(self):
        d0 = random_deviation(np.random.default_rng(1), scale=3)
        assert_allclose(np.asarray(evolve(d0, NA23_PARAMS, 10.0)), EQ, atol=1e-10)

    def test_negative_time(self):
        with pytest.raises(NegativeTime):
            evolve(EQ, NA23_PARAMS, -1e-3)

    @settings(max_examples=50)
    @given(seeds, st.floats(0, 0.2))
    def test_trace_and_hermiticity(self, seed, t):
        d = np.asarray(evolve(random_deviation(np.random.default_rng(seed)), NA23_PARAMS, t))
        assert abs(np.trace(d)) < 1e-10
        assert_allclose(d, d.conj().T, atol=0)

    @settings(max_examples=50)
    @given(seeds, st.floats(0, 0.05), st.floats(0, 0.05))
    def test_semigroup(self, seed, t1, t2):
        d0 = random_deviation(np.random.default_rng(seed), scale=2)
        direct = np.asarray(evolve(d0, NA23_PARAMS, t1 + t2))
        chained = np.asarray(evolve(evolve(d0, NA23_PARAMS, t1), NA23_PARAMS, t2))
        assert_allclose(chained, direct, atol=1e-10)

    @settings(max_examples=20)
    @given(seeds, st.floats(0, 0.1))
    def test_populations_match_generator(self, seed, t):
        # independent route: matrix exponential of the population generator
        d0 = random_deviation(np.random.default_rng(seed))
        x0 = np.real(np.diag(d0)) - np.diag(EQ)
        ref = np.diag(EQ) + expm(generator_matrix(NA23_PARAMS) * t) @ x0
        assert_allclose(np.real(np.diag(np.asarray(evolve(d0, NA23_PARAMS, t)))), ref, atol=1e-12)

    def test_coherence_pair_rates(self):
        # d01 and d23 alone: sum decays at C(J0+J1), difference at C(J0+J1)+2CJ2
        p = NA23_PARAMS
        d0 = np.zeros((4, 4), dtype=complex)
        d0[0, 1] = d0[1, 0] = 1.0
        t = 4e-3
        out = np.asarray(evolve(d0, p, t))
        s = out[0, 1] + out[2, 3]
        diff = out[0, 1] - out[2, 3]
        assert_allclose(s, np.exp(-p.C * (p.J0 + p.J1) * t), rtol=1e-12)
        assert_allclose(diff, np.exp(-(p.C * (p.J0 + p.J1) + 2 * p.C * p.J2) * t), rtol=1e-12)

    def test_d03_monotone(self):
        series = time_series(bell_pseudopure("psi+"), NA23_PARAMS, 1.5e-3, 40)
        mags = [abs(d[0, 3]) for _, d in series]
        assert np.all(np.diff(mags) <= 0)

    def test_rescaled_input_still_reaches_equilibrium(self):
        d0 = 7 * random_deviation(np.random.default_rng(4))
        assert_allclose(np.asarray(evolve(d0, NA23_PARAMS, 5.0)), EQ, atol=1e-10)


class TestTimeSeries:
    def test_experimental_grid(self):
        s = time_series(EQ, NA23_PARAMS, 1.5e-3, 40)
        assert len(s) == 40
        assert_allclose(s[-1][0], 0.06)

    def test_single_point(self):
        assert len(time_series(EQ, NA23_PARAMS, 1e-3, 1)) == 1

    def test_semigroup_spot_check(self):
        d0 = bell_pseudopure("phi-")
        dt = 1.5e-3
        s = time_series(d0, NA23_PARAMS, dt, 2)
        two = evolve(evolve(d0, NA23_PARAMS, dt), NA23_PARAMS, dt)
        assert_allclose(np.asarray(s[1][1]), np.asarray(two), atol=1e-14)

    @pytest.mark.parametrize("dt,n", [(0.0, 3), (1e-3, 0)])
    def test_bad_grid(self, dt, n):
        with pytest.raises(ValueError):
            time_series(EQ, NA23_PARAMS, dt, n)


class TestMagnetization:
    def test_equilibrium_longitudinal(self):
        assert longitudinal_magnetization(equilibrium_deviation()) == 10.0
        assert longitudinal_magnetization(np.zeros((4, 4))) == 0.0

    def test_longitudinal_model(self):
        d0 = bell_pseudopure("psi+")
        t = np.linspace(0, 0.06, 13)
        sim = [longitudinal_magnetization(evolve(d0, NA23_PARAMS, ti)) for ti in t]
        assert_allclose(sim, longitudinal_model(d0, NA23_PARAMS, t), atol=1e-12)

    def test_longitudinal_biexponential_rates(self):
        from scipy.optimize import curve_fit

        d0 = bell_pseudopure("psi+")
        t = np.linspace(0, 0.1, 200)
        y = np.array([longitudinal_magnetization(evolve(d0, NA23_PARAMS, ti)) for ti in t])
        f = lambda t, a, k1, b, k2: 10 + a * np.exp(-k1 * t) + b * np.exp(-k2 * t)
        popt, _ = curve_fit(f, t, y, p0=[-5, 70, -2, 90])
        rates = sorted([popt[1], popt[3]])
        assert_allclose(rates, sorted([2 * NA23_PARAMS.C * NA23_PARAMS.J1, 2 * NA23_PARAMS.C * NA23_PARAMS.J2]), rtol=0.01)

    def test_transverse_diagonal(self):
        m = transverse_magnetization(EQ)
        assert m.central == 0 and m.full == 0

    def test_transverse_central_decay(self):
        d0 = np.zeros((4, 4), dtype=complex)
        d0[1, 2] = d0[2, 1] = 0.3
        t = 0.013
        m = transverse_magnetization(evolve(d0, NA23_PARAMS, t))
        tau = time_constants(NA23_PARAMS).tau_T
        assert_allclose(m.central, 2 * 0.3 * np.exp(-t / tau), rtol=1e-12)
        # the full operator also weighs only d21 here
        assert_allclose(m.full, m.central, rtol=1e-12)

    def test_transverse_full_includes_satellites(self):
        d = np.zeros((4, 4), dtype=complex)
        d[0, 1] = d[1, 0] = 1.0
        m = transverse_magnetization(d)
        assert m.central == 0
        assert_allclose(m.full, np.sqrt(3))


class TestTimeConstants:
    def test_experimental_values(self):
        tc = time_constants(NA23_PARAMS)
        assert_allclose([tc.tau_L1, tc.tau_L2, tc.tau_T], [1 / 72, 1 / 81.6, 1 / 76.8], rtol=1e-12)

    def test_zero_rate(self):
        with pytest.raises(ZeroRate):
            time_constants(RelaxationParams(C=1e9, J0=1e-9, J1=0.0, J2=1e-9))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            RelaxationParams(C=0, J0=1, J1=1, J2=1)
        with pytest.raises(ValueError):
            RelaxationParams(C=1, J0=-1, J1=1, J2=1)
