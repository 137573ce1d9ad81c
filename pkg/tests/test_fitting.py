from __future__ import annotations

import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from devcorr.errors import DegenerateSignal, EmptySeries, FitDivergence, InconsistentFits, InconsistentFitsWarning
from devcorr.fitting import (
    COHERENCE_SYSTEM,
    add_noise,
    combinations,
    estimate_parameters,
    fit_exponential,
)
from devcorr.relaxation import NA23_PARAMS, RelaxationParams, r_coefficients, time_series
from devcorr.states import bell_pseudopure, equilibrium_deviation, pseudopure
from oracles import full_superposition

T_GRID = np.arange(1, 41) * 1.5e-3


class TestCombinations:
    def test_empty(self):
        with pytest.raises(EmptySeries):
            combinations([])

    def test_equilibrium_constant(self):
        t, sig = combinations(time_series(equilibrium_deviation(), NA23_PARAMS, 1e-3, 5))
        assert_allclose(sig["pop_R2"], 8)
        assert_allclose(sig["pop_R1"], 0, atol=1e-15)
        assert_allclose(sig["pop_R3"], 4)
        for k in ("c01_23", "c02_13", "c12"):
            assert_allclose(sig[k], 0)

    def test_single_point(self):
        t, sig = combinations(time_series(equilibrium_deviation(), NA23_PARAMS, 1e-3, 1))
        assert len(t) == 1 and all(len(v) == 1 for v in sig.values())

    def test_single_exponentials(self):
        p = NA23_PARAMS
        d0 = full_superposition()
        t, sig = combinations(time_series(d0, p, 1.5e-3, 40))
        rates = p.rates
        offsets = {"c01_23": 0, "c02_13": 0, "c12": 0, "pop_R2": 8, "pop_R1": 0, "pop_R3": 4}
        for name, y in sig.items():
            z = y - offsets[name]
            resid = z - z[0] * np.exp(-rates[name] * (t - t[0]))
            assert np.max(np.abs(resid)) < 1e-9, name


class TestFitExponential:
    def test_pure_decay(self):
        t = np.linspace(0, 0.05, 40)
        r = fit_exponential(t, 5 * np.exp(-100 * t), known_offset=0.0)
        assert_allclose([r.amplitude, r.rate], [5, 100], rtol=1e-10)
        assert r.residual_rms < 1e-10

    def test_free_offset(self):
        t = np.linspace(0, 0.05, 40)
        r = fit_exponential(t, 2.5 - 3 * np.exp(-60 * t))
        assert_allclose([r.offset, r.amplitude, r.rate], [2.5, -3, 60], rtol=1e-9)

    def test_population_rate(self):
        y = 8 - 7.9 * np.exp(-2 * NA23_PARAMS.C * NA23_PARAMS.J2 * T_GRID)
        r = fit_exponential(T_GRID, y, known_offset=8)
        assert_allclose(r.rate, 81.6, rtol=1e-10)

    def test_complex_shared_rate(self):
        y = (0.3 - 0.7j) * np.exp(-240 * T_GRID)
        r = fit_exponential(T_GRID, y)
        assert_allclose(r.amplitude, 0.3 - 0.7j, rtol=1e-10)
        assert_allclose(r.rate, 240, rtol=1e-10)

    def test_noise_median_within_five_percent(self):
        rel = []
        for seed in range(100):
            rng = np.random.default_rng(seed)
            y = 8 - 7.9 * np.exp(-81.6 * T_GRID) + rng.normal(0, 0.01 * 7.9, T_GRID.size)
            rel.append(abs(fit_exponential(T_GRID, y, 8).rate / 81.6 - 1))
        assert np.median(rel) < 0.05

    def test_degenerate(self):
        with pytest.raises(DegenerateSignal):
            fit_exponential(T_GRID, np.full(40, 4.0), known_offset=4.0)
        with pytest.raises(DegenerateSignal):
            fit_exponential(T_GRID, np.full(40, 4.0))

    def test_growing_signal_diverges(self):
        with pytest.raises(FitDivergence):
            fit_exponential(T_GRID, np.exp(50 * T_GRID), known_offset=0.0)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            fit_exponential([0, 1], [1, 0.5])
        with pytest.raises(ValueError):
            fit_exponential([0, 2, 1], [1, 0.5, 0.2])

    def test_uncertainties_nonnegative(self):
        rng = np.random.default_rng(3)
        y = 2 * np.exp(-50 * T_GRID) + rng.normal(0, 0.01, T_GRID.size)
        r = fit_exponential(T_GRID, y, 0.0)
        assert r.rate_err > 0 and r.amplitude_err > 0 and r.residual_rms > 0


class TestEstimateParameters:
    def test_conditioning(self):
        assert np.linalg.cond(COHERENCE_SYSTEM) < 10

    def test_noiseless_roundtrip(self):
        d0 = full_superposition()
        rep = estimate_parameters(time_series(d0, NA23_PARAMS, 1.5e-3, 40), NA23_PARAMS.C)
        assert_allclose([rep.J0, rep.J1, rep.J2], [17e-9, 3e-9, 3.4e-9], rtol=1e-6)
        assert_allclose([rep.R1, rep.R2, rep.R3], r_coefficients(d0).as_tuple(), atol=1e-6)
        assert rep.consistency_gap < 1e-6
        assert min(rep.J0_err, rep.J1_err, rep.J2_err, rep.R1_err) >= 0

    def test_other_parameters(self):
        p = RelaxationParams(C=5e9, J0=9e-9, J1=1.5e-9, J2=6e-9)
        rng = np.random.default_rng(8)
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        rep = estimate_parameters(time_series(pseudopure(v, 3.0), p, 1e-3, 50), p.C)
        assert_allclose([rep.J0, rep.J1, rep.J2], [p.J0, p.J1, p.J2], rtol=1e-6)

    def test_missing_central_coherence_is_degenerate(self):
        # the Bell state psi+ has d12 = 0, so C(J1+J2) cannot come from coherences
        with pytest.raises(DegenerateSignal):
            estimate_parameters(time_series(bell_pseudopure("psi+"), NA23_PARAMS, 1.5e-3, 40), NA23_PARAMS.C)

    def test_inconsistency_warns_or_raises(self):
        series = time_series(full_superposition(), NA23_PARAMS, 1.5e-3, 40)
        # corrupt the population decay by splicing in a faster-relaxing run
        fast = RelaxationParams(C=NA23_PARAMS.C, J0=NA23_PARAMS.J0, J1=2 * NA23_PARAMS.J1, J2=2 * NA23_PARAMS.J2)
        fast_series = time_series(full_superposition(), fast, 1.5e-3, 40)
        mixed = []
        for (t, a), (_, b) in zip(series, fast_series):
            m = np.asarray(a).copy()
            m[np.diag_indices(4)] = np.diag(np.asarray(b))
            mixed.append((t, m))
        with pytest.warns(InconsistentFitsWarning):
            rep = estimate_parameters(mixed, NA23_PARAMS.C)
        assert_allclose(rep.consistency_gap, 0.5, rtol=1e-6)  # |J - 2J| / 2J
        with pytest.raises(InconsistentFits):
            estimate_parameters(mixed, NA23_PARAMS.C, strict=True)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            estimate_parameters(mixed, NA23_PARAMS.C, consistency_threshold=1.5)

    def test_bad_C(self):
        with pytest.raises(ValueError):
            estimate_parameters(time_series(full_superposition(), NA23_PARAMS, 1e-3, 5), 0.0)


class TestAddNoise:
    def setup_method(self):
        self.series = time_series(full_superposition(), NA23_PARAMS, 1.5e-3, 40)

    def test_zero_sigma_identity(self):
        out = add_noise(self.series, 0.0, 1)
        assert all(a[1] == b[1] and a[0] == b[0] for a, b in zip(out, self.series))

    def test_seeded(self):
        a, b = add_noise(self.series, 0.01, 5), add_noise(self.series, 0.01, 5)
        assert all(x[1] == y[1] for x, y in zip(a, b))

    def test_valid_matrices(self):
        for _, d in add_noise(self.series, 0.05, 2):
            m = np.asarray(d)
            assert_allclose(m, m.conj().T)
            assert abs(np.trace(m)) < 1e-12

    def test_rms(self):
        zeros = [(0.0, np.zeros((4, 4)))] * 625  # 10^4 off-diagonal draws
        out = add_noise(zeros, 0.01, 0)
        off = np.array([np.asarray(d)[~np.eye(4, dtype=bool)] for _, d in out]).ravel()
        # hermitizing averages two draws: each of re, im has width sigma/sqrt(2)
        assert_allclose(np.sqrt(np.mean(np.abs(off) ** 2)), 0.01, rtol=0.03)

    def test_negative_sigma(self):
        with pytest.raises(ValueError):
            add_noise(self.series, -1.0, 0)
