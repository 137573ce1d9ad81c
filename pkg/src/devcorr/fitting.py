"""Recover relaxation parameters from deviation-matrix time series.

Six linear combinations of matrix elements each decay as a single exponential:

==========  ===============================  =========  ==================
name        combination                      offset     rate
==========  ===============================  =========  ==================
c01_23      d01 + d23                        0          C (J0 + J1)
c02_13      d02 + d13                        0          C (J0 + J2)
c12         d12                              0          C (J1 + J2)
pop_R2      d00 + d11 - d22 - d33            8          2 C J2
pop_R1      -d00 + d11 + d22 - d33           0          2 C (J1 + J2)
pop_R3      d00 - d11 + d22 - d33            4          2 C J1
==========  ===============================  =========  ==================

The coherence rates give J0, J1, J2 through a fixed 3x3 linear system; the
population rates give a second, independent estimate of J1 and J2 that is used
as a consistency check, and the population amplitudes are R1, R2, R3.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import DeviationMatrix
from .errors import (
    DegenerateSignal,
    EmptySeries,
    FitDivergence,
    InconsistentFits,
    InconsistentFitsWarning,
)
from .relaxation import POPULATION_OFFSETS

Series = Sequence[tuple[float, DeviationMatrix]]

COMBINATION_OFFSETS = {
    "c01_23": 0.0,
    "c02_13": 0.0,
    "c12": 0.0,
    "pop_R2": POPULATION_OFFSETS["R2"],
    "pop_R1": POPULATION_OFFSETS["R1"],
    "pop_R3": POPULATION_OFFSETS["R3"],
}

# coherence rates / C = COHERENCE_SYSTEM @ (J0, J1, J2)
COHERENCE_SYSTEM = np.array([[1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])
# population rates / (2C) = POPULATION_SYSTEM @ (J1, J2), rows ordered R3, R2, R1
POPULATION_SYSTEM = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])

DEFAULT_NOISE_FLOOR = 1e-9


def combinations(series: Series) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Times and the six single-exponential signals of a time series."""
    if len(series) == 0:
        raise EmptySeries("time series is empty")
    t = np.array([float(ti) for ti, _ in series])
    m = np.array([np.asarray(d) for _, d in series])
    p = np.real(np.diagonal(m, axis1=1, axis2=2))
    signals = {
        "c01_23": m[:, 0, 1] + m[:, 2, 3],
        "c02_13": m[:, 0, 2] + m[:, 1, 3],
        "c12": m[:, 1, 2].copy(),
        "pop_R2": p[:, 0] + p[:, 1] - p[:, 2] - p[:, 3],
        "pop_R1": -p[:, 0] + p[:, 1] + p[:, 2] - p[:, 3],
        "pop_R3": p[:, 0] - p[:, 1] + p[:, 2] - p[:, 3],
    }
    return t, signals


@dataclass(frozen=True)
class ExpFitResult:
    """``offset + amplitude * exp(-rate * t)``; amplitude is complex for complex signals."""

    amplitude: complex | float
    rate: float
    offset: float
    residual_rms: float
    amplitude_err: float = 0.0
    rate_err: float = 0.0
    offset_err: float = 0.0
    iterations: int = 0

    def __call__(self, t):
        return self.offset + self.amplitude * np.exp(-self.rate * np.asarray(t, dtype=float))


class _Model:
    """Parameter vector layout for the three fit flavours."""

    def __init__(self, t, y, offset):
        self.t = t
        self.y = y
        self.is_complex = np.iscomplexobj(y)
        self.fixed_offset = offset

    def unpack(self, p):
        if self.is_complex:
            return p[0] + 1j * p[1], p[2], self.fixed_offset
        if self.fixed_offset is None:
            return p[0], p[1], p[2]
        return p[0], p[1], self.fixed_offset

    def pack(self, a, k, c):
        if self.is_complex:
            return np.array([a.real, a.imag, k])
        if self.fixed_offset is None:
            return np.array([a, k, c])
        return np.array([a, k])

    def residual(self, p):
        a, k, c = self.unpack(p)
        r = self.y - (c + a * np.exp(-k * self.t))
        return np.concatenate([r.real, r.imag]) if self.is_complex else r

    def jacobian(self, p):
        # Jacobian of the model (= minus that of the residual)
        a, k, _ = self.unpack(p)
        e = np.exp(-k * self.t)
        dk = -a * self.t * e
        if self.is_complex:
            z = np.zeros_like(e)
            return np.column_stack([np.concatenate([e, z]), np.concatenate([z, e]), np.concatenate([dk.real, dk.imag])])
        cols = [e, dk] if self.fixed_offset is not None else [e, dk, np.ones_like(e)]
        return np.column_stack(cols)

    def scales(self, p):
        a, k, c = self.unpack(p)
        amp = abs(a)
        if self.is_complex:
            return np.array([amp, amp, abs(k)])
        if self.fixed_offset is None:
            return np.array([amp, abs(k), max(abs(c), amp)])
        return np.array([amp, abs(k)])


def _log_linear_start(t, z):
    """Rate from a straight-line fit of log|z| over the points well above the noise."""
    mag = np.abs(z)
    keep = mag > 0.1 * mag.max()
    if keep.sum() < 2:
        keep = np.zeros_like(keep)
        keep[np.argsort(-mag)[:2]] = True
    slope, _ = np.polyfit(t[keep], np.log(mag[keep]), 1)
    k = -slope
    if not np.isfinite(k) or k <= 0:
        k = 1.0 / max(t[-1] - t[0], np.finfo(float).tiny)
    return k


def fit_exponential(
    t,
    y,
    known_offset: float | None = None,
    *,
    noise_floor: float = DEFAULT_NOISE_FLOOR,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> ExpFitResult:
    """Least-squares fit of ``offset + amplitude * exp(-rate * t)``.

    Complex ``y`` is fitted on real and imaginary parts jointly with a shared
    rate; its offset is ``known_offset`` or 0. Starts from a log-linear fit of
    the offset-subtracted data, then runs damped Gauss-Newton until every
    parameter moves by less than ``tol`` relative.

    Raises ``DegenerateSignal`` when the data never leave the offset by more
    than ``noise_floor`` and ``FitDivergence`` when the iteration fails.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y)
    if y.dtype.kind not in "fc":
        y = y.astype(float)
    if len(t) != len(y):
        raise ValueError("t and y must have the same length")
    if len(t) < 3:
        raise ValueError("need at least 3 points to fit an exponential")
    if np.any(np.diff(t) <= 0):
        raise ValueError("t must be strictly increasing")
    if np.iscomplexobj(y) and known_offset is None:
        known_offset = 0.0

    if known_offset is not None:
        z = y - known_offset
        if np.max(np.abs(z)) <= noise_floor:
            raise DegenerateSignal(f"signal stays within {noise_floor:g} of its offset {known_offset:g}")
        c0 = known_offset
    else:
        if np.ptp(y) <= noise_floor:
            raise DegenerateSignal(f"signal is flat to within {noise_floor:g}")
        c0 = y[-1]
        z = y - c0

    model = _Model(t, y, known_offset)
    k0 = _log_linear_start(t, z)
    e = np.exp(-k0 * t)
    if known_offset is None:
        # amplitude and offset by linear least squares at the start rate
        (a0, c0), *_ = np.linalg.lstsq(np.column_stack([e, np.ones_like(e)]), y, rcond=None)
    else:
        a0 = np.dot(e, z) / np.dot(e, e)
    p = model.pack(a0, k0, c0)

    r = model.residual(p)
    ssr = float(r @ r)
    converged = False
    for it in range(1, max_iter + 1):
        jac = model.jacobian(p)
        step, *_ = np.linalg.lstsq(jac, r, rcond=None)
        scale = np.maximum(model.scales(p), np.finfo(float).tiny)
        if np.all(np.abs(step) <= tol * scale):
            p = p + step
            r = model.residual(p)
            ssr = float(r @ r)
            converged = True
            break
        lam = 1.0
        for _ in range(50):
            trial = p + lam * step
            r_trial = model.residual(trial)
            ssr_trial = float(r_trial @ r_trial)
            if np.isfinite(ssr_trial) and ssr_trial <= ssr:
                break
            lam *= 0.5
        else:
            raise FitDivergence("Gauss-Newton line search could not reduce the residual")
        p, r, ssr = trial, r_trial, ssr_trial
        if np.all(np.abs(lam * step) <= tol * scale):
            converged = True
            break
    if not converged:
        raise FitDivergence(f"Gauss-Newton did not converge in {max_iter} iterations")

    a, k, c = model.unpack(p)
    if not np.all(np.isfinite(p)):
        raise FitDivergence("fit produced non-finite parameters")
    if k < 0:
        raise FitDivergence(f"fitted rate is negative ({k:.3g}); signal is growing")

    jac = model.jacobian(p)
    dof = len(r) - len(p)
    s2 = ssr / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.pinv(jac.T @ jac)
    var = np.clip(np.diag(cov), 0.0, None)
    if model.is_complex:
        a_err, k_err, c_err = np.sqrt(var[0] + var[1]), np.sqrt(var[2]), 0.0
    else:
        a_err, k_err = np.sqrt(var[0]), np.sqrt(var[1])
        c_err = np.sqrt(var[2]) if known_offset is None else 0.0

    return ExpFitResult(
        amplitude=complex(a) if model.is_complex else float(a),
        rate=float(k),
        offset=float(c),
        residual_rms=float(np.sqrt(ssr / len(t))),
        amplitude_err=float(a_err),
        rate_err=float(k_err),
        offset_err=float(c_err),
        iterations=it,
    )


@dataclass(frozen=True)
class FitReport:
    J0: float
    J1: float
    J2: float
    J0_err: float
    J1_err: float
    J2_err: float
    R1: float
    R2: float
    R3: float
    R1_err: float
    R2_err: float
    R3_err: float
    J1_pop: float
    J2_pop: float
    consistency_gap: float
    C: float
    fits: dict[str, ExpFitResult] = field(default_factory=dict, repr=False)

    def as_dict(self) -> dict[str, float]:
        keys = [
            "C", "J0", "J0_err", "J1", "J1_err", "J2", "J2_err",
            "R1", "R1_err", "R2", "R2_err", "R3", "R3_err",
            "J1_pop", "J2_pop", "consistency_gap",
        ]
        out = {k: getattr(self, k) for k in keys}
        for name, f in self.fits.items():
            out[f"rate_{name}"] = f.rate
            out[f"rate_{name}_err"] = f.rate_err
        return out


def estimate_parameters(
    series: Series,
    C: float,
    *,
    consistency_threshold: float = 0.25,
    strict: bool = False,
    noise_floor: float = DEFAULT_NOISE_FLOOR,
) -> FitReport:
    """Fit all six combinations and assemble spectral densities and R amplitudes.

    ``consistency_gap`` is the larger relative difference between the
    coherence-derived and population-derived values of J1 and J2. Exceeding
    ``consistency_threshold`` warns, or raises ``InconsistentFits`` if ``strict``.
    """
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    t, signals = combinations(series)
    fits = {
        name: fit_exponential(t, sig, COMBINATION_OFFSETS[name], noise_floor=noise_floor)
        for name, sig in signals.items()
    }

    k_coh = np.array([fits[n].rate for n in ("c01_23", "c02_13", "c12")])
    k_coh_var = np.array([fits[n].rate_err for n in ("c01_23", "c02_13", "c12")]) ** 2
    inv = np.linalg.inv(COHERENCE_SYSTEM)
    J = inv @ k_coh / C
    J_err = np.sqrt(np.diag(inv @ np.diag(k_coh_var) @ inv.T)) / C

    k_pop = np.array([fits[n].rate for n in ("pop_R3", "pop_R2", "pop_R1")])
    (J1_pop, J2_pop), *_ = np.linalg.lstsq(POPULATION_SYSTEM, k_pop / (2 * C), rcond=None)
    gap = max(abs(J[1] - J1_pop) / abs(J1_pop), abs(J[2] - J2_pop) / abs(J2_pop))

    if gap > consistency_threshold:
        msg = (
            f"coherence and population fits disagree: J1 {J[1]:.4g} vs {J1_pop:.4g}, "
            f"J2 {J[2]:.4g} vs {J2_pop:.4g} (gap {gap:.1%})"
        )
        if strict:
            raise InconsistentFits(msg)
        warnings.warn(msg, InconsistentFitsWarning, stacklevel=2)

    return FitReport(
        J0=float(J[0]), J1=float(J[1]), J2=float(J[2]),
        J0_err=float(J_err[0]), J1_err=float(J_err[1]), J2_err=float(J_err[2]),
        R1=fits["pop_R1"].amplitude, R2=fits["pop_R2"].amplitude, R3=fits["pop_R3"].amplitude,
        R1_err=fits["pop_R1"].amplitude_err,
        R2_err=fits["pop_R2"].amplitude_err,
        R3_err=fits["pop_R3"].amplitude_err,
        J1_pop=float(J1_pop), J2_pop=float(J2_pop),
        consistency_gap=float(gap),
        C=float(C),
        fits=fits,
    )


def add_noise(series: Series, sigma: float, seed) -> list[tuple[float, DeviationMatrix]]:
    """Add Gaussian noise of width ``sigma`` to every real and imaginary entry.

    Each noisy matrix is made Hermitian again (averaged with its conjugate
    transpose) and its trace removed from the diagonal. The generator is
    ``numpy.random.default_rng(seed)``.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return list(series)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    out = []
    for t, d in series:
        noise = rng.normal(0.0, sigma, (4, 4)) + 1j * rng.normal(0.0, sigma, (4, 4))
        out.append((t, DeviationMatrix.from_array(np.asarray(d) + noise, hermitize=True)))
    return out
