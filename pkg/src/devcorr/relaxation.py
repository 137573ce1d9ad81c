"""Closed-form quadrupolar relaxation of a spin-3/2 deviation matrix.

The environment is characterised by a coupling constant ``C`` (s^-2) and three
reduced spectral densities ``J0, J1, J2`` (s). Every element of the deviation
matrix relaxes as a sum of exponentials; populations relax towards the thermal
equilibrium ``diag(3, 1, -1, -3)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DeviationMatrix
from .errors import NegativeTime, ZeroRate
from .states import spin_operators

EQUILIBRIUM_POPULATIONS = np.array([3.0, 1.0, -1.0, -3.0])
# steady-state values of the three population combinations (d, e, f below)
POPULATION_OFFSETS = {"R2": 8.0, "R1": 0.0, "R3": 4.0}


@dataclass(frozen=True)
class RelaxationParams:
    C: float
    J0: float
    J1: float
    J2: float

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError(f"C must be positive, got {self.C}")
        for name in ("J0", "J1", "J2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def rates(self) -> dict[str, float]:
        """Decay rates (1/s) of the six single-exponential combinations."""
        C, J0, J1, J2 = self.C, self.J0, self.J1, self.J2
        return {
            "c01_23": C * (J0 + J1),
            "c02_13": C * (J0 + J2),
            "c12": C * (J1 + J2),
            "pop_R2": 2 * C * J2,
            "pop_R1": 2 * C * (J1 + J2),
            "pop_R3": 2 * C * J1,
        }


# values extracted from the 23Na lyotropic sample
NA23_PARAMS = RelaxationParams(C=12e9, J0=17e-9, J1=3.0e-9, J2=3.4e-9)


@dataclass(frozen=True)
class RCoefficients:
    R1: float
    R2: float
    R3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.R1, self.R2, self.R3)


@dataclass(frozen=True)
class TimeConstants:
    tau_L1: float
    tau_L2: float
    tau_T: float


def r_coefficients(d0) -> RCoefficients:
    """Population amplitudes fixed by the initial state."""
    p = np.real(np.diag(np.asarray(d0)))
    return RCoefficients(
        R1=float(-p[0] + p[1] + p[2] - p[3]),
        R2=float(p[0] + p[1] - p[2] - p[3] - 8.0),
        R3=float(p[0] - p[1] + p[2] - p[3] - 4.0),
    )


def evolve(d0, p: RelaxationParams, t: float) -> DeviationMatrix:
    if t < 0:
        raise NegativeTime(f"evolution time must be non-negative, got {t}")
    d0 = np.asarray(d0, dtype=complex)
    C, J0, J1, J2 = p.C, p.J0, p.J1, p.J2
    e_j2 = np.exp(-2 * C * J2 * t)
    e_j1 = np.exp(-2 * C * J1 * t)
    e_t = np.exp(-C * (J1 + J2) * t)

    out = np.zeros((4, 4), dtype=complex)
    s, dd = d0[0, 1] + d0[2, 3], d0[0, 1] - d0[2, 3]
    decay = np.exp(-C * (J0 + J1) * t)
    out[0, 1] = 0.5 * (s + dd * e_j2) * decay
    out[2, 3] = 0.5 * (s - dd * e_j2) * decay
    s, dd = d0[0, 2] + d0[1, 3], d0[0, 2] - d0[1, 3]
    decay = np.exp(-C * (J0 + J2) * t)
    out[0, 2] = 0.5 * (s + dd * e_j1) * decay
    out[1, 3] = 0.5 * (s - dd * e_j1) * decay
    out[0, 3] = d0[0, 3] * e_t
    out[1, 2] = d0[1, 2] * e_t
    out = out + out.conj().T

    r = r_coefficients(d0)
    a1 = r.R1 * e_t * e_t
    a2 = r.R2 * e_j2
    a3 = r.R3 * e_j1
    pops = EQUILIBRIUM_POPULATIONS + 0.25 * np.array(
        [-(a1 - a2 - a3), a1 + a2 - a3, a1 - a2 + a3, -(a1 + a2 + a3)]
    )
    out[np.diag_indices(4)] = pops
    return DeviationMatrix(out)


def time_series(d0, p: RelaxationParams, dt: float, n: int) -> list[tuple[float, DeviationMatrix]]:
    """``[(k dt, evolve(d0, p, k dt)) for k = 1..n]``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return [(k * dt, evolve(d0, p, k * dt)) for k in range(1, n + 1)]


def longitudinal_magnetization(d) -> float:
    """``Tr(Iz d)``; equals 10 at thermal equilibrium."""
    m = np.array([1.5, 0.5, -0.5, -1.5])
    return float(np.dot(m, np.real(np.diag(np.asarray(d)))))


def longitudinal_model(d0, p: RelaxationParams, t) -> np.ndarray:
    """``Tr(Iz d(t)) = 10 + R2 exp(-2 C J2 t) + (R3/2) exp(-2 C J1 t)``."""
    r = r_coefficients(d0)
    t = np.asarray(t, dtype=float)
    return 10.0 + r.R2 * np.exp(-2 * p.C * p.J2 * t) + 0.5 * r.R3 * np.exp(-2 * p.C * p.J1 * t)


@dataclass(frozen=True)
class TransverseMagnetization:
    central: complex  # 2 * d[2, 1], the central-transition coherence only
    full: complex  # Tr((Ix + i Iy) d), including the sqrt(3)-weighted satellites


def transverse_magnetization(d) -> TransverseMagnetization:
    d = np.asarray(d, dtype=complex)
    ops = spin_operators()
    iplus = ops.Ix + 1j * ops.Iy
    return TransverseMagnetization(central=complex(2 * d[2, 1]), full=complex(np.trace(iplus @ d)))


def time_constants(p: RelaxationParams) -> TimeConstants:
    if p.J1 == 0 or p.J2 == 0:
        raise ZeroRate("J1 and J2 must be nonzero to define the relaxation time constants")
    return TimeConstants(
        tau_L1=1.0 / (2 * p.C * p.J1),
        tau_L2=1.0 / (2 * p.C * p.J2),
        tau_T=1.0 / (p.C * (p.J1 + p.J2)),
    )
