"""Initial deviation matrices and spin-3/2 operators.

Level order follows the logical labelling m = 3/2, 1/2, -1/2, -3/2
<-> |00>, |01>, |10>, |11>.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import TRACE_TOL, DeviationMatrix
from .errors import TraceViolation

_S = 1 / np.sqrt(2)

BELL_VECTORS = {
    "psi+": np.array([_S, 0, 0, _S], dtype=complex),
    "psi-": np.array([_S, 0, 0, -_S], dtype=complex),
    "phi+": np.array([0, _S, _S, 0], dtype=complex),
    "phi-": np.array([0, _S, -_S, 0], dtype=complex),
}

_ALIASES = {
    "Ψ+": "psi+", "Ψ⁺": "psi+", "Ψ-": "psi-", "Ψ⁻": "psi-", "psi−": "psi-",
    "Φ+": "phi+", "Φ⁺": "phi+", "Φ-": "phi-", "Φ⁻": "phi-", "phi−": "phi-",
}


@dataclass(frozen=True)
class SpinOperators:
    Iz: np.ndarray
    Ix: np.ndarray
    Iy: np.ndarray
    Isq: np.ndarray


def spin_operators() -> SpinOperators:
    m = np.array([1.5, 0.5, -0.5, -1.5])
    iz = np.diag(m).astype(complex)
    # <m+1|I+|m> = sqrt(I(I+1) - m(m+1)); higher m sits at lower index
    iplus = np.zeros((4, 4), dtype=complex)
    for j in range(1, 4):
        iplus[j - 1, j] = np.sqrt(3.75 - m[j] * (m[j] + 1))
    iminus = iplus.conj().T
    ix = 0.5 * (iplus + iminus)
    iy = -0.5j * (iplus - iminus)
    isq = ix @ ix + iy @ iy + iz @ iz
    return SpinOperators(Iz=iz, Ix=ix, Iy=iy, Isq=isq)


@dataclass(frozen=True)
class HamiltonianParams:
    """Larmor and quadrupolar angular frequencies (rad/s)."""

    omega_L: float
    omega_Q: float

    def __post_init__(self):
        if abs(self.omega_L) <= abs(self.omega_Q):
            warnings.warn(
                "first-order quadrupolar treatment assumes |omega_L| >> |omega_Q|",
                RuntimeWarning,
                stacklevel=3,
            )


def hamiltonian(h: HamiltonianParams) -> np.ndarray:
    ops = spin_operators()
    return -h.omega_L * ops.Iz + h.omega_Q * (3 * ops.Iz @ ops.Iz - ops.Isq)


def transition_frequencies(h: HamiltonianParams) -> np.ndarray:
    """Single-quantum transition frequencies between adjacent levels, ascending.

    For ``omega_Q > 0`` these are ``omega_L - 6 omega_Q, omega_L, omega_L + 6 omega_Q``.
    """
    energies = np.real(np.diag(hamiltonian(h)))
    return np.sort(np.diff(energies))


def omega_q_from_nu_q(nu_q: float) -> float:
    """Quadrupolar angular frequency from the line splitting ``nu_Q = 6 omega_Q / 2 pi`` (Hz)."""
    return 2 * np.pi * nu_q / 6


@dataclass(frozen=True)
class XStateParams:
    a: float
    b: float
    c: float
    d: float
    e: complex = 0j
    f: complex = 0j


def x_pseudopure(p: XStateParams) -> DeviationMatrix:
    tr = p.a + p.b + p.c + p.d
    if abs(tr) > TRACE_TOL:
        raise TraceViolation(f"populations must sum to zero, got {tr:.3g}")
    m = np.diag([p.a, p.b, p.c, p.d]).astype(complex)
    m[0, 3], m[3, 0] = p.f, np.conj(p.f)
    m[1, 2], m[2, 1] = p.e, np.conj(p.e)
    return DeviationMatrix(m)


def pseudopure(vec, alpha: float = 1.0) -> DeviationMatrix:
    """``alpha * (|v><v| - 1/4)`` for a (normalised on the fly) state vector."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    proj = np.outer(v, v.conj())
    return DeviationMatrix(alpha * (proj - 0.25 * np.eye(4)))


def bell_pseudopure(which: str, alpha: float = 1.0) -> DeviationMatrix:
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    key = _ALIASES.get(which, which).lower()
    try:
        v = BELL_VECTORS[key]
    except KeyError:
        raise ValueError(f"unknown Bell state {which!r}; expected one of {sorted(BELL_VECTORS)}") from None
    # entries are exact quarters; rebuild them so 1/sqrt(2)**2 leaves no rounding
    d = np.round((np.outer(v, v.conj()).real - 0.25 * np.eye(4)) * 4) / 4
    return DeviationMatrix(alpha * d)


def computational(label: str, alpha: float = 1.0) -> DeviationMatrix:
    """Pseudopure deviation of a computational basis state such as ``"01"``."""
    if len(label) != 2 or set(label) - {"0", "1"}:
        raise ValueError(f"computational label must be two bits, got {label!r}")
    v = np.zeros(4, dtype=complex)
    v[int(label, 2)] = 1
    return pseudopure(v, alpha)


def equilibrium_deviation() -> DeviationMatrix:
    """Thermal equilibrium deviation ``2 Iz = diag(3, 1, -1, -3)``."""
    return DeviationMatrix(np.diag([3.0, 1.0, -1.0, -3.0]))


def random_x(seed, alpha: float = 1.0) -> DeviationMatrix:
    """Seeded random X-type pseudopure deviation.

    A pure state whose projector has the X pattern lives entirely in one of the
    two sectors span{|00>,|11>} or span{|01>,|10>}. The generator
    (``numpy.random.default_rng``, PCG64) draws the sector with a fair coin and
    then a Gaussian complex 2-vector, normalised.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    sector = (0, 3) if rng.integers(2) == 0 else (1, 2)
    amp = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    amp /= np.linalg.norm(amp)
    v = np.zeros(4, dtype=complex)
    v[list(sector)] = amp
    return pseudopure(v, alpha)
