"""Dense 4-level (two logical qubit) matrix primitives.

Every state is carried as a deviation matrix ``d`` with ``rho = 1/4 + eps * d``.
Basis order is ``|00>, |01>, |10>, |11>``; party A is the left qubit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import NonPhysicalState, NotHermitian, TraceViolation

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIG_TOL = 1e-12

Party = Literal["A", "B"]


@dataclass(frozen=True, eq=False)
class DeviationMatrix:
    """Traceless Hermitian 4x4 matrix. Stored read-only."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"deviation matrix must be 4x4, got shape {m.shape}")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > HERMITIAN_TOL:
            raise NotHermitian(f"matrix is not Hermitian (max |M - M^H| = {herm_err:.3g})")
        tr = np.trace(m)
        if abs(tr) > TRACE_TOL:
            raise TraceViolation(f"deviation matrix must be traceless (trace = {tr:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.mat.copy() if copy else self.mat
        return self.mat.astype(dtype)

    def __getitem__(self, idx):
        return self.mat[idx]

    def __eq__(self, other):
        if not isinstance(other, DeviationMatrix):
            return NotImplemented
        return bool(np.array_equal(self.mat, other.mat))

    __hash__ = None

    @classmethod
    def from_array(cls, m, *, hermitize: bool = False) -> "DeviationMatrix":
        """Build from any array; with ``hermitize`` the Hermitian part is taken
        and the trace removed first (useful for noisy reconstructions)."""
        m = np.asarray(m, dtype=complex)
        if hermitize:
            m = 0.5 * (m + m.conj().T)
            m = m - np.trace(m).real / 4 * np.eye(4)
        return cls(m)

    def scaled(self, alpha: float) -> "DeviationMatrix":
        return DeviationMatrix(alpha * self.mat)


@dataclass(frozen=True, eq=False)
class ThermalState:
    """High-temperature state ``rho = 1/4 + epsilon * deviation``."""

    epsilon: float
    deviation: DeviationMatrix

    def __post_init__(self):
        if not isinstance(self.deviation, DeviationMatrix):
            object.__setattr__(self, "deviation", DeviationMatrix(self.deviation))
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        lam_min = np.linalg.eigvalsh(self.deviation.mat)[0]
        if 0.25 + self.epsilon * lam_min < -EIG_TOL:
            raise NonPhysicalState(
                f"rho has negative eigenvalue {0.25 + self.epsilon * lam_min:.3g}; "
                f"reduce epsilon below {0.25 / -lam_min:.3g}"
            )

    @property
    def rho(self) -> np.ndarray:
        return 0.25 * np.eye(4) + self.epsilon * self.deviation.mat


def partial_trace(m, keep: Party) -> np.ndarray:
    """Reduced 2x2 matrix of the kept party (the other one is traced out)."""
    t = np.asarray(m, dtype=complex).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("jijk->ik", t)
    raise ValueError(f"party must be 'A' or 'B', got {keep!r}")


def trace_square(m) -> float:
    m = np.asarray(m)
    return float(np.real(np.trace(m @ m)))


def _checked_eigh(rho) -> tuple[np.ndarray, np.ndarray]:
    rho = np.asarray(rho, dtype=complex)
    tr = np.trace(rho).real
    if abs(tr - 1) > TRACE_TOL:
        raise NonPhysicalState(f"density matrix trace is {tr!r}, expected 1")
    lam, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if lam[0] < -EIG_TOL:
        raise NonPhysicalState(f"density matrix has negative eigenvalue {lam[0]:.3g}")
    # snap eigenvalues within EIG_TOL of 0 or 1 onto the boundary
    lam = np.where(lam < EIG_TOL, 0.0, lam)
    lam = np.where(lam > 1 - EIG_TOL, 1.0, lam)
    return lam, vecs


def von_neumann_entropy(rho) -> float:
    """Entropy in bits; ``0 log 0 = 0``."""
    lam, _ = _checked_eigh(rho)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log2(lam)))


def _expanded_entropy(n: int, epsilon: float, dev) -> float:
    # log2(n) - (n/2)(eps^2/ln2) Tr dev^2, valid for traceless dev
    return np.log2(n) - 0.5 * n * epsilon**2 / np.log(2) * trace_square(dev)


def entropy_expansion(state: ThermalState) -> float:
    """Second-order small-epsilon entropy of the full 4-level state, in bits."""
    return float(_expanded_entropy(4, state.epsilon, state.deviation.mat))


def marginal_entropy_expansion(epsilon: float, marginal) -> float:
    """Second-order entropy of ``1/2 + epsilon * marginal`` for a traceless 2x2 marginal."""
    return float(_expanded_entropy(2, epsilon, marginal))


def _one_plus_x_log1p_minus_x(x: np.ndarray) -> np.ndarray:
    # (1+x) ln(1+x) - x without cancellation for small |x|
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-2
    xs = x[small]
    series = np.zeros_like(xs)
    power = xs * xs
    for k in range(2, 12):
        series += (-1) ** k * power / (k * (k - 1))
        power = power * xs
    out[small] = series
    xl = x[~small]
    out[~small] = (1 + xl) * np.log1p(xl) - xl
    return out


def entropy_deficit(dev_eigenvalues, epsilon: float, n: int) -> np.ndarray:
    """``log2(n) - S(1/n + epsilon*dev)`` computed from the eigenvalues of the
    traceless ``dev`` (last axis). Exact, and accurate for tiny epsilon where
    the direct entropy would lose everything to cancellation."""
    x = n * epsilon * np.asarray(dev_eigenvalues, dtype=float)
    if np.any(x < -1 - EIG_TOL * n):
        raise NonPhysicalState("state has a negative eigenvalue")
    x = np.maximum(x, -1.0)
    return np.sum(_one_plus_x_log1p_minus_x(x), axis=-1) / (n * np.log(2))


def _psd_sqrt(rho) -> np.ndarray:
    lam, vecs = _checked_eigh(rho)
    return (vecs * np.sqrt(lam)) @ vecs.conj().T


def fidelity(ideal, prepared) -> float:
    """Uhlmann fidelity ``Tr sqrt(sqrt(a) b sqrt(a))``.

    Evaluated as the nuclear norm of ``sqrt(a) sqrt(b)``, which is the same
    number, symmetric by construction, and equals ``|<psi|phi>|`` on pure states.
    """
    s = np.linalg.svd(_psd_sqrt(ideal) @ _psd_sqrt(prepared), compute_uv=False)
    return float(np.clip(np.sum(s), 0.0, 1.0))
