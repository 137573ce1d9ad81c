"""Independent reference implementations used only by the tests.

None of these share code paths with the package beyond numpy itself.
"""
from __future__ import annotations

import numpy as np

PAULI = [
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]
ID2 = np.eye(2, dtype=complex)


def correlation_tensor(d) -> np.ndarray:
    """T_ij with d = (1/4)[a.s x 1 + 1 x b.s + sum T_ij s_i x s_j]."""
    d = np.asarray(d)
    return np.array([[np.trace(np.kron(si, sj) @ d).real for sj in PAULI] for si in PAULI])


def svd_oracle(d) -> tuple[float, float, float]:
    """Closed-form (I, K, Q) of the expansion: ||T||^2/2, s_max^2/2 and the rest."""
    s = np.linalg.svd(correlation_tensor(d), compute_uv=False)
    i_val = 0.5 * np.sum(s**2)
    k_val = 0.5 * s[0] ** 2
    return i_val, k_val, i_val - k_val


def _kets(n: int) -> np.ndarray:
    """Both outcome kets for an n x n angle grid, shape (n*n, 2, 2) [grid, outcome, component]."""
    th = np.linspace(0, np.pi, n)
    ph = np.linspace(0, 2 * np.pi, n, endpoint=False)
    T, P = np.meshgrid(th, ph, indexing="ij")
    T, P = T.ravel(), P.ravel()
    e = np.exp(1j * P)
    # theta is the Bloch polar angle, so [0, pi] covers the whole sphere
    up = np.stack([np.cos(T / 2), e * np.sin(T / 2)], axis=-1)
    down = np.stack([-np.conj(e) * np.sin(T / 2), np.cos(T / 2) + 0j], axis=-1)
    return np.stack([up, down], axis=1)


def brute_force_K(d, n: int = 48, chunk: int = 128) -> float:
    """Grid maximum of the classical mutual information (eps^2/ln2 units).

    Outcome probabilities p_ij = 1/4 + eps * delta_ij with
    delta_ij = <a_i b_j| d |a_i b_j>; to second order the mutual information
    of this distribution is 2 sum delta^2 - sum delta_A^2 - sum delta_B^2.
    The Bloch polar angle covers the full sphere here, so every measurement
    axis is sampled.
    """
    r = np.asarray(d, dtype=complex).reshape(2, 2, 2, 2)
    kets = _kets(n)  # (G, 2, 2)
    best = -np.inf
    for start in range(0, len(kets), chunk):
        ka = kets[start:start + chunk]
        # w[a, i, l, n] = sum_km conj(a_ik) r[k,l,m,n] a_im
        w = np.einsum("aik,klmn,aim->ailn", ka.conj(), r, ka)
        delta = np.einsum("bjl,ailn,bjn->aibj", kets.conj(), w, kets).real
        da = delta.sum(axis=3)  # marginal of A: sum over j
        db = delta.sum(axis=1)
        mi = 2 * np.sum(delta**2, axis=(1, 3)) - np.sum(da**2, axis=1) - np.sum(db**2, axis=2)
        best = max(best, float(mi.max()))
    return best


def entropy_bits(rho) -> float:
    """Von Neumann entropy by direct diagonalisation (reference only)."""
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-300]
    return float(-np.sum(lam * np.log2(lam)))


def random_deviation(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random traceless Hermitian 4x4 matrix with spectral radius ``scale``."""
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = a + a.conj().T
    h -= np.trace(h).real / 4 * np.eye(4)
    return scale * h / np.max(np.abs(np.linalg.eigvalsh(h)))


def random_unitary(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# pure state with populations p/4 + 1/4, scaled by 4: a full superposition
# (every coherence nonzero) whose R amplitudes are (-1.9, -7.9, -4.5)
FULL_SUPERPOSITION_P = np.array([0.375, -0.325, -0.625, 0.575])


def full_superposition():
    from devcorr.states import pseudopure

    return pseudopure(np.sqrt(FULL_SUPERPOSITION_P / 4 + 0.25), alpha=4.0)
