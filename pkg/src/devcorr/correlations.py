"""Classical and quantum correlations of deviation matrices.

Two evaluation paths:

* expansion: second order in epsilon, reported in units of ``eps**2 / ln 2``
  (so the numbers do not depend on epsilon). ``I``, the symmetric classical
  correlation ``K`` (both parties measured) and ``Q = I - K``.
* exact: full von Neumann entropies of ``rho = 1/4 + eps * d`` in bits, for
  mutual information and the one-sided discord ``D`` / classical part ``C``.

Both extremisations run over local projective measurements, parametrised per
party by ``|par> = cos(t)|0> + e^{ip} sin(t)|1>`` and
``|perp> = e^{-ip} sin(t)|0> - cos(t)|1>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from scipy.optimize import minimize

from .core import DeviationMatrix, Party, ThermalState, entropy_deficit, partial_trace, trace_square
from .errors import OptimizerFailure

TWO_PI = 2 * np.pi
EXPANSION_UNITS = "eps^2/ln2"
BITS = "bits"
DEGENERATE_OUTCOME_TOL = 1e-14


def basis_vectors(theta, phi) -> tuple[np.ndarray, np.ndarray]:
    """Parallel and perpendicular kets, shape ``(..., 2)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s, ph = np.cos(theta), np.sin(theta), np.exp(1j * phi)
    par = np.stack([c + 0j, ph * s], axis=-1)
    perp = np.stack([s / ph, -c + 0j], axis=-1)
    return par, perp


def projector_pair(theta, phi) -> np.ndarray:
    """Projectors ``[P_par, P_perp]``, shape ``(..., 2, 2, 2)``."""
    par, perp = basis_vectors(theta, phi)
    kets = np.stack([par, perp], axis=-2)
    return kets[..., :, None] * kets[..., None, :].conj()


def canonical_angles(theta: float, phi: float) -> tuple[float, float]:
    """Representative of the same projector pair with theta in [0, pi/2], phi in [0, 2pi).

    Uses (theta, phi) ~ (2pi - theta, phi + pi) ~ (pi - theta, phi + pi).
    """
    theta = float(np.mod(theta, TWO_PI))
    if theta > np.pi:
        theta, phi = TWO_PI - theta, phi + np.pi
    if theta > np.pi / 2:
        theta, phi = np.pi - theta, phi + np.pi
    phi = float(np.mod(phi, TWO_PI))
    if phi == TWO_PI:
        phi = 0.0
    if theta == 0.0:
        phi = 0.0
    return theta, phi


@dataclass(frozen=True)
class MeasurementBasis:
    theta_A: float = 0.0
    phi_A: float = 0.0
    theta_B: float = 0.0
    phi_B: float = 0.0

    @classmethod
    def from_array(cls, x) -> "MeasurementBasis":
        return cls(*(float(v) for v in x))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta_A, self.phi_A, self.theta_B, self.phi_B)

    def projectors(self, party: Party) -> np.ndarray:
        if party == "A":
            return projector_pair(self.theta_A, self.phi_A)
        if party == "B":
            return projector_pair(self.theta_B, self.phi_B)
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")

    def canonical(self) -> "MeasurementBasis":
        return MeasurementBasis(
            *canonical_angles(self.theta_A, self.phi_A), *canonical_angles(self.theta_B, self.phi_B)
        )


COMPUTATIONAL = MeasurementBasis()


@dataclass(frozen=True)
class OptimizerConfig:
    """Coarse grid over every angle, then Nelder-Mead from the best grid points."""

    grid_points: int = 24
    n_starts: int = 5
    fatol: float = 1e-9
    xatol: float = 1e-7
    max_iter: int = 500
    tie_tol: float = 1e-12
    chunk: int = 16384


DEFAULT_OPTIMIZER = OptimizerConfig()


@dataclass(frozen=True)
class CorrelationReport:
    total_I: float
    classical_K: float
    quantum_Q: float
    optimal_basis: MeasurementBasis
    mode: Literal["expansion", "exact"] = "expansion"
    units: str = EXPANSION_UNITS


@dataclass(frozen=True)
class OneSidedReport:
    """Exact one-sided correlations (bits) for a measurement on ``measured_party``."""

    total_I: float
    classical_C: float
    discord_D: float
    measured_party: Party
    theta: float
    phi: float


# expansion path ------------------------------------------------------------


def mutual_information_expansion(d) -> float:
    """``2 Tr d^2 - Tr d_A^2 - Tr d_B^2`` in units of eps^2/ln2."""
    d = np.asarray(d)
    return 2 * trace_square(d) - trace_square(partial_trace(d, "A")) - trace_square(partial_trace(d, "B"))


def local_dephasing(d, party: Party, theta: float, phi: float) -> np.ndarray:
    """Non-selective projective measurement on one party only."""
    d = np.asarray(d, dtype=complex)
    eye = np.eye(2)
    out = np.zeros((4, 4), dtype=complex)
    for p in projector_pair(theta, phi):
        big = np.kron(p, eye) if party == "A" else np.kron(eye, p)
        out += big @ d @ big
    return out


def measured_deviation(d, basis: MeasurementBasis) -> DeviationMatrix:
    """Deviation matrix after non-selective local measurements on both parties."""
    d = np.asarray(d, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    for pa in basis.projectors("A"):
        for pb in basis.projectors("B"):
            p = np.kron(pa, pb)
            out += p @ d @ p
    return DeviationMatrix.from_array(out, hermitize=True)


def classical_mi_expansion(d, basis: MeasurementBasis) -> float:
    """Mutual information of the measured deviation, units eps^2/ln2."""
    return mutual_information_expansion(measured_deviation(d, basis))


def _dephasing_superop(theta, phi) -> np.ndarray:
    """Superoperator of a one-qubit non-selective measurement acting on the
    (row, col) index pair: ``M[(k,m),(k',m')] = sum_i P_i[k,k'] P_i[m',m]``."""
    p = projector_pair(theta, phi)
    m = np.einsum("...ikx,...iym->...kmxy", p, p)
    return m.reshape(m.shape[:-4] + (4, 4))


def _pair_layout(d: np.ndarray) -> np.ndarray:
    # d[(k,l),(m,n)] -> D[(k,m),(l,n)]: A indices on rows, B indices on columns
    return np.asarray(d, dtype=complex).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)


def _mi_from_pair_layout(e: np.ndarray) -> np.ndarray:
    # e[..., (k,m), (l,n)] = eta[k,l,m,n]
    t = e.reshape(e.shape[:-2] + (2, 2, 2, 2))
    ea = np.einsum("...kmll->...km", t)
    eb = np.einsum("...kkln->...ln", t)
    sq = lambda m: np.sum(np.abs(m) ** 2, axis=(-2, -1))
    return 2 * sq(e) - sq(ea) - sq(eb)


def _classical_mi_batch(d: np.ndarray, angles: np.ndarray) -> np.ndarray:
    ma = _dephasing_superop(angles[:, 0], angles[:, 1])
    mb = _dephasing_superop(angles[:, 2], angles[:, 3])
    e = ma @ _pair_layout(d) @ np.swapaxes(mb, -1, -2)
    return _mi_from_pair_layout(e)


def _classical_mi_product_grid(d: np.ndarray, one: np.ndarray) -> np.ndarray:
    """Objective on every (A, B) pair drawn from one list of single-party angles,
    flattened with A as the outer index."""
    m = len(one)
    sup = _dephasing_superop(one[:, 0], one[:, 1])
    left = (sup @ _pair_layout(d)).reshape(m * 4, 4)
    right = sup.reshape(m * 4, 4)
    e = (left @ right.T).reshape(m, 4, m, 4).transpose(0, 2, 1, 3)
    return _mi_from_pair_layout(e).reshape(-1)


# optimizer -----------------------------------------------------------------


def _angle_grid(n_parties: int, g: int) -> np.ndarray:
    thetas = np.linspace(0.0, np.pi, g)
    phis = np.linspace(0.0, TWO_PI, g, endpoint=False)
    one = np.stack(np.meshgrid(thetas, phis, indexing="ij"), axis=-1).reshape(-1, 2)
    if n_parties == 1:
        return one
    m = len(one)
    return np.hstack([np.repeat(one, m, axis=0), np.tile(one, (m, 1))])


def _canonical_x(x: np.ndarray) -> np.ndarray:
    out = []
    for k in range(0, len(x), 2):
        out.extend(canonical_angles(x[k], x[k + 1]))
    return np.array(out)


def _maximize(
    objective: Callable[[np.ndarray], np.ndarray],
    n_parties: int,
    cfg: OptimizerConfig,
    grid_objective: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[float, np.ndarray]:
    """Maximise a batched objective over ``n_parties`` (theta, phi) pairs.

    Returns the best value and canonical angles. Ties (within ``tie_tol``) go to
    the lexicographically smallest angles, so the result is deterministic.
    ``grid_objective``, if given, evaluates the whole grid at once from the
    single-party angle list.
    """
    g = cfg.grid_points
    grid = _angle_grid(n_parties, g)
    if grid_objective is not None:
        vals = grid_objective(_angle_grid(1, g))
    else:
        vals = np.concatenate([objective(grid[k : k + cfg.chunk]) for k in range(0, len(grid), cfg.chunk)])
    # grid points tied with the maximum are taken in index (= lexicographic angle) order
    key = np.where(vals >= vals.max() - cfg.tie_tol, vals.max(), vals)
    order = np.lexsort((np.arange(len(vals)), -key))
    steps = np.tile([np.pi / (g - 1) / 2, np.pi / g], n_parties)
    dim = 2 * n_parties

    candidates = []
    for s in order[: cfg.n_starts]:
        x0 = grid[s]
        simplex = np.vstack([x0, x0 + np.diag(steps)])
        res = minimize(
            lambda x: -objective(x[None, :])[0],
            x0,
            method="Nelder-Mead",
            options=dict(
                initial_simplex=simplex,
                xatol=cfg.xatol,
                fatol=cfg.fatol,
                maxiter=cfg.max_iter,
                maxfev=cfg.max_iter * (dim + 2),
            ),
        )
        if not res.success:
            raise OptimizerFailure(f"simplex refinement did not converge from grid point {x0}: {res.message}")
        x = res.x if -res.fun > vals[s] + cfg.tie_tol else x0
        x = _canonical_x(x)
        candidates.append((float(objective(x[None, :])[0]), tuple(x)))

    best = max(v for v, _ in candidates)
    value, x = min((c for c in candidates if c[0] >= best - cfg.tie_tol), key=lambda c: c[1])
    return value, np.array(x)


def classical_correlation_K(d, config: OptimizerConfig | None = None) -> tuple[float, MeasurementBasis]:
    """Maximal classical mutual information over local projective measurements
    on both parties (units eps^2/ln2) and a maximising basis."""
    cfg = config or DEFAULT_OPTIMIZER
    dm = np.asarray(DeviationMatrix(d) if not isinstance(d, DeviationMatrix) else d)
    value, x = _maximize(
        lambda a: _classical_mi_batch(dm, a), 2, cfg, lambda one: _classical_mi_product_grid(dm, one)
    )
    return value, MeasurementBasis.from_array(x)


def quantum_correlation_Q(
    d, config: OptimizerConfig | None = None, epsilon: float | None = None
) -> CorrelationReport:
    """``I``, ``K`` and ``Q = I - K`` from the expansion.

    With ``epsilon`` given, values are converted to bits (times eps^2/ln2).
    """
    i_val = mutual_information_expansion(d)
    k_val, basis = classical_correlation_K(d, config)
    q_val = i_val - k_val
    if epsilon is None:
        return CorrelationReport(i_val, k_val, q_val, basis)
    scale = epsilon**2 / np.log(2)
    return CorrelationReport(i_val * scale, k_val * scale, q_val * scale, basis, units=BITS)


def expansion_to_bits(value: float, epsilon: float) -> float:
    return value * epsilon**2 / np.log(2)


# exact path ----------------------------------------------------------------


def _deficits(state: ThermalState) -> tuple[float, float, float]:
    d = state.deviation.mat
    eps = state.epsilon
    d_ab = entropy_deficit(np.linalg.eigvalsh(d), eps, 4)
    d_a = entropy_deficit(np.linalg.eigvalsh(partial_trace(d, "A")), eps, 2)
    d_b = entropy_deficit(np.linalg.eigvalsh(partial_trace(d, "B")), eps, 2)
    return float(d_ab), float(d_a), float(d_b)


def mutual_information_exact(state: ThermalState) -> float:
    """``S(rho_A) + S(rho_B) - S(rho_AB)`` in bits, without any expansion.

    Written as a combination of entropy deficits ``log2(n) - S`` so that the
    O(eps^2) result is not swamped by rounding of the O(1) entropies.
    """
    d_ab, d_a, d_b = _deficits(state)
    return d_ab - d_a - d_b


def _conditional_deficit_batch(state: ThermalState, party: Party, angles: np.ndarray) -> np.ndarray:
    """``sum_j q_j (1 - S(rho^j))`` over the two outcomes of a measurement on ``party``."""
    eps = state.epsilon
    r = state.deviation.mat.reshape(2, 2, 2, 2)
    proj = projector_pair(angles[:, 0], angles[:, 1])
    if party == "B":
        x = np.einsum("klmn,sjnl->sjkm", r, proj)
    else:
        x = np.einsum("klmn,sjmk->sjln", r, proj)
    tr = np.real(x[..., 0, 0] + x[..., 1, 1])
    q = 0.5 + eps * tr
    # conditional state is 1/2 + eps * y with y traceless; eigenvalues +-mu
    half_diff = 0.5 * np.real(x[..., 0, 0] - x[..., 1, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.hypot(half_diff, np.abs(x[..., 0, 1])) / q
    ok = q > DEGENERATE_OUTCOME_TOL
    mu = np.where(ok, mu, 0.0)
    deficit = entropy_deficit(np.stack([mu, -mu], axis=-1), eps, 2)
    return np.sum(np.where(ok, q * deficit, 0.0), axis=-1)


def one_sided_exact(
    state: ThermalState, measured_party: Party = "B", config: OptimizerConfig | None = None
) -> OneSidedReport:
    """Exact mutual information, Henderson-Vedral classical correlation and
    discord for projective measurements on ``measured_party`` (bits)."""
    cfg = config or DEFAULT_OPTIMIZER
    if measured_party not in ("A", "B"):
        raise ValueError(f"party must be 'A' or 'B', got {measured_party!r}")
    d_ab, d_a, d_b = _deficits(state)
    i_val = d_ab - d_a - d_b
    # optimise in O(1) units; the raw objective is O(eps^2)
    scale = np.log(2) / state.epsilon**2
    value, x = _maximize(lambda a: scale * _conditional_deficit_batch(state, measured_party, a), 1, cfg)
    cond = value / scale
    unmeasured = d_a if measured_party == "B" else d_b
    c_val = float(cond - unmeasured)
    return OneSidedReport(
        total_I=i_val,
        classical_C=c_val,
        discord_D=float(i_val - c_val),
        measured_party=measured_party,
        theta=float(x[0]),
        phi=float(x[1]),
    )


def discord_exact(state: ThermalState, measured_party: Party = "B", config: OptimizerConfig | None = None) -> float:
    return one_sided_exact(state, measured_party, config).discord_D


def classical_exact_C(
    state: ThermalState, measured_party: Party = "B", config: OptimizerConfig | None = None
) -> float:
    return one_sided_exact(state, measured_party, config).classical_C
