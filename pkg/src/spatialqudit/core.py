"""Small multi-qudit states: composition, reduction, distances and entropies.

Subsystems are ordered row-major everywhere: arm 1 is the slowest-varying
index of a composite basis label, so ``|jk>`` sits at row ``j * d2 + k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_ATOL = 1e-12
EIGEN_ATOL = 1e-10
TRACE_ATOL = 1e-10
NORM_ATOL = 1e-12


class StateValidationError(ValueError):
    """Raised when an array does not describe a valid quantum state."""


class PostselectionError(ValueError):
    """Raised when a projection has (numerically) vanishing probability."""


def _as_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise StateValidationError(f"invalid subsystem dimensions {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalised pure state of one or more qudits."""

    amplitudes: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        dims = _as_dims(self.dims)
        if int(np.prod(dims)) != amps.size:
            raise StateValidationError(
                f"dims {dims} do not match {amps.size} amplitudes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise StateValidationError(f"state norm is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims: Sequence[int]) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise StateValidationError("cannot normalise the zero vector")
        return cls(amps / norm, tuple(dims))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.dims)

    def overlap(self, other: "StateVector") -> complex:
        """Inner product <self|other>."""
        if self.dims != other.dims:
            raise StateValidationError("dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix with subsystem dims.

    ``atol`` overrides all three validation tolerances at once; readers of
    round-tripped files pass a looser value.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    atol: float | None = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        dims = _as_dims(self.dims)
        D = int(np.prod(dims))
        if m.shape != (D, D):
            raise StateValidationError(
                f"matrix shape {m.shape} does not match dims {dims}")
        tol = self.atol
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > (tol or HERMITIAN_ATOL):
            raise StateValidationError(f"matrix is not Hermitian (error {herm_err:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > (tol or TRACE_ATOL):
            raise StateValidationError(f"trace is {tr!r}, expected 1")
        m = 0.5 * (m + m.conj().T)
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -(tol or EIGEN_ATOL):
            raise StateValidationError(f"matrix has negative eigenvalue {lo:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigen-decomposition with tiny negative eigenvalues clamped to zero."""
        w, v = np.linalg.eigh(self.matrix)
        return _clamp(w), v

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def is_pure(self, atol: float = 1e-10) -> bool:
        return abs(self.purity() - 1.0) < atol


def _clamp(w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=float).copy()
    w[(w < 0) & (w >= -EIGEN_ATOL)] = 0.0
    return w


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    # eigenvalues under the solver's noise floor are zero; their square roots
    # (~1e-8) would otherwise leak into fidelities of pure states
    floor = m.shape[0] * np.finfo(float).eps * max(w[-1], 0.0)
    w = np.where(w > floor, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def from_matrix(matrix, dims: Sequence[int], *, renormalize: bool = False) -> DensityMatrix:
    """Build a DensityMatrix, symmetrising away rounding-level anti-Hermitian parts."""
    m = np.asarray(matrix, dtype=complex)
    m = 0.5 * (m + m.conj().T)
    if renormalize:
        m = m / np.trace(m).real
    return DensityMatrix(m, tuple(dims))


def basis_ket(j: int, d: int) -> StateVector:
    e = np.zeros(d, dtype=complex)
    e[j] = 1.0
    return StateVector(e, (d,))


def product_ket(indices: Sequence[int], dims: Sequence[int]) -> StateVector:
    """Computational basis ket |i1 i2 ...> of a composite system."""
    idx = np.ravel_multi_index(tuple(indices), tuple(dims))
    e = np.zeros(int(np.prod(dims)), dtype=complex)
    e[idx] = 1.0
    return StateVector(e, tuple(dims))


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    D = int(np.prod(dims))
    return DensityMatrix(np.eye(D) / D, tuple(dims))


def bell_phi_plus(d: int = 2) -> StateVector:
    """(|00> + |11> + ... )/sqrt(d)."""
    amps = np.zeros(d * d, dtype=complex)
    amps[[j * d + j for j in range(d)]] = 1.0
    return StateVector.normalized(amps, (d, d))


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(np.kron(a.matrix, b.matrix), a.dims + b.dims)


def tensor_all(states: Sequence[DensityMatrix]) -> DensityMatrix:
    return reduce(tensor, states)


def partial_trace(rho: DensityMatrix, keep: int) -> DensityMatrix:
    """Reduced state on subsystem ``keep`` (all other subsystems traced out)."""
    n = len(rho.dims)
    if n < 2:
        raise StateValidationError("partial trace needs at least two subsystems")
    if not -n <= keep < n:
        raise IndexError(f"subsystem {keep} out of range for dims {rho.dims}")
    keep %= n
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # move the kept (row, column) axes to the front, then trace the rest pairwise
    t = np.moveaxis(t, (keep, keep + n), (0, 1))
    d = rho.dims[keep]
    rest = int(np.prod(rho.dims)) // d
    t = t.reshape(d, d, rest, rest)
    return from_matrix(np.trace(t, axis1=2, axis2=3), (d,))


def _check_same(rho: DensityMatrix, sigma: DensityMatrix):
    if rho.dims != sigma.dims:
        raise StateValidationError(f"dimension mismatch: {rho.dims} vs {sigma.dims}")


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """D = (1/2) sum |eigenvalues of (rho - sigma)|."""
    _check_same(rho, sigma)
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(min(1.0, 0.5 * np.sum(np.abs(w))))


def sqrt_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Square-root fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    _check_same(rho, sigma)
    # nuclear norm of sqrt(rho) sqrt(sigma) equals Tr sqrt(sqrt(rho) sigma sqrt(rho))
    s = np.linalg.svd(_psd_sqrt(rho.matrix) @ _psd_sqrt(sigma.matrix), compute_uv=False)
    return float(min(1.0, np.sum(s)))


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Squared (Uhlmann) fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2."""
    return sqrt_fidelity(rho, sigma) ** 2


def pure_fidelity(psi: StateVector, rho: DensityMatrix) -> float:
    """<psi|rho|psi>, equal to fidelity(|psi><psi|, rho)."""
    if psi.dims != rho.dims:
        raise StateValidationError("dimension mismatch")
    a = psi.amplitudes
    return float(np.clip(np.real(np.vdot(a, rho.matrix @ a)), 0.0, 1.0))


def linear_entropy(rho: DensityMatrix) -> float:
    """Normalised linear entropy (D/(D-1)) (1 - Tr rho^2); 0 pure, 1 maximally mixed."""
    D = rho.dim
    if D == 1:
        return 0.0
    return float(np.clip(D / (D - 1) * (1.0 - rho.purity()), 0.0, 1.0))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > 0]
    return float(max(0.0, -np.sum(w * np.log2(w))))


def _embed(op: np.ndarray, subsystem: int, dims: tuple[int, ...]) -> np.ndarray:
    mats = [np.eye(d) for d in dims]
    mats[subsystem] = op
    return reduce(np.kron, mats)


def project_renormalize(rho: DensityMatrix, projector, subsystem: int = 0,
                        min_prob: float = 1e-12) -> DensityMatrix:
    """Postselect ``rho`` on ``projector`` acting on one subsystem.

    Returns P rho P / Tr(P rho P) with P the projector embedded next to the
    identity on every other subsystem. Raises PostselectionError when the
    success probability is at or below ``min_prob``.
    """
    p = np.asarray(projector, dtype=complex)
    n = len(rho.dims)
    if not -n <= subsystem < n:
        raise IndexError(f"subsystem {subsystem} out of range for dims {rho.dims}")
    subsystem %= n
    d = rho.dims[subsystem]
    if p.shape != (d, d):
        raise StateValidationError(f"projector shape {p.shape} does not act on a {d}-level system")
    P = _embed(p, subsystem, rho.dims)
    out = P @ rho.matrix @ P.conj().T
    prob = np.trace(out).real
    if not prob > min_prob:
        raise PostselectionError(f"postselection probability {prob:.3g} is too small")
    return from_matrix(out / prob, rho.dims)


def permutation_unitary(perm: Sequence[int]) -> np.ndarray:
    """Unitary U with U|j> = |perm[j]>."""
    perm = [int(k) for k in perm]
    d = len(perm)
    if sorted(perm) != list(range(d)):
        raise ValueError(f"{perm} is not a permutation of 0..{d - 1}")
    U = np.zeros((d, d))
    U[perm, range(d)] = 1.0
    return U


def apply_subsystem_permutation(rho: DensityMatrix, subsystem: int,
                                perm: Sequence[int]) -> DensityMatrix:
    """Relabel the basis of one subsystem: |j> -> |perm[j]>."""
    d = rho.dims[subsystem]
    if len(perm) != d:
        raise ValueError(f"permutation length {len(perm)} does not match d={d}")
    U = _embed(permutation_unitary(perm), subsystem, rho.dims)
    return from_matrix(U @ rho.matrix @ U.T, rho.dims)


def apply_local_unitary(rho: DensityMatrix, unitaries: Sequence[np.ndarray]) -> DensityMatrix:
    """Conjugate by U1 (x) U2 (x) ...; one unitary per subsystem."""
    U = reduce(np.kron, [np.asarray(u, dtype=complex) for u in unitaries])
    return from_matrix(U @ rho.matrix @ U.conj().T, rho.dims)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dims: Sequence[int], rng: np.random.Generator,
                   rank: int | None = None) -> DensityMatrix:
    """Random state from the induced (Ginibre) measure."""
    D = int(np.prod(dims))
    k = D if rank is None else rank
    g = rng.standard_normal((D, k)) + 1j * rng.standard_normal((D, k))
    m = g @ g.conj().T
    return from_matrix(m / np.trace(m).real, dims)


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    """(1 - p) rho + p I/D."""
    D = rho.dim
    return from_matrix((1 - p) * rho.matrix + p * np.eye(D) / D, rho.dims)


def depolarize_to_linear_entropy(rho: DensityMatrix, target: float) -> DensityMatrix:
    """Mix white noise into ``rho`` until its linear entropy equals ``target``."""
    from scipy.optimize import brentq

    start = linear_entropy(rho)
    if not start <= target <= 1.0:
        raise ValueError(f"target {target} not reachable from linear entropy {start:.4g}")
    if target == start:
        return rho
    q = brentq(lambda q: linear_entropy(depolarize(rho, q)) - target, 0.0, 1.0, xtol=1e-14)
    return depolarize(rho, q)
