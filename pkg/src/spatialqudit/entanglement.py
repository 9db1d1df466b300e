"""Entanglement and mixture of reconstructed two-qudit states."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .core import (DensityMatrix, _psd_sqrt, StateValidationError, StateVector, bell_phi_plus,
                   linear_entropy, partial_trace, pure_fidelity, sqrt_fidelity,
                   von_neumann_entropy)

EPS_MAX = 5.0
GRID_MODULI = 50
GRID_PHASES = 72

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)

# (|GG> + eps |LR>) with G=0, L=1 (arm 1) and G=0, R=1 (arm 2)
# (|LR> + eps |GG> + |RL>) with L=0, G=1, R=2
_FAMILIES = {
    "qubit": ((2, 2), [0], [3]),
    "qutrit": ((3, 3), [2, 6], [4]),
}


def _require_two_qubits(rho: DensityMatrix):
    if rho.dims != (2, 2):
        raise StateValidationError(f"two-qubit state required, got dims {rho.dims}")


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence max(0, m1 - m2 - m3 - m4)."""
    _require_two_qubits(rho)
    r = rho.matrix
    flipped = _YY @ r.conj() @ _YY
    # the mu_i are the singular values of sqrt(rho) sqrt(flipped); this avoids
    # square roots of round-off eigenvalues of the non-Hermitian product
    mu = np.linalg.svd(_psd_sqrt(r) @ _psd_sqrt(flipped), compute_uv=False)
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def tangle(rho: DensityMatrix) -> float:
    """Squared concurrence of a two-qubit state."""
    return concurrence(rho) ** 2


def _binary_entropy(x: float) -> float:
    x = min(max(x, 0.0), 1.0)
    if x in (0.0, 1.0):
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def eof_two_qubit(rho: DensityMatrix) -> float:
    """Exact two-qubit entanglement of formation h((1 + sqrt(1 - C^2))/2)."""
    c = concurrence(rho)
    return _binary_entropy(0.5 * (1 + np.sqrt(max(0.0, 1 - c * c))))


def eof_pure(psi: StateVector) -> float:
    """Entropy of entanglement (bits) of a bipartite pure state."""
    if len(psi.dims) != 2:
        raise StateValidationError("a bipartite state is required")
    s = np.linalg.svd(psi.amplitudes.reshape(psi.dims), compute_uv=False) ** 2
    s = s[s > 0]
    return float(max(0.0, -np.sum(s * np.log2(s))))


def eof_upper_bound(rho: DensityMatrix) -> float:
    """Average entanglement of the eigen-ensemble of ``rho``.

    Entanglement of formation minimises this average over all pure-state
    decompositions, so any one decomposition bounds it from above.
    """
    if len(rho.dims) != 2:
        raise StateValidationError("a bipartite state is required")
    w, v = rho.eigh()
    total = 0.0
    for lam, vec in zip(w, v.T):
        if lam > 1e-14:
            total += lam * eof_pure(StateVector.normalized(vec, rho.dims))
    return float(total)


def reduced_entropies(psi: StateVector) -> tuple[float, float]:
    rho = psi.density()
    return von_neumann_entropy(partial_trace(rho, 0)), von_neumann_entropy(partial_trace(rho, 1))


def nonmax_state(family: str, epsilon: complex) -> StateVector:
    """Member of a nonmaximally entangled family.

    ``qubit``:  (|00> + eps |11>) / sqrt(1 + |eps|^2)
    ``qutrit``: (|02> + eps |11> + |20>) / sqrt(2 + |eps|^2)
    """
    dims, ones, eps_idx = _FAMILIES[family]
    a = np.zeros(dims[0] * dims[1], dtype=complex)
    a[ones] = 1.0
    a[eps_idx] = epsilon
    return StateVector.normalized(a, dims)


def _family_fidelities(rho: np.ndarray, family: str, eps: np.ndarray) -> np.ndarray:
    """<psi(eps)|rho|psi(eps)> for an array of eps values."""
    dims, ones, eps_idx = _FAMILIES[family]
    u = np.zeros(rho.shape[0], dtype=complex)
    u[ones] = 1.0
    v = np.zeros(rho.shape[0], dtype=complex)
    v[eps_idx] = 1.0
    uu = np.real(np.vdot(u, rho @ u))
    vv = np.real(np.vdot(v, rho @ v))
    uv = np.vdot(u, rho @ v)
    num = uu + 2 * np.real(eps * uv) + np.abs(eps) ** 2 * vv
    return num / (len(ones) + np.abs(eps) ** 2)


@dataclass(frozen=True)
class NonMaxFit:
    family: str
    epsilon: complex
    fidelity: float
    grid_fidelity: float
    convention: str = "squared"

    @property
    def modulus(self) -> float:
        return abs(self.epsilon)

    @property
    def phase_over_pi(self) -> float:
        return float(np.angle(self.epsilon) / np.pi)


def fit_nonmax_entangled(rho: DensityMatrix, family: str) -> NonMaxFit:
    """Best-fitting family member, maximising <psi(eps)|rho|psi(eps)>.

    A 50 x 72 polar grid over |eps| in [0, 5] and arg(eps) in [-pi, pi) is
    followed by simplex refinement in (Re eps, Im eps), clipped to |eps| <= 5.
    Near-ties on the grid go to the smallest |eps|, then the smallest |arg|.
    """
    if family not in _FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if rho.dims != _FAMILIES[family][0]:
        raise StateValidationError(f"family {family} needs dims {_FAMILIES[family][0]}")
    mods = np.linspace(0.0, EPS_MAX, GRID_MODULI)
    phases = np.linspace(-np.pi, np.pi, GRID_PHASES, endpoint=False)
    M, P = np.meshgrid(mods, phases, indexing="ij")
    grid = M * np.exp(1j * P)
    F = _family_fidelities(rho.matrix, family, grid)
    top = F.max()
    cand = np.argwhere(F >= top - 1e-12)
    i, j = min(cand, key=lambda ij: (mods[ij[0]], abs(phases[ij[1]]), ij[0], ij[1]))
    start = grid[i, j]

    def clip(z: complex) -> complex:
        r = abs(z)
        return z if r <= EPS_MAX else z * (EPS_MAX / r)

    def loss(x):
        return -float(_family_fidelities(rho.matrix, family, np.array(clip(complex(x[0], x[1])))))

    res = minimize(loss, [start.real, start.imag], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    eps, best = clip(complex(res.x[0], res.x[1])), -res.fun
    if best < top:
        eps, best = complex(start), float(top)
    if abs(eps) < 1e-12:
        eps = 0j
    return NonMaxFit(family, complex(eps), float(min(best, 1.0)), float(top))


@dataclass
class EntanglementReport:
    dims: tuple[int, ...]
    linear_entropy: float
    eof_upper_bound: float
    nonmax_fit: NonMaxFit
    fidelities: dict[str, dict[str, float]] = field(default_factory=dict)
    tangle: float | None = None
    concurrence: float | None = None
    eof_exact: float | None = None
    eof_method: str = "eigen-ensemble average (upper bound)"

    def to_dict(self) -> dict:
        out = {
            "schema": "entanglement-report/1",
            "dims": list(self.dims),
            "linear_entropy": self.linear_entropy,
            "eof_upper_bound": self.eof_upper_bound,
            "eof_method": self.eof_method,
            "nonmax_fit": {
                "family": self.nonmax_fit.family,
                "epsilon": [self.nonmax_fit.epsilon.real, self.nonmax_fit.epsilon.imag],
                "epsilon_modulus": self.nonmax_fit.modulus,
                "epsilon_phase_over_pi": self.nonmax_fit.phase_over_pi,
                "fidelity": self.nonmax_fit.fidelity,
                "fidelity_convention": self.nonmax_fit.convention,
            },
            "fidelities": self.fidelities,
        }
        for key in ("tangle", "concurrence", "eof_exact"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def analyze(rho: DensityMatrix) -> EntanglementReport:
    """Full entanglement/mixture summary of a two-qubit or two-qutrit state."""
    if len(rho.dims) != 2 or rho.dims[0] != rho.dims[1] or rho.dims[0] not in (2, 3):
        raise StateValidationError(f"two-qubit or two-qutrit state required, got {rho.dims}")
    d = rho.dims[0]
    family = "qubit" if d == 2 else "qutrit"
    phi = bell_phi_plus(d)
    report = EntanglementReport(
        dims=rho.dims,
        linear_entropy=linear_entropy(rho),
        eof_upper_bound=eof_upper_bound(rho),
        nonmax_fit=fit_nonmax_entangled(rho, family),
        fidelities={"phi_plus": {"squared": pure_fidelity(phi, rho),
                                 "sqrt": sqrt_fidelity(phi.density(), rho)}},
    )
    if d == 2:
        report.concurrence = concurrence(rho)
        report.tangle = report.concurrence ** 2
        report.eof_exact = eof_two_qubit(rho)
    return report

