"""Security of a qutrit purification bit-commitment protocol.

Alice encodes her bit in one of two orthogonal two-qutrit states

    |0>_L = sqrt(lam) |12> + e^{i phi} sqrt(1 - lam) |01>
    |1>_L = e^{i phi} sqrt(1 - lam) |21> + sqrt(lam) |10>

with arm 1 the proof and arm 2 the token. Bob's knowledge gain is
K = D(rho0, rho1) / 2 and Alice's control is C = sqrt(F)(rho0, rho1) / 2,
both over the token reductions. Ideal tokens sit on the line K + C = 1/2;
the two-level token family traces the arc K^2 + C^2 = 1/4, so a point with
K^2 + C^2 < 1/4 is out of reach of qubit tokens.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (DensityMatrix, StateVector, apply_subsystem_permutation, from_matrix,
                   partial_trace, project_renormalize, sqrt_fidelity, fidelity,
                   trace_distance)

PROOF, TOKEN = 0, 1
MARKED_P = (0.09, 0.19, 0.29)
RESIDUAL_MODEL = ("rho0(r) = (1-r)(lam|2><2| + (1-lam)|1><1|) + r|0><0|; "
                  "rho1(r) = (1-r)(lam|0><0| + (1-lam)|1><1|) + r|2><2|")


@dataclass(frozen=True)
class LogicalBitSpec:
    lam: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        if not -np.pi <= self.phi <= np.pi:
            raise ValueError("phi must lie in [-pi, pi]")


@dataclass(frozen=True)
class SecurityPoint:
    K: float
    C: float

    @property
    def radius_sq(self) -> float:
        return self.K ** 2 + self.C ** 2

    @property
    def beats_qubits(self) -> bool:
        """Strictly inside the qubit arc, i.e. in the qutrit-only region."""
        return self.radius_sq < 0.25

    @property
    def inside_qubit_region(self) -> bool:
        return not self.beats_qubits


def logical_states_ideal(spec: LogicalBitSpec) -> tuple[StateVector, StateVector]:
    lam, ph = spec.lam, np.exp(1j * spec.phi)
    a0 = np.zeros(9, dtype=complex)
    a1 = np.zeros(9, dtype=complex)
    a0[1 * 3 + 2] = np.sqrt(lam)
    a0[0 * 3 + 1] = ph * np.sqrt(1 - lam)
    a1[2 * 3 + 1] = ph * np.sqrt(1 - lam)
    a1[1 * 3 + 0] = np.sqrt(lam)
    return StateVector(a0, (3, 3)), StateVector(a1, (3, 3))


def ideal_tokens(lam: float) -> tuple[DensityMatrix, DensityMatrix]:
    """rho0 = lam|2><2| + (1-lam)|1><1|, rho1 = lam|0><0| + (1-lam)|1><1|."""
    return (DensityMatrix(np.diag([0.0, 1 - lam, lam]).astype(complex), (3,)),
            DensityMatrix(np.diag([lam, 1 - lam, 0.0]).astype(complex), (3,)))


_POSTSELECT = {
    # bit: (proof mode that must be empty, proof relabelling applied afterwards)
    0: (2, (1, 0, 2)),
    1: (0, (0, 2, 1)),
}


def prepare_logical_from_source(rho: DensityMatrix, bit: int) -> DensityMatrix:
    """Simulated postselection plus proof-mode swap that turns the source into |bit>_L.

    Bit 0 keeps events with no photon in proof mode 2 and swaps proof modes
    0 and 1; bit 1 keeps events with no photon in proof mode 0 and swaps
    proof modes 1 and 2. Raises PostselectionError on zero success probability.
    """
    if rho.dims != (3, 3):
        raise ValueError(f"two-qutrit source required, got dims {rho.dims}")
    if bit not in _POSTSELECT:
        raise ValueError("bit must be 0 or 1")
    empty, perm = _POSTSELECT[bit]
    keep = np.eye(3)
    keep[empty, empty] = 0.0
    selected = project_renormalize(rho, keep, subsystem=PROOF)
    return apply_subsystem_permutation(selected, PROOF, perm)


def token_states(rho0L: DensityMatrix, rho1L: DensityMatrix) -> tuple[DensityMatrix, DensityMatrix]:
    """Bob's reduced states: the proof arm traced out of each logical state."""
    return partial_trace(rho0L, TOKEN), partial_trace(rho1L, TOKEN)


def knowledge_gain(rho0: DensityMatrix, rho1: DensityMatrix) -> float:
    return trace_distance(rho0, rho1) / 2


def control(rho0: DensityMatrix, rho1: DensityMatrix) -> float:
    return sqrt_fidelity(rho0, rho1) / 2


def security_point(rho0: DensityMatrix, rho1: DensityMatrix) -> SecurityPoint:
    return SecurityPoint(knowledge_gain(rho0, rho1), control(rho0, rho1))


def curve_ideal_qutrit(lambdas: Sequence[float]) -> list[SecurityPoint]:
    """Best known qutrit protocol W, built from the ideal token states."""
    return [security_point(*ideal_tokens(lam)) for lam in lambdas]


def qubit_tokens(lam: float) -> tuple[DensityMatrix, DensityMatrix]:
    return (DensityMatrix(np.diag([lam, 1 - lam]).astype(complex), (2,)),
            DensityMatrix(np.diag([1 - lam, lam]).astype(complex), (2,)))


def curve_qubit_boundary(lambdas: Sequence[float]) -> list[SecurityPoint]:
    """Qubit boundary X from the two-level token family, K^2 + C^2 = 1/4."""
    for lam in lambdas:
        if not 0.0 <= lam <= 0.5:
            raise ValueError("qubit-boundary parameter must lie in [0, 1/2]")
    return [security_point(*qubit_tokens(lam)) for lam in lambdas]


def depolarized_tokens(lam: float, p: float) -> tuple[DensityMatrix, DensityMatrix]:
    """(p/3) I + (1 - p) rho_ideal for both tokens."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return tuple(from_matrix(p / 3 * np.eye(3) + (1 - p) * t.matrix, (3,))
                 for t in ideal_tokens(lam))


def curve_depolarized(lam: float, ps: Sequence[float]) -> list[SecurityPoint]:
    return [security_point(*depolarized_tokens(lam, p)) for p in ps]


def residual_tokens(lam: float, r: float) -> tuple[DensityMatrix, DensityMatrix]:
    """Ideal tokens with weight r moved into each token's nominally empty mode."""
    t0, t1 = ideal_tokens(lam)
    e0 = np.diag([1.0, 0.0, 0.0])
    e2 = np.diag([0.0, 0.0, 1.0])
    return (from_matrix((1 - r) * t0.matrix + r * e0, (3,)),
            from_matrix((1 - r) * t1.matrix + r * e2, (3,)))


class NoCrossingError(RuntimeError):
    """Raised when the residual-population sweep never leaves the qutrit-only region."""


def residual_threshold(lam: float, *, tol: float = 1e-6, r_max: float = 0.5) -> float:
    """Largest residual population r for which the tokens still beat qubits.

    Bisection on the sign of K(r)^2 + C(r)^2 - 1/4 over [0, r_max].
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie strictly between 0 and 1")

    def g(r: float) -> float:
        return security_point(*residual_tokens(lam, r)).radius_sq - 0.25

    lo, hi = 0.0, r_max
    if g(lo) >= 0:
        raise NoCrossingError("the r = 0 point is not inside the qubit arc")
    if g(hi) < 0:
        raise NoCrossingError(f"no crossing of the qubit arc for r in [0, {r_max}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo


def golden_section_max(f, a: float, b: float, tol: float = 1e-6) -> float:
    """Argmax of a unimodal function on [a, b]."""
    inv = (np.sqrt(5) - 1) / 2
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def closest_ideal_lambda(rho0: DensityMatrix, rho1: DensityMatrix) -> tuple[float, float, float]:
    """lambda maximising the mean token fidelity to the ideal tokens.

    Returns (lambda, F0, F1) with squared fidelities.
    """
    def mean_fid(lam):
        i0, i1 = ideal_tokens(lam)
        return 0.5 * (fidelity(rho0, i0) + fidelity(rho1, i1))

    lam = golden_section_max(mean_fid, 0.0, 1.0)
    i0, i1 = ideal_tokens(lam)
    return lam, fidelity(rho0, i0), fidelity(rho1, i1)


@dataclass
class BCReport:
    point: SecurityPoint
    tokens: tuple[DensityMatrix, DensityMatrix]
    fitted_lambda: float
    token_fidelities: tuple[float, float]
    residuals: tuple[float, float]
    postselection_probabilities: tuple[float, float] | None = None
    notes: dict = field(default_factory=dict)

    @property
    def inside_qubit_region(self) -> bool:
        return self.point.inside_qubit_region

    def to_dict(self) -> dict:
        from .io import density_to_dict
        out = {
            "schema": "bc-report/1",
            "K": self.point.K,
            "C": self.point.C,
            "K2_plus_C2": self.point.radius_sq,
            "inside_qubit_region": self.inside_qubit_region,
            "fitted_lambda": self.fitted_lambda,
            "token_fidelities_to_ideal": list(self.token_fidelities),
            "fidelity_convention": {"C": "sqrt", "token_fidelities_to_ideal": "squared"},
            "residual_populations": list(self.residuals),
            "tokens": [density_to_dict(t) for t in self.tokens],
        }
        if self.postselection_probabilities is not None:
            out["postselection_probabilities"] = list(self.postselection_probabilities)
        out.update(self.notes)
        return out


def report_from_logical(rho0L: DensityMatrix, rho1L: DensityMatrix) -> BCReport:
    """Security summary of a pair of two-qutrit logical states."""
    t0, t1 = token_states(rho0L, rho1L)
    lam, f0, f1 = closest_ideal_lambda(t0, t1)
    # token 0 should never populate mode 0, token 1 never mode 2
    residuals = (float(t0.matrix[0, 0].real), float(t1.matrix[2, 2].real))
    return BCReport(security_point(t0, t1), (t0, t1), lam, (f0, f1), residuals)


def security_point_from_source(rho: DensityMatrix) -> BCReport:
    """Prepare both logical bits from a two-qutrit source and locate the protocol."""
    probs = []
    logical = []
    for bit in (0, 1):
        empty = _POSTSELECT[bit][0]
        probs.append(1.0 - float(partial_trace(rho, PROOF).matrix[empty, empty].real))
        logical.append(prepare_logical_from_source(rho, bit))
    report = report_from_logical(*logical)
    report.postselection_probabilities = (probs[0], probs[1])
    return report


def curves_table(step: float = 0.01) -> list[tuple[str, float, float, float]]:
    """Rows (curve, param, K, C) for W, X, Y (lam = 0.5) and Z (lam = 0.27).

    W is parametrised by lambda in [0, 1], X by lambda in [0, 1/2], Y and Z by
    the depolarising weight p in [0, 0.5] (the marked 0.09, 0.19, 0.29 included).
    """
    n = int(round(1 / step))
    lam_w = [round(i * step, 10) for i in range(n + 1)]
    lam_x = [v for v in lam_w if v <= 0.5]
    ps = sorted({round(i * step, 10) for i in range(n // 2 + 1)} | set(MARKED_P))
    rows = [("W", lam, pt.K, pt.C) for lam, pt in zip(lam_w, curve_ideal_qutrit(lam_w))]
    rows += [("X", lam, pt.K, pt.C) for lam, pt in zip(lam_x, curve_qubit_boundary(lam_x))]
    for name, lam in (("Y", 0.5), ("Z", 0.27)):
        rows += [(name, p, pt.K, pt.C) for p, pt in zip(ps, curve_depolarized(lam, ps))]
    return rows
