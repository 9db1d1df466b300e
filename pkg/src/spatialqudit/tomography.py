"""Two-state-superposition tomography: settings, counts and ML reconstruction.

Every analyzer ket is either a basis state |j> or an equal two-state
superposition (|j> + |k>)/sqrt2, (|j> - |k>)/sqrt2, (|j> + i|k>)/sqrt2,
(|j> - i|k>)/sqrt2 with j < k, labelled ``bj``, ``p+jk``, ``p-jk``, ``q+jk``,
``q-jk``. The minimal per-qudit set has d^2 kets; the over-complete set adds
the ``p-``/``q-`` partners.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .core import DensityMatrix, StateValidationError, StateVector, from_matrix

SUPPORTED_DIMS = (2, 3)
PROB_FLOOR = 1e-12
_LABEL = re.compile(r"^(?:b(\d)|([pq])([+-])(\d)(\d))$")


class InsufficientDataError(ValueError):
    """Raised when the settings cannot determine a density matrix."""


@dataclass(frozen=True, eq=False)
class AnalyzerKet:
    label: str
    ket: StateVector


def analyzer_ket(label: str, d: int) -> AnalyzerKet:
    """Parse a label such as ``b2``, ``p+01`` or ``q-12`` into its ket."""
    m = _LABEL.match(label)
    if not m:
        raise ValueError(f"malformed analyzer label {label!r}")
    v = np.zeros(d, dtype=complex)
    if m.group(1) is not None:
        j = int(m.group(1))
        if j >= d:
            raise ValueError(f"{label!r} is outside a {d}-level system")
        v[j] = 1.0
    else:
        kind, sign, j, k = m.group(2), m.group(3), int(m.group(4)), int(m.group(5))
        if not j < k < d:
            raise ValueError(f"{label!r} needs j < k < {d}")
        s = 1.0 if sign == "+" else -1.0
        v[j] = 1.0
        v[k] = s * (1j if kind == "q" else 1.0)
        v /= np.sqrt(2)
    return AnalyzerKet(label, StateVector(v, (d,)))


def analyzer_labels(d: int, overcomplete: bool = False) -> list[str]:
    if d not in SUPPORTED_DIMS:
        raise ValueError(f"unsupported dimension d={d}; expected one of {SUPPORTED_DIMS}")
    labels = [f"b{j}" for j in range(d)]
    signs = "+-" if overcomplete else "+"
    for j, k in itertools.combinations(range(d), 2):
        labels.extend(f"{kind}{s}{j}{k}" for kind in "pq" for s in signs)
    return labels


@dataclass(frozen=True, eq=False)
class MeasurementSetting:
    """Product of one analyzer ket per arm; projector |a1><a1| (x) |a2><a2| ..."""

    analyzers: tuple[AnalyzerKet, ...]

    @property
    def id(self) -> tuple[str, ...]:
        return tuple(a.label for a in self.analyzers)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(a.ket.dim for a in self.analyzers)

    @property
    def ket(self) -> np.ndarray:
        return reduce(np.kron, [a.ket.amplitudes for a in self.analyzers])

    @property
    def projector(self) -> np.ndarray:
        v = self.ket
        return np.outer(v, v.conj())


def setting(labels: Sequence[str], dims: Sequence[int]) -> MeasurementSetting:
    return MeasurementSetting(tuple(analyzer_ket(lab, d) for lab, d in zip(labels, dims)))


def measurement_set(d: int, arms: int = 2, overcomplete: bool = False) -> list[MeasurementSetting]:
    """All product settings of the per-arm analyzer set (Cartesian product)."""
    if arms not in (1, 2):
        raise ValueError("only one or two arms are supported")
    per_arm = [analyzer_ket(lab, d) for lab in analyzer_labels(d, overcomplete)]
    return [MeasurementSetting(combo) for combo in itertools.product(per_arm, repeat=arms)]


def design_matrix(settings: Sequence[MeasurementSetting]) -> np.ndarray:
    """Rows a_i with p_i = a_i . vec(rho) (row-major vec)."""
    kets = np.array([s.ket for s in settings])
    # Tr(rho |v><v|) = sum_ab conj(v_a) rho_ab v_b
    return np.einsum("ia,ib->iab", kets.conj(), kets).reshape(len(settings), -1)


def born_probabilities(rho: DensityMatrix, settings: Sequence[MeasurementSetting]) -> np.ndarray:
    for s in settings:
        if s.dims != rho.dims:
            raise StateValidationError(f"setting {s.id} acts on {s.dims}, state has {rho.dims}")
    p = np.real(design_matrix(settings) @ rho.matrix.reshape(-1))
    return np.clip(p, 0.0, 1.0)


@dataclass(frozen=True)
class CountRecord:
    setting: tuple[str, ...]
    count: int
    shots: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("counts must be non-negative")
        if self.shots <= 0:
            raise ValueError("shots must be positive")


def simulate_counts(probs, shots: int, seed: int,
                    settings: Sequence[MeasurementSetting] | None = None) -> list[CountRecord]:
    """Poisson counts with mean shots * p_i; fully determined by ``seed``."""
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    if shots <= 0:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(seed)
    counts = rng.poisson(shots * probs)
    ids = [s.id for s in settings] if settings is not None else [(str(i),) for i in range(len(probs))]
    return [CountRecord(tuple(i), int(c), int(shots)) for i, c in zip(ids, counts)]


def expected_counts(rho: DensityMatrix, settings: Sequence[MeasurementSetting],
                    shots: int) -> list[CountRecord]:
    """Noise-free records: counts = round(shots * p_i)."""
    p = born_probabilities(rho, settings)
    return [CountRecord(s.id, int(round(shots * pi)), shots) for s, pi in zip(settings, p)]


# ---------------------------------------------------------------------------
# reconstruction

def _align(records: Sequence[CountRecord], settings: Sequence[MeasurementSetting]):
    by_id = {s.id: s for s in settings}
    missing = [r.setting for r in records if r.setting not in by_id]
    if missing:
        raise ValueError(f"records reference unknown settings, e.g. {missing[0]}")
    used = [by_id[r.setting] for r in records]
    dims = {s.dims for s in used}
    if len(dims) != 1:
        raise ValueError("records mix settings of different dimensions")
    A = design_matrix(used)
    D = int(np.prod(next(iter(dims))))
    rank = np.linalg.matrix_rank(A, tol=1e-8)
    if rank < D * D:
        raise InsufficientDataError(
            f"settings span only {rank} of the {D * D} dimensions needed for a "
            f"{D}x{D} density matrix")
    counts = np.array([r.count for r in records], dtype=float)
    shots = np.array([r.shots for r in records], dtype=float)
    return A, counts, shots, next(iter(dims))


def linear_inversion(A: np.ndarray, freqs: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    """Least-squares inversion of p = A vec(rho), projected onto physical states."""
    D = int(np.prod(dims))
    vec, *_ = np.linalg.lstsq(A, freqs.astype(complex), rcond=None)
    m = vec.reshape(D, D)
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return np.eye(D) / D
    m = (v * w) @ v.conj().T
    return m / np.trace(m).real


class _Params:
    """Real vector <-> lower-triangular T with real diagonal, rho = T^dag T / Tr."""

    def __init__(self, D: int):
        self.D = D
        self.rows, self.cols = np.tril_indices(D, -1)

    @property
    def size(self) -> int:
        return self.D * self.D

    def to_T(self, x: np.ndarray) -> np.ndarray:
        D = self.D
        T = np.zeros((D, D), dtype=complex)
        T[np.arange(D), np.arange(D)] = x[:D]
        n = len(self.rows)
        T[self.rows, self.cols] = x[D:D + n] + 1j * x[D + n:]
        return T

    def from_T(self, T: np.ndarray) -> np.ndarray:
        D = self.D
        off = T[self.rows, self.cols]
        return np.concatenate([np.real(np.diag(T)), off.real, off.imag])

    def rho(self, x: np.ndarray) -> np.ndarray:
        T = self.to_T(x)
        S = T.conj().T @ T
        return S / np.trace(S).real

    def from_rho(self, rho: np.ndarray, floor: float = 1e-6) -> np.ndarray:
        """T such that T^dag T = rho (after lifting a rank-deficient rho slightly)."""
        D = self.D
        w, v = np.linalg.eigh(rho)
        w = np.clip(w, floor, None)
        m = (v * w) @ v.conj().T
        m /= np.trace(m).real
        # rho = T^dag T must use a lower-triangular T: reverse the basis order
        J = np.eye(D)[::-1]
        Lr = np.linalg.cholesky(J @ m @ J)  # J m J = Lr Lr^dag
        T = J @ Lr.conj().T @ J             # lower triangular, T^dag T = m
        return self.from_T(T)


def _objective(model: str, counts: np.ndarray, shots: np.ndarray):
    """Return f(p) -> (value, df/dp) for the chosen likelihood model."""
    if model == "poisson":
        def f(p):
            p = np.maximum(p, PROB_FLOOR)
            mu = shots * p
            return float(np.sum(mu - counts * np.log(mu))), shots - counts / p
    elif model == "lsq":
        var = np.maximum(counts, 1.0)

        def f(p):
            r = shots * p - counts
            return float(0.5 * np.sum(r * r / var)), shots * r / var
    else:
        raise ValueError(f"unknown likelihood model {model!r}")
    return f


class _Likelihood:
    """Objective and analytic gradient in the real T-parameterisation."""

    def __init__(self, A, counts, shots, params: _Params, model: str):
        self.A = A
        self.params = params
        self.f = _objective(model, counts, shots)
        self.projectors = A.reshape(-1, params.D, params.D).transpose(0, 2, 1)

    def __call__(self, x):
        return self.value_and_grad(x)[0]

    def value_and_grad(self, x):
        P = self.params
        T = P.to_T(x)
        S = T.conj().T @ T
        t = np.trace(S).real
        r = S / t
        val, dp = self.f(np.real(self.A @ r.reshape(-1)))
        G = np.tensordot(dp, self.projectors, axes=1)
        H = (G - np.real(np.trace(G @ r)) * np.eye(P.D)) / t
        # d val = 2 Re Tr(H T^dag dT)
        K = H @ T.conj().T
        off = K[P.cols, P.rows]
        grad = np.concatenate([2 * np.real(np.diag(K)), 2 * off.real, -2 * off.imag])
        return val, grad


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool
    history: list[float] = field(repr=False)


def nelder_mead(func, x0: np.ndarray, *, step: float = 0.05, max_iters: int = 50_000,
                tol: float = 1e-10, window: int = 100) -> SimplexResult:
    """Adaptive-coefficient Nelder-Mead minimiser.

    Stops when the best value has improved by less than ``tol`` over the last
    ``window`` iterations. ``history`` holds the best value after every
    iteration and is non-increasing.
    """
    n = x0.size
    alpha, gamma = 1.0, 1.0 + 2.0 / n
    rho_c, sigma = 0.75 - 1.0 / (2 * n), 1.0 - 1.0 / n
    simplex = np.vstack([x0, x0 + step * np.eye(n)])
    fvals = np.array([func(v) for v in simplex])
    history = []
    it = 0
    converged = False
    while it < max_iters:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        history.append(float(fvals[0]))
        if len(history) > window and history[-window - 1] - history[-1] < tol:
            converged = True
            break
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = func(xr)
        if fr < fvals[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = func(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + rho_c * (xr - centroid)
                fc = func(xc)
                accept = fc <= fr
            else:
                xc = centroid + rho_c * (worst - centroid)
                fc = func(xc)
                accept = fc < fvals[-1]
            if accept:
                simplex[-1], fvals[-1] = xc, fc
            else:
                simplex[1:] = simplex[0] + sigma * (simplex[1:] - simplex[0])
                fvals[1:] = [func(v) for v in simplex[1:]]
    best = int(np.argmin(fvals))
    return SimplexResult(simplex[best].copy(), float(fvals[best]), it, converged, history)


def _lbfgs(like: _Likelihood, x0: np.ndarray, *, max_iters: int, tol: float) -> SimplexResult:
    history = [like(x0)]

    def record(intermediate_result):
        history.append(float(intermediate_result.fun))

    res = minimize(like.value_and_grad, x0, jac=True, method="L-BFGS-B", callback=record,
                   options={"maxiter": max_iters, "ftol": 1e-15, "gtol": tol, "maxcor": 30})
    return SimplexResult(res.x, float(res.fun), int(res.nit), bool(res.success), history)


@dataclass
class Reconstruction:
    """Output of :func:`reconstruct_mle`."""

    rho: DensityMatrix
    neg_log_likelihood: float
    iterations: int
    converged: bool
    model: str
    method: str
    history: list[float] = field(default_factory=list, repr=False)
    restarts: int = 0


def reconstruct_mle(records: Sequence[CountRecord], settings: Sequence[MeasurementSetting], *,
                    model: str = "poisson", method: str = "lbfgs", max_iters: int = 50_000,
                    restarts: int = 3, seed: int = 0, tol: float = 1e-10,
                    window: int = 100) -> Reconstruction:
    """Maximum-likelihood density matrix from count records.

    Minimises sum_i (N_i p_i - c_i ln(N_i p_i)) over rho = T^dag T / Tr(T^dag T)
    with T lower triangular, starting from the PSD-projected linear-inversion
    estimate. The search is rerun from ``restarts`` random perturbations of the
    incumbent and the best iterate is kept.

    ``method`` is ``"lbfgs"`` (analytic gradient) or ``"simplex"``
    (derivative-free Nelder-Mead, practical for single qudits and two qubits).
    ``model="lsq"`` swaps in a chi-square objective for cross-checks.
    """
    if method not in ("lbfgs", "simplex"):
        raise ValueError(f"unknown method {method!r}")
    A, counts, shots, dims = _align(records, settings)
    params = _Params(int(np.prod(dims)))
    like = _Likelihood(A, counts, shots, params, model)

    def run(x):
        if method == "lbfgs":
            return _lbfgs(like, x, max_iters=max_iters, tol=tol)
        return nelder_mead(like, x, max_iters=max_iters, tol=tol, window=window)

    best = run(params.from_rho(linear_inversion(A, counts / shots, dims)))
    history = list(best.history)
    total = best.iterations
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        kick = 0.02 * np.max(np.abs(best.x)) * rng.standard_normal(best.x.size)
        trial = run(best.x + kick)
        total += trial.iterations
        if trial.fun < best.fun:
            history.extend(h for h in trial.history if h < history[-1])
            best = trial
    rho = from_matrix(params.rho(best.x), dims, renormalize=True)
    return Reconstruction(rho, best.fun, total, best.converged, model, method,
                          history, restarts)
