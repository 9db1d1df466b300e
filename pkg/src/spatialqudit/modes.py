"""Paraxial spatial modes at the beam waist.

Hermite-Gauss (HG_rs) and Laguerre-Gauss-vortex (LGV_pl) amplitudes, mode
order and Gouy phase, quadrature overlaps modelling a hologram followed by a
single-mode fibre, and the displaced-vortex superposition rule.

Propagation is never carried out on a grid. Everything is evaluated in the
waist plane and the Gouy phase exp(-i (N + 1) psi(z)) of an order-N mode is
applied as bookkeeping on the coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Iterable, Protocol

import numpy as np
from scipy.special import eval_genlaguerre, eval_hermite

WINDOW = 6.0          # half-width of the quadrature window, in waists
QUAD_TOL = 1e-7
QUAD_START = 32
QUAD_MAX = 1024


class QuadratureError(RuntimeError):
    """Raised when grid refinement fails to converge."""


@dataclass(frozen=True)
class ModeSpec:
    """A single paraxial mode: ``HG`` with (r, s) or ``LGV`` with (p, l)."""

    family: str
    indices: tuple[int, int]
    waist: float = 1.0

    def __post_init__(self):
        fam = self.family.upper()
        if fam not in ("HG", "LGV"):
            raise ValueError(f"unknown mode family {self.family!r}")
        a, b = (int(i) for i in self.indices)
        if a < 0 or (fam == "HG" and b < 0):
            raise ValueError(f"negative mode index in {fam}{(a, b)}")
        if not self.waist > 0:
            raise ValueError("waist must be positive")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "indices", (a, b))

    @property
    def order(self) -> int:
        a, b = self.indices
        return a + b if self.family == "HG" else 2 * a + abs(b)

    @property
    def label(self) -> str:
        a, b = self.indices
        return f"{self.family}{a},{b:+d}" if self.family == "LGV" else f"HG{a}{b}"

    def amplitude(self, x, y):
        return mode_amplitude(self, x, y)


def HG(r: int, s: int, waist: float = 1.0) -> ModeSpec:
    return ModeSpec("HG", (r, s), waist)


def LGV(p: int, l: int, waist: float = 1.0) -> ModeSpec:
    return ModeSpec("LGV", (p, l), waist)


def gaussian(waist: float = 1.0) -> ModeSpec:
    """The fundamental mode G = HG00 = LGV00."""
    return HG(0, 0, waist)


def _hg_1d(n: int, x, w: float):
    norm = (2 / np.pi) ** 0.25 / np.sqrt(2.0 ** n * factorial(n) * w)
    xi = np.sqrt(2) * x / w
    return norm * eval_hermite(n, xi) * np.exp(-(x / w) ** 2)


def mode_amplitude(mode: ModeSpec, x, y):
    """Normalised transverse amplitude u(x, y) in the waist plane.

    The integral of |u|^2 over the plane is 1. LGV modes carry the vortex
    factor (x + i sign(l) y)^|l|, so a charge +1 mode vanishes on axis.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = mode.waist
    a, b = mode.indices
    if mode.family == "HG":
        return (_hg_1d(a, x, w) * _hg_1d(b, y, w)).astype(complex)
    p, l = a, abs(b)
    r2 = (x * x + y * y) / w ** 2
    norm = np.sqrt(2 * factorial(p) / (np.pi * factorial(p + l))) / w
    vortex = ((x + 1j * np.sign(b) * y) * np.sqrt(2) / w) ** l
    return norm * vortex * eval_genlaguerre(p, l, 2 * r2) * np.exp(-r2)


def gouy_phase(order: int, z: float, z_r: float) -> float:
    """(order + 1) arctan(z / z_R)."""
    if not z_r > 0:
        raise ValueError("Rayleigh range must be positive")
    return (order + 1) * float(np.arctan2(z, z_r))


class Field(Protocol):
    waist: float

    def amplitude(self, x, y): ...


@dataclass(frozen=True)
class FieldSuperposition:
    """Finite normalised superposition sum_k c_k u_k of modes with a common waist."""

    terms: tuple[tuple[complex, ModeSpec], ...]
    waist: float = 1.0
    displacement: float | None = field(default=None, compare=False)

    def __post_init__(self):
        terms = tuple((complex(c), m) for c, m in self.terms)
        if not terms:
            raise ValueError("empty superposition")
        if any(abs(m.waist - self.waist) > 1e-12 * self.waist for _, m in terms):
            raise ValueError("all modes must share the superposition waist")
        labels = [m for _, m in terms]
        if len(set(labels)) != len(labels):
            raise ValueError("repeated mode in superposition")
        norm = np.sqrt(sum(abs(c) ** 2 for c, _ in terms))
        if norm == 0:
            raise ValueError("all coefficients are zero")
        object.__setattr__(self, "terms", tuple((c / norm, m) for c, m in terms))

    @classmethod
    def of(cls, *terms: tuple[complex, ModeSpec]) -> "FieldSuperposition":
        return cls(tuple(terms), waist=terms[0][1].waist)

    @classmethod
    def single(cls, mode: ModeSpec) -> "FieldSuperposition":
        return cls(((1.0, mode),), waist=mode.waist)

    def amplitude(self, x, y):
        return sum(c * mode_amplitude(m, x, y) for c, m in self.terms)

    def orders(self) -> set[int]:
        return {m.order for c, m in self.terms if c != 0}


@dataclass(frozen=True)
class DisplacedVortex:
    """Raw field (x - x0 + i*charge*y) exp(-r^2/w^2), normalised to unit power.

    Evaluated directly from that expression (never through a mode expansion) so
    that quadrature overlaps against it independently check the analytic
    decomposition.
    """

    x0: float
    waist: float = 1.0
    charge: int = 1

    def __post_init__(self):
        if self.charge not in (1, -1):
            raise ValueError("charge must be +1 or -1")
        if not self.waist > 0:
            raise ValueError("waist must be positive")

    def amplitude(self, x, y):
        w = self.waist
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        power = 0.5 * np.pi * w ** 2 * (0.5 * w ** 2 + self.x0 ** 2)
        f = (x - self.x0 + 1j * self.charge * y) * np.exp(-(x * x + y * y) / w ** 2)
        return f / np.sqrt(power)


def _gl_grid(n: int, half: float):
    t, wt = np.polynomial.legendre.leggauss(n)
    return half * t, half * wt


def overlap(a: Field, b: Field, *, tol: float = QUAD_TOL, max_nodes: int = QUAD_MAX) -> complex:
    """<a|b> = integral of conj(a) b over the plane.

    Tensor Gauss-Legendre quadrature on a +-6 waist window; the node count is
    doubled until successive estimates agree to ``tol``.
    """
    if abs(a.waist - b.waist) > 1e-12 * a.waist:
        raise ValueError("fields must share a waist")
    half = WINDOW * a.waist
    prev = None
    n = QUAD_START
    while n <= max_nodes:
        x, wx = _gl_grid(n, half)
        X, Y = np.meshgrid(x, x, indexing="ij")
        integrand = np.conj(a.amplitude(X, Y)) * b.amplitude(X, Y)
        est = complex(wx @ integrand @ wx)
        if prev is not None and abs(est - prev) < tol:
            return est
        prev = est
        n *= 2
    raise QuadratureError(f"overlap did not converge with {max_nodes} nodes per axis")


def coupling_probability(analyzer: Field, beam: Field) -> float:
    """Probability that ``beam`` passes an ideal analyzer set to ``analyzer``."""
    return abs(overlap(analyzer, beam)) ** 2


def displaced_vortex_decomposition(x0: float, w: float = 1.0) -> tuple[complex, complex]:
    """Coefficients (c_G, c_V) of the displaced charge-1 vortex in {G, LGV0,+1}.

    Moving the singularity to (x0, 0) gives (x - x0 + iy) G, which equals
    (w/sqrt 2) LGV0,+1 - x0 G up to normalisation, so |c_G| : |c_V| = x0 : w/sqrt 2.
    A displacement of w/sqrt(2) therefore gives the equal superposition.
    """
    if not w > 0:
        raise ValueError("waist must be positive")
    s = w / np.sqrt(2)
    n = np.hypot(x0, s)
    return complex(-x0 / n), complex(s / n)


def displaced_vortex_numeric(x0: float, w: float = 1.0, charge: int = 1) -> tuple[complex, complex]:
    """Quadrature projections of the displaced vortex onto G and LGV0,charge."""
    beam = DisplacedVortex(x0, w, charge)
    c_g = overlap(FieldSuperposition.single(gaussian(w)), beam)
    c_v = overlap(FieldSuperposition.single(LGV(0, charge, w)), beam)
    return c_g, c_v


def displaced_vortex_superposition(x0: float, w: float = 1.0, charge: int = 1) -> FieldSuperposition:
    """The displaced vortex written as a two-term mode superposition."""
    c_g, c_v = displaced_vortex_decomposition(x0, w)
    sup = FieldSuperposition(((c_g, gaussian(w)), (c_v, LGV(0, charge, w))), waist=w,
                             displacement=x0)
    return sup


def _split_order01(sup: FieldSuperposition) -> tuple[complex, complex, int]:
    c_g = c_v = 0j
    charge = 0
    for c, m in sup.terms:
        if m.order == 0:
            c_g += c
        elif m.family == "LGV" and m.indices[0] == 0 and abs(m.indices[1]) == 1:
            if charge and m.indices[1] != charge:
                raise ValueError("superposition mixes both vortex charges")
            charge = m.indices[1]
            c_v += c
        else:
            raise ValueError(f"{m.label} is not G or a unit-charge vortex")
    if abs(c_g) < 1e-12 or abs(c_v) < 1e-12:
        raise ValueError("need both an order-0 and an order-1 component")
    return c_g, c_v, charge


def field_zero(sup: FieldSuperposition, z: float, z_r: float) -> tuple[float, float]:
    """Transverse position of the phase singularity of a G + LGV0,+-1 beam at z.

    Positions are in units of the local beam radius w(z).
    """
    c_g, c_v, charge = _split_order01(sup)
    # relative phase picked up by the order-1 term
    rel = np.exp(-1j * (gouy_phase(1, z, z_r) - gouy_phase(0, z, z_r)))
    # c_g + c_v rel sqrt(2) (x + i q y)/w = 0
    u = -c_g / (c_v * rel * np.sqrt(2))
    return float(u.real), float(charge * u.imag)


def singularity_rotation(sup: FieldSuperposition, z: float, z_r: float) -> float:
    """Azimuthal angle the off-axis singularity has turned through by z.

    Equal to charge * arctan(z / z_R): the relative Gouy phase between the
    order-0 and order-1 components.
    """
    x0, y0 = field_zero(sup, 0.0, z_r)
    x1, y1 = field_zero(sup, z, z_r)
    return float(np.angle(complex(x1, y1) / complex(x0, y0)))


def raster(beam: Field, n: int = 128, extent: float = 3.0) -> tuple[np.ndarray, np.ndarray, dict]:
    """Sample intensity and phase on an n x n grid spanning +-extent waists.

    Rows run along y (top row = largest y), columns along x.
    """
    half = extent * beam.waist
    xs = np.linspace(-half, half, n)
    X, Y = np.meshgrid(xs, xs[::-1])
    u = beam.amplitude(X, Y)
    meta = {"n": n, "extent_waists": extent, "waist": beam.waist,
            "x_min": -half, "x_max": half, "y_min": -half, "y_max": half}
    return np.abs(u) ** 2, np.angle(u), meta


def first_modes(family: str, count: int = 6, waist: float = 1.0) -> list[ModeSpec]:
    """The lowest-order ``count`` modes of a family, ordered by mode order."""
    out: list[ModeSpec] = []
    order = 0
    while len(out) < count:
        out.extend(_modes_of_order(family, order, waist))
        order += 1
    return out[:count]


def _modes_of_order(family: str, order: int, waist: float) -> Iterable[ModeSpec]:
    if family.upper() == "HG":
        return [HG(order - s, s, waist) for s in range(order + 1)]
    modes = []
    for p in range(order // 2 + 1):
        l = order - 2 * p
        modes.extend([LGV(p, l, waist)] if l == 0 else [LGV(p, l, waist), LGV(p, -l, waist)])
    return modes
