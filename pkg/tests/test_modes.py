import numpy as np
import pytest

from spatialqudit.modes import (HG, LGV, DisplacedVortex, FieldSuperposition, ModeSpec,
                                QuadratureError, displaced_vortex_decomposition,
                                displaced_vortex_numeric, displaced_vortex_superposition,
                                first_modes, gaussian, gouy_phase, mode_amplitude, overlap,
                                raster, singularity_rotation)


def single(mode):
    return FieldSuperposition.single(mode)


def riemann_norm(f, w=1.0, n=801, half=7.0):
    """Plain midpoint-grid power integral, independent of the Gauss-Legendre path."""
    xs = np.linspace(-half * w, half * w, n)
    h = xs[1] - xs[0]
    X, Y = np.meshgrid(xs, xs)
    return np.sum(np.abs(f(X, Y)) ** 2) * h * h


def test_mode_order():
    assert HG(2, 1).order == 3
    assert LGV(1, -2).order == 4
    assert gaussian().order == 0
    with pytest.raises(ValueError):
        ModeSpec("HG", (-1, 0))
    with pytest.raises(ValueError):
        ModeSpec("XX", (0, 0))
    with pytest.raises(ValueError):
        HG(0, 0, waist=0)


def test_gaussian_peak():
    for w in (1.0, 0.37):
        # unit power fixes the on-axis value: peak^2 * pi w^2 / 2 = 1
        peak = mode_amplitude(gaussian(w), 0.0, 0.0)
        assert abs(peak - np.sqrt(2 / np.pi) / w) < 1e-14
        assert abs(peak.imag) == 0 and peak.real > 0


def test_vortex_zero_on_axis_and_hg_parity():
    assert abs(mode_amplitude(LGV(0, 1), 0.0, 0.0)) == 0
    xs = np.linspace(-2, 2, 9)
    ys = np.linspace(-1.5, 1.7, 9)
    assert np.allclose(mode_amplitude(HG(1, 0), -xs, ys), -mode_amplitude(HG(1, 0), xs, ys))


@pytest.mark.parametrize("mode", [HG(0, 0), HG(1, 0), HG(2, 1), LGV(0, 1), LGV(1, -1), LGV(2, 0)])
def test_modes_normalised_by_riemann_sum(mode):
    assert abs(riemann_norm(lambda x, y: mode_amplitude(mode, x, y)) - 1) < 1e-9


def test_gouy_phase():
    assert gouy_phase(3, 0.0, 2.0) == 0
    assert abs(gouy_phase(0, 1e12, 1.0) - np.pi / 2) < 1e-9
    rel = gouy_phase(1, 1.0, 1.0) - gouy_phase(0, 1.0, 1.0)
    assert abs(rel - (np.arctan(1.0) * 2 - np.arctan(1.0))) < 1e-15
    assert abs(rel - np.pi / 4) < 1e-15
    with pytest.raises(ValueError):
        gouy_phase(0, 1.0, 0.0)


def test_overlap_examples():
    G = single(gaussian())
    assert abs(overlap(G, G) - 1) < 1e-6
    assert abs(overlap(G, single(LGV(0, 1)))) < 1e-6
    sup = FieldSuperposition.of((1, HG(1, 0)), (1, HG(0, 1)))
    assert abs(overlap(single(HG(1, 0)), sup) - 1 / np.sqrt(2)) < 1e-6


def test_overlap_requires_common_waist():
    with pytest.raises(ValueError):
        overlap(single(gaussian(1.0)), single(gaussian(2.0)))


def test_overlap_reports_nonconvergence():
    class Rough:
        waist = 1.0

        def amplitude(self, x, y):
            return np.sign(np.sin(40 * x)) * np.exp(-x * x - y * y)

    with pytest.raises(QuadratureError):
        overlap(Rough(), Rough(), max_nodes=64)


@pytest.mark.parametrize("family", ["HG", "LGV"])
def test_orthonormality(family):
    ms = first_modes(family, 6, waist=0.8)
    gram = np.array([[overlap(single(a), single(b)) for b in ms] for a in ms])
    assert np.max(np.abs(gram - np.eye(6))) < 1e-5


def test_hg_from_vortices():
    combo = FieldSuperposition.of((1, LGV(0, 1)), (1, LGV(0, -1)))
    assert abs(overlap(single(HG(1, 0)), combo) - 1) < 1e-5
    xs = np.linspace(-2, 2, 7)
    X, Y = np.meshgrid(xs, xs)
    assert np.allclose(combo.amplitude(X, Y), mode_amplitude(HG(1, 0), X, Y), atol=1e-12)


def test_superposition_normalised():
    sup = FieldSuperposition.of((3, gaussian()), (4j, LGV(0, 1)))
    assert abs(sum(abs(c) ** 2 for c, _ in sup.terms) - 1) < 1e-12
    with pytest.raises(ValueError):
        FieldSuperposition.of((1, gaussian(1.0)), (1, LGV(0, 1, 2.0)))


def test_displaced_vortex_analytic():
    c_g, c_v = displaced_vortex_decomposition(0.0)
    assert (c_g, c_v) == (0, 1)
    c_g, c_v = displaced_vortex_decomposition(1 / np.sqrt(2))
    assert abs(abs(c_g) - 1 / np.sqrt(2)) < 1e-12
    assert abs(abs(c_v) - 1 / np.sqrt(2)) < 1e-12


def test_displaced_vortex_quadrature_equal_split():
    n_g, n_v = displaced_vortex_numeric(1 / np.sqrt(2))
    assert abs(abs(n_g) ** 2 / abs(n_v) ** 2 - 1) < 1e-5


@pytest.mark.parametrize("x0", [0.0, 0.2, 0.5, 1 / np.sqrt(2), 1.0])
@pytest.mark.parametrize("w", [1.0, 1.7])
def test_displaced_vortex_has_no_higher_orders(x0, w):
    c_g, c_v = displaced_vortex_numeric(x0 * w, w)
    a_g, a_v = displaced_vortex_decomposition(x0 * w, w)
    assert abs(c_g - a_g) < 1e-6 and abs(c_v - a_v) < 1e-6
    residue = 1 - abs(c_g) ** 2 - abs(c_v) ** 2
    assert abs(residue) < 1e-6


def test_displaced_vortex_field_matches_superposition():
    x0 = 0.4
    sup = displaced_vortex_superposition(x0)
    raw = DisplacedVortex(x0)
    xs = np.linspace(-2, 2, 11)
    X, Y = np.meshgrid(xs, xs)
    assert np.allclose(sup.amplitude(X, Y), raw.amplitude(X, Y), atol=1e-12)
    # the singularity sits where it was put
    assert abs(raw.amplitude(x0, 0.0)) < 1e-15


def test_singularity_rotation_values():
    sup = displaced_vortex_superposition(1 / np.sqrt(2))
    assert abs(singularity_rotation(sup, 0.0, 1.0)) < 1e-15
    assert abs(singularity_rotation(sup, 1.0, 1.0) - np.pi / 4) < 1e-12
    assert abs(singularity_rotation(sup, 1e9, 1.0) - np.pi / 2) < 1e-8


def test_singularity_rotation_monotone_and_charge_sign():
    sup = displaced_vortex_superposition(0.3)
    zs = np.linspace(0, 20, 60)
    angles = [singularity_rotation(sup, z, 1.5) for z in zs]
    assert np.all(np.diff(angles) > 0)
    left = displaced_vortex_superposition(0.3, charge=-1)
    assert abs(singularity_rotation(left, 1.5, 1.5) + np.pi / 4) < 1e-12


def test_singularity_rotation_rejects_single_mode():
    with pytest.raises(ValueError):
        singularity_rotation(single(LGV(0, 1)), 1.0, 1.0)
    with pytest.raises(ValueError):
        singularity_rotation(FieldSuperposition.of((1, gaussian()), (1, HG(2, 0))), 1.0, 1.0)


def test_raster_shapes():
    inten, phase, meta = raster(single(LGV(0, 1)), n=33, extent=3)
    assert inten.shape == phase.shape == (33, 33)
    assert inten[16, 16] < 1e-30          # on-axis vortex zero
    assert meta["n"] == 33
