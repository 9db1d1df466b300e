import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spatialqudit.bitcommit import (MARKED_P, LogicalBitSpec, NoCrossingError, SecurityPoint,
                                    closest_ideal_lambda, control, curve_depolarized,
                                    curve_ideal_qutrit, curve_qubit_boundary, curves_table,
                                    depolarized_tokens, ideal_tokens, knowledge_gain,
                                    logical_states_ideal, prepare_logical_from_source,
                                    report_from_logical, residual_threshold, residual_tokens,
                                    security_point, security_point_from_source, token_states)
from spatialqudit.core import (DensityMatrix, PostselectionError, fidelity,
                               product_ket, random_unitary)
from spatialqudit.entanglement import nonmax_state

lams = st.floats(0.0, 1.0)
phis = st.floats(-np.pi, np.pi)


def c_closed_form(lam, p):
    return ((1 - p) * (1 - lam) + p / 3 + 2 * np.sqrt(p / 3 * ((1 - p) * lam + p / 3))) / 2


def test_logical_state_example():
    s0, s1 = logical_states_ideal(LogicalBitSpec(0.27))
    assert abs(s0.amplitudes[5] - np.sqrt(0.27)) < 1e-15
    assert abs(s0.amplitudes[1] - np.sqrt(0.73)) < 1e-15
    assert abs(s1.amplitudes[3] - np.sqrt(0.27)) < 1e-15
    assert abs(s1.amplitudes[7] - np.sqrt(0.73)) < 1e-15
    assert np.count_nonzero(s0.amplitudes) == 2 and np.count_nonzero(s1.amplitudes) == 2


@settings(max_examples=40, deadline=None)
@given(lams, phis)
def test_logical_states_orthonormal(lam, phi):
    s0, s1 = logical_states_ideal(LogicalBitSpec(lam, phi))
    assert abs(np.vdot(s0.amplitudes, s1.amplitudes)) < 1e-12
    assert abs(np.linalg.norm(s0.amplitudes) - 1) < 1e-12


def test_spec_validation():
    with pytest.raises(ValueError):
        LogicalBitSpec(1.2)
    with pytest.raises(ValueError):
        LogicalBitSpec(0.3, 4.0)


def test_token_reductions_at_fitted_lambda():
    s0, s1 = logical_states_ideal(LogicalBitSpec(0.27, 0.4))
    t0, t1 = token_states(s0.density(), s1.density())
    assert np.allclose(t0.matrix, np.diag([0, 0.73, 0.27]), atol=1e-12)
    assert np.allclose(t1.matrix, np.diag([0.27, 0.73, 0]), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(lams, phis)
def test_ideal_pipeline_matches_closed_form(lam, phi):
    s0, s1 = logical_states_ideal(LogicalBitSpec(lam, phi))
    pt = security_point(*token_states(s0.density(), s1.density()))
    assert abs(pt.K - lam / 2) < 1e-12
    assert abs(pt.C - (1 - lam) / 2) < 1e-12


def test_trace_distance_and_commuting_fidelity_oracles():
    lam = 0.37
    t0, t1 = ideal_tokens(lam)
    diff_eigs = np.linalg.eigvalsh(t0.matrix - t1.matrix)
    assert np.allclose(np.sort(diff_eigs), [-lam, 0, lam])
    p, q = np.diag(t0.matrix).real, np.diag(t1.matrix).real
    assert abs(2 * control(t0, t1) - np.sum(np.sqrt(p * q))) < 1e-12
    assert abs(knowledge_gain(t0, t0)) < 1e-15
    assert abs(control(t1, t1) - 0.5) < 1e-12


def test_preparation_from_pure_source():
    eps = 1.79
    rho = nonmax_state("qutrit", eps).density()
    lam = 1 / (1 + eps ** 2)
    s0, s1 = logical_states_ideal(LogicalBitSpec(lam))
    r0 = prepare_logical_from_source(rho, 0)
    r1 = prepare_logical_from_source(rho, 1)
    assert abs(fidelity(r0, s0.density()) - 1) < 1e-12
    assert abs(fidelity(r1, s1.density()) - 1) < 1e-12
    assert abs(lam - 0.238) < 5e-4


def test_postselection_failure():
    rho = product_ket([2, 0], [3, 3]).density()
    with pytest.raises(PostselectionError):
        prepare_logical_from_source(rho, 0)
    with pytest.raises(ValueError):
        prepare_logical_from_source(rho, 2)


@pytest.mark.parametrize("lam", [0.0, 0.27, 0.5, 1.0])
@pytest.mark.parametrize("p", [0.0, *MARKED_P, 1.0])
def test_depolarized_closed_forms(lam, p):
    t0, t1 = depolarized_tokens(lam, p)
    assert abs(knowledge_gain(t0, t1) - (1 - p) * lam / 2) < 1e-12
    assert abs(control(t0, t1) - c_closed_form(lam, p)) < 1e-12


def test_depolarized_endpoints():
    pt = curve_depolarized(0.3, [1.0])[0]
    assert abs(pt.K) < 1e-12 and abs(pt.C - 0.5) < 1e-12
    y = curve_depolarized(0.5, [0.09])[0]
    assert abs(y.K - 0.2275) < 1e-12


@pytest.mark.parametrize("lam", [0.1, 0.27, 0.5, 0.9])
def test_depolarized_monotone(lam):
    pts = curve_depolarized(lam, np.linspace(0, 1, 41))
    K = np.array([p.K for p in pts])
    C = np.array([p.C for p in pts])
    assert np.all(np.diff(K) < 0) and np.all(np.diff(C) > 0)


def test_ideal_curve_examples():
    w = curve_ideal_qutrit([0.0, 0.5, 1.0])
    assert (w[0].K, w[0].C) == (0.0, 0.5)
    assert abs(w[1].K - 0.25) < 1e-12 and abs(w[1].C - 0.25) < 1e-12
    assert abs(w[2].K - 0.5) < 1e-12 and abs(w[2].C) < 1e-12


def test_qubit_boundary_identity():
    lam = np.linspace(0, 0.5, 51)
    for l, pt in zip(lam, curve_qubit_boundary(lam)):
        assert abs(pt.radius_sq - 0.25) < 1e-12
        assert abs(pt.K - (1 - 2 * l) / 2) < 1e-12
        assert abs(pt.C - np.sqrt(l * (1 - l))) < 1e-12
    with pytest.raises(ValueError):
        curve_qubit_boundary([0.7])


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6))
def test_ideal_points_lie_inside_qubit_arc(lam):
    pt = curve_ideal_qutrit([lam])[0]
    assert pt.beats_qubits and not pt.inside_qubit_region
    assert abs(pt.K + pt.C - 0.5) < 1e-12


@settings(max_examples=25, deadline=None)
# sqrt(F) has unbounded slope at zero eigenvalues: round-off of ~1e-16 in an
# eigenvalue of size e shifts it by ~1e-16/sqrt(e), so p is kept away from
# the (0, 1e-6) band where that exceeds the tolerance
@given(st.integers(0, 2**32 - 1), st.floats(0, 1),
       st.one_of(st.just(0.0), st.floats(1e-6, 1)))
def test_common_unitary_invariance(seed, lam, p):
    U = random_unitary(3, np.random.default_rng(seed))
    t0, t1 = depolarized_tokens(lam, p)
    u0, u1 = (DensityMatrix(U @ t.matrix @ U.conj().T, (3,)) for t in (t0, t1))
    assert abs(knowledge_gain(u0, u1) - knowledge_gain(t0, t1)) < 1e-10
    assert abs(control(u0, u1) - control(t0, t1)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(lams, st.floats(0, 1))
def test_security_points_bounded(lam, p):
    pt = security_point(*depolarized_tokens(lam, p))
    assert -1e-12 <= pt.K <= 0.5 + 1e-12 and -1e-12 <= pt.C <= 0.5 + 1e-12
    assert pt.K + pt.C >= 0.5 - 1e-12


def test_security_point_flags():
    assert SecurityPoint(0.1, 0.1).beats_qubits
    assert SecurityPoint(0.0, 0.5).inside_qubit_region


def test_residual_tokens_model():
    t0, t1 = residual_tokens(0.27, 0.02)
    assert np.allclose(np.diag(t0.matrix).real, [0.02, 0.98 * 0.73, 0.98 * 0.27])
    assert np.allclose(np.diag(t1.matrix).real, [0.98 * 0.27, 0.98 * 0.73, 0.02])
    assert security_point(*residual_tokens(0.27, 0.0)).beats_qubits


def test_residual_sweep_never_crosses_arc_below_one():
    # K(r)^2 + C(r)^2 stays below 1/4 for every r < 1 under this token model
    for r in np.linspace(0, 0.99, 100):
        assert security_point(*residual_tokens(0.27, r)).radius_sq < 0.25
    with pytest.raises(NoCrossingError):
        residual_threshold(0.27)


def test_residual_threshold_bisection_contract():
    # the arc is reached at r = 1 (both tokens pure and orthogonal), so a search
    # window reaching r = 1 brackets the sign change and bisection finds its edge
    r = residual_threshold(0.27, r_max=1.0)
    assert 1 - 1e-5 < r < 1.0
    with pytest.raises(ValueError):
        residual_threshold(1.0)


def test_closest_ideal_lambda():
    lam, f0, f1 = closest_ideal_lambda(*ideal_tokens(0.27))
    assert abs(lam - 0.27) < 1e-5
    assert f0 > 1 - 1e-9 and f1 > 1 - 1e-9


def test_report_from_ideal_pair():
    s0, s1 = logical_states_ideal(LogicalBitSpec(0.27))
    rep = report_from_logical(s0.density(), s1.density())
    assert abs(rep.point.K - 0.135) < 1e-12 and abs(rep.point.C - 0.365) < 1e-12
    assert rep.residuals == (0.0, 0.0)
    d = rep.to_dict()
    assert d["schema"] == "bc-report/1" and d["fidelity_convention"]["C"] == "sqrt"


def test_report_from_pure_source():
    rep = security_point_from_source(nonmax_state("qutrit", 1.79).density())
    lam = 1 / (1 + 1.79 ** 2)
    assert abs(rep.point.K - lam / 2) < 1e-10 and abs(rep.point.C - (1 - lam) / 2) < 1e-10
    assert abs(rep.fitted_lambda - lam) < 1e-5
    assert rep.inside_qubit_region is False
    assert all(0 < p < 1 for p in rep.postselection_probabilities)


def test_curves_table_shape():
    rows = curves_table()
    names = {r[0] for r in rows}
    assert names == {"W", "X", "Y", "Z"}
    w = [(r[2], r[3]) for r in rows if r[0] == "W"]
    assert w[0] == (0.0, 0.5) and abs(w[-1][0] - 0.5) < 1e-12 and abs(w[-1][1]) < 1e-12
    y_params = [r[1] for r in rows if r[0] == "Y"]
    assert set(MARKED_P) <= set(y_params) and len(y_params) == 51
