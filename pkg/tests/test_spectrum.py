import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reeb_minimizer import geometry as geo
from reeb_minimizer import spectrum as sp

N = 40
PTS = sp.verification_points(101)


@pytest.fixture(scope="module")
def round_report():
    return sp.spectrum((1, 1), 1.0, M=3, N=N, top=20, mu_max=4.5)


@pytest.fixture(scope="module")
def weighted_report():
    return sp.spectrum((2, 1), 1.0, M=3, N=N, top=10, mu_max=3.5)


@pytest.fixture(scope="module")
def deformed_report():
    return sp.spectrum((2, 1), 2.0, M=3, N=N, top=10, mu_max=2.1)


# Chebyshev helpers -----------------------------------------------------------


def test_chebyshev_diff_is_exact_on_polynomials():
    x = sp.chebyshev_nodes(12)
    p = np.polynomial.Polynomial([1, -2, 0.5, 3, 0, 1.5])
    assert np.abs(sp.chebyshev_diff(12) @ p(x) - p.deriv()(x)).max() < 1e-11


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=16))
def test_chebyshev_coefficients_round_trip(coef):
    coef = np.array(coef)
    x = sp.chebyshev_nodes(16)
    vals = np.polynomial.chebyshev.chebval(x, coef)
    back = sp.chebyshev_coefficients(vals)
    assert np.allclose(sp.chebyshev_values(back, x), vals, atol=1e-11)
    assert np.allclose(back[: len(coef)], coef, atol=1e-11)


def test_nodes_are_interior_and_decreasing():
    x = sp.chebyshev_nodes(9)
    assert np.all(np.diff(x) < 0) and np.abs(x).max() < 1


# modes and reduction -------------------------------------------------------------


def test_mode_charges():
    assert sp.ModeSpec(2, -1).charges() == ((2, -1), (1, -2), (3, 0))


def test_mode_set_size():
    assert len(sp.modes(5)) == 121
    with pytest.raises(ValueError):
        sp.modes(-1)


@pytest.mark.parametrize("kwargs", [{"a": 0.0, "N": 20}, {"a": 1.0, "N": 3}])
def test_reduce_mode_rejects_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        sp.reduce_mode((2, 1), kwargs["a"], sp.ModeSpec(0, 0), kwargs["N"])


@pytest.mark.parametrize("w", [(1, 1), (2, 1), (5, 3)])
@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_rotated_operator_is_real(w, a):
    op = sp.reduce_mode(w, a, sp.ModeSpec(2, -1), 16)
    assert op.matrix.dtype == np.float64
    assert op.size == 48


def test_reeb_field_in_trivial_mode():
    op = sp.reduce_mode((1, 1), 1.0, sp.ModeSpec(0, 0), N)
    y = np.r_[np.ones(N), np.zeros(2 * N)]
    assert np.abs(op.matrix @ y - 2 * y).max() < 1e-12


@pytest.mark.parametrize("mode, slot", [(sp.ModeSpec(1, 1), 1), (sp.ModeSpec(-1, -1), 2)])
def test_known_contact_eigenfield_profile(mode, slot):
    # sigma^{3/2} (X1 -+ i X2) has f = 0 and a single charge-zero profile sigma^{3/2}
    op = sp.reduce_mode((2, 1), 1.0, mode, N)
    x = sp.chebyshev_nodes(N)
    z = np.zeros(3 * N, dtype=complex)
    z[slot * N : (slot + 1) * N] = (1.5 - 0.5 * x) ** 1.5
    y = z / op.rotation
    assert np.abs(op.matrix @ y - 3 * y).max() / np.abs(y).max() < 1e-6


def gradient_profiles(w, a, mode, N):
    """Nodal profiles of grad(G(s) e^{i(m phi1 + n phi2)}) with a regular G."""
    cf, cu, cw = mode.charges()
    x = sp.chebyshev_nodes(N)
    s = np.arccos(x) / 2
    h = sp.chebyshev_coefficients(1 + 0.3 * x - 0.2 * x**2)
    r = np.sqrt(geo.sigma(np.stack([s, s, s], -1), w) / a)
    g, zg, zbg = sp._charged_parts(h, cf, s, 0 * s, 0 * s, r, 0 * s)
    f = 1j * (w.l * cf[0] + w.k * cf[1]) / a * g

    def strip(vals, ch):
        ea, eb = sp._exponents(ch)
        return vals / (np.sin(s) ** ea * np.cos(s) ** eb)

    return np.concatenate([strip(f, cf), strip(zbg / 2, cu), strip(zg / 2, cw)])


@pytest.mark.parametrize("w, a", [((1, 1), 1.0), ((2, 1), 1.0), ((3, 2), 2.0)])
@pytest.mark.parametrize("mode", [sp.ModeSpec(0, 1), sp.ModeSpec(2, 1), sp.ModeSpec(-1, 3)])
def test_gradients_are_annihilated(w, a, mode):
    op = sp.reduce_mode(w, a, mode, N)
    z = gradient_profiles(geo.Weights(*w), a, mode, N)
    y = z / op.rotation
    assert np.abs(op.matrix @ y).max() / np.abs(y).max() < 1e-8


def test_mode_field_reproduces_reeb_field():
    X = sp.mode_field((2, 1), 1.0, sp.ModeSpec(0, 0), (np.array([1.0]), np.zeros(1), np.zeros(1)))
    c, dc = X(PTS)
    assert np.abs(c - [1, 0, 0]).max() < 1e-14 and np.abs(dc).max() < 1e-14


def test_mode_field_reproduces_sigma_power_field():
    coef = sp.chebyshev_coefficients((1.5 - 0.5 * sp.chebyshev_nodes(N)) ** 1.5)
    X = sp.mode_field((2, 1), 1.0, sp.ModeSpec(1, 1), (np.zeros(1), coef, np.zeros(1)))
    c, _ = X(PTS)
    e1, _ = geo.sigma_power_field((2, 1), 1)(PTS)
    e2, _ = geo.sigma_power_field((2, 1), 2)(PTS)
    # u Z with Z = X1 + i X2
    assert np.abs(c - (e1 + 1j * e2)).max() < 1e-10


# solver ----------------------------------------------------------------------


def test_round_spectrum_matches_polynomial_oracle(round_report):
    oracle = sp.polynomial_curl_spectrum(4)
    got = {round(c.mu, 6): c.multiplicity for c in round_report.clusters}
    for mu, mult in oracle.items():
        if abs(mu) <= 4:
            assert got[mu] == mult
    assert all(abs(c.mu - round(c.mu)) < 1e-4 for c in round_report.clusters)


def test_round_oracle_multiplicities():
    oracle = sp.polynomial_curl_spectrum(4)
    for j in range(3):
        assert oracle[2.0 + j] == (j + 1) * (j + 3)
        assert oracle[-2.0 - j] == (j + 1) * (j + 3)


def test_round_frame_brackets():
    J, X1, X2 = sp.round_frame_matrices()
    br = lambda A, B: B @ A - A @ B
    assert np.allclose(br(X1, X2), -2 * J)


def test_weighted_first_eigenvalue_is_simple(weighted_report):
    c = weighted_report.clusters
    pos = [x for x in c if x.mu > 0]
    assert pos[0].mu == pytest.approx(2, abs=1e-4) and pos[0].multiplicity == 1 and pos[0].d_tangent == 0
    assert weighted_report.mu1 == pytest.approx(2, abs=1e-4)
    assert weighted_report.mu1_D == pytest.approx(3, abs=1e-4)
    assert weighted_report.cluster_at(3.0).d_tangent == 2


def test_deformed_run_has_contact_cluster_below_two(deformed_report):
    c = deformed_report.cluster_at(1.5)
    assert c is not None and c.d_tangent == c.multiplicity == 2
    assert deformed_report.mu1 == pytest.approx(min(2, 3 / 2), abs=1e-4)


def test_contact_clusters_rescale_with_deformation(weighted_report, deformed_report):
    for c in weighted_report.clusters:
        if c.d_tangent and 0 < c.mu / 2 <= 2.1 * 0.95:
            assert deformed_report.cluster_at(c.mu / 2) is not None


@pytest.mark.parametrize("name", ["round_report", "weighted_report", "deformed_report"])
def test_reported_eigenvectors(name, request):
    rep = request.getfixturevalue(name)
    assert rep.results
    for r in rep.results:
        assert r.residual <= sp.RESIDUAL_TOL
        assert r.divergence <= 1e-6
        if r.value > 0 and not r.d_tangent:
            assert r.value >= 2 - 1e-4


@pytest.mark.parametrize("name", ["round_report", "weighted_report", "deformed_report"])
def test_phi_preserves_contact_eigenfields(name, request):
    rep = request.getfixturevalue(name)
    w, a = rep.weights, rep.a
    tangent = [r for r in rep.results if r.d_tangent]
    assert tangent
    for r in tangent:
        Y = geo.phi_field(r.field(w, a))
        c, _ = Y(PTS)
        assert np.abs(geo.curl(Y, PTS) - r.value * c).max() / np.abs(c).max() < 1e-8


def test_parallel_solve_is_deterministic():
    a = sp.spectrum((3, 2), 1.0, M=1, N=24, top=4)
    b = sp.spectrum((3, 2), 1.0, M=1, N=24, top=4, workers=3)
    assert [c.to_json() for c in a.clusters] == [c.to_json() for c in b.clusters]


def test_truncated_runs_flag_clusters():
    rep = sp.spectrum((1, 1), 1.0, M=1, N=24, top=2)
    assert rep.complete_below is not None
    assert any(c.possibly_incomplete for c in rep.clusters)


def test_aggregate_merges_within_tolerance():
    mk = lambda v, m, t: sp.EigenResult(v, 1e-9, sp.ModeSpec(*m), t)
    clusters = sp.aggregate([mk(2.0, (0, 0), False), mk(2.00005, (1, 0), True), mk(3.0, (1, 1), True)])
    assert [(c.multiplicity, c.d_tangent) for c in clusters] == [(2, 1), (1, 1)]
    assert clusters[0].modes == [(0, 0), (1, 0)]


def test_report_json(weighted_report):
    obj = json.loads(json.dumps(weighted_report.to_json()))
    assert {"weights", "a", "M", "N", "top", "mu1", "mu1_D", "clusters"} <= set(obj)
    assert {"mu", "multiplicity", "d_tangent", "max_residual"} <= set(obj["clusters"][0])


def test_negative_power_is_rejected():
    with pytest.raises(sp.SpectrumError):
        sp._power(np.ones(3), -1)
