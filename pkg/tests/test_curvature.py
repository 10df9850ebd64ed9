import math

import numpy as np
import pytest

from reeb_minimizer import curvature as cv
from reeb_minimizer import geometry as geo

WEIGHTS = [(1, 1), (2, 1), (3, 2), (5, 3)]
P = geo.random_points(60, np.random.default_rng(11))


def test_round_ricci_is_twice_identity():
    ric = cv.ricci_frame(P, (1, 1))
    assert np.abs(ric - 2 * np.eye(3)).max() < 1e-3


@pytest.mark.parametrize("w", WEIGHTS)
def test_scalar_curvature_matches_trace(w):
    assert np.abs(cv.scalar_curvature_fd(P, w) - geo.scalar_curvature(P, w)).max() < 1e-3


@pytest.mark.parametrize("w", WEIGHTS)
@pytest.mark.parametrize("a", [0.5, 2.0])
def test_deformed_scalar_curvature_matches_trace(w, a):
    assert np.abs(cv.scalar_curvature_fd(P, w, a) - geo.scalar_curvature(P, w, a)).max() < 1e-3


def test_ricci_check_2_1_at_quarter_turn():
    p = np.array([[math.pi / 4, 0.3, 1.2]])
    dev_xi, dev_d, dev_tr = cv.ricci_check(p, (2, 1))
    assert max(dev_xi.max(), dev_d.max(), dev_tr.max()) < 1e-3


def test_round_ricci_check_is_tight():
    dev_xi, dev_d, _ = cv.ricci_check(P, (1, 1))
    assert dev_xi.max() < 1e-6 and dev_d.max() < 1e-6


@pytest.mark.parametrize("v", [[0, 1, 0], [0, 0, 1], [0, 0.6, -0.8]])
def test_mixed_curvature_3_2(v):
    assert cv.mixed_curvature_check(P, (3, 2), v).max() < 1e-3


def test_mixed_curvature_of_zero_vector():
    assert cv.mixed_curvature_check(P, (3, 2), [0, 0, 0]).max() == 0


def test_christoffel_oracle_round_sphere():
    # Gamma^s_{phi1 phi1} = sin s cos s, Gamma^phi2_{s phi2} = cot s on the round sphere
    G = cv.christoffel(P, (1, 1))
    s = P[:, 0]
    assert np.abs(G[:, 0, 1, 1] - np.sin(s) * np.cos(s)).max() < 1e-6
    assert np.abs(G[:, 2, 0, 2] - 1 / np.tan(s)).max() < 1e-4


@pytest.mark.parametrize("w", WEIGHTS)
def test_reeb_covariant_from_koszul_connection(w):
    r1, r2 = cv.reeb_covariant_check(P, w)
    assert max(r1.max(), r2.max()) < 1e-6


@pytest.mark.parametrize("w", WEIGHTS)
def test_integrability_conditions(w):
    r1, r2 = cv.integrability_residuals(P, w)
    assert max(r1.max(), r2.max()) < 1e-4


@pytest.mark.parametrize("w", WEIGHTS)
def test_phi_sectional_curvature(w):
    H = cv.phi_sectional_curvature(P, w)
    assert np.abs(H - (geo.scalar_curvature(P, w) - 4) / 2).max() < 1e-3


@pytest.mark.parametrize("w", WEIGHTS)
def test_scalar_curvature_constant_along_reeb(w):
    assert cv.reeb_invariance_of_scal(P, w).max() < 1e-8


@pytest.mark.parametrize("w", WEIGHTS)
def test_sigma_laplacian_oracle(w):
    lap = cv.sigma_laplacian_fd(P, w)
    div = geo.divergence(geo.sigma_gradient_field(w), P)
    assert np.abs(div + lap).max() / max(1.0, np.abs(lap).max()) < 1e-4


def test_laplacian_of_round_coordinate_function():
    # x1 = cos s cos phi1 is a first spherical harmonic: Delta x1 = 3 x1
    fn = lambda q: np.cos(q[..., 0]) * np.cos(q[..., 1])
    lap = cv.laplacian_fd(fn, P, (1, 1))
    assert np.abs(lap - 3 * fn(P)).max() < 1e-3


def test_magic_identity_on_round_sphere():
    assert cv.eigenfield_laplacian_check(P) < 1e-3


def test_magic_identity_trivial_cases():
    assert cv.magic_identity_residual(geo.reeb_field((1, 1)), 2.0, P).max() < 1e-10
    # f vanishes identically; only roundoff over h^2 remains
    assert cv.magic_identity_residual(geo.sigma_power_field((1, 1)), 2.0, P).max() < 1e-6


def test_magic_check_refuses_non_eigenfield():
    with pytest.raises(cv.EigenfieldError):
        cv.eigenfield_laplacian_check(P, curl_tol=0.0)
