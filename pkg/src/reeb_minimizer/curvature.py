"""Finite-difference curvature of the weighted sphere, used as an identity oracle.

Curvature is assembled in the orthonormal adapted frame.  Connection
coefficients ``g(nabla_{e_a} e_b, e_n)`` come from the Koszul formula applied to
the numerically extracted bracket structure constants (nothing Sasakian is
assumed), and their frame derivatives from central differences.  The frame is
smooth across the Hopf circles, so unlike coordinate Christoffel symbols every
quantity stays bounded near the chart ends.
"""

from __future__ import annotations

import numpy as np

from .geometry import (
    check_points,
    directional_fd,
    frame_at,
    koszul_connection,
    metric_at,
    scalar_curvature,
    sigma,
    structure_constants,
)

CONNECTION_STEP = 1e-4
LAPLACIAN_STEP = 3e-4
LAPLACIAN_SCALE = 0.3


def riemann_frame(p, w, a: float = 1.0, h: float = CONNECTION_STEP) -> np.ndarray:
    """``R[..., x, y, c, q] = g(R(e_x, e_y) e_c, e_q)`` in the adapted frame.

    Convention ``R(X, Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]``.
    """
    p = np.asarray(p, dtype=float)
    G = koszul_connection(p, w, a)
    cst = structure_constants(p, w, a)
    F = frame_at(p, w, a, check=False)
    # dG[..., m, b, c, q] = e_m(G[..., b, c, q])
    dG = np.stack([directional_fd(lambda q: koszul_connection(q, w, a), p, e, h) for e in F], axis=-4)
    R = np.einsum("...xycq->...xycq", dG) - np.einsum("...yxcq->...xycq", dG)
    R = R + np.einsum("...ycn,...xnq->...xycq", G, G) - np.einsum("...xcn,...ynq->...xycq", G, G)
    R = R - np.einsum("...xym,...mcq->...xycq", cst, G)
    return R


def ricci_frame(p, w, a: float = 1.0) -> np.ndarray:
    """``Ric(e_y, e_c) = sum_x g(R(e_x, e_y) e_c, e_x)``."""
    return np.einsum("...xycx->...yc", riemann_frame(p, w, a))


def scalar_curvature_fd(p, w, a: float = 1.0) -> np.ndarray:
    return np.einsum("...ii->...", ricci_frame(p, w, a))


def mixed_curvature_check(p, w, v, a: float = 1.0) -> np.ndarray:
    """``|R(v, xi) xi - v|`` for ``v`` given by frame coefficients tangent to ``D``."""
    p = check_points(p)
    v = np.broadcast_to(np.asarray(v, dtype=float), p.shape)
    if np.any(np.abs(v[..., 0]) > 0):
        raise ValueError("v must be tangent to the contact distribution (zero xi-coefficient)")
    R = riemann_frame(p, w, a)
    out = np.einsum("...xq,...x->...q", R[..., :, 0, 0, :], v) - v
    return np.linalg.norm(out, axis=-1)


def ricci_check(p, w, a: float = 1.0, n_dirs: int = 8):
    """Deviations of the assembled Ricci tensor from the Sasakian form.

    Returns per-point arrays ``(|Ric xi - 2 xi|, max_v |Ric(v, v) - (Scal/2 - 1)|,
    |tr Ric - Scal|)`` with ``v`` over ``n_dirs`` unit vectors of ``D`` and
    ``Scal`` from the closed-form expression.
    """
    p = check_points(p)
    Ric = ricci_frame(p, w, a)
    scal = scalar_curvature(p, w, a)
    dev_xi = np.linalg.norm(Ric[..., 0, :] - np.array([2.0, 0.0, 0.0]), axis=-1)
    dev_d = np.zeros(p.shape[:-1])
    for th in np.linspace(0, np.pi, n_dirs, endpoint=False):
        v = np.array([0.0, np.cos(th), np.sin(th)])
        val = np.einsum("i,...ij,j->...", v, Ric, v)
        dev_d = np.maximum(dev_d, np.abs(val - (scal / 2 - 1)))
    trace = np.einsum("...ii->...", Ric)
    return dev_xi, dev_d, np.abs(trace - scal)


def reeb_covariant_check(p, w, a: float = 1.0):
    """``|nabla_X1 xi - X2|`` and ``|nabla_X2 xi + X1|`` from the Koszul connection."""
    p = check_points(p)
    G = koszul_connection(p, w, a)
    return (
        np.linalg.norm(G[..., 1, 0, :] - [0.0, 0.0, 1.0], axis=-1),
        np.linalg.norm(G[..., 2, 0, :] + [0.0, 1.0, 0.0], axis=-1),
    )


def christoffel(p, w, a: float = 1.0, h: float = 1e-5) -> np.ndarray:
    """Coordinate ``Gamma^i_{jk}`` from central differences of the metric (interior oracle).

    The metric depends on ``s`` alone.  Loses accuracy near the chart ends.
    """
    p = np.asarray(p, dtype=float)
    g = metric_at(p, w, a, check=False)
    e = np.array([h, 0.0, 0.0])
    dg = np.zeros(g.shape + (3,))  # dg[..., l, k, j] = d_j g_lk
    dg[..., 0] = (metric_at(p + e, w, a, check=False) - metric_at(p - e, w, a, check=False)) / (2 * h)
    t = np.einsum("...lkj->...ljk", dg) + dg - np.einsum("...jkl->...ljk", dg)
    return 0.5 * np.einsum("...il,...ljk->...ijk", np.linalg.inv(g), t)


def laplacian_fd(
    fn, p, w, a: float = 1.0, h: float = LAPLACIAN_STEP, scale: float = LAPLACIAN_SCALE
) -> np.ndarray:
    """Positive Laplacian ``-div grad`` of a scalar ``fn(points)``.

    ``-sum_x (e_x e_x f - (nabla_{e_x} e_x) f)`` with nested central
    differences along the frame.
    """
    p = np.asarray(p, dtype=float)
    F = frame_at(p, w, a, check=False)
    G = koszul_connection(p, w, a)

    def first(q, m):
        return directional_fd(fn, q, frame_at(q, w, a, check=False)[m], h, scale)

    d1 = np.stack([first(p, m) for m in range(3)], axis=-1)
    out = np.zeros(p.shape[:-1])
    for x in range(3):
        second = directional_fd(lambda q: first(q, x), p, F[x], h, scale)
        out += second - np.einsum("...n,...n->...", G[..., x, x, :], d1)
    return -out


def sigma_laplacian_fd(p, w, a: float = 1.0) -> np.ndarray:
    return laplacian_fd(lambda q: sigma(q, w), p, w, a)


def magic_identity_residual(field, mu: float, p, h: float = LAPLACIAN_STEP) -> np.ndarray:
    """``|Delta f - mu (mu - 2) f|`` for ``f`` the ``xi``-coefficient of a curl eigenfield."""
    p = check_points(p)

    def f(q):
        return field(q)[0][..., 0]

    lap = laplacian_fd(f, p, field.w, field.a, h)
    return np.abs(lap - mu * (mu - 2.0) * f(p))


class EigenfieldError(RuntimeError):
    pass


def eigenfield_laplacian_check(p, coeffs=(1.0, 0.7, -0.4), curl_tol: float = 1e-6) -> float:
    """Max of ``|Delta f - 8 f|`` for ``f = eta(R)``, ``R`` a curl ``-2`` field of the round sphere."""
    from .geometry import curl, round_anti_killing_field

    p = check_points(p)
    R = round_anti_killing_field(coeffs)
    c, _ = R(p)
    err = np.abs(curl(R, p) + 2.0 * c).max()
    if err > curl_tol:
        raise EigenfieldError(f"constructed field is not a curl -2 eigenfield (residual {err:.3e})")
    return float(magic_identity_residual(R, -2.0, p).max())


def _structure_derivatives(p, w, a: float, h: float):
    """``C`` at ``p`` and ``dC[..., i, m] = e_m(C_i)`` by central differences."""
    from .geometry import structure_functions

    def C(q):
        sf = structure_functions(q, w, a, check=False)
        return np.stack([sf.c0, sf.c1, sf.c2], axis=-1)

    F = frame_at(p, w, a, check=False)
    dC = np.stack([directional_fd(C, p, e, h) for e in F], axis=-1)
    return C(p), dC


def integrability_residuals(p, w, a: float = 1.0, h: float = CONNECTION_STEP):
    """Jacobi-identity residuals of the structure functions.

    ``X1(C0) - xi(C1) - C2 (C0 + 1)`` and ``X2(C0) - xi(C2) + C1 (C0 + 1)``,
    returned in absolute value.
    """
    p = check_points(p)
    C, dC = _structure_derivatives(p, w, a, h)
    r1 = dC[..., 0, 1] - dC[..., 1, 0] - C[..., 2] * (C[..., 0] + 1)
    r2 = dC[..., 0, 2] - dC[..., 2, 0] + C[..., 1] * (C[..., 0] + 1)
    return np.abs(r1), np.abs(r2)


def phi_sectional_curvature(p, w, a: float = 1.0, h: float = CONNECTION_STEP) -> np.ndarray:
    """``H = X1(C2) - X2(C1) - C1^2 - C2^2 + 2 C0 - 1`` from differenced structure functions."""
    p = check_points(p)
    C, dC = _structure_derivatives(p, w, a, h)
    return dC[..., 2, 1] - dC[..., 1, 2] - C[..., 1] ** 2 - C[..., 2] ** 2 + 2 * C[..., 0] - 1


def reeb_invariance_of_scal(p, w, a: float = 1.0, h: float = CONNECTION_STEP) -> np.ndarray:
    """``|xi(Scal)|`` for the closed-form scalar curvature."""
    p = check_points(p)
    xi = frame_at(p, w, a, check=False).xi
    return np.abs(directional_fd(lambda q: scalar_curvature(q, w, a), p, xi, h))
