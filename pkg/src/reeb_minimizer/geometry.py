"""Pointwise Sasakian geometry of the weighted 3-sphere in Hopf coordinates.

Points are arrays of shape ``(..., 3)`` holding ``(s, phi1, phi2)`` with the
sphere embedded as ``(cos s e^{i phi1}, sin s e^{i phi2})``.  Vectors are given
by their components in the coordinate basis ``(d_s, d_phi1, d_phi2)``; vector
fields along the adapted frame ``(xi, X1, X2)`` are given by their frame
coefficients ``(f, f1, f2)``.

A ``D``-homothetic deformation with constant ``a`` uses the frame
``(xi / a, X1 / sqrt(a), X2 / sqrt(a))``, orthonormal for
``g' = a g + a (a - 1) eta (x) eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Tuple

import numpy as np

# pointwise ops refuse to evaluate closer than this to the Hopf circles
CHART_MARGIN = 1e-3


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Weights:
    k: int
    l: int

    def __post_init__(self):
        if int(self.k) != self.k or int(self.l) != self.l:
            raise GeometryError(f"weights must be integers, got ({self.k}, {self.l})")
        if self.l < 1 or self.k < self.l:
            raise GeometryError(f"weights must satisfy 1 <= l <= k, got ({self.k}, {self.l})")
        if math.gcd(self.k, self.l) != 1:
            raise GeometryError(f"weights ({self.k}, {self.l}) are not coprime")

    @property
    def round(self) -> bool:
        return self.k == 1 and self.l == 1


def as_weights(w) -> Weights:
    if isinstance(w, Weights):
        return w
    k, l = w
    return Weights(int(k), int(l))


def check_points(p, margin: float = CHART_MARGIN) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3:
        raise GeometryError(f"points must have trailing dimension 3, got shape {p.shape}")
    s = p[..., 0]
    if np.any(s < margin) or np.any(s > np.pi / 2 - margin):
        raise GeometryError(
            f"s must lie in [{margin}, pi/2 - {margin}] (Hopf chart degenerates at the ends)"
        )
    return p


def random_points(n: int, rng=None, margin: float = CHART_MARGIN) -> np.ndarray:
    """Uniform samples in the coordinate box, with ``s`` kept off the chart ends."""
    rng = np.random.default_rng(rng)
    s = rng.uniform(margin, np.pi / 2 - margin, n)
    phi = rng.uniform(0.0, 2 * np.pi, (n, 2))
    return np.column_stack([s, phi])


def sigma(p, w) -> np.ndarray:
    """``l cos^2 s + k sin^2 s``."""
    w = as_weights(w)
    s = np.asarray(p, dtype=float)[..., 0]
    return w.l * np.cos(s) ** 2 + w.k * np.sin(s) ** 2


def _sigma_ds(s, w):
    return (w.k - w.l) * np.sin(2 * s)


def _sigma_dss(s, w):
    return 2 * (w.k - w.l) * np.cos(2 * s)


def eta_coords(p, w, a: float = 1.0) -> np.ndarray:
    """Covector components of the (deformed) contact form ``a * eta_w``."""
    w = as_weights(w)
    s = np.asarray(p, dtype=float)[..., 0]
    sg = sigma(p, w)
    out = np.zeros(s.shape + (3,))
    out[..., 1] = np.cos(s) ** 2 / sg
    out[..., 2] = np.sin(s) ** 2 / sg
    return a * out


def metric_at(p, w, a: float = 1.0, check: bool = True) -> np.ndarray:
    """Coordinate matrix of ``g' = a g_w + a(a-1) eta_w (x) eta_w``."""
    w = as_weights(w)
    p = check_points(p) if check else np.asarray(p, dtype=float)
    s = p[..., 0]
    sg = sigma(p, w)
    c2, s2 = np.cos(s) ** 2, np.sin(s) ** 2
    g = np.zeros(s.shape + (3, 3))
    g[..., 0, 0] = 1.0 / sg
    # sigma^{-3} sin^2 cos^2 (k dphi1 - l dphi2)^2
    b = s2 * c2 / sg**3
    eta = eta_coords(p, w)
    g[..., 1, 1] = b * w.k**2
    g[..., 2, 2] = b * w.l**2
    g[..., 1, 2] = g[..., 2, 1] = -b * w.k * w.l
    g[..., 1:, 1:] += eta[..., 1:, None] * eta[..., None, 1:]
    return a * g + a * (a - 1) * eta[..., :, None] * eta[..., None, :]


class Frame(NamedTuple):
    xi: np.ndarray
    x1: np.ndarray
    x2: np.ndarray

    def matrix(self) -> np.ndarray:
        """Frame vectors as columns, shape ``(..., 3, 3)``."""
        return np.stack([self.xi, self.x1, self.x2], axis=-1)


def frame_at(p, w, a: float = 1.0, check: bool = True) -> Frame:
    w = as_weights(w)
    p = check_points(p) if check else np.asarray(p, dtype=float)
    s, psi = p[..., 0], p[..., 1] + p[..., 2]
    r = np.sqrt(sigma(p, w))
    t, ct = np.tan(s), 1.0 / np.tan(s)
    cp, sp = np.cos(psi), np.sin(psi)
    xi = np.zeros(p.shape)
    xi[..., 1] = w.l
    xi[..., 2] = w.k
    x1 = r[..., None] * np.stack([cp, sp * t, -sp * ct], axis=-1)
    x2 = r[..., None] * np.stack([sp, -cp * t, cp * ct], axis=-1)
    ra = math.sqrt(a)
    return Frame(xi / a, x1 / ra, x2 / ra)


def frame_jacobian(p, w, a: float = 1.0, check: bool = True) -> Frame:
    """``d_j`` of each frame vector's components: arrays ``(..., 3 comp, 3 coord)``."""
    w = as_weights(w)
    p = check_points(p) if check else np.asarray(p, dtype=float)
    s, psi = p[..., 0], p[..., 1] + p[..., 2]
    sg = sigma(p, w)
    r = np.sqrt(sg)
    dr = _sigma_ds(s, w) / (2 * r)
    t, ct = np.tan(s), 1.0 / np.tan(s)
    sec2, csc2 = 1.0 / np.cos(s) ** 2, 1.0 / np.sin(s) ** 2
    cp, sp = np.cos(psi), np.sin(psi)
    zero = np.zeros_like(s)

    u1 = np.stack([cp, sp * t, -sp * ct], axis=-1)
    u2 = np.stack([sp, -cp * t, cp * ct], axis=-1)
    ds_x1 = dr[..., None] * u1 + r[..., None] * np.stack([zero, sp * sec2, sp * csc2], axis=-1)
    ds_x2 = dr[..., None] * u2 + r[..., None] * np.stack([zero, -cp * sec2, -cp * csc2], axis=-1)
    # d/dphi1 = d/dphi2 = d/dpsi; d_psi X1 = -X2, d_psi X2 = X1
    dpsi_x1 = -r[..., None] * u2
    dpsi_x2 = r[..., None] * u1
    j1 = np.stack([ds_x1, dpsi_x1, dpsi_x1], axis=-1)
    j2 = np.stack([ds_x2, dpsi_x2, dpsi_x2], axis=-1)
    ra = math.sqrt(a)
    return Frame(np.zeros(p.shape + (3,)), j1 / ra, j2 / ra)


def lie_bracket(A, JA, B, JB) -> np.ndarray:
    """``[A, B]^i = A^j d_j B^i - B^j d_j A^i``."""
    return np.einsum("...j,...ij->...i", A, JB) - np.einsum("...j,...ij->...i", B, JA)


def to_frame(v, frame: Frame) -> np.ndarray:
    """Frame coefficients of coordinate vectors ``v``."""
    return np.linalg.solve(frame.matrix(), v[..., None])[..., 0]


def from_frame(c, frame: Frame) -> np.ndarray:
    return np.einsum("...ij,...j->...i", frame.matrix(), c)


class StructureFunctions(NamedTuple):
    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    residual: np.ndarray


STRUCTURE_TOL = 1e-8


def structure_functions(p, w, a: float = 1.0, check: bool = True, tol: float = STRUCTURE_TOL):
    """Extract ``C0, C1, C2`` from the frame brackets.

    ``[xi, X1] = -(C0+1) X2``, ``[X2, xi] = -(C0+1) X1`` and
    ``[X1, X2] = -2 xi + C1 X1 + C2 X2``; every other frame component of the
    brackets goes into ``residual``.
    """
    F = frame_at(p, w, a, check)
    J = frame_jacobian(p, w, a, check)
    b01 = to_frame(lie_bracket(F.xi, J.xi, F.x1, J.x1), F)
    b20 = to_frame(lie_bracket(F.x2, J.x2, F.xi, J.xi), F)
    b12 = to_frame(lie_bracket(F.x1, J.x1, F.x2, J.x2), F)
    c0 = -b01[..., 2] - 1.0
    res = np.stack(
        [
            b01[..., 0],
            b01[..., 1],
            b20[..., 0],
            b20[..., 2],
            b20[..., 1] + (c0 + 1.0),
            b12[..., 0] + 2.0,
        ],
        axis=-1,
    )
    residual = np.max(np.abs(res), axis=-1)
    if tol is not None and np.any(residual > tol):
        raise GeometryError(
            f"frame brackets violate the structure equations (residual {residual.max():.3e})"
        )
    return StructureFunctions(c0, b12[..., 1], b12[..., 2], residual)


def scalar_curvature(p, w, a: float = 1.0) -> np.ndarray:
    """Scalar curvature; for ``a != 1`` the D-homothety rule ``(Scal+2)/a - 2``."""
    w = as_weights(w)
    sg = sigma(p, w)
    scal = 6.0 - 8.0 * (1 + w.k + w.l - 3.0 * w.k * w.l / sg)
    return (scal + 2.0) / a - 2.0


def min_scalar_curvature(w) -> int:
    """Exact minimum over the sphere of the undeformed scalar curvature."""
    w = as_weights(w)
    # 3kl/sigma is smallest where sigma = k, i.e. at s = pi/2
    return 6 - 8 * (1 + w.k + w.l - 3 * w.l)


# ---------------------------------------------------------------------------
# vector fields


@dataclass(frozen=True)
class FieldEvaluator:
    """Frame coefficients of a vector field and their frame derivatives.

    ``evaluate(points)`` returns ``(c, dc)`` with ``c[..., i]`` the coefficient
    along ``(xi, X1, X2)[i]`` of the (possibly deformed) frame and
    ``dc[..., i, m] = e_m(c_i)``.
    """

    evaluate: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]
    w: Weights
    a: float = 1.0
    mode: str = "analytic"
    label: str = ""

    def __call__(self, p):
        return self.evaluate(np.asarray(p, dtype=float))

    def coords(self, p) -> np.ndarray:
        """Coordinate components of the field."""
        c, _ = self(p)
        return from_frame(c, frame_at(p, self.w, self.a, check=False))


def coordinate_field(fn, w, a: float = 1.0, label: str = "") -> FieldEvaluator:
    """Wrap ``fn(points) -> (V, dV)`` given in coordinates.

    ``dV[..., i, j] = d_j V^i``.  Frame coefficients ``c = E^{-1} V`` (the
    ``xi``-coefficient as ``eta'(V)``) are
    differentiated as ``d_j c = E^{-1} (d_j V - d_j E c)``.
    """
    w = as_weights(w)

    def evaluate(p):
        F = frame_at(p, w, a, check=False)
        J = frame_jacobian(p, w, a, check=False)
        E = F.matrix()
        dE = np.stack([J.xi, J.x1, J.x2], axis=-2)  # (..., comp i, frame m, coord j)
        V, dV = fn(p)
        c = np.linalg.solve(E, V[..., None])[..., 0]
        # pairing with the contact form is better conditioned near the chart ends
        c[..., 0] = np.einsum("...j,...j->...", eta_coords(p, w, a), V)
        rhs = dV - np.einsum("...imj,...m->...ij", dE, c)
        dc_coord = np.linalg.solve(E, rhs)  # (..., i, j)
        dc = np.einsum("...ij,...jm->...im", dc_coord, E)
        return c, dc

    return FieldEvaluator(evaluate, w, a, "analytic", label)


def frame_coefficient_field(fn, w, a: float = 1.0, h: float = 1e-5, label: str = "") -> FieldEvaluator:
    """Field from frame coefficients ``fn(points) -> c``; derivatives by central differences.

    Test oracle only: production fields carry analytic derivatives.
    """
    w = as_weights(w)

    def evaluate(p):
        c = fn(p)
        F = frame_at(p, w, a, check=False)
        dc = np.empty(c.shape + (3,))
        for m, e in enumerate(F):
            dc[..., m] = directional_fd(fn, p, e, h)
        return c, dc

    return FieldEvaluator(evaluate, w, a, "finite-difference", label)


def finite_difference(field: FieldEvaluator, h: float = 1e-5) -> FieldEvaluator:
    """Same field with derivatives recomputed by central differences."""
    return frame_coefficient_field(lambda p: field(p)[0], field.w, field.a, h, field.label)


def reeb_field(w, a: float = 1.0) -> FieldEvaluator:
    """The (deformed) unit Reeb field ``xi / a``."""
    w = as_weights(w)

    def evaluate(p):
        c = np.zeros(p.shape)
        c[..., 0] = 1.0
        return c, np.zeros(p.shape + (3,))

    return FieldEvaluator(evaluate, w, a, "analytic", "xi")


def frame_vector_field(w, which: int, a: float = 1.0) -> FieldEvaluator:
    """The undeformed frame vector ``X1`` (``which=1``) or ``X2`` as a field."""
    w = as_weights(w)

    def fn(p):
        F = frame_at(p, w, 1.0, check=False)
        J = frame_jacobian(p, w, 1.0, check=False)
        return (F.x1, J.x1) if which == 1 else (F.x2, J.x2)

    return coordinate_field(fn, w, a, f"X{which}")


def sigma_power_field(w, which: int = 1, a: float = 1.0, power: float = 1.5) -> FieldEvaluator:
    """``sigma^power X_which`` (undeformed ``X``); an eigenfield for ``power = 3/2``."""
    w = as_weights(w)

    def fn(p):
        F = frame_at(p, w, 1.0, check=False)
        J = frame_jacobian(p, w, 1.0, check=False)
        X, JX = (F.x1, J.x1) if which == 1 else (F.x2, J.x2)
        s = p[..., 0]
        sg = sigma(p, w)
        rho = sg**power
        drho = power * sg ** (power - 1) * _sigma_ds(s, w)
        dV = rho[..., None, None] * JX
        dV[..., :, 0] += drho[..., None] * X
        return rho[..., None] * X, dV

    label = f"sigma^{power:g} X{which}"
    return coordinate_field(fn, w, a, label)


def sigma_gradient_field(w, a: float = 1.0) -> FieldEvaluator:
    """Gradient of ``sigma`` for ``g'``; only ``g'_ss = a / sigma`` enters."""
    w = as_weights(w)

    def fn(p):
        s = p[..., 0]
        sg = sigma(p, w)
        d1, d2 = _sigma_ds(s, w), _sigma_dss(s, w)
        V = np.zeros(p.shape)
        V[..., 0] = sg * d1 / a
        dV = np.zeros(p.shape + (3,))
        dV[..., 0, 0] = (d1 * d1 + sg * d2) / a
        return V, dV

    return coordinate_field(fn, w, a, "grad sigma")


def scaled_field(field: FieldEvaluator, factor: float) -> FieldEvaluator:
    def evaluate(p):
        c, dc = field(p)
        return factor * c, factor * dc

    return FieldEvaluator(evaluate, field.w, field.a, field.mode, field.label)


def zero_field(w, a: float = 1.0) -> FieldEvaluator:
    w = as_weights(w)
    return FieldEvaluator(
        lambda p: (np.zeros(p.shape), np.zeros(p.shape + (3,))), w, a, "analytic", "0"
    )


# ---------------------------------------------------------------------------
# first-order operators


def curl(field: FieldEvaluator, p, w=None, a=None, check: bool = True) -> np.ndarray:
    """Frame coefficients of ``*d alpha`` for ``alpha = field^flat``.

    ``check=False`` skips the chart-margin test (quadrature nodes).
    """
    w = field.w if w is None else as_weights(w)
    a = field.a if a is None else a
    p = check_points(p) if check else np.asarray(p, dtype=float)
    C = structure_functions(p, w, a, check=False)
    c, dc = field(p)
    f, f1, f2 = c[..., 0], c[..., 1], c[..., 2]
    # dc[..., i, m] = e_m(c_i), e = (xi, X1, X2)
    k0 = C.c0 + 1.0
    out0 = dc[..., 2, 1] - dc[..., 1, 2] - C.c1 * f1 - C.c2 * f2 + 2 * f
    out1 = -dc[..., 2, 0] + dc[..., 0, 2] + k0 * f1
    out2 = dc[..., 1, 0] - dc[..., 0, 1] + k0 * f2
    return np.stack([out0, out1, out2], axis=-1)


def divergence(field: FieldEvaluator, p, w=None, a=None, check: bool = True) -> np.ndarray:
    w = field.w if w is None else as_weights(w)
    a = field.a if a is None else a
    p = check_points(p) if check else np.asarray(p, dtype=float)
    C = structure_functions(p, w, a, check=False)
    c, dc = field(p)
    return dc[..., 0, 0] + dc[..., 1, 1] + dc[..., 2, 2] - C.c2 * c[..., 1] + C.c1 * c[..., 2]


def phi_map(c) -> np.ndarray:
    """Apply ``phi`` in frame coefficients: ``phi xi = 0, phi X1 = -X2, phi X2 = X1``."""
    c = np.asarray(c)
    out = np.zeros(c.shape, dtype=np.result_type(c, float))
    out[..., 1] = c[..., 2]
    out[..., 2] = -c[..., 1]
    return out


def phi_field(field: FieldEvaluator) -> FieldEvaluator:
    def evaluate(p):
        c, dc = field(p)
        return phi_map(c), np.swapaxes(phi_map(np.swapaxes(dc, -1, -2)), -1, -2)

    return FieldEvaluator(evaluate, field.w, field.a, field.mode, f"phi({field.label})")


def covariant_derivative(field: FieldEvaluator, direction, p, check: bool = True) -> np.ndarray:
    """Frame coefficients of ``nabla_Y X`` for ``Y`` given by frame coefficients.

    Uses the connection of an adapted Sasakian frame:
    ``nabla_xi xi = 0, nabla_X1 xi = X2, nabla_X2 xi = -X1``,
    ``nabla_xi X1 = -C0 X2, nabla_X1 X1 = -C1 X2, nabla_X2 X1 = xi - C2 X2``,
    ``nabla_xi X2 = C0 X1, nabla_X1 X2 = -xi + C1 X1, nabla_X2 X2 = C2 X1``.
    """
    p = check_points(p) if check else np.asarray(p, dtype=float)
    C = structure_functions(p, field.w, field.a, check=False)
    c, dc = field(p)
    y = np.broadcast_to(np.asarray(direction, dtype=float), c.shape)
    out = np.einsum("...im,...m->...i", dc, y)
    G = connection_table(C)
    out = out + np.einsum("...m,...i,...min->...n", y, c, G)
    return out


def connection_table(C: StructureFunctions) -> np.ndarray:
    """``G[..., m, i, :]`` = frame coefficients of ``nabla_{e_m} e_i``."""
    shape = np.shape(C.c1)
    G = np.zeros(shape + (3, 3, 3))
    c0, c1, c2 = np.broadcast_arrays(C.c0 * np.ones(shape), C.c1, C.c2)
    G[..., 1, 0, 2] = 1.0
    G[..., 2, 0, 1] = -1.0
    G[..., 0, 1, 2] = -c0
    G[..., 1, 1, 2] = -c1
    G[..., 2, 1, 0] = 1.0
    G[..., 2, 1, 2] = -c2
    G[..., 0, 2, 1] = c0
    G[..., 1, 2, 0] = -1.0
    G[..., 1, 2, 1] = c1
    G[..., 2, 2, 1] = c2
    return G


# ---------------------------------------------------------------------------
# finite-difference helpers (oracles and curvature assembly)


def fd_step(p, h0: float, scale: float = 0.1) -> np.ndarray:
    """Per-point step ``h0 * min(1, dist / scale)``, ``dist`` the distance of ``s`` to the chart ends.

    Frame vectors have coordinate components of size ``1/dist``; shrinking the
    step keeps central-difference truncation error uniform over the chart.
    """
    s = np.asarray(p, dtype=float)[..., 0]
    dist = np.minimum(s, np.pi / 2 - s)
    return h0 * np.minimum(1.0, dist / scale)


_CENTRAL_WEIGHTS = {
    2: (1 / 2,),
    4: (2 / 3, -1 / 12),
    6: (3 / 4, -3 / 20, 1 / 60),
}


def directional_fd(fn, p, vec, h0: float, scale: float = 0.1, order: int = 2) -> np.ndarray:
    """Central difference of ``fn`` along coordinate vectors ``vec`` at ``p`` (order 2, 4 or 6)."""
    if order not in _CENTRAL_WEIGHTS:
        raise ValueError(f"unsupported difference order {order}")
    h = fd_step(p, h0, scale)
    hv = h[..., None] * vec
    d = sum(c * (fn(p + j * hv) - fn(p - j * hv)) for j, c in enumerate(_CENTRAL_WEIGHTS[order], 1))
    h = h.reshape(h.shape + (1,) * (d.ndim - h.ndim))
    return d / h


def structure_constants(p, w, a: float = 1.0) -> np.ndarray:
    """``c[..., a, b, n] = g([e_a, e_b], e_n)`` for the (deformed) adapted frame."""
    F = frame_at(p, w, a, check=False)
    J = frame_jacobian(p, w, a, check=False)
    vecs = list(zip(F, J))
    c = np.zeros(np.shape(p)[:-1] + (3, 3, 3))
    for i in range(3):
        for j in range(i + 1, 3):
            b = to_frame(lie_bracket(*vecs[i], *vecs[j]), F)
            c[..., i, j, :] = b
            c[..., j, i, :] = -b
    return c


def koszul_connection(p, w, a: float = 1.0) -> np.ndarray:
    """``G[..., a, b, n] = g(nabla_{e_a} e_b, e_n)`` from the bracket structure constants alone."""
    c = structure_constants(p, w, a)
    return 0.5 * (c + np.einsum("...nab->...abn", c) - np.einsum("...bna->...abn", c))


def round_anti_killing_field(coeffs=(1.0, 0.7, -0.4), a: float = 1.0) -> FieldEvaluator:
    """Right-translation Killing field ``c0 Y0 + c1 Y1 + c2 Y2`` on the round sphere.

    With ``chi = phi1 - phi2``: ``Y0 = d_phi1 - d_phi2``,
    ``Y1 = cos chi d_s + sin chi (tan s d_phi1 + cot s d_phi2)``,
    ``Y2 = -sin chi d_s + cos chi (tan s d_phi1 + cot s d_phi2)``.
    These have curl ``-2`` for the standard structure.
    """
    c0, c1, c2 = coeffs
    w = Weights(1, 1)

    def fn(p):
        s, chi = p[..., 0], p[..., 1] - p[..., 2]
        t, ct = np.tan(s), 1.0 / np.tan(s)
        sec2, csc2 = 1.0 / np.cos(s) ** 2, 1.0 / np.sin(s) ** 2
        cc, sc = np.cos(chi), np.sin(chi)
        zero = np.zeros_like(s)
        y0 = np.stack([zero, zero + 1.0, zero - 1.0], axis=-1)
        y1 = np.stack([cc, sc * t, sc * ct], axis=-1)
        y2 = np.stack([-sc, cc * t, cc * ct], axis=-1)
        ds_y1 = np.stack([zero, sc * sec2, -sc * csc2], axis=-1)
        ds_y2 = np.stack([zero, cc * sec2, -cc * csc2], axis=-1)
        # d_chi Y1 = Y2, d_chi Y2 = -Y1; d_phi1 = d_chi, d_phi2 = -d_chi
        V = c0 * y0 + c1 * y1 + c2 * y2
        dchi = c1 * y2 - c2 * y1
        dV = np.stack([c1 * ds_y1 + c2 * ds_y2, dchi, -dchi], axis=-1)
        return V, dV

    return coordinate_field(fn, w, a, "anti-Killing")
