"""Global integrals over the weighted sphere.

The chart ``(s, phi1, phi2)`` covers the sphere up to the two Hopf circles,
a null set, so tensor-product quadrature over ``(0, pi/2) x [0, 2 pi)^2``
integrates smooth densities.  The ``s``-rule is Gauss-Legendre (nodes never
touch the ends), the angular rule is the uniform periodic one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import geometry as geo

DEFAULT_NS = 64
DEFAULT_NPHI = 32
EIGEN_TOL = 1e-6
CONVERGENCE_TOL = 1e-8


class QuadratureError(RuntimeError):
    """Quadrature did not converge under refinement."""


class EigenfieldCheckError(ValueError):
    """A field passed as a curl eigenfield fails the residual check."""


@dataclass(frozen=True)
class QuadratureGrid:
    n_s: int = DEFAULT_NS
    n_phi: int = DEFAULT_NPHI

    def __post_init__(self):
        if self.n_s < 1 or self.n_phi < 1:
            raise ValueError(f"grid sizes must be positive, got ({self.n_s}, {self.n_phi})")

    def nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flattened points ``(n, 3)`` and coordinate weights ``(n,)``."""
        x, wx = np.polynomial.legendre.leggauss(self.n_s)
        s = np.pi / 4 * (x + 1)
        ws = np.pi / 4 * wx
        phi = 2 * np.pi * np.arange(self.n_phi) / self.n_phi
        wphi = np.full(self.n_phi, 2 * np.pi / self.n_phi)
        S, P1, P2 = np.meshgrid(s, phi, phi, indexing="ij")
        W = ws[:, None, None] * wphi[None, :, None] * wphi[None, None, :]
        pts = np.stack([S, P1, P2], axis=-1).reshape(-1, 3)
        return pts, W.reshape(-1)

    def refined(self) -> "QuadratureGrid":
        return QuadratureGrid(2 * self.n_s, 2 * self.n_phi)


def _as_grid(grid) -> QuadratureGrid:
    if grid is None:
        return QuadratureGrid()
    if isinstance(grid, QuadratureGrid):
        return grid
    n_s, n_phi = grid
    return QuadratureGrid(int(n_s), int(n_phi))


def volume_density(p, w, a: float = 1.0) -> np.ndarray:
    """``sqrt(det g')`` in the coordinate chart."""
    return np.sqrt(np.linalg.det(geo.metric_at(p, w, a, check=False)))


def integrate(density: Callable[[np.ndarray], np.ndarray], w, a: float = 1.0, grid=None) -> float:
    """``int density dvol_{g'}``; ``density`` is evaluated at the quadrature nodes."""
    pts, wts = _as_grid(grid).nodes()
    vals = density(pts) * volume_density(pts, w, a)
    return float(np.dot(wts, vals))


def converged(fn: Callable[[QuadratureGrid], float], grid=None, tol: float = CONVERGENCE_TOL) -> float:
    """Evaluate ``fn(grid)`` and confirm the value is stable when the grid doubles."""
    grid = _as_grid(grid)
    value, fine = fn(grid), fn(grid.refined())
    if abs(fine - value) > tol * max(1.0, abs(fine)):
        raise QuadratureError(
            f"quadrature not converged at ({grid.n_s}, {grid.n_phi}): {value!r} vs refined {fine!r}"
        )
    return value


def volume(w, grid=None, a: float = 1.0) -> float:
    return integrate(lambda p: np.ones(len(p)), w, a, grid)


def l2_norm_squared(field: geo.FieldEvaluator, grid=None) -> float:
    return integrate(lambda p: np.sum(field(p)[0] ** 2, axis=-1), field.w, field.a, grid)


def energy(field: geo.FieldEvaluator, grid=None) -> float:
    """``(1/2) int |X|^2`` for the metric the field was built with."""
    return 0.5 * l2_norm_squared(field, grid)


def eigen_residual(field: geo.FieldEvaluator, mu: float, grid=None) -> float:
    """Relative sup-norm of ``curl X - mu X`` over the quadrature nodes."""
    pts, _ = _as_grid(grid).nodes()
    c, _ = field(pts)
    res = np.abs(geo.curl(field, pts, check=False) - mu * c).max()
    size = np.abs(c).max()
    return float(res / size) if size > 0 else float(res)


def _require_eigenfield(field, mu, grid, tol=EIGEN_TOL):
    res = eigen_residual(field, mu, grid)
    if res > tol:
        raise EigenfieldCheckError(
            f"field {field.label or '?'} is not a curl eigenfield with eigenvalue {mu} (residual {res:.3e})"
        )


def helicity_eigenfield(field: geo.FieldEvaluator, mu: float, grid=None) -> float:
    """``(curl^{-1} X, X)`` for a verified curl eigenfield: ``||X||^2 / mu``."""
    if mu == 0:
        raise EigenfieldCheckError("helicity needs a nonzero eigenvalue")
    _require_eigenfield(field, mu, grid)
    return l2_norm_squared(field, grid) / mu


def _eta_components(s, w):
    """``eta_w = A1 dphi1 + A2 dphi2`` and the ``s``-derivatives of ``A1, A2``."""
    w = geo.as_weights(w)
    c2, s2 = np.cos(s) ** 2, np.sin(s) ** 2
    sg = w.l * c2 + w.k * s2
    dsg = (w.k - w.l) * np.sin(2 * s)
    a1, a2 = c2 / sg, s2 / sg
    da1 = (-np.sin(2 * s) * sg - c2 * dsg) / sg**2
    da2 = (np.sin(2 * s) * sg - s2 * dsg) / sg**2
    return a1, a2, da1, da2


def _orientation(p, w) -> np.ndarray:
    """Sign of the adapted frame relative to ``ds ^ dphi1 ^ dphi2``."""
    return np.sign(np.linalg.det(geo.frame_at(p, w, check=False).matrix()))


def hopf_invariant(w, grid=None) -> float:
    """``int A ^ dA`` with ``A = -(k l / 2 pi) eta_w``.

    ``A ^ dA`` is integrated directly from its coordinate expression, with the
    orientation taken from the adapted frame.
    """
    w = geo.as_weights(w)
    pts, wts = _as_grid(grid).nodes()
    a1, a2, da1, da2 = _eta_components(pts[:, 0], w)
    # eta ^ d eta = (A2 A1' - A1 A2') ds ^ dphi1 ^ dphi2
    form = (a2 * da1 - a1 * da2) * _orientation(pts, w)
    return float((w.k * w.l / (2 * np.pi)) ** 2 * np.dot(wts, form))


def pulled_back_area_norm_squared(p, w) -> np.ndarray:
    """``|pi^* Omega|^2`` for ``pi^* Omega = (1/2) d eta_w`` in the undeformed metric."""
    _, _, da1, da2 = _eta_components(p[:, 0], w)
    beta = np.zeros(p.shape[:-1] + (3, 3))
    beta[:, 0, 1], beta[:, 0, 2] = 0.5 * da1, 0.5 * da2
    beta = beta - np.swapaxes(beta, -1, -2)
    ginv = np.linalg.inv(geo.metric_at(p, w, check=False))
    return 0.5 * np.einsum("...ij,...kl,...ik,...jl->...", beta, beta, ginv, ginv)


def skyrme_energy_and_bound(w, grid=None, mu1: float = 2.0) -> Tuple[float, float]:
    """Symplectic Dirichlet energy of the weighted Hopf map and its topological bound.

    The bound is ``(Area^2 / 2) mu1 Q`` with ``Area = Vol / (2 pi)`` by the
    co-area formula over fibres of length ``2 pi``.
    """
    w = geo.as_weights(w)
    F = 0.5 * integrate(lambda p: pulled_back_area_norm_squared(p, w), w, 1.0, grid)
    area = volume(w, grid) / (2 * np.pi)
    return F, area**2 / 2 * mu1 * hopf_invariant(w, grid)


def first_variation_residual(field: geo.FieldEvaluator, grid=None) -> float:
    """Max of ``|nabla_X X - (1/2) grad |X|^2|`` over the nodes (pressure ``-|X|^2 / 2``)."""
    pts, _ = _as_grid(grid).nodes()
    c, dc = field(pts)
    adv = geo.covariant_derivative(field, c, pts, check=False)
    grad = np.einsum("...i,...im->...m", c, dc)
    return float(np.linalg.norm(adv - grad, axis=-1).max())


def second_variation(v: geo.FieldEvaluator, mu: float, grid=None, verify: bool = True) -> float:
    """``int (|nabla_xi v|^2 - |v|^2)`` about the unit Reeb field of the field's metric.

    For a contact-tangent eigenfield this is the Jacobi form
    ``-int <v, nabla_xi nabla_xi v + R(v, xi) xi>``.
    """
    if verify:
        _require_eigenfield(v, mu, grid)
    pts, _ = _as_grid(grid).nodes()
    c, _ = v(pts)
    if np.abs(c[..., 0]).max() > EIGEN_TOL * max(1.0, np.abs(c).max()):
        raise EigenfieldCheckError("second variation needs a field tangent to the contact distribution")

    def density(p):
        dv = geo.covariant_derivative(v, [1.0, 0.0, 0.0], p, check=False)
        return np.sum(dv**2, axis=-1) - np.sum(v(p)[0] ** 2, axis=-1)

    return integrate(density, v.w, v.a, grid)


@dataclass
class FunctionalReport:
    weights: Tuple[int, int]
    a: float
    grid: Tuple[int, int]
    volume: float
    energy: float
    helicity: float
    hopf_q: float
    skyrme_f: float
    bound_rhs: float
    second_variation: Dict[str, dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "weights": list(self.weights),
            "a": self.a,
            "grid": list(self.grid),
            "volume": self.volume,
            "energy": self.energy,
            "helicity": self.helicity,
            "hopf_q": self.hopf_q,
            "skyrme_f": self.skyrme_f,
            "bound_rhs": self.bound_rhs,
            "second_variation": self.second_variation,
        }


def functional_report(w, a: float = 1.0, grid=None, check_convergence: bool = True) -> FunctionalReport:
    """Volume, Reeb energy and helicity, ``Q``, ``F`` and the destabilizing second variation."""
    w = geo.as_weights(w)
    grid = _as_grid(grid)
    a = float(a)

    def value(fn):
        return converged(fn, grid) if check_convergence else fn(grid)

    xi = geo.reeb_field(w, a)
    # refinement checks cover the topological quantities; the rest share the grid
    vol = value(lambda g: volume(w, g, a))
    q = value(lambda g: hopf_invariant(w, g))
    F = value(lambda g: skyrme_energy_and_bound(w, g)[0])
    _, bound = skyrme_energy_and_bound(w, grid)
    v = geo.sigma_power_field(w, 1, a)
    mu = (w.k + w.l) / a
    norm2 = l2_norm_squared(v, grid)
    sv = second_variation(v, mu, grid)
    return FunctionalReport(
        weights=(w.k, w.l),
        a=a,
        grid=(grid.n_s, grid.n_phi),
        volume=vol,
        energy=energy(xi, grid),
        helicity=helicity_eigenfield(xi, 2.0, grid),
        hopf_q=q,
        skyrme_f=F,
        bound_rhs=bound,
        second_variation={
            "sigma^1.5 X1": {
                "mu": mu,
                "value": sv,
                "expected": mu * (mu - 2) * norm2,
                "norm_squared": norm2,
            }
        },
    )
