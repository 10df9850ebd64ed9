"""Pointwise identity suite for the weighted sphere.

Every entry compares a computed quantity against its closed form at random
interior points and records the worst deviation.  The suite drives the
``verify`` command and the geometry acceptance checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import curvature as cv
from . import geometry as geo

DEFAULT_TOLERANCES: Dict[str, float] = {
    "frame_gram": 1e-10,
    "reeb_curl": 1e-8,
    "eigenfield_curl": 1e-8,
    "eigenfield_divergence": 1e-8,
    "phi_eigenfield_curl": 1e-8,
    "gradient_curl": 1e-8,
    "structure_residual": 1e-8,
    "commutator_consistency": 1e-6,
    "reeb_covariant": 1e-6,
    "scal_trace": 1e-3,
    "mixed_curvature": 1e-3,
    "ricci_reeb": 1e-3,
    "ricci_contact": 1e-3,
    "integrability": 1e-4,
    "phi_sectional": 1e-3,
    "reeb_scal_invariance": 1e-8,
    "min_scal": 1e-6,
    "sigma_laplacian": 1e-4,
    "round_structure": 1e-10,
    "round_scal": 1e-10,
    "magic_laplacian": 1e-3,
}


@dataclass(frozen=True)
class IdentityResult:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tol)

    def to_json(self) -> dict:
        return {"name": self.name, "value": float(self.value), "tol": self.tol, "passed": self.passed}


@dataclass
class IdentityReport:
    weights: tuple
    a: float
    samples: int
    seed: int
    results: List[IdentityResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]

    def __getitem__(self, name: str) -> IdentityResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "weights": list(self.weights),
            "a": self.a,
            "samples": self.samples,
            "seed": self.seed,
            "passed": self.passed,
            "failures": self.failures,
            "results": [r.to_json() for r in self.results],
        }


def frame_gram_error(p, w, a: float = 1.0) -> float:
    E = geo.frame_at(p, w, a).matrix()
    g = geo.metric_at(p, w, a)
    gram = np.einsum("...ia,...ij,...jb->...ab", E, g, E)
    return float(np.abs(gram - np.eye(3)).max())


def commutator_consistency(field: geo.FieldEvaluator, p, h: float = 3e-3, scale: float = 0.3) -> float:
    """Max of ``|e_a(e_b c) - e_b(e_a c) - [e_a, e_b](c)|`` over frame pairs.

    Second derivatives come from sixth-order central differences of the
    analytic first derivatives, so this cross-checks the evaluator against the brackets.
    """
    w, a = field.w, field.a
    p = np.asarray(p, dtype=float)
    F = geo.frame_at(p, w, a, check=False)
    cst = geo.structure_constants(p, w, a)
    _, dc = field(p)
    worst = 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        eab = geo.directional_fd(lambda q: field(q)[1][..., :, j], p, F[i], h, scale, order=6)
        eba = geo.directional_fd(lambda q: field(q)[1][..., :, i], p, F[j], h, scale, order=6)
        bracket = np.einsum("...n,...cn->...c", cst[..., i, j, :], dc)
        size = 1.0 + np.abs(dc).max(axis=(-1, -2))
        worst = max(worst, float((np.abs(eab - eba - bracket).max(axis=-1) / size).max()))
    return worst


def _curl_eigen_error(field, mu, p) -> float:
    c, _ = field(p)
    return float(np.abs(geo.curl(field, p) - mu * c).max())


def identity_suite(
    w,
    a: float = 1.0,
    samples: int = 1000,
    seed: int = 0,
    tolerances: Optional[Dict[str, float]] = None,
) -> IdentityReport:
    """Run all pointwise identities for weights ``w`` and deformation ``a``."""
    w = geo.as_weights(w)
    a = float(a)
    if a <= 0:
        raise geo.GeometryError(f"deformation constant must be positive, got {a}")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    p = geo.random_points(samples, np.random.default_rng(seed))
    report = IdentityReport((w.k, w.l), a, samples, seed)

    def add(name, value):
        report.results.append(IdentityResult(name, float(value), tol[name]))

    mu_d = (w.k + w.l) / a
    xi = geo.reeb_field(w, a)
    e1 = geo.sigma_power_field(w, 1, a)
    e2 = geo.sigma_power_field(w, 2, a)
    grad = geo.sigma_gradient_field(w, a)

    add("frame_gram", frame_gram_error(p, w, a))
    add("reeb_curl", _curl_eigen_error(xi, 2.0, p))
    add("eigenfield_curl", max(_curl_eigen_error(e1, mu_d, p), _curl_eigen_error(e2, mu_d, p)))
    add(
        "eigenfield_divergence",
        max(np.abs(geo.divergence(e1, p)).max(), np.abs(geo.divergence(e2, p)).max()),
    )
    add("phi_eigenfield_curl", _curl_eigen_error(geo.phi_field(e1), mu_d, p))
    add("gradient_curl", np.abs(geo.curl(grad, p)).max())
    add("structure_residual", np.abs(geo.structure_functions(p, w, a, tol=np.inf).residual).max())
    add("commutator_consistency", commutator_consistency(e1, p))
    r1, r2 = cv.reeb_covariant_check(p, w, a)
    add("reeb_covariant", max(r1.max(), r2.max()))

    scal = geo.scalar_curvature(p, w, a)
    dev_xi, dev_d, dev_tr = cv.ricci_check(p, w, a)
    add("scal_trace", dev_tr.max())
    mixed = max(
        cv.mixed_curvature_check(p, w, [0.0, 1.0, 0.0], a).max(),
        cv.mixed_curvature_check(p, w, [0.0, 0.6, -0.8], a).max(),
    )
    add("mixed_curvature", mixed)
    add("ricci_reeb", dev_xi.max())
    add("ricci_contact", dev_d.max())
    i1, i2 = cv.integrability_residuals(p, w, a)
    add("integrability", max(i1.max(), i2.max()))
    add("phi_sectional", np.abs(cv.phi_sectional_curvature(p, w, a) - (scal - 4) / 2).max())
    add("reeb_scal_invariance", cv.reeb_invariance_of_scal(p, w, a).max())
    if a == 1.0:
        # closed-form scalar curvature is smooth up to the Hopf circles
        s = np.linspace(0.0, np.pi / 2, 20001)
        dense = np.stack([s, np.zeros_like(s), np.zeros_like(s)], axis=-1)
        add("min_scal", abs(geo.scalar_curvature(dense, w).min() - geo.min_scalar_curvature(w)))

    # -div grad sigma against a second-difference Laplacian, relative to its size
    lap = cv.sigma_laplacian_fd(p, w, a)
    add("sigma_laplacian", np.abs(geo.divergence(grad, p) + lap).max() / max(1.0, np.abs(lap).max()))

    if w.k == w.l == 1:
        sf = geo.structure_functions(p, w, a)
        add(
            "round_structure",
            max(np.abs(sf.c0 - (2.0 / a - 1.0)).max(), np.abs(sf.c1).max(), np.abs(sf.c2).max()),
        )
        if a == 1.0:
            add("round_scal", np.abs(scal - 6.0).max())
            add("magic_laplacian", cv.eigenfield_laplacian_check(p))
    return report
