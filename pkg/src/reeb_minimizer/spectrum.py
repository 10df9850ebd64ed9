"""Curl spectrum of the weighted sphere by torus-equivariant reduction.

A field ``f xi + u Z + w Zbar`` with ``Z = X1 + i X2`` is split into Fourier
modes.  In mode ``(m, n)`` the coefficient ``f`` carries charge ``(m, n)``
under ``(phi1, phi2)``, ``u`` carries ``(m - 1, n - 1)`` and ``w`` carries
``(m + 1, n + 1)``, because ``Z`` itself has charge ``(1, 1)``.  A smooth
function of charge ``(p, q)`` is ``cos^|p| s sin^|q| s h(cos 2s)`` with ``h``
smooth on ``[-1, 1]``, so each profile is represented by ``h`` at Chebyshev
nodes and endpoint regularity holds by construction.

On each mode the curl is a first-order system in ``s``.  The structure
functions enter through ``C0 + 1`` and ``gamma(s) = (C1 + i C2)`` at
``psi = 0``, both extracted numerically from the frame.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft
import scipy.linalg

from . import geometry as geo

KERNEL_TOL = 1e-4
CLUSTER_TOL = 1e-4
REFINE_TOL = 1e-6
RESIDUAL_TOL = 1e-6
TANGENT_TOL = 1e-6
IMAG_TOL = 1e-6
VERIFY_POINTS = 301


class SpectrumError(RuntimeError):
    """Eigen-solver failure for a mode."""


@dataclass(frozen=True, order=True)
class ModeSpec:
    m: int
    n: int

    def charges(self):
        """Charges of the ``f``, ``u`` and ``w`` coefficients."""
        return (self.m, self.n), (self.m - 1, self.n - 1), (self.m + 1, self.n + 1)


def modes(M: int) -> List[ModeSpec]:
    if M < 0:
        raise ValueError(f"mode truncation must be non-negative, got {M}")
    return [ModeSpec(m, n) for m in range(-M, M + 1) for n in range(-M, M + 1)]


# ---------------------------------------------------------------------------
# Chebyshev machinery on Gauss nodes of the first kind


@lru_cache(maxsize=8)
def chebyshev_nodes(N: int) -> np.ndarray:
    """Interior nodes ``cos((2j + 1) pi / 2N)``, decreasing in ``x`` (increasing in ``s``)."""
    return np.cos((2 * np.arange(N) + 1) * np.pi / (2 * N))


@lru_cache(maxsize=8)
def chebyshev_diff(N: int) -> np.ndarray:
    """Barycentric differentiation matrix on :func:`chebyshev_nodes`."""
    x = chebyshev_nodes(N)
    j = np.arange(N)
    bw = (-1.0) ** j * np.sin((2 * j + 1) * np.pi / (2 * N))
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    D = (bw[None, :] / bw[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def chebyshev_coefficients(values: np.ndarray) -> np.ndarray:
    """Coefficients of the interpolant through values at :func:`chebyshev_nodes`."""
    values = np.asarray(values)
    N = values.shape[0]
    c = scipy.fft.dct(values, type=2, axis=0) / N
    c[0] /= 2
    return c


def chebyshev_values(coef: np.ndarray, x: np.ndarray, deriv: int = 0) -> np.ndarray:
    c = np.polynomial.chebyshev.chebder(coef, deriv) if deriv else coef
    return np.polynomial.chebyshev.chebval(x, c)


# ---------------------------------------------------------------------------
# reduction


def _power(base: np.ndarray, e: int) -> np.ndarray:
    if e < 0:
        raise SpectrumError(f"negative net power {e}: mode/regularity combination is inconsistent")
    return base**e


def _exponents(charge) -> Tuple[int, int]:
    """(power of sin s, power of cos s) for a profile of the given charge."""
    p, q = charge
    return abs(q), abs(p)


def _ladder(sign: int, charge, target, s, Dx) -> np.ndarray:
    """Matrix of ``(d/ds + sign (p tan s - q cot s)) G`` divided by the target prefactor.

    ``G = sin^a cos^b h(cos 2s)`` with ``(a, b)`` set by ``charge = (p, q)``;
    the result is expressed as a linear map on the nodal values of ``h``.
    """
    p, q = charge
    a, b = _exponents(charge)
    at, bt = _exponents(target)
    da, db = a - at, b - bt
    sn, cs = np.sin(s), np.cos(s)
    diag = np.zeros_like(s)
    coef_cot = a - sign * q
    coef_tan = sign * p - b
    if coef_cot:
        diag = diag + coef_cot * _power(sn, da - 1) * _power(cs, db + 1)
    if coef_tan:
        diag = diag + coef_tan * _power(sn, da + 1) * _power(cs, db - 1)
    # d/ds h(cos 2s) = -4 sin s cos s h'(x)
    dfac = -4.0 * _power(sn, da + 1) * _power(cs, db + 1)
    return np.diag(diag) + dfac[:, None] * Dx


def _multiplier(charge, target, s) -> np.ndarray:
    """``sin s cos s`` times the prefactor ratio, as a nodal diagonal."""
    a, b = _exponents(charge)
    at, bt = _exponents(target)
    return _power(np.sin(s), a - at + 1) * _power(np.cos(s), b - bt + 1)


@dataclass
class DiscreteOperator:
    """Curl restricted to one Fourier mode, acting on ``(h_F, h_U, h_W)`` nodal values.

    ``matrix`` acts on the rotated unknowns ``(h_F, -i h_U, i h_W)``, which
    make it real whenever ``gamma`` is purely imaginary.
    """

    w: geo.Weights
    a: float
    mode: ModeSpec
    N: int
    matrix: np.ndarray
    d_u: float
    d_w: float
    rotation: np.ndarray

    @property
    def size(self) -> int:
        return 3 * self.N

    def to_profiles(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Undo the rotation: nodal ``(h_F, h_U, h_W)`` from a solver vector."""
        z = self.rotation * y
        N = self.N
        return z[:N], z[N : 2 * N], z[2 * N :]


def _structure_on_nodes(s, w, a):
    pts = np.stack([s, np.zeros_like(s), np.zeros_like(s)], axis=-1)
    C = geo.structure_functions(pts, w, a, check=False)
    return C.c0 + 1.0, C.c1 + 1j * C.c2


def reduce_mode(w, a: float, mode: ModeSpec, N: int) -> DiscreteOperator:
    """Assemble the per-mode curl operator on ``N`` radial nodes."""
    w = geo.as_weights(w)
    a = float(a)
    if a <= 0:
        raise ValueError(f"deformation constant must be positive, got {a}")
    if N < 4:
        raise ValueError(f"radial resolution must be at least 4, got {N}")
    x = chebyshev_nodes(N)
    s = np.arccos(x) / 2
    Dx = chebyshev_diff(N)
    k0, gamma = _structure_on_nodes(s, w, a)
    if np.ptp(k0) > 1e-9 * max(1.0, abs(k0).max()):
        raise SpectrumError("C0 is not constant along s; the reduction assumes it is")
    k0 = float(k0.mean())
    r = np.sqrt(geo.sigma(np.stack([s, s, s], axis=-1), w) / a)
    beta = gamma / (np.sin(s) * np.cos(s))

    cf, cu, cw = mode.charges()
    rf = r[:, None]
    eig_u = (w.l * cu[0] + w.k * cu[1]) / a
    eig_w = (w.l * cw[0] + w.k * cw[1]) / a
    # xi(g) = i (l p + k q) g / a for charge (p, q)
    d_u, d_w = eig_u + k0, -eig_w + k0

    I = np.eye(N)
    FF = 2.0 * I
    FU = 1j * rf * _ladder(+1, cu, cf, s, Dx) - np.diag(beta * _multiplier(cu, cf, s))
    FW = -1j * rf * _ladder(-1, cw, cf, s, Dx) - np.diag(np.conj(beta) * _multiplier(cw, cf, s))
    UF = 0.5j * rf * _ladder(-1, cf, cu, s, Dx)
    WF = -0.5j * rf * _ladder(+1, cf, cw, s, Dx)
    Z = np.zeros((N, N))
    A = np.block([[FF, FU, FW], [UF, d_u * I, Z], [WF, Z, d_w * I]])

    rot = np.concatenate([np.ones(N), np.full(N, 1j), np.full(N, -1j)])
    B = (A * rot[None, :]) / rot[:, None]
    if np.abs(B.imag).max() <= 1e-12 * max(1.0, np.abs(B).max()):
        B = B.real
    return DiscreteOperator(w, a, mode, N, B, d_u, d_w, rot)


# ---------------------------------------------------------------------------
# eigenfields as evaluators


def _charged_parts(coef, charge, s, phi1, phi2, r, psi):
    """Value and ``(xi, Z, Zbar)``-derivative data of ``pre(s) h(x) e^{i(p phi1 + q phi2)}``."""
    p, q = charge
    a, b = _exponents(charge)
    x = np.cos(2 * s)
    sn, cs = np.sin(s), np.cos(s)
    pre = sn**a * cs**b
    h = chebyshev_values(coef, x)
    hx = chebyshev_values(coef, x, 1)
    G = pre * h
    dG = pre * ((a * cs / sn - b * sn / cs) * h - 4 * sn * cs * hx)
    phase = np.exp(1j * (p * phi1 + q * phi2))
    shift = p * np.tan(s) - q / np.tan(s)
    g = G * phase
    zg = r * np.exp(1j * psi) * (dG + shift * G) * phase
    zbg = r * np.exp(-1j * psi) * (dG - shift * G) * phase
    return g, zg, zbg


def mode_field(w, a: float, mode: ModeSpec, profiles, label: str = "") -> geo.FieldEvaluator:
    """Complex field with Chebyshev coefficient profiles ``(F, U, W)`` in the given mode."""
    w = geo.as_weights(w)
    a = float(a)
    cf, cu, cw = mode.charges()

    def evaluate(pts):
        pts = np.asarray(pts, dtype=float)
        s, phi1, phi2 = pts[..., 0], pts[..., 1], pts[..., 2]
        psi = phi1 + phi2
        r = np.sqrt(geo.sigma(pts, w) / a)
        parts = []
        for coef, ch in zip(profiles, (cf, cu, cw)):
            g, zg, zbg = _charged_parts(coef, ch, s, phi1, phi2, r, psi)
            xg = 1j * (w.l * ch[0] + w.k * ch[1]) / a * g
            parts.append((g, xg, (zg + zbg) / 2, (zg - zbg) / 2j))
        f, u, v = parts
        c = np.stack([f[0], u[0] + v[0], 1j * (u[0] - v[0])], axis=-1)
        dc = np.stack(
            [
                np.stack(f[1:], axis=-1),
                np.stack([u[i] + v[i] for i in (1, 2, 3)], axis=-1),
                np.stack([1j * (u[i] - v[i]) for i in (1, 2, 3)], axis=-1),
            ],
            axis=-2,
        )
        return c, dc

    return geo.FieldEvaluator(evaluate, w, a, "analytic", label or f"mode({mode.m},{mode.n})")


def verification_points(n: int = VERIFY_POINTS, seed: int = 12345) -> np.ndarray:
    """Points off the collocation grid: Chebyshev-Lobatto ``s`` with random angles."""
    rng = np.random.default_rng(seed)
    t = np.cos(np.pi * np.arange(n) / (n - 1))
    lo, hi = geo.CHART_MARGIN, np.pi / 2 - geo.CHART_MARGIN
    s = lo + (hi - lo) * (1 - t) / 2
    phi = rng.uniform(0, 2 * np.pi, size=(n, 2))
    return np.column_stack([s, phi])


# ---------------------------------------------------------------------------
# solving


@dataclass
class EigenResult:
    value: float
    residual: float
    mode: ModeSpec
    d_tangent: bool
    eta_fraction: float = 0.0
    divergence: float = 0.0
    coarse_value: float = 0.0
    profiles: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = field(default=None, repr=False)

    def field(self, w, a: float) -> geo.FieldEvaluator:
        return mode_field(w, a, self.mode, self.profiles, f"mode({self.mode.m},{self.mode.n}) mu={self.value:.6g}")


def _inverse_iteration(op: DiscreteOperator, mu: float, iters: int = 4):
    """Eigenpair of ``op`` nearest ``mu`` by shifted inverse iteration."""
    A = op.matrix
    n = A.shape[0]
    N = op.N
    shift = mu + 1e-9 * max(1.0, abs(mu))
    rng = np.random.default_rng(0)
    y = rng.standard_normal(n).astype(A.dtype)
    near_diag = min(abs(shift - op.d_u), abs(shift - op.d_w)) < 1e-6 * max(1.0, abs(mu))
    if near_diag:
        lu = scipy.linalg.lu_factor(A - shift * np.eye(n))

        def solve(b):
            return scipy.linalg.lu_solve(lu, b)

    else:
        # eliminate the diagonal U, W blocks; only an N x N complement is factored
        FU, FW = A[:N, N : 2 * N], A[:N, 2 * N :]
        UF, WF = A[N : 2 * N, :N], A[2 * N :, :N]
        iu, iw = 1.0 / (op.d_u - shift), 1.0 / (op.d_w - shift)
        S = A[:N, :N] - shift * np.eye(N) - iu * FU @ UF - iw * FW @ WF
        lu = scipy.linalg.lu_factor(S)

        def solve(b):
            bf, bu, bw = b[:N], b[N : 2 * N], b[2 * N :]
            F = scipy.linalg.lu_solve(lu, bf - iu * FU @ bu - iw * FW @ bw)
            return np.concatenate([F, iu * (bu - UF @ F), iw * (bw - WF @ F)])

    for _ in range(iters):
        y = solve(y)
        y = y / np.linalg.norm(y)
    Ay = A @ y
    value = np.vdot(y, Ay) / np.vdot(y, y)
    return value, y, float(np.linalg.norm(Ay - value * y))


def _resample(op_fine: DiscreteOperator, y: np.ndarray):
    """Chebyshev coefficients of the three profiles of a fine-grid vector."""
    return tuple(chebyshev_coefficients(p) for p in op_fine.to_profiles(y))


def solve_mode(
    op: DiscreteOperator,
    top: int = 8,
    mu_max: Optional[float] = None,
    fine: Optional[DiscreteOperator] = None,
    points: Optional[np.ndarray] = None,
) -> Tuple[List[EigenResult], bool]:
    """Verified eigenpairs of smallest ``|mu|`` (kernel excluded).

    Each coarse eigenvalue is refined on ``fine`` (``2N`` nodes by default);
    values that move by more than ``REFINE_TOL`` are discarded as spurious.
    Survivors are checked against the full curl on off-grid points.  The
    second return value is True when ``top`` cut the list short.
    """
    try:
        vals = scipy.linalg.eigvals(op.matrix)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectrumError(f"eigen-solver failed for mode ({op.mode.m}, {op.mode.n}): {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise SpectrumError(f"non-finite eigenvalues for mode ({op.mode.m}, {op.mode.n})")
    real = np.abs(vals.imag) <= IMAG_TOL * np.maximum(1.0, np.abs(vals))
    cands = np.sort_complex(vals[real & (np.abs(vals) > KERNEL_TOL)].real.astype(complex)).real
    if mu_max is not None:
        cands = cands[np.abs(cands) <= mu_max * (1 + 1e-6)]
    cands = cands[np.argsort(np.abs(cands), kind="stable")]
    # coincident coarse values are one candidate per distinct root
    distinct: List[float] = []
    for c in cands:
        if not any(abs(c - d) <= 1e-8 * max(1.0, abs(c)) for d in distinct):
            distinct.append(float(c))

    if fine is None:
        fine = reduce_mode(op.w, op.a, op.mode, 2 * op.N)
    if points is None:
        points = verification_points()
    out: List[EigenResult] = []
    truncated = False
    for mu in distinct:
        if len(out) >= top:
            truncated = True
            break
        value, y, _ = _inverse_iteration(fine, mu)
        if abs(value.imag) > IMAG_TOL * max(1.0, abs(value)):
            continue
        value = float(value.real)
        if abs(value - mu) > REFINE_TOL * max(1.0, abs(mu)):
            continue
        profiles = _resample(fine, y)
        res = EigenResult(value, np.inf, op.mode, False, coarse_value=mu, profiles=profiles)
        X = res.field(op.w, op.a)
        c, _ = X(points)
        size = np.abs(c).max()
        res.residual = float(np.abs(geo.curl(X, points) - value * c).max() / size)
        res.eta_fraction = float(np.abs(c[..., 0]).max() / size)
        res.d_tangent = res.eta_fraction < TANGENT_TOL
        res.divergence = float(np.abs(geo.divergence(X, points)).max() / size)
        if res.residual <= RESIDUAL_TOL:
            out.append(res)
    return out, truncated


# ---------------------------------------------------------------------------
# aggregation


@dataclass
class Cluster:
    mu: float
    multiplicity: int
    d_tangent: int
    max_residual: float
    modes: List[Tuple[int, int]]
    possibly_incomplete: bool = False

    def to_json(self) -> dict:
        return {
            "mu": round(self.mu, 10),
            "multiplicity": self.multiplicity,
            "d_tangent": self.d_tangent,
            "max_residual": self.max_residual,
            "possibly_incomplete": self.possibly_incomplete,
            "modes": [list(m) for m in self.modes],
        }


@dataclass
class SpectrumReport:
    weights: Tuple[int, int]
    a: float
    M: int
    N: int
    top: int
    clusters: List[Cluster]
    results: List[EigenResult] = field(default_factory=list, repr=False)
    complete_below: Optional[float] = None

    @property
    def mu1(self) -> Optional[float]:
        pos = [c.mu for c in self.clusters if c.mu > 0]
        return min(pos) if pos else None

    @property
    def mu1_D(self) -> Optional[float]:
        pos = [c.mu for c in self.clusters if c.mu > 0 and c.d_tangent > 0]
        return min(pos) if pos else None

    def cluster_at(self, mu: float, tol: float = CLUSTER_TOL) -> Optional[Cluster]:
        for c in self.clusters:
            if abs(c.mu - mu) <= tol:
                return c
        return None

    def to_json(self) -> dict:
        return {
            "weights": list(self.weights),
            "a": self.a,
            "M": self.M,
            "N": self.N,
            "top": self.top,
            "cluster_tol": CLUSTER_TOL,
            "complete_below": self.complete_below,
            "mu1": self.mu1,
            "mu1_D": self.mu1_D,
            "clusters": [c.to_json() for c in self.clusters],
        }


def aggregate(
    results: Sequence[EigenResult], tol: float = CLUSTER_TOL, complete_below: Optional[float] = None
) -> List[Cluster]:
    """Merge eigenvalues within ``tol`` of their neighbour; multiplicities add across modes."""
    ordered = sorted(results, key=lambda r: (r.value, r.mode))
    groups: List[List[EigenResult]] = []
    for r in ordered:
        if groups and r.value - groups[-1][-1].value <= tol:
            groups[-1].append(r)
        else:
            groups.append([r])
    clusters = []
    for g in groups:
        mu = float(np.mean([r.value for r in g]))
        clusters.append(
            Cluster(
                mu=mu,
                multiplicity=len(g),
                d_tangent=sum(r.d_tangent for r in g),
                max_residual=max(r.residual for r in g),
                modes=sorted({(r.mode.m, r.mode.n) for r in g}),
                possibly_incomplete=complete_below is not None and abs(mu) >= 0.95 * complete_below,
            )
        )
    return clusters


def spectrum(
    w,
    a: float = 1.0,
    M: int = 5,
    N: int = 200,
    top: int = 8,
    mu_max: Optional[float] = None,
    workers: int = 1,
) -> SpectrumReport:
    """Solve every mode with ``|m|, |n| <= M`` and cluster the verified eigenvalues.

    With ``workers > 1`` modes are solved on a thread pool (LAPACK releases the
    GIL); results are merged in mode order either way.
    """
    w = geo.as_weights(w)
    points = verification_points()

    def run(mode):
        return solve_mode(reduce_mode(w, a, mode, N), top, mu_max, points=points)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(run, modes(M)))
    else:
        solved = [run(mode) for mode in modes(M)]
    results: List[EigenResult] = []
    bound = math.inf
    for found, truncated in solved:
        results.extend(found)
        if truncated and found:
            bound = min(bound, max(abs(r.value) for r in found))
    complete = None if math.isinf(bound) else bound
    return SpectrumReport(
        (w.k, w.l), float(a), M, N, top, aggregate(results, complete_below=complete), results, complete
    )


# ---------------------------------------------------------------------------
# mode-agnostic oracle on the round sphere


def _monomials(d: int) -> List[Tuple[int, ...]]:
    out = []
    for combo in combinations_with_replacement(range(4), d):
        e = [0, 0, 0, 0]
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


def round_frame_matrices() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Linear fields ``x -> A x`` on R^4 restricting to an adapted frame of the round sphere.

    ``xi`` is the Hopf field ``i z``; the other two come from the
    quaternionic structure and are normalized so that ``[xi, X1] = -2 X2``,
    ``[X2, xi] = -2 X1`` and ``[X1, X2] = -2 xi``.
    """
    J = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
    K = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
    L = J @ K

    def bracket(A, B):
        # [A x, B x] = (B A - A B) x
        return B @ A - A @ B

    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            X1, X2 = s1 * K, s2 * L
            if (
                np.allclose(bracket(J, X1), -2 * X2)
                and np.allclose(bracket(X2, J), -2 * X1)
                and np.allclose(bracket(X1, X2), -2 * J)
            ):
                return J, X1, X2
    raise SpectrumError("no sign choice gives the adapted bracket relations")  # pragma: no cover


def _derivation(A: np.ndarray, basis: List[Tuple[int, ...]]) -> np.ndarray:
    """Matrix of ``p -> (A x) . grad p`` on homogeneous monomials of one degree."""
    index = {e: i for i, e in enumerate(basis)}
    D = np.zeros((len(basis), len(basis)))
    for col, e in enumerate(basis):
        for i in range(4):
            if e[i] == 0:
                continue
            for j in range(4):
                if A[i, j] == 0:
                    continue
                t = list(e)
                t[i] -= 1
                t[j] += 1
                D[index[tuple(t)], col] += A[i, j] * e[i]
    return D


def polynomial_curl_matrix(d: int) -> np.ndarray:
    """Curl on fields whose frame coefficients are homogeneous of degree ``d``.

    Frame fields are linear, so the space is invariant and the matrix is exact.
    Homogeneous polynomials restrict injectively to the sphere.
    """
    basis = _monomials(d)
    Dxi, D1, D2 = (_derivation(A, basis) for A in round_frame_matrices())
    n = len(basis)
    Z = np.zeros((n, n))
    I = np.eye(n)
    # C0 = 1, C1 = C2 = 0 on the round sphere
    return np.block(
        [
            [2 * I, -D2, D1],
            [D2, 2 * I, -Dxi],
            [-D1, Dxi, 2 * I],
        ]
    )


def polynomial_curl_spectrum(degree: int, tol: float = 1e-8) -> Dict[float, int]:
    """Nonzero curl eigenvalues with multiplicities from coefficient degrees ``degree - 1`` and ``degree``.

    Restrictions of degree-``d`` polynomials contain those of degree ``d - 2``,
    so two consecutive degrees cover every harmonic degree up to ``degree``
    exactly once.
    """
    vals = np.concatenate(
        [np.linalg.eigvals(polynomial_curl_matrix(d)) for d in range(max(0, degree - 1), degree + 1)]
    )
    if np.abs(vals.imag).max() > tol:
        raise SpectrumError("polynomial curl matrix has non-real eigenvalues")
    vals = np.sort(vals.real)
    out: Dict[float, int] = {}
    for v in vals:
        if abs(v) < tol:
            continue
        key = float(np.round(v, 6))
        out[key] = out.get(key, 0) + 1
    return out
