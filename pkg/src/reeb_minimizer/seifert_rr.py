"""Exact Seifert-invariant arithmetic for quasi-regular Sasakian 3-manifolds.

Everything here works over ``fractions.Fraction``; no floating point is used.
The manifold is described as a circle V-bundle ``L`` over a 2-orbifold of
genus ``g`` with exceptional fibres ``(a_j, b_j)``.  The dimension of
``H^1(Sigma, O(L^mu))`` given by orbifold Riemann-Roch decides whether a
contact-tangent curl eigenfield with eigenvalue ``mu`` exists (for regular
fibres of length 2*pi), which in turn fixes the minimizer threshold of the
Reeb field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

Rational = Fraction

__all__ = [
    "Rational",
    "SeifertError",
    "SeifertData",
    "PowerData",
    "Verdict",
    "validate",
    "chern_number",
    "power_data",
    "power_b_values_recurrence",
    "dim_h1",
    "mu1_D",
    "verdict",
    "weighted_seifert",
    "bochner_bound",
    "format_rational",
    "parse_rational",
]


class SeifertError(ValueError):
    """Invalid or inconsistent Seifert data."""


@dataclass(frozen=True)
class SeifertData:
    deg: int
    genus: int
    fibers: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "fibers", tuple((int(a), int(b)) for a, b in self.fibers)
        )

    def __str__(self):
        fib = ", ".join(f"({a}, {b})" for a, b in self.fibers) or "-"
        return f"{{{self.deg}, {self.genus}; {fib}}}"


@dataclass(frozen=True)
class PowerData:
    exponent: int
    b_values: Tuple[int, ...]
    c1_power: Fraction
    deg_power: int


@dataclass(frozen=True)
class Verdict:
    mu1_D: int
    a0: Fraction
    dims: Dict[int, int] = field(default_factory=dict)
    a: Fraction | None = None
    status: str | None = None

    def to_json(self) -> dict:
        out = {
            "mu1_D": self.mu1_D,
            "a0": format_rational(self.a0),
            "dims": {str(mu): d for mu, d in sorted(self.dims.items())},
        }
        if self.a is not None:
            out["a"] = format_rational(self.a)
            out["status"] = self.status
        return out


def format_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer, or a finite decimal string exactly."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted; pass 'p/q' or a decimal string")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SeifertError(f"not a rational number: {text!r}") from exc


def _raw_c1(deg: int, fibers: Iterable[Tuple[int, int]]) -> Fraction:
    return Fraction(deg) + sum((Fraction(b, a) for a, b in fibers), Fraction(0))


def validate(data: SeifertData) -> SeifertData:
    """Normalize fibres and enforce the ``c1(L) < 0`` orientation convention.

    ``b_j`` is reduced into ``[0, a_j)``; fibres with ``a_j == 1`` are regular
    and are dropped (their ``b_j`` must reduce to 0).  Data with
    ``c1(L) >= 0`` is rejected rather than silently conjugated.
    """
    if int(data.genus) != data.genus or data.genus < 0:
        raise SeifertError(f"genus must be a non-negative integer, got {data.genus}")
    fibers = []
    for a, b in data.fibers:
        if a < 1:
            raise SeifertError(f"fibre multiplicity must be positive, got a={a}")
        b = b % a
        if a == 1:
            continue
        if math.gcd(a, b) != 1:
            raise SeifertError(f"fibre ({a}, {b}) has gcd(a, b) != 1")
        fibers.append((a, b))
    out = SeifertData(int(data.deg), int(data.genus), tuple(fibers))
    c1 = _raw_c1(out.deg, out.fibers)
    if c1 >= 0:
        raise SeifertError(
            f"c1(L) = {format_rational(c1)} is not negative; pass the Seifert "
            "invariants of the conjugate Sasakian structure (-xi, -eta, -phi, g) instead"
        )
    return out


def chern_number(data: SeifertData) -> Fraction:
    return _raw_c1(data.deg, data.fibers)


def power_b_values_recurrence(data: SeifertData, mu: int) -> Tuple[int, ...]:
    """``b_j(L^mu)`` by iterating ``b_j(L^i) = b_j(L^(i-1)) + b_j(L) mod a_j``."""
    if mu < 1:
        raise SeifertError(f"power must be a positive integer, got {mu}")
    current = [b for _, b in data.fibers]
    for _ in range(mu - 1):
        current = [(c + b) % a for c, (a, b) in zip(current, data.fibers)]
    return tuple(current)


def power_data(data: SeifertData, mu: int) -> PowerData:
    if int(mu) != mu or mu < 1:
        raise SeifertError(
            f"power must be a positive integer (negative bundle, positive powers), got {mu}"
        )
    mu = int(mu)
    b_values = tuple((mu * b) % a for a, b in data.fibers)
    c1_power = mu * chern_number(data)
    deg = c1_power - sum(
        (Fraction(bp, a) for bp, (a, _) in zip(b_values, data.fibers)), Fraction(0)
    )
    if deg.denominator != 1:
        raise SeifertError(f"deg L^{mu} = {format_rational(deg)} is not an integer")
    return PowerData(mu, b_values, c1_power, int(deg))


def dim_h1(data: SeifertData, mu: int) -> int:
    """Complex dimension of ``H^1(Sigma_g, O(L^mu))`` by orbifold Riemann-Roch."""
    pd = power_data(data, mu)
    value = (
        -1
        + data.genus
        - pd.c1_power
        + sum(
            (Fraction(bp, a) for bp, (a, _) in zip(pd.b_values, data.fibers)),
            Fraction(0),
        )
    )
    if value.denominator != 1 or value < 0:
        raise SeifertError(
            f"inconsistent Seifert data {data}: dim H^1 for mu={mu} is {format_rational(value)}"
        )
    return int(value)


def _search_bound(data: SeifertData) -> int:
    c1 = chern_number(data)
    # beyond this, -1 + g - mu*c1 >= 1 already
    return max(1, math.ceil(Fraction(2 - data.genus) / (-c1)) + 1)


def mu1_D(data: SeifertData) -> int:
    """Smallest ``mu >= 1`` with ``dim_h1(data, mu) >= 1``."""
    for mu in range(1, _search_bound(data) + 1):
        if dim_h1(data, mu) >= 1:
            return mu
    raise SeifertError(f"no positive power found for {data}")  # pragma: no cover


def verdict(data: SeifertData, a=None, extra: int = 3) -> Verdict:
    """Minimizer verdict for the D-homothetic deformation with constant ``a``.

    With ``a=None`` only the threshold and dimension table are returned.
    """
    data = validate(data)
    m = mu1_D(data)
    a0 = Fraction(m, 2)
    dims = {mu: dim_h1(data, mu) for mu in range(1, m + extra + 1)}
    if a is None:
        return Verdict(m, a0, dims)
    a = parse_rational(a)
    if a <= 0:
        raise SeifertError(f"deformation constant must be positive, got {format_rational(a)}")
    status = "minimizer" if a <= a0 else "unstable"
    return Verdict(m, a0, dims, a, status)


def _egcd(p: int, q: int) -> Tuple[int, int, int]:
    if q == 0:
        return p, 1, 0
    g, x, y = _egcd(q, p % q)
    return g, y, x - (p // q) * y


def weighted_seifert(k: int, l: int) -> SeifertData:
    """Reversely oriented Seifert invariants of the weighted sphere ``S^3_w``."""
    if k < 1 or l < 1:
        raise SeifertError(f"weights must be positive, got ({k}, {l})")
    if l > k:
        raise SeifertError(f"weights must satisfy l <= k, got ({k}, {l})")
    if math.gcd(k, l) != 1:
        raise SeifertError(f"weights ({k}, {l}) are not coprime")
    if k == 1:
        return validate(SeifertData(-1, 0, ()))
    g, x, y = _egcd(l, k)
    assert g == 1
    # shift to 0 < x < k keeping l*x + k*y = 1
    t = (x - 1) // k
    x, y = x - t * k, y + t * l
    assert l * x + k * y == 1 and 0 < x < k
    data = validate(SeifertData(-1, 0, ((l, (-y) % l), (k, k - x))))
    if chern_number(data) != Fraction(-1, k * l):
        raise SeifertError(f"weighted data {data} does not have c1 = -1/(k l)")  # pragma: no cover
    return data


def bochner_bound(min_scal, mu1D) -> bool:
    """Check ``mu1_D >= min Scal / 4 + 1/2`` exactly."""
    return Fraction(mu1D) >= parse_rational(min_scal) / 4 + Fraction(1, 2)
