"""Closed-form upper bounds for the dilute Bose gas energy per particle,
the Dyson hard-sphere bounds, and the higher-order reference expansion.

Every result is reported as a BoundResult whose `ratio` field is the
energy per particle divided by 4*pi*mu*rho*a (with rho1 = (N-1)/L^3 for
finite boxes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "GasParameters",
    "FiniteBox",
    "BoundResult",
    "upper_bound_periodic",
    "upper_bound_finite_range",
    "upper_bound_thermo",
    "dirichlet_correction",
    "dyson_hard_sphere",
    "lhy_expansion",
    "DYSON_LOWER_RATIO",
    "LHY_SQRT_COEFF",
    "LHY_LOG_COEFF",
    "default_dirichlet_constant",
]

DYSON_LOWER_RATIO = 1.0 / (10.0 * math.sqrt(2.0))
LHY_SQRT_COEFF = 128.0 / (15.0 * math.sqrt(math.pi))
LHY_LOG_COEFF = 8.0 * (4.0 * math.pi / 3.0 - math.sqrt(3.0))


@dataclass(frozen=True)
class GasParameters:
    """Thermodynamic inputs (mu, rho, a) and the derived dilute scales."""

    mu: float
    rho: float
    a: float

    def __post_init__(self):
        if self.mu <= 0 or self.rho <= 0 or self.a < 0:
            raise ValueError("need mu > 0, rho > 0, a >= 0")

    @property
    def Y(self) -> float:
        """Dimensionless density 4*pi*rho*a^3/3."""
        return 4.0 * math.pi * self.rho * self.a**3 / 3.0

    @property
    def mean_spacing(self) -> float:
        return self.rho ** (-1.0 / 3.0)

    @property
    def ell_c(self) -> float:
        """Uncertainty-principle length (rho*a)^(-1/2)."""
        return (self.rho * self.a) ** -0.5

    @property
    def dilute(self) -> bool:
        """Scale ordering a < rho^(-1/3) < ell_c of the dilute regime."""
        return self.a < self.mean_spacing < self.ell_c

    @classmethod
    def from_Y(cls, Y: float, a: float = 1.0, mu: float = 1.0) -> "GasParameters":
        if Y <= 0:
            raise ValueError("Y must be positive")
        return cls(mu=mu, rho=3.0 * Y / (4.0 * math.pi * a**3), a=a)


@dataclass(frozen=True)
class FiniteBox:
    """N particles in a cubic box of side L."""

    N: int
    L: float

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("need at least two particles")
        if self.L <= 0:
            raise ValueError("box side must be positive")

    @property
    def rho1(self) -> float:
        return (self.N - 1) / self.L**3

    @property
    def rho(self) -> float:
        return self.N / self.L**3

    @property
    def b(self) -> float:
        """Radius of the sphere holding one particle at density rho1."""
        return (4.0 * math.pi * self.rho1 / 3.0) ** (-1.0 / 3.0)


@dataclass(frozen=True)
class BoundResult:
    """A bound (or reference value) with its dimensionless ratio and provenance."""

    kind: str
    ratio: float
    energy_per_particle: float | None = None
    valid: bool = True
    reason: str | None = None
    params: dict = field(default_factory=dict)

    def require_valid(self) -> "BoundResult":
        if not self.valid:
            raise ValueError(f"invalid bound ({self.kind}): {self.reason}")
        return self


def _invalid(kind: str, reason: str, **params) -> BoundResult:
    return BoundResult(kind=kind, ratio=float("nan"), valid=False, reason=reason, params=params)


def upper_bound_periodic(box: FiniteBox, a: float, mu: float = 1.0) -> BoundResult:
    """E0(N, L)/N upper bound for periodic boundary conditions.

    Valid for any nonnegative potential (finite range or not) with b > a:
        4*pi*mu*rho1*a * [1 - a/b + (a/b)^2 + (a/b)^3/2] / (1 - a/b)^8
    """
    x = a / box.b
    params = {"N": box.N, "L": box.L, "a": a, "mu": mu, "a_over_b": x}
    if x >= 1.0:
        return _invalid("upper-periodic", "b <= a", **params)
    ratio = (1.0 - x + x**2 + 0.5 * x**3) / (1.0 - x) ** 8
    energy = 4.0 * math.pi * mu * box.rho1 * a * ratio
    return BoundResult("upper-periodic", ratio, energy, params=params)


def upper_bound_finite_range(box: FiniteBox, a: float, R0: float, mu: float = 1.0) -> BoundResult:
    """Improved upper bound for potentials of finite range R0 when b > R0:
        4*pi*mu*rho1*a * [1 - (a/b)^2 + (a/b)^3/2] / (1 - a/b)^4
    """
    x = a / box.b
    params = {"N": box.N, "L": box.L, "a": a, "R0": R0, "mu": mu, "a_over_b": x}
    if box.b <= R0:
        return _invalid("upper-finite-range", "b <= R0", **params)
    if x >= 1.0:
        return _invalid("upper-finite-range", "b <= a", **params)
    ratio = (1.0 - x**2 + 0.5 * x**3) / (1.0 - x) ** 4
    energy = 4.0 * math.pi * mu * box.rho1 * a * ratio
    return BoundResult("upper-finite-range", ratio, energy, params=params)


def upper_bound_thermo(Y: float) -> BoundResult:
    """Thermodynamic-limit upper bound ratio, any boundary conditions:
        [1 - Y^(1/3) + Y^(2/3) - Y/2] / (1 - Y^(1/3))^8,  for Y < 1.
    """
    params = {"Y": Y}
    if Y <= 0:
        return _invalid("upper-thermo", "Y must be positive", **params)
    if Y >= 1.0:
        return _invalid("upper-thermo", "Y >= 1", **params)
    y = Y ** (1.0 / 3.0)
    ratio = (1.0 - y + y**2 - 0.5 * Y) / (1.0 - y) ** 8
    return BoundResult("upper-thermo", ratio, params=params)


def default_dirichlet_constant(mu: float = 1.0) -> float:
    """Single-particle localization energy scale mu*pi^2."""
    return mu * math.pi**2


def dirichlet_correction(
    bound: BoundResult, L: float, c_dirichlet: float | None = None, mu: float = 1.0
) -> BoundResult:
    """Add the localization cost c/L^2 per particle for Dirichlet walls.

    The constant is caller-supplied; the default is mu*pi^2.
    """
    if c_dirichlet is None:
        c_dirichlet = default_dirichlet_constant(mu)
    if c_dirichlet < 0:
        raise ValueError("Dirichlet constant must be nonnegative")
    if not bound.valid or bound.energy_per_particle is None:
        return _invalid("upper-dirichlet", bound.reason or "no per-particle energy", **bound.params)
    energy = bound.energy_per_particle + c_dirichlet / L**2
    scale = bound.energy_per_particle / bound.ratio
    params = dict(bound.params, c_dirichlet=c_dirichlet, L=L)
    return BoundResult("upper-dirichlet", energy / scale, energy, params=params)


def dyson_hard_sphere(Y: float) -> tuple[BoundResult, BoundResult]:
    """Hard-sphere bounds: lower ratio 1/(10*sqrt(2)) for all Y, and
    upper ratio (1 + 2*Y^(1/3)) / (1 - Y^(1/3))^2 for Y < 1."""
    params = {"Y": Y}
    lower = BoundResult("dyson-lower", DYSON_LOWER_RATIO, params=params)
    if Y <= 0:
        return lower, _invalid("dyson-upper", "Y must be positive", **params)
    y = Y ** (1.0 / 3.0)
    if y >= 1.0:
        return lower, _invalid("dyson-upper", "Y >= 1", **params)
    upper = BoundResult("dyson-upper", (1.0 + 2.0 * y) / (1.0 - y) ** 2, params=params)
    return lower, upper


def lhy_expansion(Y: float) -> BoundResult:
    """Higher-order reference expansion (not a certified bound):
        1 + (128/(15*sqrt(pi)))*(rho*a^3)^(1/2)
          + 8*(4*pi/3 - sqrt(3))*(rho*a^3)*log(rho*a^3).
    """
    params = {"Y": Y}
    if Y <= 0:
        return _invalid("lhy", "Y must be positive", **params)
    rho_a3 = 3.0 * Y / (4.0 * math.pi)
    params["rho_a3"] = rho_a3
    if rho_a3 >= 1.0:
        return _invalid("lhy", "rho*a^3 >= 1", **params)
    sqrt_term = LHY_SQRT_COEFF * math.sqrt(rho_a3)
    log_term = LHY_LOG_COEFF * rho_a3 * math.log(rho_a3)
    ratio = 1.0 + sqrt_term + log_term
    # flag when the log term overtakes the leading correction
    monotone = abs(log_term) < sqrt_term or rho_a3 == 0.0
    return BoundResult(
        "lhy",
        ratio,
        valid=True,
        reason=None if monotone else "series terms not ordered at this density",
        params=params,
    )
