"""Kerr-Newman horizon mechanics and thermodynamics in closed form.

Geometric units G = c = 1 throughout; thermodynamic quantities additionally
use hbar = k_B = 1. Spin is the specific angular momentum a = L/M.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NakedSingularityError, ValidationError

__all__ = [
    "EXTREMAL_REL_TOL",
    "BlackHoleParams",
    "HorizonData",
    "SmarrCoefficients",
    "HawkingThermo",
    "horizons",
    "irreducible_mass",
    "horizon_area",
    "smarr_mass",
    "smarr_coefficients",
    "hawking_thermo",
    "horizon_data",
    "classify_transformation",
    "area_theorem_check",
    "bifurcation_allowed",
    "generalized_entropy",
    "evaporation_delta",
    "tortoise",
    "eddington_v",
    "radial_null_geodesics",
]

EXTREMAL_REL_TOL = 1e-12  # discriminant below this * M^2 counts as extremal


@dataclass(frozen=True)
class BlackHoleParams:
    """(M, Q, a) with a = L/M; horizons exist iff M^2 >= Q^2 + a^2."""

    mass: float
    charge: float = 0.0
    spin: float = 0.0

    def __post_init__(self):
        if not (self.mass > 0 and math.isfinite(self.mass)):
            raise ValidationError(f"mass must be positive and finite, got {self.mass}")
        if not (math.isfinite(self.charge) and math.isfinite(self.spin)):
            raise ValidationError("charge and spin must be finite")

    @classmethod
    def from_angular_momentum(cls, mass: float, charge: float, angular_momentum: float
                              ) -> "BlackHoleParams":
        return cls(mass, charge, angular_momentum / mass)

    @property
    def angular_momentum(self) -> float:
        return self.spin * self.mass

    @property
    def discriminant(self) -> float:
        return self.mass ** 2 - self.charge ** 2 - self.spin ** 2

    @property
    def has_horizon(self) -> bool:
        return self.discriminant >= -EXTREMAL_REL_TOL * self.mass ** 2

    @property
    def is_extremal(self) -> bool:
        return abs(self.discriminant) < EXTREMAL_REL_TOL * self.mass ** 2


class HorizonData(NamedTuple):
    r_plus: float
    r_minus: float
    area: float
    irreducible_mass: float
    temperature: float
    entropy: float
    surface_gravity: float


class SmarrCoefficients(NamedTuple):
    tension: float           # dM/dA at fixed L, Q
    angular_velocity: float  # dM/dL at fixed A, Q
    potential: float         # dM/dQ at fixed A, L


class HawkingThermo(NamedTuple):
    surface_gravity: float
    temperature: float
    entropy: float
    irreducible_mass: float


def _sqrt_discriminant(p: BlackHoleParams) -> float:
    d = p.discriminant
    if d < -EXTREMAL_REL_TOL * p.mass ** 2:
        raise NakedSingularityError(
            f"M^2 - Q^2 - a^2 = {d} < 0: no horizon (naked singularity)")
    return math.sqrt(max(d, 0.0))


def horizons(p: BlackHoleParams) -> tuple[float, float]:
    """Outer and inner horizon radii M +- sqrt(M^2 - Q^2 - a^2)."""
    root = _sqrt_discriminant(p)
    return p.mass + root, p.mass - root


def irreducible_mass(p: BlackHoleParams) -> float:
    """Mass left after reversibly extracting all charge and spin.

    M_irr^2 = (M^2 - Q^2/2 + M sqrt(M^2 - Q^2 - a^2)) / 2, equal to
    (r_+^2 + a^2)/2.
    """
    root = _sqrt_discriminant(p)
    sq = 0.5 * (p.mass ** 2 - 0.5 * p.charge ** 2 + p.mass * root)
    return math.sqrt(sq)


def horizon_area(p: BlackHoleParams) -> float:
    """A = 4 pi (r_+^2 + a^2) = 8 pi M_irr^2."""
    r_plus, _ = horizons(p)
    return 4.0 * math.pi * (r_plus ** 2 + p.spin ** 2)


def smarr_mass(area: float, angular_momentum: float, charge: float) -> float:
    """Mass as a function of (A, L, Q): the inverse of the area formula."""
    if not (area > 0):
        raise ValidationError("area must be positive")
    sq = (area / (16 * math.pi) + 4 * math.pi * angular_momentum ** 2 / area
          + charge ** 2 / 2 + math.pi * charge ** 4 / area)
    return math.sqrt(sq)


def smarr_coefficients(p: BlackHoleParams) -> SmarrCoefficients:
    """Closed-form partials of M(A, L, Q): surface tension, angular velocity,
    electrostatic potential. The tension vanishes at extremality."""
    area = horizon_area(p)
    ang = p.angular_momentum
    tension = (1.0 / p.mass) * (1.0 / (32 * math.pi)
                                - 2 * math.pi * ang ** 2 / area ** 2
                                - math.pi * p.charge ** 4 / (2 * area ** 2))
    angular_velocity = 4 * math.pi * ang / (p.mass * area)
    potential = (1.0 / p.mass) * (p.charge / 2 + 2 * math.pi * p.charge ** 3 / area)
    return SmarrCoefficients(tension, angular_velocity, potential)


def hawking_thermo(p: BlackHoleParams) -> HawkingThermo:
    """kappa = 8 pi * tension, T = kappa / 2 pi, S = A/4."""
    area = horizon_area(p)
    kappa = 8 * math.pi * smarr_coefficients(p).tension
    if p.is_extremal:
        kappa = 0.0  # third-law endpoint
    return HawkingThermo(kappa, kappa / (2 * math.pi), area / 4.0, irreducible_mass(p))


def horizon_data(p: BlackHoleParams) -> HorizonData:
    r_plus, r_minus = horizons(p)
    thermo = hawking_thermo(p)
    return HorizonData(r_plus, r_minus, horizon_area(p), thermo.irreducible_mass,
                       thermo.temperature, thermo.entropy, thermo.surface_gravity)


def classify_transformation(before: BlackHoleParams, after: BlackHoleParams,
                            rel_tol: float = 1e-10) -> str:
    """'reversible' if M_irr is conserved, 'irreversible' if it grows,
    'forbidden' if it would shrink."""
    m0, m1 = irreducible_mass(before), irreducible_mass(after)
    if abs(m1 - m0) <= rel_tol * m0:
        return "reversible"
    return "irreversible" if m1 > m0 else "forbidden"


def area_theorem_check(components: Sequence[BlackHoleParams],
                       merged: BlackHoleParams) -> bool:
    """Second law for a merger: the final area is at least the summed areas."""
    return horizon_area(merged) >= sum(horizon_area(c) for c in components)


def bifurcation_allowed(original: BlackHoleParams,
                        fragments: Sequence[BlackHoleParams]) -> bool:
    """A split is allowed only if total area does not decrease (it always does
    for mass-conserving Schwarzschild splits, so splits are prohibited)."""
    return sum(horizon_area(f) for f in fragments) >= horizon_area(original)


def generalized_entropy(s_outside: float, holes: Sequence[BlackHoleParams]) -> float:
    """S_U = S_outside + sum A_i / 4."""
    return s_outside + 0.25 * sum(horizon_area(h) for h in holes)


def evaporation_delta(delta_area: float, delta_s_outside: float,
                      tol: float = 1e-12) -> tuple[float, str]:
    """Net generalized-entropy change for an area change plus outside-entropy
    change; 'boundary' flags the marginal case dS_U = 0."""
    ds_u = delta_s_outside + delta_area / 4.0
    if abs(ds_u) <= tol:
        return ds_u, "boundary"
    return ds_u, "increase" if ds_u > 0 else "decrease"


def tortoise(r: float, mass: float) -> float:
    """r* = r + 2M ln|(r - 2M)/2M|; diverges to -inf at the horizon."""
    if not (mass > 0):
        raise ValidationError("mass must be positive")
    if not (r > 0):
        raise ValidationError("radius must be positive")
    if r == 2 * mass:
        raise ValidationError("tortoise coordinate is singular at r = 2M")
    return r + 2 * mass * math.log(abs((r - 2 * mass) / (2 * mass)))


def eddington_v(t: float, r: float, mass: float) -> float:
    """Ingoing Eddington-Finkelstein coordinate v = t + r*."""
    return t + tortoise(r, mass)


def radial_null_geodesics(mass: float, r_values, branch: str = "ingoing",
                          region: str = "exterior", t0: float = 0.0,
                          margin: float = 1e-9) -> np.ndarray:
    """Radial light rays t(r) = +-r*(r) + const for the static spherical hole.

    Returns an (n, 2) array of (r, t) anchored so t(r_values[0]) = t0.
    Outgoing rays have dt/dr = +1/alpha, ingoing dt/dr = -1/alpha; on the
    exterior branch ingoing rays pile up at t -> +inf as r -> 2M.
    """
    if branch not in ("ingoing", "outgoing"):
        raise ValidationError(f"unknown branch {branch!r}")
    if region not in ("exterior", "interior"):
        raise ValidationError(f"unknown region {region!r}")
    r = np.asarray(r_values, dtype=float)
    if r.size < 1:
        raise ValidationError("empty radius range")
    rs = 2 * mass
    if region == "exterior":
        if np.any(r <= rs * (1 + margin)):
            raise ValidationError("exterior range must stay outside r = 2M by the margin")
    else:
        if np.any(r >= rs * (1 - margin)) or np.any(r <= 0):
            raise ValidationError("interior range must stay inside (0, 2M) by the margin")
    rstar = np.array([tortoise(float(ri), mass) for ri in r])
    sign = 1.0 if branch == "outgoing" else -1.0
    t = sign * rstar
    t = t - t[0] + t0
    return np.column_stack([r, t])
