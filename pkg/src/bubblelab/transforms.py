"""Reductions that turn general families into elementary ones.

Three moves: invert (work with 1/F_n when the limit has a pole),
perturb (work with F_n + z when the limit is constant), and the
corresponding bubble recovery (subtract the branch attachment point from
every sphere map of a perturbed tree, or invert the sphere maps of an
inverted tree).  Inversion leaves the spherical derivative unchanged
exactly, so all mass bookkeeping is shared between the two routes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FamilyError, PreconditionError
from .exprs import Bin, Num, parse_expression
from .family import FamilySpec, instantiate
from .quadrature import FullPlane
from .sphere import MoebiusMap, RationalMap

__all__ = [
    "invert",
    "invert_family",
    "perturb",
    "PerturbResult",
    "RoutingDecision",
    "route_family",
]


def invert(F):
    """1/F as a rational map; the spherical derivative is unchanged."""
    if F.num.is_zero:
        raise PreconditionError("cannot invert the zero map")
    return RationalMap(F.den, F.num, reduce=False)


def invert_family(spec):
    """The family n -> 1/F_n (coefficient expressions are just swapped)."""
    return FamilySpec(
        spec.den_exprs, spec.num_exprs, spec.domain, spec.n_values, spec.bound
    )


@dataclass(frozen=True)
class PerturbResult:
    spec: FamilySpec
    comparability_constant: float
    threshold: float
    n_used: int


def perturb(spec, threshold=10.0, n_check=None):
    """The perturbed family n -> F_n(z) + z, for a bounded domain.

    Also measures the comparability constant of the two spherical
    derivatives over a sample grid, restricted to points where either
    derivative exceeds the threshold.
    """
    if isinstance(spec.domain, FullPlane):
        raise PreconditionError("perturbation requires a bounded domain")
    # new numerator coefficients: num_k + den_{k-1} (i.e. num + z * den)
    width = max(len(spec.num_exprs), len(spec.den_exprs) + 1)
    new_num = []
    for k in range(width):
        a = spec.num_exprs[k] if k < len(spec.num_exprs) else None
        b = spec.den_exprs[k - 1] if 1 <= k <= len(spec.den_exprs) else None
        if a is not None and b is not None:
            new_num.append(Bin("+", a, b))
        else:
            new_num.append(a if a is not None else b if b is not None else Num(0.0))
    new_spec = FamilySpec(
        tuple(new_num), spec.den_exprs, spec.domain, spec.n_values, None
    )

    n_used = n_check if n_check is not None else spec.n_values[-1]
    F = instantiate(spec, n_used)
    G = instantiate(new_spec, n_used)
    zs = _comparability_grid(spec.domain)
    r1 = F.spherical_derivative(zs)
    r2 = G.spherical_derivative(zs)
    mask = (r1 >= threshold) | (r2 >= threshold)
    if np.any(mask):
        lo = np.minimum(r1[mask], r2[mask])
        hi = np.maximum(r1[mask], r2[mask])
        const = float(np.max(hi / np.maximum(lo, 1e-300)))
    else:
        const = 1.0
    return PerturbResult(new_spec, const, float(threshold), int(n_used))


def _comparability_grid(region):
    """Log-radial grid reaching deep toward the domain center, where the
    derivatives actually get large."""
    x0, x1, y0, y1 = region.bounding_box()
    c = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    R = 0.49 * min(x1 - x0, y1 - y0)
    radii = np.geomspace(1e-4 * R, R, 24)
    angles = np.exp(2j * np.pi * (np.arange(16) + 0.5) / 16)
    zs = (c + radii[:, None] * angles[None, :]).ravel()
    return zs[region.contains(zs)]


@dataclass(frozen=True)
class RoutingDecision:
    """How a general family is reduced to an elementary one."""

    kind: str  # "direct" | "perturb" | "invert"
    working_spec: FamilySpec
    perturb_report: PerturbResult | None = None


def route_family(spec, report):
    """Choose the elementary reduction from a detection report.

    Constant limit -> perturb; a pole of the limit at a concentration
    point -> invert; otherwise the family is used directly.
    """
    if report.limit_constant:
        pr = perturb(spec)
        return RoutingDecision("perturb", pr.spec, pr)
    for pt in report.points:
        if _limit_has_pole_near(spec, pt.p):
            return RoutingDecision("invert", invert_family(spec))
    return RoutingDecision("direct", spec)


def _limit_has_pole_near(spec, p, circle_frac=0.02):
    """Median |F_top| on a small circle around p decides pole-ness.

    Bubble tails at scale 1/n are negligible on the circle, so the member
    at the top index stands in for the limit here.
    """
    x0, x1, _, _ = spec.domain.bounding_box()
    s = circle_frac * (x1 - x0)
    F = instantiate(spec, spec.n_values[-1])
    zs = p + s * np.exp(2j * np.pi * (np.arange(32) + 0.5) / 32)
    n, d = F.projective_values(zs)
    # chordal distance to infinity: 2|d| / sqrt(|n|^2 + |d|^2)
    to_inf = 2 * np.abs(d) / np.sqrt(np.abs(n) ** 2 + np.abs(d) ** 2)
    return float(np.median(to_inf)) <= 0.5
