"""Adaptive quadrature for spherical area, spherical length and the
classical area/counting identities.

The 2-D integrator subdivides cells recursively, with an embedded pair of
tensor Gauss-Legendre rules (4x4 / 7x7) supplying a per-cell error
estimate.  Disks and annuli are integrated in polar coordinates (the
domain is then a rectangle, so no indicator functions are needed), and
the full plane is split into two charts at |z| = R0 with the outer chart
mapped by z -> 1/z; the transported integrand is just the density of the
precomposed map, because the spherical derivative of F o (1/z) times the
Jacobian reproduces the density of F exactly.

Narrow concentration spikes (bubbles at scale 1/n) are handled by
pre-refining cells around the zeros and poles of the map, whose widths
are read off the local linearization; pure error-driven refinement would
otherwise be blind to spikes far below the sample spacing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import PreconditionError, QuadratureBudgetWarning
from .sphere import SpherePoint, MoebiusMap, chordal_distance
from .roots import all_roots

__all__ = [
    "Disk",
    "Annulus",
    "Rect",
    "DiskMinusDisks",
    "FullPlane",
    "Circle",
    "Segment",
    "Polyline",
    "EnergyProfile",
    "QuadResult",
    "spherical_area",
    "spherical_area_ex",
    "spherical_length",
    "energy_profile",
    "total_area_check",
    "ahlfors_shimizu_check",
    "mass_hotspots",
    "region_from_dict",
    "region_to_dict",
]

DEFAULT_TOL_AREA = 1e-6
DEFAULT_TOL_LENGTH = 1e-8
DEFAULT_MAX_CELLS = 400_000


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Disk:
    center: complex = 0.0
    radius: float = 1.0
    excluded: tuple = ()

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "excluded", tuple(complex(e) for e in self.excluded))

    def contains(self, z):
        return np.abs(np.asarray(z, dtype=complex) - self.center) <= self.radius

    def bounding_box(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_inner: float
    r_outer: float
    excluded: tuple = ()

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise ValueError("annulus requires 0 < r_inner < r_outer")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "excluded", tuple(complex(e) for e in self.excluded))

    @property
    def modulus(self):
        return np.log(self.r_outer / self.r_inner) / (2 * np.pi)

    def contains(self, z):
        d = np.abs(np.asarray(z, dtype=complex) - self.center)
        return (d >= self.r_inner) & (d <= self.r_outer)

    def bounding_box(self):
        c, r = self.center, self.r_outer
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float
    excluded: tuple = ()

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("rectangle requires x0 < x1 and y0 < y1")
        object.__setattr__(self, "excluded", tuple(complex(e) for e in self.excluded))

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return (
            (z.real >= self.x0)
            & (z.real <= self.x1)
            & (z.imag >= self.y0)
            & (z.imag <= self.y1)
        )

    def bounding_box(self):
        return (self.x0, self.x1, self.y0, self.y1)


@dataclass(frozen=True)
class DiskMinusDisks:
    outer: Disk
    holes: tuple = ()
    excluded: tuple = ()

    def __post_init__(self):
        holes = tuple(self.holes)
        for h in holes:
            gap = abs(h.center - self.outer.center) + h.radius
            if gap >= self.outer.radius:
                raise ValueError("hole not contained in the open outer disk")
        for i, a in enumerate(holes):
            for b in holes[i + 1 :]:
                if abs(a.center - b.center) <= a.radius + b.radius:
                    raise ValueError("holes must have disjoint closures")
        object.__setattr__(self, "holes", holes)
        object.__setattr__(self, "excluded", tuple(complex(e) for e in self.excluded))

    def contains(self, z):
        inside = self.outer.contains(z)
        for h in self.holes:
            d = np.abs(np.asarray(z, dtype=complex) - h.center)
            inside = inside & (d >= h.radius)
        return inside

    def bounding_box(self):
        return self.outer.bounding_box()


@dataclass(frozen=True)
class FullPlane:
    excluded: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "excluded", tuple(complex(e) for e in self.excluded))

    def contains(self, z):
        return np.ones(np.shape(np.asarray(z)), dtype=bool)


Region = (Disk, Annulus, Rect, DiskMinusDisks, FullPlane)


def region_to_dict(region):
    if isinstance(region, Disk):
        return {
            "kind": "disk",
            "center": [region.center.real, region.center.imag],
            "radius": region.radius,
        }
    if isinstance(region, Annulus):
        return {
            "kind": "annulus",
            "center": [region.center.real, region.center.imag],
            "r_inner": region.r_inner,
            "r_outer": region.r_outer,
        }
    if isinstance(region, Rect):
        return {"kind": "rect", "x0": region.x0, "x1": region.x1, "y0": region.y0, "y1": region.y1}
    if isinstance(region, DiskMinusDisks):
        return {
            "kind": "disk-minus-disks",
            "outer": region_to_dict(region.outer),
            "holes": [region_to_dict(h) for h in region.holes],
        }
    if isinstance(region, FullPlane):
        return {"kind": "full-plane"}
    raise TypeError(f"not a region: {region!r}")


def region_from_dict(d):
    kind = d.get("kind")
    if kind == "disk":
        cx, cy = d.get("center", [0.0, 0.0])
        return Disk(complex(cx, cy), float(d["radius"]))
    if kind == "annulus":
        cx, cy = d.get("center", [0.0, 0.0])
        return Annulus(complex(cx, cy), float(d["r_inner"]), float(d["r_outer"]))
    if kind == "rect":
        return Rect(float(d["x0"]), float(d["x1"]), float(d["y0"]), float(d["y1"]))
    if kind == "disk-minus-disks":
        return DiskMinusDisks(
            region_from_dict(d["outer"]),
            tuple(region_from_dict(h) for h in d.get("holes", [])),
        )
    if kind == "full-plane":
        return FullPlane()
    raise ValueError(f"unknown region kind {kind!r}")


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    orientation: int = 1

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("circle radius must be positive")
        object.__setattr__(self, "center", complex(self.center))


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))


@dataclass(frozen=True)
class Polyline:
    points: tuple

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if len(pts) < 2:
            raise ValueError("polyline needs at least two points")
        object.__setattr__(self, "points", pts)


# ---------------------------------------------------------------------------
# embedded tensor Gauss-Legendre pair


def _tensor_rule(k):
    x, w = np.polynomial.legendre.leggauss(k)
    U = np.repeat(x, k)
    V = np.tile(x, k)
    W = np.outer(w, w).ravel()
    return U, V, W


_LOW_U, _LOW_V, _LOW_W = _tensor_rule(4)
_HIGH_U, _HIGH_V, _HIGH_W = _tensor_rule(7)


def _eval_cells(f2, u0, u1, v0, v1):
    """Integrate f2 over each cell with the 7x7 rule and estimate the error
    as the difference against the 4x4 rule.  Returns (values, errors)."""
    hu = 0.5 * (u1 - u0)
    hv = 0.5 * (v1 - v0)
    mu = 0.5 * (u1 + u0)
    mv = 0.5 * (v1 + v0)

    U = mu[:, None] + hu[:, None] * _HIGH_U[None, :]
    V = mv[:, None] + hv[:, None] * _HIGH_V[None, :]
    fh = f2(U.ravel(), V.ravel()).reshape(U.shape)
    hi = (fh * _HIGH_W[None, :]).sum(axis=1) * hu * hv

    U = mu[:, None] + hu[:, None] * _LOW_U[None, :]
    V = mv[:, None] + hv[:, None] * _LOW_V[None, :]
    fl = f2(U.ravel(), V.ravel()).reshape(U.shape)
    lo = (fl * _LOW_W[None, :]).sum(axis=1) * hu * hv

    return hi, np.abs(hi - lo)


@dataclass
class QuadResult:
    value: float
    error: float
    cells: int
    converged: bool = True


def _presplit(bounds, hotspots, max_extra=20000):
    """Recursively split cells containing a hotspot until the cell is no
    wider than the spot.  hotspots: iterable of (u, v, wu, wv)."""
    cells = [bounds]
    for (su, sv, wu, wv) in hotspots:
        out = []
        stack = cells
        cells = []
        while stack:
            u0, u1, v0, v1 = stack.pop()
            if not (u0 <= su <= u1 and v0 <= sv <= v1):
                out.append((u0, u1, v0, v1))
                continue
            if (u1 - u0) <= wu and (v1 - v0) <= wv:
                out.append((u0, u1, v0, v1))
                continue
            if len(out) + len(stack) > max_extra:
                out.append((u0, u1, v0, v1))
                continue
            um = 0.5 * (u0 + u1)
            vm = 0.5 * (v0 + v1)
            if (u1 - u0) > wu and (v1 - v0) > wv:
                stack.extend(
                    [(u0, um, v0, vm), (um, u1, v0, vm), (u0, um, vm, v1), (um, u1, vm, v1)]
                )
            elif (u1 - u0) > wu:
                stack.extend([(u0, um, v0, v1), (um, u1, v0, v1)])
            else:
                stack.extend([(u0, u1, v0, vm), (u0, u1, vm, v1)])
        cells = out
    return cells


def adaptive_cells(
    f2,
    u_range,
    v_range,
    tol_rel=DEFAULT_TOL_AREA,
    tol_abs=1e-12,
    hotspots=(),
    max_cells=DEFAULT_MAX_CELLS,
):
    """Globally adaptive integration of f2(u, v) over a rectangle.

    Deterministic: ties in the refinement queue are broken by insertion
    order.  If the cell budget is exhausted a QuadratureBudgetWarning is
    emitted and the partial value is returned with converged=False.
    """
    cells = _presplit((u_range[0], u_range[1], v_range[0], v_range[1]), hotspots)
    u0 = np.array([c[0] for c in cells])
    u1 = np.array([c[1] for c in cells])
    v0 = np.array([c[2] for c in cells])
    v1 = np.array([c[3] for c in cells])
    vals, errs = _eval_cells(f2, u0, u1, v0, v1)

    # parallel arrays grow as cells split; dead parents are flagged
    alive = list(range(len(cells)))
    store = {
        "u0": list(u0),
        "u1": list(u1),
        "v0": list(v0),
        "v1": list(v1),
        "val": list(vals),
        "err": list(errs),
    }

    while True:
        total = float(np.sum(np.array([store["val"][i] for i in alive])))
        err_tot = float(np.sum(np.array([store["err"][i] for i in alive])))
        target = max(tol_abs, tol_rel * abs(total))
        if err_tot <= target:
            return QuadResult(total, err_tot, len(alive), True)
        if len(alive) >= max_cells:
            warnings.warn(
                f"quadrature budget exhausted: partial value {total:.12g}, "
                f"achieved error estimate {err_tot:.3g} (target {target:.3g})",
                QuadratureBudgetWarning,
            )
            return QuadResult(total, err_tot, len(alive), False)

        order = sorted(alive, key=lambda i: (-store["err"][i], i))
        batch = [i for i in order[: max(1, len(alive) // 8)] if store["err"][i] > 0]
        if not batch:
            batch = order[:1]
        nu0, nu1, nv0, nv1 = [], [], [], []
        for i in batch:
            um = 0.5 * (store["u0"][i] + store["u1"][i])
            vm = 0.5 * (store["v0"][i] + store["v1"][i])
            for (a, b, c, d) in (
                (store["u0"][i], um, store["v0"][i], vm),
                (um, store["u1"][i], store["v0"][i], vm),
                (store["u0"][i], um, vm, store["v1"][i]),
                (um, store["u1"][i], vm, store["v1"][i]),
            ):
                nu0.append(a)
                nu1.append(b)
                nv0.append(c)
                nv1.append(d)
        cvals, cerrs = _eval_cells(
            f2, np.array(nu0), np.array(nu1), np.array(nv0), np.array(nv1)
        )
        dead = set(batch)
        alive = [i for i in alive if i not in dead]
        base = len(store["u0"])
        for k in range(len(nu0)):
            store["u0"].append(nu0[k])
            store["u1"].append(nu1[k])
            store["v0"].append(nv0[k])
            store["v1"].append(nv1[k])
            store["val"].append(cvals[k])
            store["err"].append(cerrs[k])
            alive.append(base + k)


# ---------------------------------------------------------------------------
# hotspots: where the density of a rational map can spike


def _clustered_roots(roots, tol=1e-8):
    """Group a sorted root array into (representative, multiplicity) pairs."""
    groups = []
    for r in roots:
        if groups and abs(r - groups[-1][0]) <= tol * (1.0 + abs(r)):
            rep, m = groups[-1]
            groups[-1] = ((rep * m + r) / (m + 1), m + 1)
        else:
            groups.append((r, 1))
    return groups


def mass_hotspots(F):
    """(point, width) pairs around which the density of F concentrates.

    At a zero or pole of local expansion c (z - z0)^(+-m), |F| passes
    through 1 at distance |c|^(-+1/m), which is the width of the density
    bump there.  Widths are clipped to [1e-14, 1].
    """
    spots = []
    for poly, other in ((F.num, F.den), (F.den, F.num)):
        if poly.degree == 0:
            continue
        roots = np.sort_complex(all_roots(poly.coeffs))
        for z0, m in _clustered_roots(roots):
            rest = 1.0
            for r in roots:
                if abs(r - z0) > 1e-8 * (1.0 + abs(z0)):
                    rest *= abs(z0 - r)
            c = abs(poly.lead) * rest / max(abs(other(z0)), 1e-300)
            width = c ** (-1.0 / m) if c > 0 else 1.0
            spots.append((complex(z0), float(np.clip(width, 1e-14, 1.0))))
    return spots


# ---------------------------------------------------------------------------
# area integrals per region kind


def _polar_hotspots(center, r_lo, r_hi, spots):
    out = []
    for (q, w) in spots:
        d = abs(q - center)
        if d < r_lo - 6 * w or d > r_hi + 6 * w:
            continue
        u = min(max(d, r_lo), r_hi)
        ang = float(np.angle(q - center)) % (2 * np.pi)
        wu = w
        wv = w / max(d, w)
        out.append((u, ang, wu, wv))
        # duplicate across the theta seam so boundary-straddling spots refine
        if ang < 1.0:
            out.append((u, ang + 2 * np.pi, wu, wv))
        if ang > 2 * np.pi - 1.0:
            out.append((u, ang - 2 * np.pi, wu, wv))
    return out


def _area_polar(F, center, r_lo, r_hi, tol_rel, tol_abs, max_cells, spots=None):
    if spots is None:
        spots = mass_hotspots(F)

    def f2(R, TH):
        z = center + R * np.exp(1j * TH)
        return F.density(z) * R

    return adaptive_cells(
        f2,
        (r_lo, r_hi),
        (0.0, 2 * np.pi),
        tol_rel=tol_rel,
        tol_abs=tol_abs,
        hotspots=_polar_hotspots(center, r_lo, r_hi, spots),
        max_cells=max_cells,
    )


def _area_rect(F, x0, x1, y0, y1, tol_rel, tol_abs, max_cells, mask=None, spots=None):
    if spots is None:
        spots = mass_hotspots(F)

    if mask is None:

        def f2(X, Y):
            return F.density(X + 1j * Y)

    else:

        def f2(X, Y):
            z = X + 1j * Y
            return F.density(z) * mask(z)

    hot = []
    for (q, w) in spots:
        if x0 - 6 * w <= q.real <= x1 + 6 * w and y0 - 6 * w <= q.imag <= y1 + 6 * w:
            hot.append(
                (min(max(q.real, x0), x1), min(max(q.imag, y0), y1), w, w)
            )
    return adaptive_cells(
        f2, (x0, x1), (y0, y1), tol_rel=tol_rel, tol_abs=tol_abs, hotspots=hot, max_cells=max_cells
    )


def spherical_area_ex(
    F,
    region,
    tol=DEFAULT_TOL_AREA,
    tol_abs=None,
    max_cells=DEFAULT_MAX_CELLS,
    chart_radius=1.0,
):
    """Spherical area of F over a region, with error diagnostics.

    Returns a QuadResult.  chart_radius only matters for FullPlane.
    """
    if tol <= 0:
        raise PreconditionError("tolerance must be positive")
    if tol_abs is None:
        tol_abs = tol * 1e-3
    if F.is_constant:
        return QuadResult(0.0, 0.0, 0, True)
    if isinstance(region, Disk):
        return _area_polar(F, region.center, 0.0, region.radius, tol, tol_abs, max_cells)
    if isinstance(region, Annulus):
        return _area_polar(
            F, region.center, region.r_inner, region.r_outer, tol, tol_abs, max_cells
        )
    if isinstance(region, Rect):
        return _area_rect(F, region.x0, region.x1, region.y0, region.y1, tol, tol_abs, max_cells)
    if isinstance(region, DiskMinusDisks):
        share = tol / (1 + len(region.holes))
        abs_share = tol_abs / (1 + len(region.holes))
        outer = spherical_area_ex(F, region.outer, share, abs_share, max_cells)
        value, err, cells = outer.value, outer.error, outer.cells
        ok = outer.converged
        for h in region.holes:
            res = spherical_area_ex(F, h, share, abs_share, max_cells)
            value -= res.value
            err += res.error
            cells += res.cells
            ok = ok and res.converged
        return QuadResult(value, err, cells, ok)
    if isinstance(region, FullPlane):
        R0 = float(chart_radius)
        inner = _area_polar(F, 0.0, 0.0, R0, tol / 2, tol_abs / 2, max_cells)
        G = F.precompose(MoebiusMap.inversion())
        outer = _area_polar(G, 0.0, 0.0, 1.0 / R0, tol / 2, tol_abs / 2, max_cells)
        return QuadResult(
            inner.value + outer.value,
            inner.error + outer.error,
            inner.cells + outer.cells,
            inner.converged and outer.converged,
        )
    raise TypeError(f"not a region: {region!r}")


def spherical_area(F, region, tol=DEFAULT_TOL_AREA, **kwargs):
    """Spherical area (image area counted with multiplicity) of F over a region."""
    return spherical_area_ex(F, region, tol, **kwargs).value


# ---------------------------------------------------------------------------
# lengths


def _quad_breakpoints(path, spots):
    pts = []
    if isinstance(path, Circle):
        for (q, w) in spots:
            d = abs(q - path.center)
            if abs(d - path.radius) < 4 * w + 1e-12:
                pts.append(float(np.angle(q - path.center)) % (2 * np.pi))
    elif isinstance(path, Segment):
        ab = path.b - path.a
        L2 = abs(ab) ** 2
        if L2 > 0:
            for (q, w) in spots:
                t = ((q - path.a) * np.conj(ab)).real / L2
                if 0 < t < 1 and abs(path.a + t * ab - q) < 4 * w + 1e-12:
                    pts.append(t)
    return sorted(set(pts))


def spherical_length(F, path, tol=DEFAULT_TOL_LENGTH):
    """Spherical length of the image of a path, counted with multiplicity."""
    if F.is_constant:
        return 0.0
    spots = mass_hotspots(F)
    if isinstance(path, Circle):

        def f(theta):
            z = path.center + path.radius * np.exp(1j * theta)
            return float(F.spherical_derivative(z)) * path.radius

        val, _ = integrate.quad(
            f, 0.0, 2 * np.pi, epsabs=tol, epsrel=1e-10, limit=400,
            points=_quad_breakpoints(path, spots) or None,
        )
        return val
    if isinstance(path, Segment):
        ab = path.b - path.a
        if ab == 0:
            return 0.0

        def f(t):
            return float(F.spherical_derivative(path.a + t * ab)) * abs(ab)

        val, _ = integrate.quad(
            f, 0.0, 1.0, epsabs=tol, epsrel=1e-10, limit=400,
            points=_quad_breakpoints(path, spots) or None,
        )
        return val
    if isinstance(path, Polyline):
        pts = path.points
        share = tol / (len(pts) - 1)
        return sum(
            spherical_length(F, Segment(pts[i], pts[i + 1]), share)
            for i in range(len(pts) - 1)
        )
    raise TypeError(f"not a path: {path!r}")


# ---------------------------------------------------------------------------
# profiles and checks


@dataclass(frozen=True)
class EnergyProfile:
    """Energies of concentric disks; radii stored in decreasing order."""

    center: complex
    radii: tuple
    energies: tuple
    tol: float

    def __post_init__(self):
        r = tuple(float(x) for x in self.radii)
        e = tuple(float(x) for x in self.energies)
        if any(x <= 0 for x in r) or list(r) != sorted(r, reverse=True):
            raise ValueError("radii must be positive and strictly decreasing")
        if len(r) != len(e):
            raise ValueError("radii and energies must have equal length")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "energies", e)

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("rho,energy\n")
            for r, e in zip(self.radii, self.energies):
                fh.write(f"{r:.17g},{e:.17g}\n")


def energy_profile(F, p, r_min, r_max, k, tol=DEFAULT_TOL_AREA):
    """Energies of B(p, rho) at k log-spaced radii from r_max down to r_min."""
    if not (0 < r_min < r_max):
        raise PreconditionError("need 0 < r_min < r_max")
    if k < 2:
        raise PreconditionError("need at least k = 2 radii")
    radii = np.geomspace(r_max, r_min, int(k))
    spots = mass_hotspots(F)
    energies = [
        _area_polar(F, complex(p), 0.0, float(r), tol, tol * 1e-3, DEFAULT_MAX_CELLS, spots).value
        for r in radii
    ]
    return EnergyProfile(complex(p), tuple(radii), tuple(energies), tol)


@dataclass(frozen=True)
class AreaCheck:
    measured: float
    expected: float
    passed: bool
    rel_error: float


def total_area_check(R, tol=1e-5):
    """Check spherical_area(R, C) against 4*pi*deg R at relative tolerance tol."""
    d = R.degree
    expected = 4 * np.pi * d
    measured = spherical_area(R, FullPlane(), tol=min(tol / 3, 1e-6))
    if d == 0:
        return AreaCheck(measured, 0.0, abs(measured) <= tol, abs(measured))
    rel = abs(measured - expected) / expected
    return AreaCheck(measured, expected, rel <= tol, rel)


@dataclass(frozen=True)
class AhlforsShimizuCheck:
    lhs: float
    rhs: float
    slack: float
    passed: bool
    roots_counted: int


def _characteristic(F, r, area_tol=1e-6, nodes=48):
    """(1/4pi) \\int_0^r A(t) dt/t by Gauss-Legendre in log t."""
    s_hi = np.log(r)
    s_lo = s_hi - 20.0
    x, w = np.polynomial.legendre.leggauss(nodes)
    s = 0.5 * (s_hi - s_lo) * x + 0.5 * (s_hi + s_lo)
    spots = mass_hotspots(F)
    vals = np.array(
        [
            _area_polar(F, 0.0, 0.0, float(np.exp(si)), area_tol, 1e-9, DEFAULT_MAX_CELLS, spots).value
            for si in s
        ]
    )
    return float(np.sum(vals * w) * 0.5 * (s_hi - s_lo) / (4 * np.pi))


def ahlfors_shimizu_check(R, a, r, area_tol=1e-6):
    """One-sided counting-function vs characteristic check.

    lhs = sum over solutions of R(z)=a with |z|<r of log(r/|z|);
    rhs = (1/4pi) int_0^r A_sph(R, B(0,t)) dt/t + slack, where the O(1)
    slack is calibrated at r = 1 as max(0, lhs(1) - T(1)) + 0.1.
    """
    a = SpherePoint.of(a)
    if chordal_distance(R.eval(SpherePoint(0.0 + 0j)), a) < 1e-12:
        raise PreconditionError("requires R(0) != a")
    if r <= 0:
        raise PreconditionError("radius must be positive")

    def counting(radius):
        zs = R.preimages(a)
        inside = [z for z in zs if 0 < abs(z) < radius]
        return float(sum(np.log(radius / abs(z)) for z in inside)), len(inside)

    lhs1, _ = counting(1.0)
    T1 = _characteristic(R, 1.0, area_tol)
    slack = max(0.0, lhs1 - T1) + 0.1

    lhs, nroots = counting(float(r))
    T = _characteristic(R, float(r), area_tol)
    rhs = T + slack
    return AhlforsShimizuCheck(lhs, rhs, slack, lhs <= rhs, nroots)
