"""Families {F_n}: instantiation, pullback mass atlases, concentration
detection and mass quantization.

A family is a pair of coefficient-expression lists in the integer index n
plus a bounded domain.  The analysis follows a diagonal schedule: point
masses are estimated as the mass of B(p, r_k) with r_k = r0 * 2^-k, where
for each k the index n is pushed until the mass of the bridging annulus
A(p; r_{k+1}, r_k) stops moving; only then is the next radius trusted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import FamilyError, PreconditionError
from .exprs import Expr, parse_expression
from .quadrature import (
    Disk,
    FullPlane,
    Rect,
    mass_hotspots,
    region_from_dict,
    region_to_dict,
    spherical_area,
    spherical_area_ex,
    adaptive_cells,
)
from .sphere import INF, RationalMap, SpherePoint, chordal_projective

__all__ = [
    "FamilySpec",
    "MassAtlas",
    "ConcentrationPoint",
    "ConcentrationReport",
    "QuantizationResult",
    "DetectionParams",
    "instantiate",
    "pullback_measure",
    "detect_singular_set",
    "quantization_check",
]

FOUR_PI = 4 * np.pi

# instantiated members only lose a factor the user wrote in exactly; the
# looser default gcd tolerance is for fitted maps, and would amputate
# genuine deep bubbles (zero/pole pairs at scale 1/n^3)
INSTANTIATE_TOL_GCD = 1e-13


@dataclass(frozen=True)
class FamilySpec:
    """A rule n -> RationalMap given by coefficient expressions, plus a domain.

    The index set is an explicit increasing ladder of integers standing in
    for n -> infinity.  ``bound`` is the declared area bound C, if any.
    """

    num_exprs: tuple
    den_exprs: tuple
    domain: object
    n_values: tuple
    bound: float | None = None

    def __post_init__(self):
        nums = tuple(parse_expression(e) for e in self.num_exprs)
        dens = tuple(parse_expression(e) for e in self.den_exprs)
        if not nums or not dens:
            raise FamilyError("empty coefficient list")
        ns = tuple(int(n) for n in self.n_values)
        if not ns:
            raise FamilyError("empty index ladder")
        if list(ns) != sorted(set(ns)):
            raise FamilyError("index ladder must be strictly increasing")
        object.__setattr__(self, "num_exprs", nums)
        object.__setattr__(self, "den_exprs", dens)
        object.__setattr__(self, "n_values", ns)

    @property
    def n_top(self):
        return self.n_values[-1]

    def member(self, n):
        return instantiate(self, n)

    def to_dict(self):
        return {
            "num": [e.to_str() for e in self.num_exprs],
            "den": [e.to_str() for e in self.den_exprs],
            "domain": region_to_dict(self.domain),
            "n_values": list(self.n_values),
            "bound": self.bound,
        }

    @staticmethod
    def from_dict(d):
        return FamilySpec(
            tuple(d["num"]),
            tuple(d["den"]),
            region_from_dict(d["domain"]),
            tuple(d["n_values"]),
            d.get("bound"),
        )


def instantiate(spec, n):
    """Evaluate the coefficient expressions at n and build the member map."""
    if n not in spec.n_values:
        raise PreconditionError(f"n = {n} is not in the family ladder")
    num = np.array([e.eval(n) for e in spec.num_exprs], dtype=complex)
    den = np.array([e.eval(n) for e in spec.den_exprs], dtype=complex)
    if not np.any(den != 0):
        raise FamilyError(f"denominator is identically zero at n = {n}")
    return RationalMap(num, den, tol_gcd=INSTANTIATE_TOL_GCD)


# ---------------------------------------------------------------------------
# mass atlas


@dataclass(frozen=True)
class MassAtlas:
    """Per-cell pullback mass of F_n* dA_sph on a rectangular grid."""

    n: int
    region: object
    x_edges: tuple
    y_edges: tuple
    masses: tuple  # row-major (ix, iy) -> masses[ix][iy]
    total: float
    tol: float

    @property
    def nx(self):
        return len(self.x_edges) - 1

    @property
    def ny(self):
        return len(self.y_edges) - 1

    def cell_center(self, ix, iy):
        return complex(
            0.5 * (self.x_edges[ix] + self.x_edges[ix + 1]),
            0.5 * (self.y_edges[iy] + self.y_edges[iy + 1]),
        )

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("n,ix,iy,x_lo,x_hi,y_lo,y_hi,mass\n")
            for ix in range(self.nx):
                for iy in range(self.ny):
                    fh.write(
                        f"{self.n},{ix},{iy},"
                        f"{self.x_edges[ix]:.17g},{self.x_edges[ix + 1]:.17g},"
                        f"{self.y_edges[iy]:.17g},{self.y_edges[iy + 1]:.17g},"
                        f"{self.masses[ix][iy]:.17g}\n"
                    )


def _cell_status(region, x0, x1, y0, y1):
    """'in', 'out' or 'boundary' for a grid cell against the region."""
    corners = np.array(
        [complex(x0, y0), complex(x1, y0), complex(x0, y1), complex(x1, y1)]
    )
    if isinstance(region, Rect):
        return "in"
    if isinstance(region, Disk):
        d = np.abs(corners - region.center)
        cx = min(max(region.center.real, x0), x1)
        cy = min(max(region.center.imag, y0), y1)
        dmin = abs(complex(cx, cy) - region.center)
        if d.max() <= region.radius:
            return "in"
        if dmin > region.radius:
            return "out"
        return "boundary"
    # generic fallback: sample-based conservative classification
    inside = region.contains(corners)
    if inside.all():
        return "boundary"  # conservative (corners in does not imply cell in)
    if not inside.any():
        return "boundary"
    return "boundary"


def pullback_measure(F, region, cells, n=0, tol=1e-3, max_cells_per_cell=40000):
    """Mass atlas of F over a bounded region on a roughly square grid.

    ``cells`` is the total target cell count (>= 4); the grid is
    per-axis round(sqrt(cells)).  Cells crossing the region boundary are
    integrated against the region indicator.
    """
    if cells < 4:
        raise PreconditionError("need at least 4 cells")
    if isinstance(region, FullPlane):
        raise PreconditionError("mass atlas requires a bounded domain")
    x0, x1, y0, y1 = region.bounding_box()
    m = max(2, int(round(np.sqrt(cells))))
    xe = np.linspace(x0, x1, m + 1)
    ye = np.linspace(y0, y1, m + 1)
    spots = mass_hotspots(F)

    total_est = spherical_area(F, region, tol=1e-3)
    cell_abs = max(tol * max(total_est, 1e-6) / (m * m), 1e-12)

    masses = np.zeros((m, m))
    for ix in range(m):
        for iy in range(m):
            status = _cell_status(region, xe[ix], xe[ix + 1], ye[iy], ye[iy + 1])
            if status == "out":
                continue
            mask = None if status == "in" else region.contains
            hot = [
                (min(max(q.real, xe[ix]), xe[ix + 1]), min(max(q.imag, ye[iy]), ye[iy + 1]), w, w)
                for (q, w) in spots
                if xe[ix] - 6 * w <= q.real <= xe[ix + 1] + 6 * w
                and ye[iy] - 6 * w <= q.imag <= ye[iy + 1] + 6 * w
            ]

            if mask is None:

                def f2(X, Y):
                    return F.density(X + 1j * Y)

            else:

                def f2(X, Y, _mask=mask):
                    z = X + 1j * Y
                    return F.density(z) * _mask(z)

            res = adaptive_cells(
                f2,
                (xe[ix], xe[ix + 1]),
                (ye[iy], ye[iy + 1]),
                tol_rel=tol,
                tol_abs=cell_abs,
                hotspots=hot,
                max_cells=max_cells_per_cell,
            )
            masses[ix, iy] = res.value

    return MassAtlas(
        n=int(n),
        region=region,
        x_edges=tuple(float(v) for v in xe),
        y_edges=tuple(float(v) for v in ye),
        masses=tuple(tuple(float(v) for v in row) for row in masses),
        total=float(masses.sum()),
        tol=tol,
    )


# ---------------------------------------------------------------------------
# concentration detection and quantization


@dataclass(frozen=True)
class DetectionParams:
    grid: int = 24
    r0: float = 0.2
    k_radii: int = 5
    zoom_resolution: float = 1e-3
    tol_mass: float = 0.05
    eps_ann: float = 0.01
    tol_quant: float = 0.05 * FOUR_PI
    tol_cauchy: float = 2.5e-2
    area_tol: float = 1e-4
    candidate_threshold: float = 2 * np.pi


@dataclass(frozen=True)
class ConcentrationPoint:
    p: complex
    mass_estimates: tuple  # mass of B(p, r_deep) per ladder index
    D: int
    residual: float
    quantization_ok: bool
    radius: float


@dataclass(frozen=True)
class ConcentrationReport:
    points: tuple
    limit_samples: tuple  # (z, SpherePoint) pairs on the sample grid
    cardinality_bound: int
    bound: float
    quasinormal_certified: bool
    limit_constant: bool
    n_values: tuple


@dataclass(frozen=True)
class QuantizationResult:
    D: int
    residual: float
    estimate: float
    radius: float
    n_used: int
    stabilized_depth: int
    ok: bool


class _MassCalculator:
    """Caches members, hotspots and disk masses across the analysis."""

    def __init__(self, spec, area_tol):
        self.spec = spec
        self.area_tol = area_tol
        self._members = {}
        self._masses = {}

    def member(self, n):
        if n not in self._members:
            self._members[n] = instantiate(self.spec, n)
        return self._members[n]

    def disk_mass(self, n, p, r):
        key = (n, complex(p), float(r))
        if key not in self._masses:
            F = self.member(n)
            self._masses[key] = spherical_area(
                F, Disk(complex(p), float(r)), tol=self.area_tol
            )
        return self._masses[key]


def _domain_radius_at(region, p):
    """Distance from p to the domain boundary (conservative)."""
    if isinstance(region, Disk):
        return region.radius - abs(p - region.center)
    if isinstance(region, Rect):
        return min(p.real - region.x0, region.x1 - p.real, p.imag - region.y0, region.y1 - p.imag)
    x0, x1, y0, y1 = region.bounding_box()
    return min(p.real - x0, x1 - p.real, p.imag - y0, y1 - p.imag)


def _limit_grid(region, exclusions, r0):
    """Deterministic sample grid on the domain, away from the exclusions."""
    pts = []
    if isinstance(region, Disk):
        for frac in (0.35, 0.55, 0.75, 0.9):
            for k in range(12):
                pts.append(
                    region.center
                    + frac * region.radius * np.exp(2j * np.pi * (k + 0.5) / 12)
                )
    else:
        x0, x1, y0, y1 = region.bounding_box()
        for fx in np.linspace(0.1, 0.9, 6):
            for fy in np.linspace(0.1, 0.9, 6):
                z = complex(x0 + fx * (x1 - x0), y0 + fy * (y1 - y0))
                if region.contains(z):
                    pts.append(z)
    keep = []
    for z in pts:
        if all(abs(z - q) >= r0 for q in exclusions):
            keep.append(complex(z))
    return keep


def _zoom_candidate(calc, n, center, window, resolution, depth=12):
    """Recursively refine the location of a mass spike."""
    p, w = center, window
    for _ in range(depth):
        if w <= resolution:
            break
        atlas = pullback_measure(
            calc.member(n),
            Rect(p.real - w / 2, p.real + w / 2, p.imag - w / 2, p.imag + w / 2),
            cells=64,
            n=n,
            tol=1e-2,
        )
        m = np.array(atlas.masses)
        ix, iy = np.unravel_index(int(np.argmax(m)), m.shape)
        p = atlas.cell_center(ix, iy)
        w = w / 4
    return p


def detect_singular_set(spec, params=None):
    """Locate the concentration set S, certify the pointwise limit off S,
    and quantize the point masses.

    Returns a ConcentrationReport.  Non-convergence of the limit samples is
    reported through quasinormal_certified=False (with a warning), not an
    exception.
    """
    params = params or DetectionParams()
    calc = _MassCalculator(spec, params.area_tol)
    n_values = spec.n_values
    n_top = n_values[-1]
    region = spec.domain

    # declared or measured area bound
    if spec.bound is not None:
        bound = float(spec.bound)
    else:
        bound = max(
            spherical_area(calc.member(n), region, tol=params.area_tol) for n in n_values
        )
    cap = int(np.floor(bound / FOUR_PI + 1e-9))

    # candidate spikes on the finest grid at the top index
    atlas = pullback_measure(
        calc.member(n_top), region, cells=params.grid**2, n=n_top, tol=1e-2
    )
    m = np.array(atlas.masses)
    candidates = []
    for ix in range(atlas.nx):
        for iy in range(atlas.ny):
            block = m[max(0, ix - 1) : ix + 2, max(0, iy - 1) : iy + 2]
            if m[ix, iy] < block.max():
                continue
            if block.sum() < params.candidate_threshold:
                continue
            candidates.append(atlas.cell_center(ix, iy))
    # dedupe near-coincident candidates
    cell_w = (atlas.x_edges[1] - atlas.x_edges[0]) * 2.5
    merged = []
    for c in candidates:
        if all(abs(c - q) > cell_w for q in merged):
            merged.append(c)

    points = []
    for c in merged:
        p = _zoom_candidate(
            calc,
            n_top,
            c,
            window=3 * (atlas.x_edges[1] - atlas.x_edges[0]),
            resolution=params.zoom_resolution,
        )
        r0 = min(params.r0, 0.8 * _domain_radius_at(region, p))
        if r0 <= 0:
            continue
        radii = [r0 * 2.0**-k for k in range(params.k_radii)]
        persists = all(
            calc.disk_mass(n_top, p, r) >= FOUR_PI * (1 - params.tol_mass) for r in radii
        )
        if not persists:
            continue
        quant = _quantize(calc, p, r0, params)
        points.append(
            ConcentrationPoint(
                p=complex(p),
                mass_estimates=tuple(
                    calc.disk_mass(n, p, quant.radius) for n in n_values
                ),
                D=quant.D,
                residual=quant.residual,
                quantization_ok=quant.ok,
                radius=quant.radius,
            )
        )

    if len(points) > cap:
        raise FamilyError(
            f"{len(points)} persistent concentration points exceed the "
            f"cardinality bound floor(C/4pi) = {cap}"
        )

    # pointwise limit on the sample grid, certified by Cauchy differences of
    # the top ladder pair; the stored values are Richardson-extrapolated
    # (1/n model), which is exact for the c/n tails of the shipped families
    if len(n_values) < 2:
        raise PreconditionError("detection requires at least two ladder indices")
    grid = _limit_grid(region, [pt.p for pt in points], min(params.r0, 0.25))
    limit_samples = []
    certified = True
    if grid:
        zs = np.array(grid)
        na, nb = n_values[-2], n_values[-1]
        pa = calc.member(na).projective_values(zs)
        pb = calc.member(nb).projective_values(zs)
        certified = bool(np.max(chordal_projective(*pa, *pb)) <= params.tol_cauchy)
        ratio = nb / na
        for i, z in enumerate(grid):
            if pb[1][i] == 0:
                limit_samples.append((complex(z), INF))
                continue
            vb = complex(pb[0][i] / pb[1][i])
            if pa[1][i] != 0:
                va = complex(pa[0][i] / pa[1][i])
                vb = vb + (vb - va) / (ratio - 1.0)
            limit_samples.append((complex(z), SpherePoint(vb)))
    if not certified:
        warnings.warn(
            "limit samples did not certify Cauchy convergence: "
            "not quasinormal at tested resolution",
            UserWarning,
        )

    # constancy of the limit (drives the routing of general sequences)
    constant = False
    if limit_samples:
        fin = [v for (_, v) in limit_samples]
        osc = 0.0
        for i in range(len(fin)):
            for j in range(i + 1, len(fin)):
                a, b = fin[i].projective(), fin[j].projective()
                osc = max(osc, float(chordal_projective(a[0], a[1], b[0], b[1])))
        constant = osc < 1e-3

    return ConcentrationReport(
        points=tuple(points),
        limit_samples=tuple(limit_samples),
        cardinality_bound=cap,
        bound=float(bound),
        quasinormal_certified=certified,
        limit_constant=constant,
        n_values=n_values,
    )


def _quantize(calc, p, r0, params):
    """Diagonal-schedule point-mass estimate at p."""
    n_values = calc.spec.n_values
    if len(n_values) < 2:
        raise PreconditionError("quantization requires at least two ladder indices")
    K = params.k_radii
    radii = [r0 * 2.0**-k for k in range(K + 2)]
    mass = {
        (k, n): calc.disk_mass(n, p, radii[k])
        for k in range(K + 2)
        for n in n_values
    }
    # deepest k whose bridging annulus has stopped moving along the ladder
    k_star, n_used = 0, n_values[-1]
    for k in range(K + 1):
        ann = [mass[(k, n)] - mass[(k + 1, n)] for n in n_values]
        settled = any(
            abs(ann[i] - ann[i - 1]) < params.eps_ann for i in range(1, len(ann))
        )
        if settled:
            k_star = k
        else:
            break
    estimate = mass[(k_star + 1, n_values[-1])]
    D = int(round(estimate / FOUR_PI))
    residual = abs(estimate - FOUR_PI * D)
    ok = D >= 1 and residual <= params.tol_quant
    return QuantizationResult(
        D=D,
        residual=float(residual),
        estimate=float(estimate),
        radius=float(radii[k_star + 1]),
        n_used=int(n_used),
        stabilized_depth=int(k_star),
        ok=bool(ok),
    )


def quantization_check(spec, p, params=None):
    """Estimate mu({p}) = 4*pi*D for a point of the concentration set.

    Raises PreconditionError if mass does not persist at p (p not in S).
    A residual above tol_quant is reported via ok=False, never silently
    rounded away.
    """
    params = params or DetectionParams()
    calc = _MassCalculator(spec, params.area_tol)
    p = complex(p)
    r0 = min(params.r0, 0.8 * _domain_radius_at(spec.domain, p))
    if r0 <= 0:
        raise PreconditionError("point lies outside the domain")
    n_top = spec.n_values[-1]
    if calc.disk_mass(n_top, p, r0) < FOUR_PI * (1 - params.tol_mass):
        raise PreconditionError(
            f"mass at {p} does not reach 4*pi: not in the concentration set"
        )
    return _quantize(calc, p, r0, params)
