"""Riemann-sphere primitives: polynomials, rational maps, Moebius/affine maps.

Everything here is an immutable value and every operation is pure.  The
point at infinity is always represented explicitly (never as a large
float), and the spherical derivative is evaluated in projective form

    rho(z) = 2 |N'(z) D(z) - N(z) D'(z)| / (|N(z)|^2 + |D(z)|^2),

which is finite across poles, symmetric under N <-> D (so inverting the
map leaves it unchanged, exactly), and free of overflow-prone divisions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npp

from .errors import PreconditionError
from .roots import all_roots, roots_sorted

__all__ = [
    "SpherePoint",
    "INF",
    "Polynomial",
    "RationalMap",
    "MoebiusMap",
    "AffineMap",
    "chordal_distance",
    "chordal_projective",
    "spherical_derivative",
    "critical_points",
    "precompose",
]

DEFAULT_TOL_GCD = 1e-10


# ---------------------------------------------------------------------------
# points on the sphere


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere: a finite complex number or infinity."""

    value: complex | None  # None encodes the point at infinity

    @staticmethod
    def of(x):
        if isinstance(x, SpherePoint):
            return x
        if x is None:
            raise TypeError("use bubblelab.sphere.INF for the point at infinity")
        return SpherePoint(complex(x))

    @property
    def is_infinity(self):
        return self.value is None

    @property
    def z(self):
        if self.value is None:
            raise PreconditionError("point at infinity has no finite coordinate")
        return self.value

    def projective(self):
        """Homogeneous coordinates (numerator, denominator)."""
        if self.value is None:
            return (1.0 + 0j, 0.0 + 0j)
        return (self.value, 1.0 + 0j)

    def __repr__(self):
        return "INF" if self.value is None else f"SpherePoint({self.value!r})"


INF = SpherePoint(None)


def chordal_projective(n1, d1, n2, d2):
    """Chordal distance between n1/d1 and n2/d2 in homogeneous coordinates.

    Vectorized; exact at poles (d = 0).  The sphere has diameter 2.
    """
    num = 2.0 * np.abs(n1 * d2 - n2 * d1)
    den = np.sqrt((np.abs(n1) ** 2 + np.abs(d1) ** 2) * (np.abs(n2) ** 2 + np.abs(d2) ** 2))
    return num / den


def chordal_distance(p, q):
    """Chordal metric on the sphere, in [0, 2]; accepts SpherePoint or complex."""
    n1, d1 = SpherePoint.of(p).projective()
    n2, d2 = SpherePoint.of(q).projective()
    return float(chordal_projective(n1, d1, n2, d2))


# ---------------------------------------------------------------------------
# polynomials, coefficients lowest degree first


class Polynomial:
    """Complex polynomial; coefficients stored lowest degree first.

    Trailing (highest-degree) zero coefficients are trimmed on construction,
    so the leading coefficient is nonzero unless this is the zero polynomial,
    which is stored as [0] with degree 0.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel()
        nz = np.nonzero(c != 0)[0]
        c = c[: nz[-1] + 1].copy() if nz.size else np.zeros(1, dtype=complex)
        c.setflags(write=False)
        self.coeffs = c

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def lead(self):
        return complex(self.coeffs[-1])

    def __call__(self, z):
        return npp.polyval(z, self.coeffs)

    def deriv(self):
        if self.degree == 0:
            return Polynomial([0.0])
        return Polynomial(npp.polyder(self.coeffs))

    def __add__(self, other):
        return Polynomial(npp.polyadd(self.coeffs, _coeffs_of(other)))

    def __sub__(self, other):
        return Polynomial(npp.polysub(self.coeffs, _coeffs_of(other)))

    def __mul__(self, other):
        if np.isscalar(other) or isinstance(other, complex):
            return Polynomial(self.coeffs * complex(other))
        return Polynomial(npp.polymul(self.coeffs, _coeffs_of(other)))

    __rmul__ = __mul__

    def shift_up(self, k=1):
        """Multiply by z**k."""
        return Polynomial(np.concatenate([np.zeros(k, dtype=complex), self.coeffs]))

    def compose_affine(self, a, b):
        """Coefficients of p(a*z + b)."""
        res = np.array([self.coeffs[-1]], dtype=complex)
        lin = np.array([b, a], dtype=complex)
        for c in self.coeffs[-2::-1]:
            res = npp.polyadd(npp.polymul(res, lin), [c])
        return Polynomial(res)

    def roots(self):
        if self.is_zero:
            raise PreconditionError("zero polynomial has no well-defined root set")
        return all_roots(self.coeffs)

    @staticmethod
    def from_roots(roots, lead=1.0):
        if len(roots) == 0:
            return Polynomial([lead])
        return Polynomial(npp.polyfromroots(np.asarray(roots, dtype=complex)) * lead)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


def _coeffs_of(p):
    return p.coeffs if isinstance(p, Polynomial) else np.atleast_1d(np.asarray(p, dtype=complex))


# ---------------------------------------------------------------------------
# rational maps


class RationalMap:
    """Quotient of two coprime polynomials, as a self-map of the sphere."""

    __slots__ = ("num", "den")

    def __init__(self, num, den, reduce=True, tol_gcd=DEFAULT_TOL_GCD):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = den if isinstance(den, Polynomial) else Polynomial(den)
        if den.is_zero:
            raise ValueError("denominator is identically zero")
        if reduce and not num.is_zero:
            num, den = _remove_common_roots(num, den, tol_gcd)
        if num.is_zero:
            den = Polynomial([1.0])
        # joint normalization (same factor top and bottom leaves the map fixed)
        scale = max(np.max(np.abs(num.coeffs)), np.max(np.abs(den.coeffs)))
        if scale not in (0.0, 1.0):
            num = Polynomial(num.coeffs / scale)
            den = Polynomial(den.coeffs / scale)
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------
    @staticmethod
    def identity():
        return RationalMap([0.0, 1.0], [1.0], reduce=False)

    @staticmethod
    def constant(c):
        return RationalMap([complex(c)], [1.0], reduce=False)

    @staticmethod
    def power(k):
        num = np.zeros(k + 1, dtype=complex)
        num[k] = 1.0
        return RationalMap(num, [1.0], reduce=False)

    @staticmethod
    def from_polynomial(p):
        return RationalMap(p, [1.0], reduce=False)

    # -- basic structure ---------------------------------------------------
    @property
    def degree(self):
        return max(self.num.degree, self.den.degree)

    @property
    def is_constant(self):
        return self.degree == 0

    def wronskian(self):
        """num' * den - num * den', whose roots are the finite critical points."""
        return self.num.deriv() * self.den - self.num * self.den.deriv()

    # -- evaluation ---------------------------------------------------------
    def __call__(self, z):
        """Raw complex values at finite points; poles come out as inf."""
        z = np.asarray(z, dtype=complex)
        n = self.num(z)
        d = self.den(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = n / d
        pole = (d == 0) & (n != 0)
        if np.any(pole):
            out = np.where(pole, np.inf + 0j, out)
        return out if out.shape else complex(out)

    def projective_values(self, z):
        """(num(z), den(z)) pairs; the chordal-safe evaluation."""
        z = np.asarray(z, dtype=complex)
        return self.num(z), self.den(z)

    def eval(self, z):
        """Evaluate at a SpherePoint (or complex), returning a SpherePoint."""
        pt = SpherePoint.of(z)
        if pt.is_infinity:
            dn, dd = self.num.degree, self.den.degree
            if dn > dd:
                return INF
            if dn < dd:
                return SpherePoint(0.0 + 0j)
            return SpherePoint(self.num.lead / self.den.lead)
        n = complex(self.num(pt.z))
        d = complex(self.den(pt.z))
        if n == 0 and d == 0:
            raise RuntimeError(
                "0/0 after coprimality enforcement: corrupted RationalMap"
            )
        if d == 0:
            return INF
        return SpherePoint(n / d)

    def derivative_values(self, z):
        """Raw F'(z) at finite non-pole points (inf at poles)."""
        z = np.asarray(z, dtype=complex)
        w = self.wronskian()(z)
        d = self.den(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = w / (d * d)
        return out if out.shape else complex(out)

    def spherical_derivative(self, z):
        """rho(z) = 2|F'|/(1+|F|^2) at finite z, via the projective formula."""
        z = np.asarray(z, dtype=complex)
        n = self.num(z)
        d = self.den(z)
        w = self.wronskian()(z)
        out = 2.0 * np.abs(w) / (np.abs(n) ** 2 + np.abs(d) ** 2)
        return out if out.shape else float(out)

    def density(self, z):
        """rho(z)^2, the pullback area density; vectorized."""
        r = self.spherical_derivative(np.asarray(z, dtype=complex))
        return r * r

    # -- transforms ----------------------------------------------------------
    def precompose(self, phi):
        """R o phi for an AffineMap or MoebiusMap; degree is preserved."""
        if isinstance(phi, AffineMap):
            return RationalMap(
                self.num.compose_affine(phi.a, phi.b),
                self.den.compose_affine(phi.a, phi.b),
            )
        if isinstance(phi, MoebiusMap):
            d = max(self.num.degree, self.den.degree)
            top = Polynomial([phi.b, phi.a])
            bot = Polynomial([phi.d, phi.c])
            tp = [Polynomial([1.0])]
            bp = [Polynomial([1.0])]
            for _ in range(d):
                tp.append(tp[-1] * top)
                bp.append(bp[-1] * bot)

            def homogenize(p):
                # multiply through by bot**d to clear denominators
                acc = Polynomial([0.0])
                for k, c in enumerate(p.coeffs):
                    if c != 0:
                        acc = acc + (tp[k] * bp[d - k]) * c
                return acc

            return RationalMap(homogenize(self.num), homogenize(self.den))
        raise TypeError(f"cannot precompose with {type(phi).__name__}")

    def postcompose_moebius(self, m):
        """m o R; used for inversion, shifts and sphere rotations."""
        return RationalMap(
            self.num * m.a + self.den * m.b,
            self.num * m.c + self.den * m.d,
        )

    def shifted(self, c):
        """R + c as a rational map."""
        return RationalMap(self.num + self.den * complex(c), self.den)

    # -- critical points ------------------------------------------------------
    def critical_points(self):
        """The 2d-2 critical points with multiplicity, as SpherePoints.

        Finite critical points are the roots of the Wronskian; infinity
        carries whatever multiplicity is left over.
        """
        d = self.degree
        if d < 1:
            raise PreconditionError("critical points require degree >= 1")
        w = self.wronskian()
        finite = [] if w.is_zero else roots_sorted(w.coeffs)
        pts = [SpherePoint(complex(r)) for r in finite]
        pts.extend([INF] * (2 * d - 2 - len(pts)))
        return pts

    def critical_values(self):
        return [self.eval(p) for p in self.critical_points()]

    def preimages(self, w):
        """All finite solutions of R(z) = w, with multiplicity.

        w may be a SpherePoint; w = INF returns the finite poles.
        """
        pt = SpherePoint.of(w)
        if pt.is_infinity:
            return roots_sorted(self.den.coeffs)
        p = self.num - self.den * pt.z
        if p.is_zero:
            raise PreconditionError("constant map equals the target everywhere")
        return roots_sorted(p.coeffs)

    def __repr__(self):
        return f"RationalMap(num={list(self.num.coeffs)}, den={list(self.den.coeffs)})"


def _remove_common_roots(num, den, tol):
    """Strip near-common roots of num and den (within tol, relative)."""
    if num.degree == 0 or den.degree == 0:
        return num, den
    rn = roots_sorted(num.coeffs)
    rd = list(roots_sorted(den.coeffs))
    keep_n, removed = [], 0
    for r in rn:
        hit = None
        for j, s in enumerate(rd):
            if abs(r - s) <= tol * (1.0 + abs(r)):
                hit = j
                break
        if hit is None:
            keep_n.append(r)
        else:
            rd.pop(hit)
            removed += 1
    if removed == 0:
        return num, den
    return (
        Polynomial.from_roots(keep_n, num.lead),
        Polynomial.from_roots(rd, den.lead),
    )


# ---------------------------------------------------------------------------
# Moebius and affine maps


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (a z + b)/(c z + d), normalized so a d - b c = 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det == 0:
            raise ValueError("degenerate Moebius map (zero determinant)")
        s = np.sqrt(complex(det))
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)) / s)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @staticmethod
    def identity():
        return MoebiusMap(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def inversion():
        return MoebiusMap(0.0, 1.0, 1.0, 0.0)

    @staticmethod
    def translation(b):
        return MoebiusMap(1.0, b, 0.0, 1.0)

    @staticmethod
    def scaling(a):
        return MoebiusMap(a, 0.0, 0.0, 1.0)

    @staticmethod
    def rotation(a, b):
        """Rigid sphere rotation z -> (a z - conj(b)) / (b z + conj(a))."""
        if a == 0 and b == 0:
            raise ValueError("rotation requires (a, b) != (0, 0)")
        return MoebiusMap(a, -np.conj(b), b, np.conj(a))

    def __call__(self, z):
        pt = SpherePoint.of(z)
        if pt.is_infinity:
            if self.c == 0:
                return INF
            return SpherePoint(self.a / self.c)
        n = self.a * pt.z + self.b
        d = self.c * pt.z + self.d
        if d == 0:
            return INF
        return SpherePoint(n / d)

    def compose(self, other):
        """self o other."""
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self):
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def as_rational_map(self):
        return RationalMap([self.b, self.a], [self.d, self.c], reduce=False)


@dataclass(frozen=True)
class AffineMap:
    """z -> a z + b with a != 0."""

    a: complex
    b: complex = 0.0

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("affine map requires a != 0")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def __call__(self, z):
        pt = SpherePoint.of(z)
        if pt.is_infinity:
            return INF
        return SpherePoint(self.a * pt.z + self.b)

    def apply_raw(self, z):
        return self.a * np.asarray(z, dtype=complex) + self.b

    def inverse(self):
        return AffineMap(1.0 / self.a, -self.b / self.a)

    def compose(self, other):
        """self o other."""
        return AffineMap(self.a * other.a, self.a * other.b + self.b)

    def to_moebius(self):
        return MoebiusMap(self.a, self.b, 0.0, 1.0)


# ---------------------------------------------------------------------------
# module-level operation aliases (the public verbs)


def spherical_derivative(R, z):
    """2|R'(z)|/(1+|R(z)|^2) at finite z; stable across poles."""
    pt = SpherePoint.of(z)
    if pt.is_infinity:
        raise PreconditionError(
            "spherical derivative is chart-dependent at infinity; "
            "precompose with 1/z first"
        )
    return float(R.spherical_derivative(pt.z))


def critical_points(R):
    return R.critical_points()


def precompose(R, phi):
    return R.precompose(phi)
