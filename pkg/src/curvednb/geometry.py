"""Models of the hyperbolic plane of constant curvature -1/R^2.

Three charts of the same geometry:

* hyperboloid: upper sheet of x^2 + y^2 - z^2 = -R^2 (z > 0) in Minkowski
  3-space with the Lorentz product Q1 (.) Q2 = x1 x2 + y1 y2 - z1 z2;
* disk: |z| < R with conformal metric lambda(z) = 4R^4 / (R^2 - |z|^2)^2;
* half plane: Im w > 0 with conformal metric mu(w) = -4R^2 / (w - wbar)^2
  = R^2 / (Im w)^2.

The stereographic projection from the hyperboloid to the disk and the
fractional linear map between disk and half plane are isometries; every
distance computation routes through the hyperboloid formula
d = R * acosh(-Q1 (.) Q2 / R^2), which is the best conditioned of the three
near coincident points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Union

import numpy as np

from .errors import BoundaryEscapeError, ChartDomainError

# Relative tolerance for chart-membership checks; callers may pass their own.
MEMBERSHIP_RTOL = 1e-9

# cosh overflows double precision near 710; beyond this a geodesic has left
# the numerically representable part of the chart.
_COSH_ARG_LIMIT = 700.0


class Chart(str, Enum):
    HYPERBOLOID = "hyperboloid"
    DISK = "disk"
    HALFPLANE = "halfplane"


@dataclass(frozen=True)
class CurvatureContext:
    """Curvature radius R > 0; the Gaussian curvature kappa = -1/R^2."""

    R: float

    def __post_init__(self):
        if not (isinstance(self.R, (int, float)) and math.isfinite(self.R) and self.R > 0):
            raise ValueError(f"curvature radius must be a positive finite real, got {self.R!r}")

    @property
    def kappa(self) -> float:
        return -1.0 / (self.R * self.R)


@dataclass(frozen=True)
class HyperboloidPoint:
    """Point (x, y, z) on the upper sheet: x^2 + y^2 - z^2 = -R^2, z > 0."""

    x: float
    y: float
    z: float

    def triple(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @staticmethod
    def from_triple(q) -> "HyperboloidPoint":
        return HyperboloidPoint(float(q[0]), float(q[1]), float(q[2]))


@dataclass(frozen=True)
class DiskPoint:
    """Point z with |z| < R strictly."""

    z: complex


@dataclass(frozen=True)
class HalfPlanePoint:
    """Point w with Im w > 0 strictly."""

    w: complex


ChartPoint = Union[HyperboloidPoint, DiskPoint, HalfPlanePoint]

_CHART_OF_TYPE = {
    HyperboloidPoint: Chart.HYPERBOLOID,
    DiskPoint: Chart.DISK,
    HalfPlanePoint: Chart.HALFPLANE,
}


def chart_of(p: ChartPoint) -> Chart:
    try:
        return _CHART_OF_TYPE[type(p)]
    except KeyError:
        raise TypeError(f"not a chart point: {p!r}") from None


def validate_point(ctx: CurvatureContext, p: ChartPoint, rtol: float = MEMBERSHIP_RTOL) -> None:
    """Raise ChartDomainError unless p satisfies its chart invariant.

    The hyperboloid check is relative to the size of the quadratic terms,
    |Q (.) Q + R^2| <= rtol * max(R^2, x^2 + y^2 + z^2), plus z > 0: far
    out on the sheet the constraint is a difference of huge squares and
    cannot be met to a fixed fraction of R^2 in floating point.  Disk and
    half-plane membership is strict — boundary points sit at infinite
    distance and blow up the conformal factor.
    """
    R = ctx.R
    if isinstance(p, HyperboloidPoint):
        residue = abs(p.x * p.x + p.y * p.y - p.z * p.z + R * R)
        scale = max(R * R, p.x * p.x + p.y * p.y + p.z * p.z)
        if residue > rtol * scale or not p.z > 0:
            raise ChartDomainError(
                f"point off the upper hyperboloid sheet (constraint residue {residue:.3e}, z={p.z})"
            )
    elif isinstance(p, DiskPoint):
        if not abs(p.z) < R:
            raise ChartDomainError(f"disk point with |z| = {abs(p.z):.17g} >= R = {R}")
    elif isinstance(p, HalfPlanePoint):
        if not p.w.imag > 0:
            raise ChartDomainError(f"half-plane point with Im w = {p.w.imag:.17g} <= 0")
    else:
        raise TypeError(f"not a chart point: {p!r}")


def lorentz_inner(q1: HyperboloidPoint, q2: HyperboloidPoint) -> float:
    """Lorentz product x1 x2 + y1 y2 - z1 z2.  Equals -R^2 when q1 = q2
    lies on the sheet."""
    return q1.x * q2.x + q1.y * q2.y - q1.z * q2.z


def lorentz_inner_triples(a, b) -> float:
    """Lorentz product on raw 3-vectors (used for velocities)."""
    return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]


# ---------------------------------------------------------------------------
# chart maps
# ---------------------------------------------------------------------------

def disk_from_hyperboloid(ctx: CurvatureContext, q: HyperboloidPoint) -> DiskPoint:
    """Stereographic projection z = R(x + iy)/(R + z3)."""
    validate_point(ctx, q)
    R = ctx.R
    return DiskPoint(R * complex(q.x, q.y) / (R + q.z))


def hyperboloid_from_disk(ctx: CurvatureContext, p: DiskPoint) -> HyperboloidPoint:
    """Inverse stereographic projection:

    x = R^2 (z + zbar)/(R^2 - |z|^2),  y = i R^2 (zbar - z)/(R^2 - |z|^2),
    z3 = R (|z|^2 + R^2)/(R^2 - |z|^2).
    """
    R = ctx.R
    z = p.z
    if not abs(z) < R:
        raise ChartDomainError(f"disk point with |z| = {abs(z):.17g} >= R = {R}")
    s = R * R - (z.real * z.real + z.imag * z.imag)
    return HyperboloidPoint(
        2 * R * R * z.real / s,
        2 * R * R * z.imag / s,
        R * (z.real * z.real + z.imag * z.imag + R * R) / s,
    )


def halfplane_from_disk(ctx: CurvatureContext, p: DiskPoint) -> HalfPlanePoint:
    """w = iR(R - z)/(R + z); maps |z| < R onto Im w > 0, 0 -> iR."""
    R = ctx.R
    if not abs(p.z) < R:
        raise ChartDomainError(f"disk point with |z| = {abs(p.z):.17g} >= R = {R}")
    return HalfPlanePoint(1j * R * (R - p.z) / (R + p.z))


def disk_from_halfplane(ctx: CurvatureContext, q: HalfPlanePoint) -> DiskPoint:
    """z = (-Rw + iR^2)/(w + iR); inverse of halfplane_from_disk."""
    R = ctx.R
    if not q.w.imag > 0:
        raise ChartDomainError(f"half-plane point with Im w = {q.w.imag:.17g} <= 0")
    return DiskPoint(-R * (q.w - 1j * R) / (q.w + 1j * R))


def hyperboloid_from_halfplane(ctx: CurvatureContext, q: HalfPlanePoint) -> HyperboloidPoint:
    return hyperboloid_from_disk(ctx, disk_from_halfplane(ctx, q))


def halfplane_from_hyperboloid(ctx: CurvatureContext, q: HyperboloidPoint) -> HalfPlanePoint:
    return halfplane_from_disk(ctx, disk_from_hyperboloid(ctx, q))


def convert_point(ctx: CurvatureContext, p: ChartPoint, chart: Chart) -> ChartPoint:
    """Route p into the requested chart (identity when already there)."""
    src = chart_of(p)
    if src == chart:
        return p
    if src != Chart.DISK:
        p = disk_from_hyperboloid(ctx, p) if src == Chart.HYPERBOLOID else disk_from_halfplane(ctx, p)
    if chart == Chart.DISK:
        return p
    return hyperboloid_from_disk(ctx, p) if chart == Chart.HYPERBOLOID else halfplane_from_disk(ctx, p)


# ---------------------------------------------------------------------------
# velocity transports (tangent maps of the chart maps)
# ---------------------------------------------------------------------------

def halfplane_velocity_from_disk(ctx: CurvatureContext, p: DiskPoint, zdot: complex) -> complex:
    """dw = -2iR^2 dz/(R + z)^2."""
    R = ctx.R
    return -2j * R * R * zdot / (R + p.z) ** 2


def disk_velocity_from_halfplane(ctx: CurvatureContext, q: HalfPlanePoint, wdot: complex) -> complex:
    """dz = -2iR^2 dw/(w + iR)^2."""
    R = ctx.R
    return -2j * R * R * wdot / (q.w + 1j * R) ** 2


def hyperboloid_velocity_from_disk(ctx: CurvatureContext, p: DiskPoint, zdot: complex) -> np.ndarray:
    """Tangent map of the inverse stereographic projection."""
    R = ctx.R
    z = p.z
    s = R * R - (z.real * z.real + z.imag * z.imag)
    q = zdot * z.conjugate() + z * zdot.conjugate()  # d/dt |z|^2, real
    qr = q.real
    xd = R * R * (2 * zdot.real * s + 2 * z.real * qr) / (s * s)
    yd = R * R * (2 * zdot.imag * s + 2 * z.imag * qr) / (s * s)
    zd = 2 * R ** 3 * qr / (s * s)
    return np.array([xd, yd, zd])


def disk_velocity_from_hyperboloid(ctx: CurvatureContext, q: HyperboloidPoint, qdot) -> complex:
    """Tangent map of z = R(x + iy)/(R + z3)."""
    R = ctx.R
    num = complex(qdot[0], qdot[1]) * (R + q.z) - complex(q.x, q.y) * qdot[2]
    return R * num / (R + q.z) ** 2


def transport_state(ctx: CurvatureContext, p: ChartPoint, velocity, chart: Chart):
    """Move a (position, velocity) pair into the requested chart.

    Velocities are complex in the conformal charts and real 3-vectors on
    the hyperboloid.  Returns (point, velocity) in the target chart.
    """
    src = chart_of(p)
    if src == chart:
        return p, velocity
    # route through the disk
    if src == Chart.HYPERBOLOID:
        pd = disk_from_hyperboloid(ctx, p)
        vd = disk_velocity_from_hyperboloid(ctx, p, velocity)
    elif src == Chart.HALFPLANE:
        pd = disk_from_halfplane(ctx, p)
        vd = disk_velocity_from_halfplane(ctx, p, velocity)
    else:
        pd, vd = p, velocity
    if chart == Chart.DISK:
        return pd, vd
    if chart == Chart.HYPERBOLOID:
        return hyperboloid_from_disk(ctx, pd), hyperboloid_velocity_from_disk(ctx, pd, vd)
    return halfplane_from_disk(ctx, pd), halfplane_velocity_from_disk(ctx, pd, vd)


# ---------------------------------------------------------------------------
# metric quantities
# ---------------------------------------------------------------------------

def conformal_factor_disk(ctx: CurvatureContext, p: DiskPoint) -> float:
    """lambda(z) = 4R^4/(R^2 - |z|^2)^2."""
    R = ctx.R
    s = R * R - (p.z.real ** 2 + p.z.imag ** 2)
    return 4 * R ** 4 / (s * s)


def conformal_factor_halfplane(ctx: CurvatureContext, q: HalfPlanePoint) -> float:
    """mu(w) = -4R^2/(w - wbar)^2 = R^2/(Im w)^2."""
    y = q.w.imag
    return ctx.R * ctx.R / (y * y)


def geodesic_distance(ctx: CurvatureContext, p1: ChartPoint, p2: ChartPoint) -> float:
    """d = R * acosh(-Q1 (.) Q2 / R^2), computed on the hyperboloid.

    Accepts points from any chart (they are converted first).  Symmetric,
    nonnegative, zero iff the points coincide.
    """
    q1 = convert_point(ctx, p1, Chart.HYPERBOLOID)
    q2 = convert_point(ctx, p2, Chart.HYPERBOLOID)
    arg = -lorentz_inner(q1, q2) / (ctx.R * ctx.R)
    if arg < 1.0:
        if arg < 1.0 - 1e-9:
            raise ChartDomainError(f"acosh argument {arg:.17g} < 1: inputs off the sheet")
        arg = 1.0  # roundoff for near-coincident points
    return ctx.R * math.acosh(arg)


class ChristoffelDisk(NamedTuple):
    """The six nontrivial Christoffel symbols of the disk metric at a point.

    With A = 2u/(R^2 - u^2 - v^2) and B = 2v/(R^2 - u^2 - v^2) (z = u + iv):

        G^1_11 = A    G^1_12 = B    G^1_22 = -A
        G^2_11 = -B   G^2_12 = A    G^2_22 = B

    These are the symbols of the conformal metric lambda |dz|^2, i.e.
    G^1_11 = (d/du log lambda)/2 and so on; substituted into the geodesic
    system they reproduce the complex form zddot = -2 zbar zdot^2/(R^2-|z|^2).
    The four distinct values are {A, -A, B, -B}.
    """

    g1_11: float
    g1_12: float
    g1_22: float
    g2_11: float
    g2_12: float
    g2_22: float


def christoffel_disk(ctx: CurvatureContext, p: DiskPoint) -> ChristoffelDisk:
    R = ctx.R
    u, v = p.z.real, p.z.imag
    s = R * R - u * u - v * v
    if not s > 0:
        raise ChartDomainError(f"disk point with |z| = {abs(p.z):.17g} >= R = {R}")
    A = 2 * u / s
    B = 2 * v / s
    return ChristoffelDisk(g1_11=A, g1_12=B, g1_22=-A, g2_11=-B, g2_12=A, g2_22=B)


# ---------------------------------------------------------------------------
# geodesic flow
# ---------------------------------------------------------------------------

def _tangent_project(q: HyperboloidPoint, v: np.ndarray, R: float) -> np.ndarray:
    """Project v onto the tangent space at q: v + (v (.) q / R^2) q."""
    qt = q.triple()
    lam = (v[0] * qt[0] + v[1] * qt[1] - v[2] * qt[2]) / (R * R)
    return v + lam * qt


def geodesic_flow(ctx: CurvatureContext, p: ChartPoint, velocity, t: float) -> ChartPoint:
    """Exact geodesic through p with the given initial chart velocity.

    On the hyperboloid the geodesic is the closed form

        Q(t) = Q0 cosh(rho t / R) + (R / rho) V0 sinh(rho t / R),

    with rho^2 = V0 (.) V0 the squared metric speed; the result is mapped
    back to the chart of p.  The path's arclength over [0, t] is exactly
    rho * t, and geodesic_distance(p, Q(t)) = rho * |t|.

    Zero velocity returns p unchanged for any t.  A flow argument beyond
    the overflow horizon of cosh raises BoundaryEscapeError carrying the
    farthest representable point.
    """
    src = chart_of(p)
    R = ctx.R
    q, v = transport_state(ctx, p, velocity, Chart.HYPERBOLOID)
    vt = _tangent_project(q, np.asarray(v, dtype=float), R)
    rho2 = lorentz_inner_triples(vt, vt)
    if rho2 <= 0.0:
        # spacelike tangent vectors have positive Lorentz norm; <= 0 means
        # the velocity is (numerically) zero
        if abs(rho2) < 1e-300:
            return p
        rho2 = abs(rho2)
    rho = math.sqrt(rho2)
    if rho == 0.0 or t == 0.0:
        return p
    arg = rho * t / R
    if abs(arg) > _COSH_ARG_LIMIT:
        safe_t = math.copysign(_COSH_ARG_LIMIT * R / rho, t)
        last = geodesic_flow(ctx, p, velocity, safe_t)
        raise BoundaryEscapeError(
            f"geodesic flow argument {arg:.3g} exceeds the chart's numeric horizon",
            last_state=last,
        )
    qt = q.triple() * math.cosh(arg) + (R / rho) * vt * math.sinh(arg)
    out = HyperboloidPoint.from_triple(qt)
    return convert_point(ctx, out, src)
