"""Isometry groups of the two conformal charts.

The disk of radius R is acted on by SU(1,1) through rescaled Moebius maps

    f_M(z) = R * (a (z/R) + b) / (conj(b) (z/R) + conj(a)),

the upper half plane by SL(2,R) through the usual f_M(w) = (aw+b)/(cw+d).
The rescaling by R matters: an SU(1,1) fractional-linear map preserves the
*unit* disk, so it must be conjugated by z -> z/R to act isometrically on
the radius-R disk.  (For the rotation subgroup the two agree, since then
b = 0 and the scale cancels.)

Six one-parameter subgroups are provided in closed form -- G1, G2, G3
exponentiating the su(1,1) basis

    g1 = [[0, 1/2], [1/2, 0]],  g2 = [[i/2, 0], [0, -i/2]],
    g3 = [[0, i/2], [-i/2, 0]],

and Phi1 (dilatation w -> e^t w), Phi2 (shift w -> w + t), Phi3 (rotation
fixing i) exponentiating the sl(2,R) basis

    X1 = [[1/2, 0], [0, -1/2]],  X2 = [[0, 1], [0, 0]],
    X3 = [[0, 1], [-1, 0]].

G2 and Phi3 generate elliptic motions, G1/Phi1 hyperbolic ones, and Phi2
parabolic ones.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ProjectiveInfinityError
from .geometry import (
    Chart,
    ChartPoint,
    CurvatureContext,
    DiskPoint,
    HalfPlanePoint,
    chart_of,
    hyperboloid_from_disk,
)

_DET_TOL = 1e-12
_DENOM_TOL = 1e-14


class SubgroupKind(str, Enum):
    """The six one-parameter isometry subgroups."""

    G1 = "G1"
    G2 = "G2"
    G3 = "G3"
    PHI1 = "Phi1"
    PHI2 = "Phi2"
    PHI3 = "Phi3"

    @property
    def chart(self) -> Chart:
        return Chart.DISK if self.value.startswith("G") else Chart.HALFPLANE


@dataclass(frozen=True)
class SubgroupTag:
    """A subgroup together with its group parameter t."""

    kind: SubgroupKind
    t: float = 0.0


class MatrixFlavor(str, Enum):
    DISK = "disk"       # SU(1,1): [[a, b], [conj(b), conj(a)]]
    HALFPLANE = "halfplane"  # SL(2,R): real entries


@dataclass(frozen=True)
class UnitDetMatrix2:
    """2x2 matrix of determinant 1, either SU(1,1) or SL(2,R) flavored."""

    a: complex
    b: complex
    c: complex
    d: complex
    flavor: MatrixFlavor

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det - 1) > _DET_TOL:
            raise ValueError(f"determinant must be 1, got {det}")
        if self.flavor == MatrixFlavor.DISK:
            if abs(self.c - self.b.conjugate()) > _DET_TOL or abs(
                self.d - self.a.conjugate()
            ) > _DET_TOL:
                raise ValueError("disk-flavor matrix must have the [[a,b],[conj b,conj a]] pattern")
        else:
            for entry in (self.a, self.b, self.c, self.d):
                if abs(complex(entry).imag) > _DET_TOL:
                    raise ValueError("half-plane-flavor matrix must be real")

    def __matmul__(self, other: "UnitDetMatrix2") -> "UnitDetMatrix2":
        if self.flavor != other.flavor:
            raise ValueError("cannot compose matrices of different flavors")
        return UnitDetMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            self.flavor,
        )

    def __neg__(self) -> "UnitDetMatrix2":
        return UnitDetMatrix2(-self.a, -self.b, -self.c, -self.d, self.flavor)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @classmethod
    def identity(cls, flavor: MatrixFlavor) -> "UnitDetMatrix2":
        return cls(1, 0, 0, 1, flavor)


def subgroup_generator(kind: SubgroupKind) -> np.ndarray:
    """Killing-basis element whose exponential is subgroup_matrix(kind, t)."""
    if kind == SubgroupKind.G1:
        return np.array([[0, 0.5], [0.5, 0]], dtype=complex)
    if kind == SubgroupKind.G2:
        return np.array([[0.5j, 0], [0, -0.5j]], dtype=complex)
    if kind == SubgroupKind.G3:
        return np.array([[0, 0.5j], [-0.5j, 0]], dtype=complex)
    if kind == SubgroupKind.PHI1:
        return np.array([[0.5, 0], [0, -0.5]], dtype=complex)
    if kind == SubgroupKind.PHI2:
        return np.array([[0, 1], [0, 0]], dtype=complex)
    if kind == SubgroupKind.PHI3:
        return np.array([[0, 1], [-1, 0]], dtype=complex)
    raise ValueError(f"unknown subgroup kind {kind!r}")


def subgroup_matrix(tag: SubgroupTag) -> UnitDetMatrix2:
    """Closed-form exponential exp(t * generator) for the tagged subgroup.

    G1(t) = [[cosh(t/2), sinh(t/2)], [sinh(t/2), cosh(t/2)]]
    G2(t) = diag(e^{it/2}, e^{-it/2})
    G3(t) = [[cosh(t/2), i sinh(t/2)], [-i sinh(t/2), cosh(t/2)]]
    Phi1(t) = diag(e^{t/2}, e^{-t/2})
    Phi2(t) = [[1, t], [0, 1]]
    Phi3(t) = [[cos t, sin t], [-sin t, cos t]]
    """
    kind, t = tag.kind, tag.t
    if kind == SubgroupKind.G1:
        ch, sh = math.cosh(t / 2), math.sinh(t / 2)
        return UnitDetMatrix2(ch, sh, sh, ch, MatrixFlavor.DISK)
    if kind == SubgroupKind.G2:
        e = cmath.exp(0.5j * t)
        return UnitDetMatrix2(e, 0, 0, e.conjugate(), MatrixFlavor.DISK)
    if kind == SubgroupKind.G3:
        ch, sh = math.cosh(t / 2), math.sinh(t / 2)
        return UnitDetMatrix2(ch, 1j * sh, -1j * sh, ch, MatrixFlavor.DISK)
    if kind == SubgroupKind.PHI1:
        e = math.exp(t / 2)
        return UnitDetMatrix2(e, 0, 0, 1 / e, MatrixFlavor.HALFPLANE)
    if kind == SubgroupKind.PHI2:
        return UnitDetMatrix2(1, t, 0, 1, MatrixFlavor.HALFPLANE)
    if kind == SubgroupKind.PHI3:
        c, s = math.cos(t), math.sin(t)
        return UnitDetMatrix2(c, s, -s, c, MatrixFlavor.HALFPLANE)
    raise ValueError(f"unknown subgroup kind {kind!r}")


def mobius_apply(ctx: CurvatureContext, M: UnitDetMatrix2, p: ChartPoint) -> ChartPoint:
    """Apply the fractional-linear isometry of M to a chart point.

    Disk flavor acts through the R-rescaled map (see module docstring);
    half-plane flavor acts directly.  A near-zero denominator (only
    reachable for points on or beyond the chart boundary) raises
    ProjectiveInfinityError.  Negating M leaves the action unchanged.
    """
    chart = chart_of(p)
    if M.flavor == MatrixFlavor.DISK:
        if chart != Chart.DISK:
            raise ValueError("disk-flavor matrix applied to a non-disk point")
        zeta = p.z / ctx.R
        den = M.c * zeta + M.d
        if abs(den) < _DENOM_TOL:
            raise ProjectiveInfinityError(f"Moebius denominator vanished at z = {p.z}")
        return DiskPoint(ctx.R * (M.a * zeta + M.b) / den)
    if chart != Chart.HALFPLANE:
        raise ValueError("half-plane-flavor matrix applied to a non-half-plane point")
    den = M.c * p.w + M.d
    if abs(den) < _DENOM_TOL:
        raise ProjectiveInfinityError(f"Moebius denominator vanished at w = {p.w}")
    return HalfPlanePoint((M.a * p.w + M.b) / den)


def _kind_of(tag) -> SubgroupKind:
    return tag.kind if isinstance(tag, SubgroupTag) else SubgroupKind(tag)


def mobius_time_derivative(ctx: CurvatureContext, tag, p: ChartPoint) -> complex:
    """d/dt of t -> mobius_apply(subgroup_matrix(kind, t), p) at t = 0.

    Differentiating (a(t) zeta + b(t)) / (c(t) zeta + d(t)) at the identity
    gives (a' zeta + b') - zeta (c' zeta + d') with primes read off the
    subgroup generator; the disk version carries the R scaling.
    """
    kind = _kind_of(tag)
    g = subgroup_generator(kind)
    ap, bp, cp, dp = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    if kind.chart == Chart.DISK:
        if chart_of(p) != Chart.DISK:
            raise ValueError("disk subgroup derivative needs a disk point")
        zeta = p.z / ctx.R
        return ctx.R * ((ap * zeta + bp) - zeta * (cp * zeta + dp))
    if chart_of(p) != Chart.HALFPLANE:
        raise ValueError("half-plane subgroup derivative needs a half-plane point")
    w = p.w
    return (ap * w + bp) - w * (cp * w + dp)


def killing_pushforward_check(ctx: CurvatureContext, tag, p: DiskPoint) -> float:
    """Defect between the G2 orbit derivative and the pushed-down rotation field.

    The extrinsic rotation Killing field on the hyperboloid is
    (x, y, z) -> (-y, x, 0).  Pushing it through the Jacobian of the
    stereographic projection z = R(x + iy)/(R + z3) and comparing with the
    intrinsic orbit derivative (which is iz) gives the returned magnitude;
    anything above roundoff means the two group actions disagree.
    """
    kind = _kind_of(tag)
    if kind != SubgroupKind.G2:
        raise ValueError("the pushforward comparison is defined for the rotation subgroup G2")
    if chart_of(p) != Chart.DISK:
        raise ValueError("killing_pushforward_check needs a disk point")
    orbit_dot = mobius_time_derivative(ctx, kind, p)

    q = hyperboloid_from_disk(ctx, p)
    kx, ky, kz = -q.y, q.x, 0.0
    # z = R (x + i y) / (R + z3): dz = R (dx + i dy)/(R + z3) - R (x + i y) dz3 / (R + z3)^2
    denom = ctx.R + q.z
    pushed = ctx.R * (kx + 1j * ky) / denom - ctx.R * (q.x + 1j * q.y) * kz / denom ** 2
    return abs(orbit_dot - pushed)


def orbit(ctx: CurvatureContext, tag, p: ChartPoint, t_samples) -> list:
    """The one-parameter orbit of p sampled at the given parameter values."""
    kind = _kind_of(tag)
    if chart_of(p) != kind.chart:
        raise ValueError(f"subgroup {kind.value} acts on the {kind.chart.value} chart")
    return [mobius_apply(ctx, subgroup_matrix(SubgroupTag(kind, t)), p) for t in t_samples]
