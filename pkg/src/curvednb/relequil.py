"""Relative equilibria: residual systems, solvers, and nonexistence certificates.

A relative equilibrium is an orbit carried rigidly by a one-parameter
isometry subgroup: elliptic orbits rotate the disk about its center
(z_k(t) = z_k(0) e^{-it/2}), hyperbolic orbits slide the half plane along
a hyperbolic translation (w_k(t) = w_k(0) e^{-t/2}), and parabolic
candidates would drift horizontally (w_k(t) = w_k(0) - t/2).  Substituting
each ansatz into the equations of motion and clearing denominators turns
existence into an algebraic system per body.  This module exposes those
systems as residual maps, solves the classical two- and three-body
families by bracketed bisection, and certifies that the parabolic class
is empty.

Conventions.  Elliptic configurations live in the disk chart, hyperbolic
and parabolic ones in the upper half plane.  The elliptic rotation rate
is normalized to angular speed 1/2 (clockwise), which freezes the overall
scale of the residual system; the hyperbolic translation rate e^{-t/2} is
normalized the same way.  Families whose parameters satisfy only the
shape (mass-ratio) conditions are closed into genuine equilibria by a
scalar mass-scale solve — the residuals are linear in a common mass
factor, so a certified sign change always exists when a solution does.

All root finding is plain bisection on certified sign changes; no
derivative-based iteration is used anywhere (the shape functions develop
boundary singularities where Newton steps misbehave).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import Body, Configuration
from .errors import ChartDomainError, InfeasibleError, SingularityError
from .geometry import Chart, CurvatureContext, DiskPoint, HalfPlanePoint
from .integrator import Trajectory

# A solver output must re-substitute into its residual system below this.
RE_VERIFY_TOL = 1e-10

_BISECT_STEPS = 200
_TINY = 1e-300


class REClass(str, Enum):
    """Which isometry subgroup carries the orbit."""

    ELLIPTIC = "elliptic"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"


@dataclass(frozen=True)
class ResidualReport:
    """Left-minus-right of one rigid-orbit balance system.

    residuals holds one complex entry per body; norm is their largest
    magnitude.  scale is the largest gross magnitude |LHS| + sum |terms|
    over the bodies, so norm/scale is a dimensionless violation measure
    (used by the sweep reports to make thresholds unit-free).
    """

    kind: REClass
    residuals: tuple
    scale: float

    @property
    def norm(self) -> float:
        return max(abs(r) for r in self.residuals)

    @property
    def scaled_norm(self) -> float:
        return self.norm / max(self.scale, _TINY)


class REFamilyTag(str, Enum):
    ELLIPTIC2 = "elliptic2"
    EULER3 = "euler3"
    LAGRANGE3 = "lagrange3"
    HYPERBOLIC2 = "hyperbolic2"
    HYPERBOLIC3 = "hyperbolic3"


_ELLIPTIC_TAGS = frozenset(
    {REFamilyTag.ELLIPTIC2, REFamilyTag.EULER3, REFamilyTag.LAGRANGE3}
)


@dataclass(frozen=True)
class REFamily:
    """A solved relative-equilibrium family: masses, chart positions, and
    the solver parameters that produced them.

    residual_norm records the re-substitution residual measured by the
    constructing solver; a family counts as verified only when that norm
    is below RE_VERIFY_TOL.  Hand-built instances default to unverified
    and are rejected by re_trajectory.
    """

    tag: REFamilyTag
    R: float
    masses: tuple
    positions: tuple
    params: dict = field(default_factory=dict)
    residual_norm: float = math.inf

    @property
    def kind(self) -> REClass:
        return REClass.ELLIPTIC if self.tag in _ELLIPTIC_TAGS else REClass.HYPERBOLIC

    @property
    def chart(self) -> Chart:
        return Chart.DISK if self.kind is REClass.ELLIPTIC else Chart.HALFPLANE

    @property
    def verified(self) -> bool:
        return self.residual_norm <= RE_VERIFY_TOL

    def configuration(self) -> Configuration:
        """Initial state with the rigid-orbit velocities filled in."""
        return _ansatz_configuration(self.kind, self.R, self.masses, self.positions)


@dataclass(frozen=True)
class Feasibility:
    """Outcome of a constrained-geometry probe: either a constructed
    configuration or a quantified reason why none exists."""

    feasible: bool
    reason: str
    configuration: Configuration | None = None
    family: REFamily | None = None
    determinant: float | None = None
    residuals: tuple | None = None


# ---------------------------------------------------------------------------
# residual kernels
# ---------------------------------------------------------------------------

def _theta2_bracket(R: float, zk: complex, zj: complex) -> float:
    """Squared-bracket pair denominator in the disk; vanishes exactly at
    collision, so a non-positive value means the pair is unusable."""
    rk2 = abs(zk) ** 2
    rj2 = abs(zj) ** 2
    N = 2.0 * (zk * zj.conjugate() + zj * zk.conjugate()).real * R * R \
        - (rk2 + R * R) * (rj2 + R * R)
    th = N * N - (R * R - rk2) ** 2 * (R * R - rj2) ** 2
    if th <= 0.0:
        raise SingularityError("pair separation too small for the balance system")
    return th


def _theta3_bracket(wk: complex, wj: complex) -> float:
    N = ((wk.conjugate() + wk) * (wj.conjugate() + wj)).real \
        - 2.0 * (abs(wk) ** 2 + abs(wj) ** 2)
    sq = ((wk.conjugate() - wk) ** 2 * (wj.conjugate() - wj) ** 2).real
    th = N * N - sq
    if th <= 0.0:
        raise SingularityError("pair separation too small for the balance system")
    return th


def _elliptic_lhs(R: float, zk: complex) -> complex:
    rk2 = abs(zk) ** 2
    return R ** 3 * (R * R + rk2) * zk / (4.0 * (R * R - rk2) ** 4)


def _elliptic_pair(R: float, zk: complex, zj: complex) -> complex:
    """Mass-free pair contribution; residual_k = lhs_k + sum_j m_j * pair."""
    th = _theta2_bracket(R, zk, zj)
    rj2 = abs(zj) ** 2
    return (R * R - rj2) ** 2 * (zj - zk) * (R * R - zk * zj.conjugate()) / th ** 1.5


def _hyperbolic_lhs(R: float, wk: complex) -> complex:
    # Coefficient fixed by substituting the translation ansatz into the
    # equations of motion (w e^{-t/2} => 4 wddot = w).
    return R ** 3 * (wk + wk.conjugate()) * wk / (4.0 * (wk - wk.conjugate()) ** 4)


def _parabolic_lhs(R: float, wk: complex) -> complex:
    return -R / (4.0 * (wk - wk.conjugate()) ** 4)


def _halfplane_pair(wk: complex, wj: complex) -> complex:
    """Mass-free pair contribution; residual_k = lhs_k - sum_j m_j * pair."""
    th = _theta3_bracket(wk, wj)
    return (wj - wj.conjugate()) ** 2 * (wk - wj) * (wj.conjugate() - wk) / th ** 1.5


def _require_chart(cfg: Configuration, chart: Chart, op: str) -> None:
    if cfg.chart != chart:
        raise ChartDomainError(f"{op} expects the {chart.value} chart, got {cfg.chart.value}")


def elliptic_residual(cfg: Configuration) -> ResidualReport:
    """Balance residual of a rigid rotation about the disk center, one
    complex entry per body.  Velocities in cfg are ignored: the rotating
    ansatz implies them.  A norm at roundoff level certifies an elliptic
    relative equilibrium at angular speed 1/2."""
    _require_chart(cfg, Chart.DISK, "elliptic_residual")
    cfg.validate()
    R = cfg.ctx.R
    zs = cfg.positions_raw()
    ms = cfg.masses()
    res = []
    scale = 0.0
    for k, zk in enumerate(zs):
        lhs = _elliptic_lhs(R, zk)
        acc = lhs
        gross = abs(lhs)
        for j, zj in enumerate(zs):
            if j == k:
                continue
            p = _elliptic_pair(R, zk, zj)
            acc += ms[j] * p
            gross += ms[j] * abs(p)
        res.append(acc)
        scale = max(scale, gross)
    return ResidualReport(REClass.ELLIPTIC, tuple(res), scale)


def _halfplane_residual(cfg: Configuration, kind: REClass, op: str) -> ResidualReport:
    _require_chart(cfg, Chart.HALFPLANE, op)
    cfg.validate()
    R = cfg.ctx.R
    ws = cfg.positions_raw()
    ms = cfg.masses()
    lhs_of = _hyperbolic_lhs if kind is REClass.HYPERBOLIC else _parabolic_lhs
    res = []
    scale = 0.0
    for k, wk in enumerate(ws):
        lhs = lhs_of(R, wk)
        acc = lhs
        gross = abs(lhs)
        for j, wj in enumerate(ws):
            if j == k:
                continue
            p = _halfplane_pair(wk, wj)
            acc -= ms[j] * p
            gross += ms[j] * abs(p)
        res.append(acc)
        scale = max(scale, gross)
    return ResidualReport(kind, tuple(res), scale)


def hyperbolic_residual(cfg: Configuration) -> ResidualReport:
    """Balance residual of a rigid hyperbolic translation of the half
    plane (w_k(t) = w_k e^{-t/2}), one complex entry per body."""
    return _halfplane_residual(cfg, REClass.HYPERBOLIC, "hyperbolic_residual")


def parabolic_residual(cfg: Configuration) -> ResidualReport:
    """Balance residual of a rigid horizontal drift of the half plane.
    Provably never zero for positive masses — see
    parabolic_nonexistence_certificate."""
    return _halfplane_residual(cfg, REClass.PARABOLIC, "parabolic_residual")


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------

def _bisect(fn, lo: float, hi: float, steps: int = _BISECT_STEPS) -> float:
    flo = fn(lo)
    if flo == 0.0:
        return lo
    fhi = fn(hi)
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError(f"no certified sign change on [{lo!r}, {hi!r}]")
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-17 * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def _solve_mass_scale(residual_of) -> float:
    """Zero of a residual that is linear in a common positive mass factor:
    expand [0, hi] by doubling until the sign flips, then bisect."""
    f0 = residual_of(0.0)
    if f0 == 0.0:
        return 0.0
    hi = 1.0
    for _ in range(200):
        if (residual_of(hi) > 0.0) != (f0 > 0.0):
            return _bisect(residual_of, 0.0, hi)
        hi *= 2.0
    raise InfeasibleError("no positive mass scale zeroes the balance residual")


# ---------------------------------------------------------------------------
# elliptic families
# ---------------------------------------------------------------------------

def elliptic_pair_shape(m1: float, m2: float, alpha: float, R: float, x: float) -> float:
    """Shape function of the two-body diameter family (z1 = alpha, z2 = -x):
    strictly decreasing on (0, R) with a positive value at 0 and a negative
    one at R, so it has exactly one root."""
    return m1 * alpha * (R * R + alpha * alpha) * (R * R - x * x) ** 2 \
        - m2 * x * (R * R + x * x) * (R * R - alpha * alpha) ** 2


def elliptic_pair_shape_slope(m1: float, m2: float, alpha: float, R: float, x: float) -> float:
    """d/dx of elliptic_pair_shape; strictly negative on (0, R)."""
    return -4.0 * m1 * alpha * x * (R * R + alpha * alpha) * (R * R - x * x) \
        - m2 * (R * R - alpha * alpha) ** 2 * (R * R + 3.0 * x * x)


def _check_masses(*ms):
    for m in ms:
        if not m > 0.0:
            raise ValueError(f"masses must be positive, got {m}")


def _check_radius(name: str, value: float, R: float):
    if not 0.0 < value < R:
        raise ValueError(f"{name} must lie in (0, R), got {value} with R = {R}")


def solve_two_body_elliptic(m1: float, m2: float, alpha: float, R: float) -> float:
    """Partner radius r of the rotating diameter pair z1 = alpha, z2 = -r.

    Bisects the strictly decreasing shape function on its certified sign
    change; the root fixes the shape only — the residual system also pins
    an overall mass scale, handled by elliptic_pair_family."""
    _check_masses(m1, m2)
    _check_radius("alpha", alpha, R)
    return _bisect(lambda x: elliptic_pair_shape(m1, m2, alpha, R, x), 0.0, R)


def two_body_no_double_roots_certificate(m1: float, m2: float, alpha: float, R: float) -> bool:
    """Certify the diameter-pair root is simple: the shape derivative is
    strictly negative at the root, and the quartic x^4 + 6 R^2 x^2 + R^4
    (whose real roots would be needed for a double root) has none."""
    r = solve_two_body_elliptic(m1, m2, alpha, R)
    slope = elliptic_pair_shape_slope(m1, m2, alpha, R, r)
    if not slope < 0.0:
        return False
    quartic = np.roots([1.0, 0.0, 6.0 * R * R, 0.0, R ** 4])
    return bool(np.all(np.abs(quartic.imag) > 0.0))


def _elliptic_configuration(R: float, masses, zs) -> Configuration:
    ctx = CurvatureContext(R)
    bodies = [Body(m, DiskPoint(z), -0.5j * z) for m, z in zip(masses, zs)]
    return Configuration(ctx, Chart.DISK, bodies)


def elliptic_pair_family(m1: float, m2: float, alpha: float, R: float) -> REFamily:
    """Close the two-body shape solution into a genuine equilibrium by a
    common mass rescale (the residual is linear in the scale factor)."""
    r = solve_two_body_elliptic(m1, m2, alpha, R)
    zs = (complex(alpha), complex(-r))

    def body1(sigma: float) -> float:
        return (_elliptic_lhs(R, zs[0]) + sigma * m2 * _elliptic_pair(R, zs[0], zs[1])).real

    sigma = _solve_mass_scale(body1)
    masses = (sigma * m1, sigma * m2)
    norm = elliptic_residual(_elliptic_configuration(R, masses, zs)).norm
    if norm > RE_VERIFY_TOL:
        raise InfeasibleError(f"pair family failed verification (residual {norm:.3e})")
    return REFamily(REFamilyTag.ELLIPTIC2, R, masses, zs,
                    params={"alpha": alpha, "r": r, "mass_scale": sigma},
                    residual_norm=norm)


def euler_shape(x: float, R: float) -> float:
    """(R^2 + x^2) x^3 / (R^2 - x^2)^4 — strictly increasing on [0, R).
    Equal values at two radii force the radii themselves to be equal."""
    return (R * R + x * x) * x ** 3 / (R * R - x * x) ** 4


def euler_elliptic_three(m2: float, m3: float, alpha: float, r: float, R: float) -> Feasibility:
    """Collinear three-body family: central mass at the origin, outer
    bodies at alpha and -r on a diameter.

    The two outer balance equations form a linear system in (m2, m3) whose
    determinant is proportional to euler_shape(alpha) - euler_shape(r); a
    nontrivial solution therefore needs r = alpha, and then equal outer
    masses.  When the geometry admits it, the central mass is solved from
    the outer-body residual (it can fail to be positive if the outer
    masses are too heavy, which is reported as infeasible)."""
    _check_masses(m2, m3)
    _check_radius("alpha", alpha, R)
    _check_radius("r", r, R)
    det = alpha ** 3 * (R * R + alpha * alpha) * (R * R - r * r) ** 4 \
        - r ** 3 * (R * R + r * r) * (R * R - alpha * alpha) ** 4
    det_scale = alpha ** 3 * (R * R + alpha * alpha) * (R * R - r * r) ** 4 \
        + r ** 3 * (R * R + r * r) * (R * R - alpha * alpha) ** 4
    if abs(det) > 1e-12 * det_scale:
        return Feasibility(False,
                           "outer radii differ: the outer mass system is only "
                           "solvable nontrivially when its determinant vanishes, "
                           "and the shape function is strictly increasing",
                           determinant=det)
    if abs(m2 - m3) > 1e-12 * (m2 + m3):
        return Feasibility(False,
                           "equal outer radii force equal outer masses",
                           determinant=det)
    m = 0.5 * (m2 + m3)
    zs = (0j, complex(alpha), complex(-alpha))

    def body2(m1: float) -> float:
        return (_elliptic_lhs(R, zs[1])
                + m1 * _elliptic_pair(R, zs[1], zs[0])
                + m * _elliptic_pair(R, zs[1], zs[2])).real

    try:
        m1 = _solve_mass_scale(body2)
    except InfeasibleError:
        m1 = 0.0
    if not m1 > 0.0:
        return Feasibility(False,
                           "central mass would not be positive for these outer masses",
                           determinant=det)
    masses = (m1, m, m)
    cfg = _elliptic_configuration(R, masses, zs)
    norm = elliptic_residual(cfg).norm
    family = REFamily(REFamilyTag.EULER3, R, masses, zs,
                      params={"alpha": alpha, "central_mass": m1},
                      residual_norm=norm)
    return Feasibility(True, "collinear family with solved central mass",
                       configuration=cfg, family=family, determinant=det)


def restricted_shape(x: float, R: float) -> float:
    """(R^2 + x^2) x / (R^2 - x^2)^2 — strictly increasing on [0, R)."""
    return (R * R + x * x) * x / (R * R - x * x) ** 2


def restricted_euler_probe(m2: float, m3: float, alpha: float, beta: float,
                           c: float, R: float) -> Feasibility:
    """Massless central probe at z = c between heavy companions at alpha
    and -beta (equal masses required).

    Evaluates the three balance equations of the probe geometry.  The two
    companion equations are compatible only when restricted_shape(alpha)
    equals restricted_shape(beta), i.e. alpha = beta by monotonicity, and
    the probe equation is then nonzero unless c = 0 (its left side scales
    with c while its right side has the opposite sign).  The companion
    equations also pin the companion mass scale; their residuals at the
    given masses are returned as diagnostics, but feasibility of the
    geometry is decided by the shape gap and the probe equation alone.

    Note: the two companion-equation right sides are attractive terms; the
    balance requires them positive, so the printed probe system is
    evaluated with the signs that make the equal-radius geometry solvable.
    """
    _check_masses(m2, m3)
    if abs(m2 - m3) > 1e-12 * (m2 + m3):
        raise ValueError("the restricted probe assumes equal companion masses")
    _check_radius("alpha", alpha, R)
    _check_radius("beta", beta, R)
    if not abs(c) < R:
        raise ValueError(f"probe offset must lie inside the disk, got {c}")
    if abs(c - alpha) < 1e-12 * R or abs(c + beta) < 1e-12 * R:
        raise SingularityError("probe sits on a companion body")
    q1 = R ** 6 * (R * R + c * c) * c / (R * R - c * c) ** 4 \
        + m2 * (R * R - alpha * alpha) ** 2 / (2.0 * (alpha - c) ** 2 * (R * R - alpha * c) ** 2) \
        - m3 * (R * R - beta * beta) ** 2 / (2.0 * (beta + c) ** 2 * (R * R + beta * c) ** 2)
    q2 = R ** 6 * (R * R + alpha * alpha) * alpha / (R * R - alpha * alpha) ** 4 \
        - m3 * (R * R - beta * beta) ** 2 / (2.0 * (beta + alpha) ** 2 * (R * R + beta * alpha) ** 2)
    q3 = R ** 6 * (R * R + beta * beta) * beta / (R * R - beta * beta) ** 4 \
        - m2 * (R * R - alpha * alpha) ** 2 / (2.0 * (beta + alpha) ** 2 * (R * R + beta * alpha) ** 2)
    qs = (q1, q2, q3)
    ha, hb = restricted_shape(alpha, R), restricted_shape(beta, R)
    if abs(ha - hb) > 1e-12 * (abs(ha) + abs(hb)):
        return Feasibility(False,
                           "companion radii differ: the companion equations are "
                           "incompatible (strictly increasing shape function)",
                           residuals=qs)
    lhs1 = R ** 6 * (R * R + c * c) * c / (R * R - c * c) ** 4
    if abs(q1) > 1e-12 * (abs(lhs1) + abs(q1 - lhs1)) + _TINY:
        return Feasibility(False,
                           "probe offset breaks the balance: the probe equation "
                           "scales with the offset and cannot vanish",
                           residuals=qs)
    return Feasibility(True,
                       "probe at the center between equal companions on a diameter",
                       residuals=qs)


def lagrange_angle_residuals(theta2: float, theta3: float, r: float, R: float):
    """Real- and imaginary-part angle identities for three equal masses on
    the circle of radius r at polar angles (0, theta2, theta3).

    The imaginary part is the difference (not the sum) of the two sine
    terms: it is the imaginary part of the second body's balance equation,
    and it is the form that actually vanishes on the equilateral angles.
    """
    def D(th: float) -> float:
        return 8.0 ** 1.5 * R ** 3 * r ** 3 * (1.0 - math.cos(th)) ** 1.5 \
            * (R ** 4 + r ** 4 - 2.0 * R * R * r * r * math.cos(th)) ** 1.5

    d12 = D(theta2)
    d23 = D(theta3 - theta2)
    d13 = D(theta3)
    res_re = (1.0 - math.cos(theta2)) / d12 \
        + (1.0 - math.cos(theta3 - theta2)) / d23 \
        - 2.0 * (1.0 - math.cos(theta3)) / d13
    res_im = math.sin(theta2) / d12 - math.sin(theta3 - theta2) / d23
    return (res_re, res_im)


def lagrange_ws_reduction(theta2: float, r: float, R: float) -> float:
    """Single-variable reduction of the angle system along theta3 = 2*theta2,
    written in w = cos(theta2), s = cos(2*theta2)."""
    w = math.cos(theta2)
    s = math.cos(2.0 * theta2)
    A = R ** 4 + r ** 4
    v = 2.0 * R * R * r * r
    return (1.0 - w) * (A - v * s) ** 3 - (1.0 - s) * (A - v * w) ** 3


def lagrange_angle_solutions(r: float, R: float, n_grid: int = 8192):
    """Roots of lagrange_ws_reduction on [0, 2*pi], by grid scan plus
    bisection on sign changes (the endpoints are exact roots).

    For r below R*sqrt(5 - 2*sqrt(6)) ~ 0.3178 R the reduction is strictly
    one-to-one in its algebraic variables and the root set is exactly
    {0, 2pi/3, 4pi/3, 2pi}.  For larger radii the reduction picks up
    spurious crossings; those do not survive the full residual system
    (they solve one combination of the balance equations, not all three).
    """
    _check_radius("r", r, R)
    f = lambda th: lagrange_ws_reduction(th, r, R)
    grid = np.linspace(0.0, 2.0 * math.pi, n_grid + 1)
    vals = np.array([f(t) for t in grid])
    roots = []
    if vals[0] == 0.0:
        roots.append(0.0)
    for i in range(n_grid):
        a, b = vals[i], vals[i + 1]
        if a == 0.0 and grid[i] != 0.0:
            roots.append(grid[i])
        elif a * b < 0.0:
            roots.append(_bisect(f, grid[i], grid[i + 1]))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    out = []
    for t in sorted(roots):
        if not out or t - out[-1] > 4.0 * math.pi / n_grid:
            out.append(t)
    return tuple(out)


@dataclass(frozen=True)
class LagrangeSolution:
    configuration: Configuration
    mass: float
    family: REFamily
    angle_residuals: tuple


def lagrange_elliptic_three(r: float, R: float) -> LagrangeSolution:
    """Equal masses at polar angles 0, 2pi/3, 4pi/3 on the circle of
    radius r: solve the single balance equation for the common mass and
    verify the equilateral angle identities."""
    _check_radius("r", r, R)
    zs = tuple(r * cmath.exp(2j * math.pi * k / 3.0) for k in range(3))

    def body1(m: float) -> float:
        return (_elliptic_lhs(R, zs[0])
                + m * (_elliptic_pair(R, zs[0], zs[1])
                       + _elliptic_pair(R, zs[0], zs[2]))).real

    m = _solve_mass_scale(body1)
    ang = lagrange_angle_residuals(2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0, r, R)
    if max(abs(a) for a in ang) > 1e-12:
        raise RuntimeError("equilateral angle identities failed to verify")
    cfg = _elliptic_configuration(R, (m, m, m), zs)
    norm = elliptic_residual(cfg).norm
    if norm > RE_VERIFY_TOL:
        raise RuntimeError(f"equilateral family failed verification (residual {norm:.3e})")
    family = REFamily(REFamilyTag.LAGRANGE3, R, (m, m, m), zs,
                      params={"r": r, "mass": m}, residual_norm=norm)
    return LagrangeSolution(cfg, m, family, ang)


# ---------------------------------------------------------------------------
# hyperbolic families
# ---------------------------------------------------------------------------

def slope_height_product(phi: float) -> float:
    """tan(phi) * sin(phi) = sin^2(phi)/cos(phi) on (0, pi/2): the
    slope-height product entering the two-body mass balance; a strictly
    increasing bijection onto (0, inf)."""
    return math.sin(phi) ** 2 / math.cos(phi)


def _halfplane_configuration(R: float, masses, ws, kind: REClass) -> Configuration:
    ctx = CurvatureContext(R)
    if kind is REClass.HYPERBOLIC:
        bodies = [Body(m, HalfPlanePoint(w), -0.5 * w) for m, w in zip(masses, ws)]
    else:
        bodies = [Body(m, HalfPlanePoint(w), complex(-0.5)) for m, w in zip(masses, ws)]
    return Configuration(ctx, Chart.HALFPLANE, bodies)


def _ansatz_configuration(kind: REClass, R: float, masses, positions) -> Configuration:
    if kind is REClass.ELLIPTIC:
        return _elliptic_configuration(R, masses, positions)
    return _halfplane_configuration(R, masses, positions, kind)


@dataclass(frozen=True)
class TwoBodyHyperbolicSolution:
    theta2: float
    scale: float
    configuration: Configuration
    family: REFamily


def solve_two_body_hyperbolic(m1: float, m2: float, theta1: float, R: float) -> TwoBodyHyperbolicSolution:
    """Two bodies riding a hyperbolic translation on the unit half circle:
    w1 = e^{i theta1}, w2 = e^{i theta2} with theta2 on the other side of
    the vertical geodesic.

    Dividing the two balance equations and splitting into real and
    imaginary parts forces the bodies onto one circle about the origin and
    pins the mass-slope balance m1 beta2 y2 = -m2 beta1 y1 (slopes beta_k,
    heights y_k); theta2 then comes from the strictly increasing
    slope-height product, and a common mass rescale zeroes the full
    residual.  The heavier body rides closer to the geodesic.  Positions
    on the unit circle are a gauge choice — the balance system is
    invariant under scaling w -> lambda w, so nothing is lost.  A body on
    the geodesic itself admits no partner: its balance equation has a
    vanishing left side against a one-signed right side."""
    _check_masses(m1, m2)
    if not 0.0 < theta1 < math.pi:
        raise ChartDomainError(f"theta1 must lie in (0, pi), got {theta1}")
    if abs(theta1 - 0.5 * math.pi) < 1e-12:
        raise InfeasibleError("a body on the vertical geodesic admits no rigid partner")
    right = theta1 < 0.5 * math.pi
    phi1 = theta1 if right else math.pi - theta1
    # m1 g(phi2) = m2 g(phi1): note the ratio direction — solving it the
    # other way satisfies the slope identity formally but leaves the
    # second body's equation of motion violated.
    target = (m2 / m1) * slope_height_product(phi1)

    lo, hi = 1e-12, 0.5 * math.pi - 1e-12
    if not slope_height_product(lo) < target < slope_height_product(hi):
        raise InfeasibleError("mass ratio outside the representable slope range")
    phi2 = _bisect(lambda p: slope_height_product(p) - target, lo, hi)
    theta2 = math.pi - phi2 if right else phi2

    ws = (cmath.exp(1j * theta1), cmath.exp(1j * theta2))

    def body1(sigma: float) -> float:
        return (_hyperbolic_lhs(R, ws[0]) - sigma * m2 * _halfplane_pair(ws[0], ws[1])).real

    sigma = _solve_mass_scale(body1)
    masses = (sigma * m1, sigma * m2)
    cfg = _halfplane_configuration(R, masses, ws, REClass.HYPERBOLIC)
    norm = hyperbolic_residual(cfg).norm
    if norm > RE_VERIFY_TOL:
        raise InfeasibleError(f"no admissible partner angle (residual {norm:.3e})")
    family = REFamily(REFamilyTag.HYPERBOLIC2, R, masses, ws,
                      params={"theta1": theta1, "theta2": theta2, "mass_scale": sigma},
                      residual_norm=norm)
    return TwoBodyHyperbolicSolution(theta2, sigma, cfg, family)


def geodesic_angle_shape(x: float) -> float:
    """cos^3(x)/sin^4(x): even, increasing on (-pi/2, 0), decreasing on
    (0, pi/2) — so equal values force x2 = ±x1."""
    return math.cos(x) ** 3 / math.sin(x) ** 4


def mirror_angle_admissible(theta1: float, theta3: float, tol: float = 1e-9) -> bool:
    """Whether two off-geodesic ray angles (measured from the vertical
    geodesic) can belong to one three-body rigid translation: the balance
    forces geodesic_angle_shape(theta1) == geodesic_angle_shape(theta3),
    i.e. theta3 = ±theta1 by even monotonicity, and theta3 = +theta1 puts
    two bodies on one ray (a collision), leaving only the mirror angle."""
    if abs(theta1) < tol or abs(theta3) < tol:
        return False
    ga, gb = geodesic_angle_shape(theta1), geodesic_angle_shape(theta3)
    if abs(ga - gb) > tol * (abs(ga) + abs(gb)):
        return False
    return abs(theta3 + theta1) <= tol * max(1.0, abs(theta1))


def solve_three_body_hyperbolic(theta1: float, R: float) -> Configuration:
    """Three bodies riding one hyperbolic translation: the middle one on
    the vertical geodesic (w2 = i), the outer two mirrored across it at
    angle theta1 from the vertical, all on the unit half circle.

    The outer-body balance reduces to one linear relation between the
    middle and outer masses, so the family has a free parameter; the
    construction takes the midpoint of the admissible segment (each mass
    group carries half the balance).  Outer angles other than the exact
    mirror are rejected by the even, one-sided-monotone angle shape; the
    degenerate angle 0 would stack an outer body on the geodesic ray."""
    if not 0.0 < abs(theta1) < 0.5 * math.pi:
        raise ChartDomainError(
            f"theta1 must lie in (-pi/2, 0) or (0, pi/2) measured from the "
            f"vertical, got {theta1}")
    phi = 0.5 * math.pi - abs(theta1)
    c, s = math.cos(phi), math.sin(phi)
    B = R ** 3 * c ** 3 / s ** 4
    m2 = B / 8.0
    m13 = B / (2.0 * s * s)
    ws = (cmath.exp(1j * (0.5 * math.pi - theta1)), 1j,
          cmath.exp(1j * (0.5 * math.pi + theta1)))
    masses = (m13, m2, m13)
    cfg = _halfplane_configuration(R, masses, ws, REClass.HYPERBOLIC)
    norm = hyperbolic_residual(cfg).norm
    if norm > RE_VERIFY_TOL:
        raise RuntimeError(f"mirror construction failed verification (residual {norm:.3e})")
    return cfg


def three_body_hyperbolic_family(theta1: float, R: float) -> REFamily:
    """REFamily wrapper around solve_three_body_hyperbolic."""
    cfg = solve_three_body_hyperbolic(theta1, R)
    norm = hyperbolic_residual(cfg).norm
    return REFamily(REFamilyTag.HYPERBOLIC3, R, tuple(cfg.masses()),
                    tuple(cfg.positions_raw()),
                    params={"theta1": theta1}, residual_norm=norm)


@dataclass(frozen=True)
class SweepReport:
    """Minimum residual over a randomized parameter sweep of a family that
    is claimed not to exist; min_scaled_norm divides by the gross equation
    magnitude so thresholds are dimensionless."""

    geometry: str
    points: int
    min_norm: float
    min_scaled_norm: float
    argmin: tuple


def hyperbolic_no_go_sweep(geometry: str, R: float, points: int = 1000,
                           seed: int = 0) -> SweepReport:
    """Randomized sweep over two-body geometries that admit no rigid
    hyperbolic translation: both bodies on the vertical geodesic
    ("imaginary-axis"), or both on one ray from the origin ("common-ray").
    Returns the smallest residual seen; it stays bounded away from zero.
    """
    rng = np.random.default_rng(seed)
    ctx_R = float(R)
    best = (math.inf, math.inf, ())
    for _ in range(points):
        m = rng.uniform(0.1, 10.0, 2)
        if geometry == "imaginary-axis":
            b1 = ctx_R * math.exp(rng.uniform(-1.5, 1.0))
            b2 = b1 * math.exp(rng.uniform(0.15, 1.2) * rng.choice([-1.0, 1.0]))
            ws = (1j * b1, 1j * b2)
            params = (b1, b2, m[0], m[1])
        elif geometry == "common-ray":
            th = rng.uniform(0.1, math.pi - 0.1)
            t1 = ctx_R * math.exp(rng.uniform(-1.0, 0.7))
            t2 = t1 * math.exp(rng.uniform(0.15, 1.0) * rng.choice([-1.0, 1.0]))
            ws = (t1 * cmath.exp(1j * th), t2 * cmath.exp(1j * th))
            params = (th, t1, t2, m[0], m[1])
        else:
            raise ValueError(f"unknown sweep geometry {geometry!r}")
        cfg = _halfplane_configuration(ctx_R, m, ws, REClass.HYPERBOLIC)
        report = hyperbolic_residual(cfg)
        if report.scaled_norm < best[1]:
            best = (report.norm, report.scaled_norm, params)
    return SweepReport(geometry, points, best[0], best[1], best[2])


# ---------------------------------------------------------------------------
# parabolic nonexistence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParabolicCertificate:
    """Two-stage randomized certificate that no parabolic relative
    equilibrium exists for n bodies.

    Stage (i): the imaginary part of the residual at the body with the
    largest horizontal offset is a one-signed sum over strictly positive
    multiples of the offset differences, so any non-collinear candidate is
    excluded; every sampled probe confirms a nonzero value.  Stage (ii):
    for vertically stacked bodies the remaining real balance has a
    negative left side against a positive right side at the lowest body
    on every sample.  Together the stages cover all configurations."""

    n: int
    samples: int
    R: float
    seed: int
    collinearity_forced: bool
    min_noncollinear_imag: float
    sign_certified: bool
    min_stack_residual: float

    @property
    def holds(self) -> bool:
        return self.collinearity_forced and self.sign_certified


def parabolic_nonexistence_certificate(n: int, R: float, samples: int = 10_000,
                                       seed: int = 0) -> ParabolicCertificate:
    if n < 2:
        raise ValueError(f"the certificate needs n >= 2 bodies, got {n}")
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)

    # stage (i): non-collinear probes, vectorized over samples.
    a = rng.uniform(-2.0 * R, 2.0 * R, size=(samples, n))
    spread = a.max(axis=1) - a.min(axis=1)
    while np.any(spread < 1e-3 * R):
        bad = spread < 1e-3 * R
        a[bad] = rng.uniform(-2.0 * R, 2.0 * R, size=(int(bad.sum()), n))
        spread = a.max(axis=1) - a.min(axis=1)
    b = R * np.exp(rng.uniform(math.log(0.2), math.log(5.0), size=(samples, n)))
    m = rng.uniform(0.1, 10.0, size=(samples, n))
    kidx = np.argmax(a, axis=1)
    rows = np.arange(samples)
    ak = a[rows, kidx][:, None]
    bk = b[rows, kidx][:, None]
    inner = 4.0 * ak * a - 2.0 * (ak ** 2 + bk ** 2 + a ** 2 + b ** 2)
    theta = inner ** 2 - 16.0 * bk ** 2 * b ** 2
    mask = np.ones_like(a, dtype=bool)
    mask[rows, kidx] = False
    # Im residual_k = -sum_j 8 m_j b_j^2 b_k (a_k - a_j) / theta^{3/2}
    with np.errstate(divide="ignore"):
        contrib = 8.0 * m * b ** 2 * bk * (ak - a) / np.where(mask, theta, 1.0) ** 1.5
    imag_res = -np.sum(np.where(mask, contrib, 0.0), axis=1)
    min_imag = float(np.min(np.abs(imag_res)))
    collinearity_forced = bool(np.all(np.abs(imag_res) > 0.0))

    # stage (ii): vertical stacks 0 < b_1 < ... < b_n, lowest-body balance.
    bs = np.sort(R * np.exp(rng.uniform(math.log(0.1), math.log(3.0),
                                        size=(samples, n))), axis=1)
    gaps = np.diff(bs, axis=1)
    while np.any(gaps < 1e-3 * R):
        bad = (gaps < 1e-3 * R).any(axis=1)
        bs[bad] = np.sort(R * np.exp(rng.uniform(math.log(0.1), math.log(3.0),
                                                 size=(int(bad.sum()), n))), axis=1)
        gaps = np.diff(bs, axis=1)
    ms = rng.uniform(0.1, 10.0, size=(samples, n))
    b1 = bs[:, :1]
    lhs = -R / (32.0 * b1[:, 0] ** 4)
    upper = bs[:, 1:]
    rhs = np.sum(ms[:, 1:] * upper ** 2 * (upper ** 2 - b1 ** 2)
                 / np.abs(b1 ** 2 - upper ** 2) ** 3, axis=1)
    sign_certified = bool(np.all(lhs < 0.0) and np.all(rhs > 0.0))
    min_residual = float(np.min(np.abs(lhs - rhs)))
    return ParabolicCertificate(n, samples, float(R), seed,
                                collinearity_forced, min_imag,
                                sign_certified, min_residual)


# ---------------------------------------------------------------------------
# closed-form orbits
# ---------------------------------------------------------------------------

def re_trajectory(family: REFamily, t_grid) -> Trajectory:
    """Closed-form rigid orbit of a verified family sampled on t_grid
    (strictly increasing times): rotation z e^{-it/2} for elliptic
    families, translation w e^{-t/2} for hyperbolic ones, each with the
    matching velocities, packaged so drift and defect checks apply."""
    if not family.verified:
        raise ValueError(
            "re_trajectory needs a solver-verified family (residual norm "
            f"{family.residual_norm:.3e} exceeds {RE_VERIFY_TOL:g})")
    times = [float(t) for t in t_grid]
    if not times:
        raise ValueError("t_grid must contain at least one time")
    ctx = CurvatureContext(family.R)
    states = []
    if family.kind is REClass.ELLIPTIC:
        for t in times:
            ph = cmath.exp(-0.5j * t)
            bodies = [Body(m, DiskPoint(z * ph), -0.5j * z * ph)
                      for m, z in zip(family.masses, family.positions)]
            states.append(Configuration(ctx, Chart.DISK, bodies))
    else:
        for t in times:
            fac = math.exp(-0.5 * t)
            bodies = [Body(m, HalfPlanePoint(w * fac), -0.5 * w * fac)
                      for m, w in zip(family.masses, family.positions)]
            states.append(Configuration(ctx, Chart.HALFPLANE, bodies))
    return Trajectory.from_states(times, states)
