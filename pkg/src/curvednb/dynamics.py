"""Force function, gradients, and equations of motion in all three charts.

The mutual potential is the cotangent of hyperbolic distance,

    U_R = (1/R) * sum_{k<j} m_k m_j coth(d_kj / R),

which each chart evaluates through its own closed form built on the pair
quantities

    Theta_2(k,j) = 4 R^2 |z_k - z_j|^2 |R^2 - z_k conj(z_j)|^2      (disk)
    Theta_3(k,j) = 4 |w_k - w_j|^2 |w_k - conj(w_j)|^2              (half plane)

both of which vanish exactly at collisions and equal the expanded
bracket-difference forms

    [2(z_k conj(z_j) + z_j conj(z_k))R^2 - (|z_k|^2+R^2)(|z_j|^2+R^2)]^2
        - (R^2-|z_k|^2)^2 (R^2-|z_j|^2)^2,
    [(conj(w_k)+w_k)(conj(w_j)+w_j) - 2(|w_k|^2+|w_j|^2)]^2
        - (conj(w_k)-w_k)^2 (conj(w_j)-w_j)^2.

The product forms are used internally because they are manifestly
nonnegative (no cancellation near collision).

Useful identities: sinh(d/R) = sqrt(Theta_2) / ((R^2-|z_k|^2)(R^2-|z_j|^2))
= sqrt(Theta_3) / (4 y_k y_j), and coth(d/R) = -N_2/sqrt(Theta_2)
= -N_3/sqrt(Theta_3) with N the bracketed numerators above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .geometry import (
    Chart,
    ChartPoint,
    CurvatureContext,
    chart_of,
    convert_point,
    geodesic_distance,
    transport_state,
    validate_point,
)

# Bodies closer than this fraction of R are treated as colliding.
COLLISION_DISTANCE_FACTOR = 1e-8

# sinh(d/R) threshold equivalent to the distance threshold above.
_SINH_COLLISION = math.sinh(COLLISION_DISTANCE_FACTOR)


@dataclass
class Body:
    """Point particle: mass, chart position, chart velocity.

    Velocity is a complex number in the conformal charts and a real
    3-vector on the hyperboloid.  mass == 0 is allowed only for bodies
    explicitly flagged restricted (massless probes); they feel the field
    of the others but exert none.
    """

    mass: float
    position: ChartPoint
    velocity: object
    restricted: bool = False

    def __post_init__(self):
        if self.restricted:
            if self.mass != 0:
                raise ValueError(
                    f"restricted bodies are massless probes; set mass = 0, got {self.mass}")
        elif not self.mass > 0:
            raise ValueError(f"body mass must be positive, got {self.mass} (flag restricted for 0)")


@dataclass
class Configuration:
    """Curvature context, chart tag, and an ordered body list (n >= 1)."""

    ctx: CurvatureContext
    chart: Chart
    bodies: list

    def __post_init__(self):
        if len(self.bodies) < 1:
            raise ValueError("a configuration needs at least one body")
        for b in self.bodies:
            if chart_of(b.position) != self.chart:
                raise ValueError(
                    f"body position chart {chart_of(b.position).value} != configuration chart {self.chart.value}"
                )

    @property
    def n(self) -> int:
        return len(self.bodies)

    def masses(self) -> list:
        return [b.mass for b in self.bodies]

    def positions_raw(self) -> list:
        """Raw position values: complex for disk/half-plane, 3-array otherwise."""
        if self.chart == Chart.DISK:
            return [b.position.z for b in self.bodies]
        if self.chart == Chart.HALFPLANE:
            return [b.position.w for b in self.bodies]
        return [b.position.triple() for b in self.bodies]

    def velocities_raw(self) -> list:
        if self.chart == Chart.HYPERBOLOID:
            return [np.asarray(b.velocity, dtype=float) for b in self.bodies]
        return [complex(b.velocity) for b in self.bodies]

    def validate(self, require_separation: bool = True) -> None:
        """Check chart membership of all bodies and (optionally) that no
        pair is inside the collision tolerance."""
        for b in self.bodies:
            validate_point(self.ctx, b.position)
        if require_separation and self.n > 1:
            metrics = singularity_proximity(self)
            if metrics.min_distance < COLLISION_DISTANCE_FACTOR * self.ctx.R:
                raise SingularityError(
                    f"bodies {metrics.min_pair} within collision tolerance "
                    f"(d = {metrics.min_distance:.3e})",
                    pair=metrics.min_pair,
                )


@dataclass
class SingularityMetrics:
    """Pairwise Theta values and geodesic distances, plus the minimum."""

    theta: dict
    distance: dict
    min_distance: float
    min_pair: tuple | None = None

    def min_theta(self) -> float:
        return min(self.theta.values()) if self.theta else math.inf


# ---------------------------------------------------------------------------
# pair quantities
# ---------------------------------------------------------------------------

def _theta_disk_raw(R: float, z_k: complex, z_j: complex) -> float:
    dz = z_k - z_j
    cross = R * R - z_k * z_j.conjugate()
    return 4 * R * R * (dz.real * dz.real + dz.imag * dz.imag) * (
        cross.real * cross.real + cross.imag * cross.imag
    )


def theta_disk(ctx: CurvatureContext, z_k: complex, z_j: complex) -> float:
    """Theta_2 for a disk pair; zero iff z_k == z_j."""
    return _theta_disk_raw(ctx.R, z_k, z_j)


def theta_halfplane(w_k: complex, w_j: complex) -> float:
    """Theta_3 for a half-plane pair; zero iff w_k == w_j.  R-free."""
    dw = w_k - w_j
    cr = w_k - w_j.conjugate()
    return 4 * (dw.real * dw.real + dw.imag * dw.imag) * (cr.real * cr.real + cr.imag * cr.imag)


def _check_chart(cfg: Configuration, chart: Chart, op: str) -> None:
    if cfg.chart != chart:
        raise ValueError(f"{op} needs a {chart.value}-chart configuration, got {cfg.chart.value}")


def _raise_collision(k: int, j: int, sinh_d: float):
    raise SingularityError(
        f"bodies ({k}, {j}) within collision tolerance (sinh(d/R) = {sinh_d:.3e})",
        pair=(k, j),
    )


# ---------------------------------------------------------------------------
# potential
# ---------------------------------------------------------------------------

def _coth_pair_disk(R: float, zk: complex, zj: complex, k: int, j: int) -> float:
    """coth(d_kj/R) from the disk closed form, with collision guard."""
    sk = R * R - (zk.real * zk.real + zk.imag * zk.imag)
    sj = R * R - (zj.real * zj.real + zj.imag * zj.imag)
    th = _theta_disk_raw(R, zk, zj)
    sqrt_th = math.sqrt(th)
    sinh_d = sqrt_th / (sk * sj)
    if sinh_d < _SINH_COLLISION:
        _raise_collision(k, j, sinh_d)
    N = 4 * (zk * zj.conjugate()).real * R * R - (
        (zk.real ** 2 + zk.imag ** 2) + R * R
    ) * ((zj.real ** 2 + zj.imag ** 2) + R * R)
    return -N / sqrt_th


def _coth_pair_halfplane(wk: complex, wj: complex, k: int, j: int) -> float:
    th = theta_halfplane(wk, wj)
    sqrt_th = math.sqrt(th)
    sinh_d = sqrt_th / (4 * wk.imag * wj.imag)
    if sinh_d < _SINH_COLLISION:
        _raise_collision(k, j, sinh_d)
    N = (wk.conjugate() + wk).real * (wj.conjugate() + wj).real - 2 * (
        (wk.real ** 2 + wk.imag ** 2) + (wj.real ** 2 + wj.imag ** 2)
    )
    return -N / sqrt_th


def potential_disk(cfg: Configuration) -> float:
    """U_R = (1/R) sum_{k<j} m_k m_j coth(d_kj/R), disk closed form.

    Diverges to +inf as any pair approaches collision; a pair inside the
    collision tolerance raises SingularityError naming it.
    """
    _check_chart(cfg, Chart.DISK, "potential_disk")
    R = cfg.ctx.R
    zs = cfg.positions_raw()
    ms = cfg.masses()
    tot = 0.0
    for k in range(cfg.n):
        for j in range(k + 1, cfg.n):
            tot += ms[k] * ms[j] * _coth_pair_disk(R, zs[k], zs[j], k, j)
    return tot / R


def potential_halfplane(cfg: Configuration) -> float:
    """Same cotangent potential through the half-plane closed form."""
    _check_chart(cfg, Chart.HALFPLANE, "potential_halfplane")
    R = cfg.ctx.R
    ws = cfg.positions_raw()
    ms = cfg.masses()
    tot = 0.0
    for k in range(cfg.n):
        for j in range(k + 1, cfg.n):
            tot += ms[k] * ms[j] * _coth_pair_halfplane(ws[k], ws[j], k, j)
    return tot / R


def potential(cfg: Configuration) -> float:
    """Chart-dispatching potential (hyperboloid evaluates sigma/sqrt(sigma^2-1))."""
    if cfg.chart == Chart.DISK:
        return potential_disk(cfg)
    if cfg.chart == Chart.HALFPLANE:
        return potential_halfplane(cfg)
    R = cfg.ctx.R
    qs = cfg.positions_raw()
    ms = cfg.masses()
    tot = 0.0
    for k in range(cfg.n):
        for j in range(k + 1, cfg.n):
            sig_m1, sig = _sigma_pair(R, qs[k], qs[j])
            s2m1 = sig_m1 * (sig + 1.0)
            sinh_d = math.sqrt(max(s2m1, 0.0))
            if sinh_d < _SINH_COLLISION:
                _raise_collision(k, j, sinh_d)
            tot += ms[k] * ms[j] * sig / sinh_d
    return tot / R


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

def _grad_pair_disk(R: float, zk: complex, zj: complex, k: int, j: int) -> complex:
    """Wirtinger pair term of the disk potential with the m_k m_j factor
    removed:  2 R (R^2-|z_k|^2)(R^2-|z_j|^2)^2 (z_j-z_k)(R^2 - z_k conj(z_j))
    / Theta_2^{3/2}."""
    sk = R * R - (zk.real * zk.real + zk.imag * zk.imag)
    sj = R * R - (zj.real * zj.real + zj.imag * zj.imag)
    th = _theta_disk_raw(R, zk, zj)
    sinh_d = math.sqrt(th) / (sk * sj)
    if sinh_d < _SINH_COLLISION:
        _raise_collision(k, j, sinh_d)
    P = sk * sj * sj * (zj - zk) * (R * R - zk * zj.conjugate())
    return 2 * R * P / th ** 1.5


def _grad_pair_halfplane(R: float, wk: complex, wj: complex, k: int, j: int) -> complex:
    """Wirtinger pair term of the half-plane potential, masses removed:
    (2/R)(conj(w_k)-w_k)(conj(w_j)-w_j)^2 (w_k-w_j)(w_k-conj(w_j))
    / Theta_3^{3/2}."""
    th = theta_halfplane(wk, wj)
    sinh_d = math.sqrt(th) / (4 * wk.imag * wj.imag)
    if sinh_d < _SINH_COLLISION:
        _raise_collision(k, j, sinh_d)
    num = (wk.conjugate() - wk) * (wj.conjugate() - wj) ** 2 * (wk - wj) * (wk - wj.conjugate())
    return (2 / R) * num / th ** 1.5


def grad_potential_disk(cfg: Configuration, k: int) -> complex:
    """dU_R/d conj(z_k).  For a restricted (massless) body this is exactly 0;
    use acceleration(), which works with the mass factored out."""
    _check_chart(cfg, Chart.DISK, "grad_potential_disk")
    R = cfg.ctx.R
    zs = cfg.positions_raw()
    ms = cfg.masses()
    acc = 0j
    for j in range(cfg.n):
        if j == k:
            continue
        acc += ms[j] * _grad_pair_disk(R, zs[k], zs[j], k, j)
    return ms[k] * acc


def grad_potential_halfplane(cfg: Configuration, k: int) -> complex:
    """dV_R/d conj(w_k) for the half-plane form of the same potential."""
    _check_chart(cfg, Chart.HALFPLANE, "grad_potential_halfplane")
    R = cfg.ctx.R
    ws = cfg.positions_raw()
    ms = cfg.masses()
    acc = 0j
    for j in range(cfg.n):
        if j == k:
            continue
        acc += ms[j] * _grad_pair_halfplane(R, ws[k], ws[j], k, j)
    return ms[k] * acc


# ---------------------------------------------------------------------------
# equations of motion, presented as accelerations
# ---------------------------------------------------------------------------

def _sigma_pair(R: float, qk: np.ndarray, qj: np.ndarray):
    """(sigma - 1, sigma) with sigma = -Q_k (.) Q_j / R^2 = cosh(d/R).

    sigma - 1 is computed from the Lorentz norm of the coordinate
    difference, (dQ (.) dQ) = 2 R^2 (sigma - 1), which does not cancel
    catastrophically for nearby points the way -Q_k (.) Q_j / R^2 - 1 does.
    """
    d = qk - qj
    norm = d[0] * d[0] + d[1] * d[1] - d[2] * d[2]
    sig_m1 = norm / (2 * R * R)
    return sig_m1, 1.0 + sig_m1


def _acc_disk_k(R: float, zs, vs, ms, k: int) -> complex:
    zk = zs[k]
    sk = R * R - (zk.real * zk.real + zk.imag * zk.imag)
    force = 0j
    for j in range(len(zs)):
        if j == k:
            continue
        force += ms[j] * _grad_pair_disk(R, zk, zs[j], k, j)
    # 2/lambda = (R^2 - |z_k|^2)^2 / (2 R^4)
    return -2 * zk.conjugate() * vs[k] * vs[k] / sk + (sk * sk / (2 * R ** 4)) * force


def _acc_halfplane_k(R: float, ws, vs, ms, k: int) -> complex:
    wk = ws[k]
    force = 0j
    for j in range(len(ws)):
        if j == k:
            continue
        force += ms[j] * _grad_pair_halfplane(R, wk, ws[j], k, j)
    dk = wk - wk.conjugate()
    return 2 * vs[k] * vs[k] / dk - dk * dk / (2 * R * R) * force


def _acc_hyperboloid_k(R: float, qs, vs, ms, k: int) -> np.ndarray:
    qk = qs[k]
    grav = np.zeros(3)
    for j in range(len(qs)):
        if j == k:
            continue
        sig_m1, sig = _sigma_pair(R, qk, qs[j])
        s2m1 = sig_m1 * (sig + 1.0)
        sinh_d = math.sqrt(max(s2m1, 0.0))
        if sinh_d < _SINH_COLLISION:
            _raise_collision(k, j, sinh_d)
        grav += ms[j] * (qs[j] - sig * qk) / (R ** 3 * s2m1 ** 1.5)
    v = vs[k]
    # kappa = -1/R^2; the constraint term is -kappa (V (.) V) Q.  V (.) V is
    # evaluated in constraint-reduced form: substituting z^2 = R^2 + x^2 + y^2
    # and the tangency relation z vz = x vx + y vy into vx^2 + vy^2 - vz^2
    # gives (R^2 (vx^2 + vy^2) + (y vx - x vy)^2) / z^2, a sum of positive
    # terms.  The direct difference of squares loses every significant digit
    # far out on the sheet, where the squares dwarf their difference.
    vv = (R * R * (v[0] * v[0] + v[1] * v[1])
          + (qk[1] * v[0] - qk[0] * v[1]) ** 2) / (qk[2] * qk[2])
    return grav + (vv / (R * R)) * qk


def acceleration(cfg: Configuration, k: int):
    """Acceleration of body k under the chart's equations of motion.

    disk:        zdd_k = -2 conj(z_k) zd_k^2/(R^2-|z_k|^2)
                          + (2/(m_k lambda_k)) dU_R/d conj(z_k)
    half plane:  wdd_k = 2 wd_k^2/(w_k - conj(w_k))
                          - ((w_k-conj(w_k))^2/(2 R^2 m_k)) dV_R/d conj(w_k)
    hyperboloid: Qdd_k = sum_j m_j (Q_j - sigma Q_k)/(R^3 (sigma^2-1)^{3/2})
                          - kappa (Qd_k (.) Qd_k) Q_k

    The body's own mass cancels between the left-hand side and the
    gradient, so restricted (massless) bodies are supported directly.
    A single body moves freely along its geodesic (the pure quadratic
    velocity term).
    """
    ms = cfg.masses()
    vs = cfg.velocities_raw()
    ps = cfg.positions_raw()
    R = cfg.ctx.R
    if cfg.chart == Chart.DISK:
        return _acc_disk_k(R, ps, vs, ms, k)
    if cfg.chart == Chart.HALFPLANE:
        return _acc_halfplane_k(R, ps, vs, ms, k)
    return _acc_hyperboloid_k(R, ps, vs, ms, k)


def accelerations(cfg: Configuration) -> list:
    """Accelerations of every body (shared pair scan, fixed index order)."""
    return [acceleration(cfg, k) for k in range(cfg.n)]


# ---------------------------------------------------------------------------
# collision metrics
# ---------------------------------------------------------------------------

def singularity_proximity(cfg: Configuration) -> SingularityMetrics:
    """All pairwise Theta values and geodesic distances.

    Never raises: at a collision the Theta and distance are exactly 0.
    For hyperboloid configurations the Theta reported is Theta_2 of the
    stereographic disk images (the hyperboloid has no native Theta form).
    """
    ctx = cfg.ctx
    ps = [b.position for b in cfg.bodies]
    if cfg.chart == Chart.HYPERBOLOID:
        disk_pts = [convert_point(ctx, p, Chart.DISK) for p in ps]
        raw = [p.z for p in disk_pts]
        theta_fn = lambda a, b: theta_disk(ctx, a, b)
    elif cfg.chart == Chart.DISK:
        raw = [p.z for p in ps]
        theta_fn = lambda a, b: theta_disk(ctx, a, b)
    else:
        raw = [p.w for p in ps]
        theta_fn = theta_halfplane

    theta = {}
    dist = {}
    min_d = math.inf
    min_pair = None
    for k in range(cfg.n):
        for j in range(k + 1, cfg.n):
            theta[(k, j)] = theta_fn(raw[k], raw[j])
            if raw[k] == raw[j]:
                d = 0.0
            else:
                d = geodesic_distance(ctx, ps[k], ps[j])
            dist[(k, j)] = d
            if d < min_d:
                min_d = d
                min_pair = (k, j)
    if cfg.n == 1:
        min_d = math.inf
    return SingularityMetrics(theta=theta, distance=dist, min_distance=min_d, min_pair=min_pair)


def transport_configuration(cfg: Configuration, chart: Chart) -> Configuration:
    """Rebuild the configuration in another chart, transporting every
    body's position and velocity through the shared disk route."""
    if cfg.chart == chart:
        return cfg
    bodies = [
        Body(b.mass, *transport_state(cfg.ctx, b.position, b.velocity, chart),
             restricted=b.restricted)
        for b in cfg.bodies
    ]
    return Configuration(cfg.ctx, chart, bodies)
