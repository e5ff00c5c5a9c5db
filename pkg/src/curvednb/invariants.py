"""The four first integrals — energy and the three angular-momentum
components — evaluated natively in each chart.

Each chart has its own closed-form expressions; none of the evaluators
converts to another chart first.  That the three agree on identical
physical states is the equivalence of the three formulations, and tests
treat it as such rather than as a tautology.

On the hyperboloid:

    h  = (1/2) sum m_j (Qd_j . Qd_j) - U,          (Lorentz product)
    c1 = sum m_j (y_j zd_j - z_j yd_j),
    c2 = sum m_j (z_j xd_j - x_j zd_j),
    c3 = sum m_j (y_j xd_j - x_j yd_j).

On the disk the momenta are complex-looking sums that are in fact real;
the evaluator computes them as written and discards imaginary parts only
after checking they sit below 1e-10:

    c1 = sum i m R^3/(R^2-|z|^2)^2 [R^2(zd - conj(zd)) + zd conj(z)^2 - conj(zd) z^2],
    c2 = sum   m R^3/(R^2-|z|^2)^2 [R^2(zd + conj(zd)) - zd conj(z)^2 - conj(zd) z^2],
    c3 = sum 2i m R^4/(R^2-|z|^2)^2 (conj(z) zd - z conj(zd)),

with h = (1/2) sum m lambda |zd|^2 - U.  On the half plane, with
w = x + iy and wd = a + ib, the equivalent real forms are

    c1 = sum m R (-R^2 a + a(x^2-y^2) + 2bxy) / (2y^2),
    c2 = -sum m R^2 (a x + b y) / y^2,
    c3 = sum m R (-R^2 a - a(x^2-y^2) - 2bxy) / (2y^2),

and h = (1/2) sum m (R/y)^2 |wd|^2 - U.  All four values agree across
charts for the same physical state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Configuration, potential, potential_disk, potential_halfplane
from .geometry import (
    Chart,
    DiskPoint,
    HalfPlanePoint,
    conformal_factor_disk,
    conformal_factor_halfplane,
)

# Imaginary residue allowed in the disk momentum sums before taking Re.
_IMAG_TOL = 1e-10

# Relative-drift denominators are floored here so that integrals which are
# structurally zero (symmetric states) do not blow the ratio up.
DRIFT_FLOOR = 1e-6


@dataclass(frozen=True)
class FirstIntegrals:
    """Energy h and angular momentum components c1, c2, c3."""

    h: float
    c1: float
    c2: float
    c3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.h, self.c1, self.c2, self.c3])


def _require_chart(cfg: Configuration, chart: Chart, op: str) -> None:
    if cfg.chart != chart:
        raise ValueError(f"{op} needs a {chart.value} configuration, got {cfg.chart.value}")


def first_integrals_hyperboloid(cfg: Configuration) -> FirstIntegrals:
    _require_chart(cfg, Chart.HYPERBOLOID, "first_integrals_hyperboloid")
    qs = cfg.positions_raw()
    vs = cfg.velocities_raw()
    ms = cfg.masses()
    h = 0.0
    c1 = c2 = c3 = 0.0
    for m, q, v in zip(ms, qs, vs):
        h += 0.5 * m * (v[0] * v[0] + v[1] * v[1] - v[2] * v[2])
        c1 += m * (q[1] * v[2] - q[2] * v[1])
        c2 += m * (q[2] * v[0] - q[0] * v[2])
        c3 += m * (q[1] * v[0] - q[0] * v[1])
    return FirstIntegrals(h=h - potential(cfg), c1=c1, c2=c2, c3=c3)


def disk_momentum_sums(cfg: Configuration) -> tuple:
    """The three disk momentum sums as written, before discarding Im."""
    _require_chart(cfg, Chart.DISK, "disk_momentum_sums")
    R = cfg.ctx.R
    zs = cfg.positions_raw()
    vs = cfg.velocities_raw()
    ms = cfg.masses()
    c1 = c2 = c3 = 0j
    for m, z, v in zip(ms, zs, vs):
        s = (R * R - (z.real * z.real + z.imag * z.imag)) ** 2
        vb = v.conjugate()
        zb = z.conjugate()
        c1 += 1j * m * R ** 3 / s * (R * R * (v - vb) + v * zb * zb - vb * z * z)
        c2 += m * R ** 3 / s * (R * R * (v + vb) - v * zb * zb - vb * z * z)
        c3 += 2j * m * R ** 4 / s * (zb * v - z * vb)
    return c1, c2, c3


def first_integrals_disk(cfg: Configuration) -> FirstIntegrals:
    c1, c2, c3 = disk_momentum_sums(cfg)
    residue = max(abs(c1.imag), abs(c2.imag), abs(c3.imag))
    if residue > _IMAG_TOL:
        raise ValueError(f"disk momentum sums developed imaginary residue {residue:.3e}")
    R = cfg.ctx.R
    h = 0.0
    for m, z, v in zip(cfg.masses(), cfg.positions_raw(), cfg.velocities_raw()):
        lam = conformal_factor_disk(cfg.ctx, DiskPoint(z))
        h += 0.5 * m * lam * (v.real * v.real + v.imag * v.imag)
    return FirstIntegrals(h=h - potential_disk(cfg), c1=c1.real, c2=c2.real, c3=c3.real)


def first_integrals_halfplane(cfg: Configuration) -> FirstIntegrals:
    _require_chart(cfg, Chart.HALFPLANE, "first_integrals_halfplane")
    R = cfg.ctx.R
    h = 0.0
    c1 = c2 = c3 = 0.0
    for m, w, v in zip(cfg.masses(), cfg.positions_raw(), cfg.velocities_raw()):
        x, y = w.real, w.imag
        a, b = v.real, v.imag
        mu = conformal_factor_halfplane(cfg.ctx, HalfPlanePoint(w))
        h += 0.5 * m * mu * (a * a + b * b)
        c1 += m * R * (-R * R * a + a * (x * x - y * y) + 2 * b * x * y) / (2 * y * y)
        c2 += -m * R * R * (a * x + b * y) / (y * y)
        c3 += m * R * (-R * R * a - a * (x * x - y * y) - 2 * b * x * y) / (2 * y * y)
    return FirstIntegrals(h=h - potential_halfplane(cfg), c1=c1, c2=c2, c3=c3)


def first_integrals(cfg: Configuration) -> FirstIntegrals:
    """Chart-dispatching evaluator."""
    if cfg.chart == Chart.DISK:
        return first_integrals_disk(cfg)
    if cfg.chart == Chart.HALFPLANE:
        return first_integrals_halfplane(cfg)
    return first_integrals_hyperboloid(cfg)


def drift_report(traj) -> dict:
    """Max relative drift of each recorded integral along a trajectory.

    For each of h, c1, c2, c3 this is max_t |f(t) - f(0)| / max(|f(0)|,
    DRIFT_FLOOR); the floor keeps structurally-zero integrals from
    dividing by ~0.
    """
    values = np.asarray(traj.integrals, dtype=float)
    if values.ndim != 2 or values.shape[1] != 4:
        raise ValueError("trajectory carries no (n, 4) integral record")
    names = ("h", "c1", "c2", "c3")
    out = {}
    for i, name in enumerate(names):
        f0 = values[0, i]
        denom = max(abs(f0), DRIFT_FLOOR)
        out[name] = float(np.max(np.abs(values[:, i] - f0)) / denom)
    return out
