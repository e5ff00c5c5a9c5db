"""Adaptive time integration of the chart equations of motion.

The stepper is an explicit embedded Runge-Kutta pair (Dormand-Prince
5(4) coefficients) over the first-order system (positions, velocities),
with a PI-free standard step controller:

    h_new = h * clamp(0.9 * err^(-1/5), 0.2, 5).

A symplectic method is deliberately not used: the equations arrive in
second-order non-separable chart form, and the conserved quantities of
the problem (energy and the three momentum components) are recorded at
every accepted step instead, so drift is measured rather than assumed.

Event handling: a step whose stages or endpoint cross the collision
tolerance or the escape margin (a body's disk image within a fixed
tiny fraction of R of the rim, i.e. roughly 28 curvature radii from
the chart center) is not accepted at full size; the crossing is
localized by bisection on the step length (to the event tolerance)
and the trajectory terminates with reason "collision approach" or
"boundary escape", recording the offending pair or body.  Otherwise
integration runs to t_end and the reason is "completed".

On the hyperboloid the constraint Q . Q = -R^2 (Lorentz product) is
restored after every accepted step by radial renormalization plus
tangent projection of the velocity; the applied correction magnitudes
are recorded on the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    Body,
    COLLISION_DISTANCE_FACTOR,
    Configuration,
    _acc_disk_k,
    _acc_halfplane_k,
    _acc_hyperboloid_k,
    singularity_proximity,
)
from .errors import BoundaryEscapeError, SingularityError
from .geometry import Chart, DiskPoint, HalfPlanePoint, HyperboloidPoint
from .invariants import first_integrals

TERM_COMPLETED = "completed"
TERM_COLLISION = "collision approach"
TERM_ESCAPE = "boundary escape"

# A body whose stereographic disk image comes within this fraction of R of
# the rim is declared escaped.  The matching geodesic distance from the
# chart center is about 28 R, where every pairwise interaction term is
# below double-precision resolution of its asymptote and disk coordinates
# stop resolving the motion (the rim gap is a few hundred ulps of R).
ESCAPE_MARGIN_FACTOR = 1e-12

# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.1
    min_step: float = 1e-13
    event_tol: float = 1e-10
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.min_step <= self.max_step):
            raise ValueError("need 0 < min_step <= max_step")
        if self.event_tol <= 0:
            raise ValueError("event tolerance must be positive")


@dataclass
class Trajectory:
    """Accepted-step record of an integration (or a sampled candidate path).

    times strictly increase (decrease for backward runs); states are full
    Configuration snapshots; integrals holds (h, c1, c2, c3) rows aligned
    with times; corrections holds the hyperboloid constraint-projection
    magnitude applied at each step (zeros on conformal charts).
    """

    times: np.ndarray
    states: list
    integrals: np.ndarray
    termination: str = TERM_COMPLETED
    corrections: np.ndarray = field(default=None)
    event_info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("times and states length mismatch")
        if len(self.times) >= 2:
            d = np.diff(self.times)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ValueError("times must be strictly monotone")
        chart = self.states[0].chart
        for s in self.states:
            if s.chart != chart:
                raise ValueError("states switch charts mid-trajectory")
        if self.corrections is None:
            self.corrections = np.zeros(len(self.times))
        self.integrals = np.asarray(self.integrals, dtype=float)

    @property
    def chart(self) -> Chart:
        return self.states[0].chart

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> Configuration:
        return self.states[-1]

    @classmethod
    def from_states(cls, times, states, termination: str = TERM_COMPLETED) -> "Trajectory":
        """Wrap an externally generated path (e.g. a closed-form candidate
        solution sampled on a grid) so defect() and drift_report() apply."""
        integrals = np.array([first_integrals(s).as_array() for s in states])
        return cls(times=np.asarray(times, dtype=float), states=list(states),
                   integrals=integrals, termination=termination)


# ---------------------------------------------------------------------------
# state packing
# ---------------------------------------------------------------------------

def _pack(cfg: Configuration) -> np.ndarray:
    if cfg.chart == Chart.HYPERBOLOID:
        rows = []
        for b in cfg.bodies:
            rows.extend(b.position.triple())
            rows.extend(np.asarray(b.velocity, dtype=float))
        return np.array(rows, dtype=float)
    rows = []
    for b in cfg.bodies:
        p = b.position.z if cfg.chart == Chart.DISK else b.position.w
        v = complex(b.velocity)
        rows.extend((p.real, p.imag, v.real, v.imag))
    return np.array(rows, dtype=float)


def _unpack_conformal(y: np.ndarray):
    ps = y[0::4] + 1j * y[1::4]
    vs = y[2::4] + 1j * y[3::4]
    return list(ps), list(vs)


def _unpack_hyperboloid(y: np.ndarray, n: int):
    qs = [y[6 * k: 6 * k + 3] for k in range(n)]
    vs = [y[6 * k + 3: 6 * k + 6] for k in range(n)]
    return qs, vs


def _to_configuration(template: Configuration, y: np.ndarray) -> Configuration:
    ctx, chart = template.ctx, template.chart
    bodies = []
    if chart == Chart.HYPERBOLOID:
        qs, vs = _unpack_hyperboloid(y, template.n)
        for b, q, v in zip(template.bodies, qs, vs):
            bodies.append(Body(b.mass, HyperboloidPoint(q[0], q[1], q[2]), v.copy(),
                               restricted=b.restricted))
    else:
        ps, vs = _unpack_conformal(y)
        point = DiskPoint if chart == Chart.DISK else HalfPlanePoint
        for b, p, v in zip(template.bodies, ps, vs):
            bodies.append(Body(b.mass, point(p), v, restricted=b.restricted))
    return Configuration(ctx, chart, bodies)


def _domain_check(chart: Chart, R: float, y: np.ndarray, n: int) -> None:
    """Raise BoundaryEscapeError if the packed state left its chart."""
    if not np.all(np.isfinite(y)):
        raise BoundaryEscapeError("state left the chart (non-finite coordinates)")
    if chart == Chart.DISK:
        ps = y[0::4] + 1j * y[1::4]
        if np.any(np.abs(ps) >= R):
            raise BoundaryEscapeError("a body reached the disk boundary")
    elif chart == Chart.HALFPLANE:
        if np.any(y[1::4] <= 0):
            raise BoundaryEscapeError("a body reached the real axis")
    else:
        for k in range(n):
            if y[6 * k + 2] <= 0:
                raise BoundaryEscapeError("a body left the upper hyperboloid sheet")


def _body_margins(chart: Chart, R: float, y: np.ndarray, n: int) -> np.ndarray:
    """Per-body distance of the stereographic disk image from the rim.

    Positive inside the chart, negative (or -inf) outside; continuous along
    a step.  Measuring every chart through its disk image gives the same
    escape behaviour everywhere: margin = eps * R corresponds to a geodesic
    distance of about R * log(4 / eps) from the chart center, whether the
    body is nearing the disk rim, sliding toward the half-plane axis (or out
    to its point at infinity), or running up the hyperboloid sheet.
    """
    out = np.full(n, -math.inf)
    if chart == Chart.DISK:
        ps = y[0::4] + 1j * y[1::4]
        with np.errstate(invalid="ignore"):
            m = R - np.abs(ps)
        np.copyto(out, m, where=np.isfinite(m))
        return out
    if chart == Chart.HALFPLANE:
        ws = y[0::4] + 1j * y[1::4]
        with np.errstate(invalid="ignore", divide="ignore"):
            m = R - np.abs(R * (ws - 1j * R) / (ws + 1j * R))
        np.copyto(out, m, where=np.isfinite(m))
        return out
    for k in range(n):
        z = y[6 * k + 2]
        if not math.isfinite(z) or z <= 0:
            continue
        out[k] = R * (1.0 - math.sqrt(max(0.0, (z - R) / (z + R))))
    return out


def _boundary_margin(chart: Chart, R: float, y: np.ndarray, n: int) -> float:
    """Smallest per-body rim margin (positive inside, negative outside)."""
    if not np.all(np.isfinite(y)):
        return -math.inf
    return float(np.min(_body_margins(chart, R, y, n)))


def _make_rhs(cfg: Configuration):
    """First-order RHS closure on packed arrays (no Configuration churn)."""
    R = cfg.ctx.R
    ms = cfg.masses()
    n = cfg.n
    chart = cfg.chart

    if chart == Chart.HYPERBOLOID:
        def rhs(y: np.ndarray) -> np.ndarray:
            _domain_check(chart, R, y, n)
            qs, vs = _unpack_hyperboloid(y, n)
            out = np.empty_like(y)
            for k in range(n):
                out[6 * k: 6 * k + 3] = vs[k]
                out[6 * k + 3: 6 * k + 6] = _acc_hyperboloid_k(R, qs, vs, ms, k)
            return out
        return rhs

    kernel = _acc_disk_k if chart == Chart.DISK else _acc_halfplane_k

    def rhs(y: np.ndarray) -> np.ndarray:
        _domain_check(chart, R, y, n)
        ps, vs = _unpack_conformal(y)
        out = np.empty_like(y)
        for k in range(n):
            a = kernel(R, ps, vs, ms, k)
            out[4 * k] = vs[k].real
            out[4 * k + 1] = vs[k].imag
            out[4 * k + 2] = a.real
            out[4 * k + 3] = a.imag
        return out

    return rhs


def _renormalize_hyperboloid(R: float, y: np.ndarray, n: int) -> float:
    """Project the state back onto Q . Q = -R^2 with tangent velocities.

    The redundant coordinates are reconstructed from the others:
    z = sqrt(R^2 + x^2 + y^2) and (differentiating) vz = (x vx + y vy)/z.
    Both are cancellation-free sums of positive squares, so the projection
    stays accurate arbitrarily far out on the sheet, where rescaling by
    sqrt(z^2 - x^2 - y^2) would subtract away every significant digit.
    Returns the euclidean magnitude of the applied correction."""
    before = y.copy()
    for k in range(n):
        q = y[6 * k: 6 * k + 3]
        v = y[6 * k + 3: 6 * k + 6]
        q[2] = math.sqrt(R * R + q[0] * q[0] + q[1] * q[1])
        v[2] = (q[0] * v[0] + q[1] * v[1]) / q[2]
    return float(np.linalg.norm(y - before))


# ---------------------------------------------------------------------------
# the stepper
# ---------------------------------------------------------------------------

def _rk_step(rhs, y0: np.ndarray, h: float):
    """One Dormand-Prince step: returns (y5, err_vector)."""
    k = [rhs(y0)]
    for i in range(1, 7):
        acc = _A[i][0] * k[0]
        for j in range(1, i):
            if _A[i][j] != 0.0:
                acc = acc + _A[i][j] * k[j]
        k.append(rhs(y0 + h * acc))
    y5 = y0 + h * sum(b * ki for b, ki in zip(_B5, k) if b != 0.0)
    y4 = y0 + h * sum(b * ki for b, ki in zip(_B4, k) if b != 0.0)
    return y5, y5 - y4


def _error_norm(e: np.ndarray, y0: np.ndarray, y1: np.ndarray, settings: IntegratorSettings) -> float:
    sc = settings.abs_tol + settings.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(math.sqrt(np.mean((e / sc) ** 2)))


def _min_pair_distance(template: Configuration, y: np.ndarray) -> float:
    if template.n < 2:
        return math.inf
    return singularity_proximity(_to_configuration(template, y)).min_distance


def _closest_pair(template: Configuration, y: np.ndarray) -> tuple | None:
    if template.n < 2:
        return None
    return singularity_proximity(_to_configuration(template, y)).min_pair


def integrate(cfg: Configuration, settings: IntegratorSettings, t_end: float,
              t_eval=None) -> Trajectory:
    """Integrate the configuration from t = 0 to t_end (either sign).

    Records every accepted step; if t_eval sample times are given, steps
    are clamped so each of them lands exactly on an accepted step.
    Terminates early with "collision approach" when a pair closes below
    the collision tolerance (event_info carries the pair) and with
    "boundary escape" when a body's rim margin drops below
    ESCAPE_MARGIN_FACTOR * R (event_info carries the body index), in
    both cases localizing the event time by bisection.
    """
    if t_end == 0:
        raise ValueError("t_end must be nonzero")
    cfg.validate()
    direction = 1.0 if t_end > 0 else -1.0
    rhs = _make_rhs(cfg)
    n = cfg.n
    R = cfg.ctx.R
    chart = cfg.chart
    coll_threshold = COLLISION_DISTANCE_FACTOR * R

    # kept as a stack: the next pending sample time sits at the end
    eval_queue = []
    if t_eval is not None:
        eval_queue = sorted((float(t) for t in t_eval), reverse=(direction > 0))
        for t in eval_queue:
            if t * direction < 0 or abs(t) > abs(t_end):
                raise ValueError("t_eval times must lie between 0 and t_end")

    y = _pack(cfg)
    t = 0.0
    times = [0.0]
    states = [_to_configuration(cfg, y)]
    integrals = [first_integrals(states[0]).as_array()]
    corrections = [0.0]
    termination = TERM_COMPLETED
    event_info: dict = {}

    f0 = rhs(y)
    scale = np.linalg.norm(y) / max(np.linalg.norm(f0), 1e-8)
    h = direction * min(settings.max_step, max(settings.min_step, 1e-2 * min(scale, 1.0)))

    def locate_event(y0, h_fail, margin_fn, threshold):
        """Bisect the largest sub-step of h_fail keeping margin >= threshold."""
        lo, hi = 0.0, abs(h_fail)
        y_lo = y0
        for _ in range(200):
            if hi - lo < settings.event_tol:
                break
            mid = 0.5 * (lo + hi)
            try:
                y_mid, _ = _rk_step(rhs, y0, direction * mid)
                ok = margin_fn(y_mid) >= threshold
            except (SingularityError, BoundaryEscapeError, OverflowError, ZeroDivisionError):
                ok = False
            if ok:
                lo, y_lo = mid, y_mid
            else:
                hi = mid
        return lo, y_lo

    steps = 0
    rejections = 0
    while (t_end - t) * direction > 1e-15 * max(1.0, abs(t_end)):
        if steps >= settings.max_steps:
            raise RuntimeError(f"exceeded max_steps = {settings.max_steps}")
        steps += 1

        h = direction * min(abs(h), settings.max_step, abs(t_end - t))
        # clamp the step so the next pending sample time is hit exactly
        while eval_queue and (eval_queue[-1] - t) * direction <= 1e-14 * max(1.0, abs(t)):
            eval_queue.pop()
        if eval_queue:
            h = direction * min(abs(h), abs(eval_queue[-1] - t))

        failure = None
        try:
            y1, err_vec = _rk_step(rhs, y, h)
            err = _error_norm(err_vec, y, y1, settings)
        except (SingularityError, BoundaryEscapeError, OverflowError, ZeroDivisionError) as exc:
            failure = exc
            err = math.inf

        if err > 1.0:
            rejections += 1
            if abs(h) <= settings.min_step * 1.0001 or rejections > 400:
                # cannot shrink further: classify the obstruction
                if isinstance(failure, SingularityError) or _min_pair_distance(
                    cfg, y
                ) < 100 * coll_threshold:
                    termination = TERM_COLLISION
                    pair = getattr(failure, "pair", None) or _closest_pair(cfg, y)
                    event_info = {"pair": pair, "t": t}
                elif failure is not None or _boundary_margin(chart, R, y, n) < 1e-6 * R:
                    termination = TERM_ESCAPE
                    body = int(np.argmin(_body_margins(chart, R, y, n)))
                    event_info = {"body": body, "t": t}
                else:
                    raise RuntimeError(f"step size underflow at t = {t}") from failure
                break
            h = direction * max(settings.min_step, 0.5 * abs(h) if failure else
                                abs(h) * max(0.2, 0.9 * err ** -0.2))
            continue
        rejections = 0

        corr = 0.0
        if chart == Chart.HYPERBOLOID:
            corr = _renormalize_hyperboloid(R, y1, n)

        # endpoint event checks on the accepted candidate
        esc_threshold = ESCAPE_MARGIN_FACTOR * R
        margin = _boundary_margin(chart, R, y1, n)
        if margin <= esc_threshold:
            s, y_s = locate_event(
                y, h, lambda yy: _boundary_margin(chart, R, yy, n), esc_threshold
            )
            t = t + direction * s
            y = y_s
            termination = TERM_ESCAPE
            body = int(np.argmin(_body_margins(chart, R, y, n)))
            event_info = {"body": body, "t": t}
            if s > 0:
                times.append(t)
                states.append(_to_configuration(cfg, y))
                integrals.append(first_integrals(states[-1]).as_array())
                corrections.append(0.0)
            break
        if n >= 2:
            dmin = _min_pair_distance(cfg, y1)
            if dmin < coll_threshold:
                s, y_s = locate_event(
                    y, h, lambda yy: _min_pair_distance(cfg, yy), coll_threshold
                )
                t = t + direction * s
                y = y_s
                termination = TERM_COLLISION
                event_info = {"pair": _closest_pair(cfg, y), "t": t}
                if s > 0:
                    times.append(t)
                    states.append(_to_configuration(cfg, y))
                    integrals.append(first_integrals(states[-1]).as_array())
                    corrections.append(0.0)
                break

        t = t + h
        y = y1
        times.append(t)
        states.append(_to_configuration(cfg, y))
        integrals.append(first_integrals(states[-1]).as_array())
        corrections.append(corr)

        if err == 0.0:
            fac = 5.0
        else:
            fac = min(5.0, max(0.2, 0.9 * err ** -0.2))
        h = direction * min(settings.max_step, max(settings.min_step, abs(h) * fac))

    return Trajectory(
        times=np.array(times),
        states=states,
        integrals=np.array(integrals),
        termination=termination,
        corrections=np.array(corrections),
        event_info=event_info,
    )


# ---------------------------------------------------------------------------
# defect of a candidate path
# ---------------------------------------------------------------------------

def _fd_derivative(t0, t1, t2, f0, f1, f2):
    """Three-point Lagrange derivative at the middle node (nonuniform)."""
    return (
        f0 * (t1 - t2) / ((t0 - t1) * (t0 - t2))
        + f1 * (2 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2))
        + f2 * (t1 - t0) / ((t2 - t0) * (t2 - t1))
    )


def defect(cfg_path: Trajectory) -> float:
    """Maximum equations-of-motion residual along a sampled path.

    At every interior node the stored velocities are compared against the
    finite-difference derivative of the positions, and the acceleration
    field against the derivative of the velocities; the largest magnitude
    wins.  A path that genuinely solves the system scores at the
    finite-difference truncation level, a generic curve scores O(1)."""
    if cfg_path.n_samples < 3:
        raise ValueError("defect needs at least 3 samples")
    from .dynamics import accelerations  # local alias, avoids top clutter

    ts = cfg_path.times
    states = cfg_path.states
    hyper = cfg_path.chart == Chart.HYPERBOLOID

    def raw(i):
        c = states[i]
        return c.positions_raw(), c.velocities_raw()

    worst = 0.0
    for i in range(1, len(ts) - 1):
        p0, v0 = raw(i - 1)
        p1, v1 = raw(i)
        p2, v2 = raw(i + 1)
        acc = accelerations(states[i])
        for k in range(states[i].n):
            dp = _fd_derivative(ts[i - 1], ts[i], ts[i + 1], p0[k], p1[k], p2[k])
            dv = _fd_derivative(ts[i - 1], ts[i], ts[i + 1], v0[k], v1[k], v2[k])
            if hyper:
                worst = max(worst, float(np.max(np.abs(dp - v1[k]))))
                worst = max(worst, float(np.max(np.abs(dv - acc[k]))))
            else:
                worst = max(worst, abs(dp - v1[k]), abs(dv - acc[k]))
    return worst
