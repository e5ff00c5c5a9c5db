"""Shared utilities for the test suite: random state builders and
finite-difference probes."""

from __future__ import annotations

import numpy as np

from curvednb import (
    Body,
    Chart,
    Configuration,
    CurvatureContext,
    DiskPoint,
    geodesic_distance,
    transport_configuration,
)


def random_disk_positions(rng: np.random.Generator, R: float, n: int,
                          r_frac: float = 0.65, min_gap_frac: float = 0.08):
    """n well-separated points in the disk of radius R, area-uniform up to
    r_frac * R and at pairwise euclidean distance >= min_gap_frac * R."""
    pts: list[complex] = []
    while len(pts) < n:
        radius = r_frac * R * np.sqrt(rng.uniform(0.002, 1.0))
        angle = rng.uniform(0.0, 2.0 * np.pi)
        z = radius * np.exp(1j * angle)
        if all(abs(z - other) >= min_gap_frac * R for other in pts):
            pts.append(complex(z))
    return pts


def random_disk_config(rng: np.random.Generator, R: float, n: int,
                       vmax: float = 0.35, mass_range=(0.3, 2.5),
                       r_frac: float = 0.65) -> Configuration:
    """Random n-body state in the disk chart with bounded speeds."""
    ctx = CurvatureContext(R)
    zs = random_disk_positions(rng, R, n, r_frac=r_frac)
    bodies = []
    for z in zs:
        mass = float(rng.uniform(*mass_range))
        vel = complex(rng.normal(), rng.normal()) * vmax / np.sqrt(2.0)
        bodies.append(Body(mass, DiskPoint(z), vel))
    return Configuration(ctx, Chart.DISK, bodies)


def fd_wirtinger(f, z: complex, h: float = 1e-6) -> complex:
    """Central-difference d f / d conj(z) = (df/dx + i df/dy) / 2 of a real
    scalar field f at the complex point z."""
    fx = (f(z + h) - f(z - h)) / (2.0 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2.0 * h)
    return 0.5 * (fx + 1j * fy)


def max_position_gap(cfg_a: Configuration, cfg_b: Configuration) -> float:
    """Largest geodesic distance between corresponding bodies of two
    configurations (charts may differ)."""
    assert cfg_a.n == cfg_b.n
    return max(
        geodesic_distance(cfg_a.ctx, ba.position, bb.position)
        for ba, bb in zip(cfg_a.bodies, cfg_b.bodies)
    )


def in_all_charts(cfg: Configuration):
    """The same state expressed in each of the three charts."""
    return [transport_configuration(cfg, chart)
            for chart in (Chart.DISK, Chart.HALFPLANE, Chart.HYPERBOLOID)]
