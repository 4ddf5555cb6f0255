"""Superposed repulsive potential fields over a 2D workspace.

Every moving entity carries an isotropic inverse-square field: obstacles repel
with a plateau inside their safe distance, and the swarm's virtual center
repels so that members keep formation without crowding it. Intensities add.
All positions and radii are in meters, speeds in m/s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

# Radius below which the swarm field stops growing. The virtual center is a
# point source, so without a clamp the intensity diverges as 1/r^2.
CORE_CLAMP_RADIUS = 1.0  # m


def _as_point_array(q) -> Tuple[np.ndarray, bool]:
    """Return (points (N,2) float64, was_single) for a (2,) or (N,2) input."""
    arr = np.asarray(q, dtype=np.float64)
    if arr.ndim == 1:
        if arr.shape != (2,):
            raise ValueError(f"expected a 2D point, got shape {arr.shape}")
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected points of shape (N, 2), got {arr.shape}")
    return arr, False


@dataclass(frozen=True)
class ObstacleSpec:
    """A moving obstacle and the footprint of its repulsive field."""

    position: np.ndarray          # (2,) m
    velocity: np.ndarray          # (2,) m/s
    influence_radius: float = 150.0   # m, field is zero beyond this
    safe_distance: float = 40.0       # m, plateau radius (standoff distance)

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=np.float64))
        if self.position.shape != (2,) or self.velocity.shape != (2,):
            raise ValueError("position and velocity must be 2-vectors")
        if not (0.0 < self.safe_distance < self.influence_radius):
            raise ValueError("need 0 < safe_distance < influence_radius")
        if not np.all(np.isfinite(self.position)) or not np.all(np.isfinite(self.velocity)):
            raise ValueError("obstacle position/velocity must be finite")

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.velocity))


@dataclass(frozen=True)
class SwarmFieldSpec:
    """The swarm's own repulsive field, centered on the virtual center."""

    center: np.ndarray            # (2,) m
    speed: float                  # m/s, swarm cruise speed (field strength)
    influence_radius: float = 150.0   # m

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        if self.center.shape != (2,):
            raise ValueError("center must be a 2-vector")
        if self.speed < 0.0:
            raise ValueError("speed must be non-negative")
        if self.influence_radius <= 0.0:
            raise ValueError("influence_radius must be positive")


@dataclass(frozen=True)
class PotentialField:
    """Superposition of the swarm field and any number of obstacle fields."""

    swarm: SwarmFieldSpec
    obstacles: Tuple[ObstacleSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))


def phi_obstacle(q, obstacle: ObstacleSpec, swarm_speed: float):
    """Intensity of one obstacle's field at point(s) q.

    Piecewise in the distance r = |q - p_o|, with v = max(v_o, v_s):
    v / d_safe^2 for r <= d_safe, v / r^2 for d_safe < r <= R_o, 0 beyond.

    Parameters
    ----------
    q : array_like, shape (2,) or (N, 2)
        Query point(s), meters.
    obstacle : ObstacleSpec
    swarm_speed : float
        Swarm cruise speed v_s; the numerator is max(obstacle.speed, v_s).

    Returns
    -------
    float or ndarray, shape (N,)
    """
    pts, single = _as_point_array(q)
    v = max(obstacle.speed, float(swarm_speed))
    r = np.linalg.norm(pts - obstacle.position, axis=1)
    out = np.zeros(len(pts))
    inner = r <= obstacle.safe_distance
    mid = (~inner) & (r <= obstacle.influence_radius)
    out[inner] = v / obstacle.safe_distance**2
    out[mid] = v / r[mid] ** 2
    return float(out[0]) if single else out


def phi_swarm(q, spec: SwarmFieldSpec):
    """Intensity of the swarm field at point(s) q.

    v_s / r^2 out to the influence radius, zero beyond, with the intensity
    clamped to v_s / CORE_CLAMP_RADIUS^2 for r < CORE_CLAMP_RADIUS.
    """
    pts, single = _as_point_array(q)
    r = np.linalg.norm(pts - spec.center, axis=1)
    out = np.zeros(len(pts))
    core = r < CORE_CLAMP_RADIUS
    mid = (~core) & (r <= spec.influence_radius)
    out[core] = spec.speed / CORE_CLAMP_RADIUS**2
    out[mid] = spec.speed / r[mid] ** 2
    return float(out[0]) if single else out


def phi_total(q, fld: PotentialField):
    """Total field intensity: swarm field plus all obstacle fields."""
    pts, single = _as_point_array(q)
    out = phi_swarm(pts, fld.swarm)
    for ob in fld.obstacles:
        out = out + phi_obstacle(pts, ob, fld.swarm.speed)
    return float(out[0]) if single else out


def grad_phi(q, fld: PotentialField):
    """Analytic gradient of the total field at point(s) q.

    Each source contributes -2 v (q - p) / r^4 on its inverse-square branch
    and zero on its plateau and beyond its influence radius. At an exact
    branch boundary the returned value is the one belonging to the branch
    the intensity formula assigns that radius to (boundaries are closed the
    same way as in phi_obstacle / phi_swarm).

    Returns
    -------
    ndarray, shape (2,) or (N, 2)
    """
    pts, single = _as_point_array(q)
    out = np.zeros_like(pts)

    d = pts - fld.swarm.center
    r = np.linalg.norm(d, axis=1)
    mid = (r >= CORE_CLAMP_RADIUS) & (r <= fld.swarm.influence_radius)
    if np.any(mid):
        out[mid] += -2.0 * fld.swarm.speed * d[mid] / r[mid, None] ** 4

    for ob in fld.obstacles:
        v = max(ob.speed, fld.swarm.speed)
        d = pts - ob.position
        r = np.linalg.norm(d, axis=1)
        mid = (r > ob.safe_distance) & (r <= ob.influence_radius)
        if np.any(mid):
            out[mid] += -2.0 * v * d[mid] / r[mid, None] ** 4

    return out[0] if single else out


def grad_phi_timed(points, times, fld: PotentialField) -> np.ndarray:
    """Gradient of the field with each obstacle advanced to the query time.

    Point i is evaluated against every obstacle at position + velocity *
    times[i]; planners use this to score future waypoints against the
    obstacles they will actually meet. The swarm term stays at its current
    center (the center drifts with the swarm, so its offset relative to the
    members barely changes over a planning horizon).

    Parameters
    ----------
    points : array_like, shape (N, 2)
        Query points, meters.
    times : array_like, shape (N,)
        Time offset of each query point, seconds.
    fld : PotentialField

    Returns
    -------
    ndarray, shape (N, 2)
    """
    pts, single = _as_point_array(points)
    t = np.asarray(times, dtype=np.float64)
    if single or t.shape != (len(pts),):
        raise ValueError("grad_phi_timed needs (N, 2) points and (N,) times")
    out = np.zeros_like(pts)

    d = pts - fld.swarm.center
    r = np.linalg.norm(d, axis=1)
    mid = (r >= CORE_CLAMP_RADIUS) & (r <= fld.swarm.influence_radius)
    if np.any(mid):
        out[mid] += -2.0 * fld.swarm.speed * d[mid] / r[mid, None] ** 4

    for ob in fld.obstacles:
        v = max(ob.speed, fld.swarm.speed)
        d = pts - (ob.position + t[:, None] * ob.velocity)
        r = np.linalg.norm(d, axis=1)
        mid = (r > ob.safe_distance) & (r <= ob.influence_radius)
        if np.any(mid):
            out[mid] += -2.0 * v * d[mid] / r[mid, None] ** 4

    return out
