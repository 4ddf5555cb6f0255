"""Arc-length trajectory resampling and contour-cost scoring.

A trajectory is scored like an active contour: bending energy from discrete
second derivatives minus the squared field gradient along it, integrated over
arc length. The cost is lowest where the path is smooth and hugs the steep
edges of the potential field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import PotentialField, grad_phi


@dataclass(frozen=True)
class Trajectory:
    """Waypoints at uniform arc-length spacing along a path."""

    waypoints: np.ndarray  # (N, 2) m, N >= 2
    ds: float              # m, realized spacing between consecutive waypoints

    def __post_init__(self):
        object.__setattr__(self, "waypoints", np.asarray(self.waypoints, dtype=np.float64))
        if self.waypoints.ndim != 2 or self.waypoints.shape[1] != 2 or len(self.waypoints) < 2:
            raise ValueError("waypoints must have shape (N, 2) with N >= 2")
        if not self.ds > 0.0:
            raise ValueError("ds must be positive")

    def __len__(self) -> int:
        return len(self.waypoints)


def resample_uniform(points, ds: float) -> Trajectory:
    """Resample a polyline at (near-)uniform arc-length spacing.

    The number of segments is round(L / ds) (at least 1), so the realized
    spacing is L / round(L / ds); it lands within 10% of the requested ds
    once the path is a few ds long. Endpoints are preserved exactly and all
    output waypoints lie on the input polyline.

    Parameters
    ----------
    points : array_like, shape (M, 2)
        Polyline vertices, in order.
    ds : float
        Requested spacing, meters.

    Returns
    -------
    Trajectory

    Raises
    ------
    ValueError
        If ds is not positive or the polyline has zero length.
    """
    if not ds > 0.0:
        raise ValueError("ds must be positive")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("points must have shape (M, 2) with M >= 2")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    length = float(seg.sum())
    if length <= 0.0:
        raise ValueError("zero-length trajectory: all points coincide")

    n_seg = max(1, int(round(length / ds)))
    s_in = np.concatenate([[0.0], np.cumsum(seg)])
    s_out = np.linspace(0.0, length, n_seg + 1)
    out = np.column_stack([np.interp(s_out, s_in, pts[:, 0]),
                           np.interp(s_out, s_in, pts[:, 1])])
    out[0] = pts[0]
    out[-1] = pts[-1]
    return Trajectory(waypoints=out, ds=length / n_seg)


def second_differences(traj: Trajectory) -> np.ndarray:
    """Central second differences at the interior waypoints, shape (N-2, 2)."""
    w = traj.waypoints
    if len(w) < 3:
        raise ValueError("need at least 3 waypoints for second differences")
    return (w[:-2] - 2.0 * w[1:-1] + w[2:]) / traj.ds**2


def second_derivative(traj: Trajectory, i: int) -> np.ndarray:
    """Discrete second derivative at interior waypoint i (1 <= i <= N-2)."""
    if not 1 <= i <= len(traj) - 2:
        raise IndexError(f"i={i} is not an interior waypoint of {len(traj)} points")
    w = traj.waypoints
    return (w[i - 1] - 2.0 * w[i] + w[i + 1]) / traj.ds**2


def contour_cost(traj: Trajectory, fld: PotentialField,
                 field_weight: float = 1.0) -> float:
    """Active-contour cost: integral of |S''|^2/2 - w*|grad Phi(S)|^2/2.

    Rectangle-rule quadrature over the interior waypoints; the two endpoints
    contribute nothing. Lower is better: smooth paths along steep field
    edges score lowest. field_weight rebalances the gradient term against
    bending (1.0 is the plain cost); planners use it to make contour
    attraction compete with smoothing at low field intensities.
    """
    d2 = second_differences(traj)
    g = grad_phi(traj.waypoints[1:-1], fld)
    bend = np.einsum("ij,ij->i", d2, d2)
    pull = np.einsum("ij,ij->i", g, g)
    return float(0.5 * (bend - field_weight * pull).sum() * traj.ds)


def energy(traj: Trajectory) -> float:
    """Curvature energy: integral of |S''| over the interior waypoints."""
    d2 = second_differences(traj)
    return float(np.linalg.norm(d2, axis=1).sum() * traj.ds)
