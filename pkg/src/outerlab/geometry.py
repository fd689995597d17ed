"""Planar primitives and cyclic derived data of closed polygons.

The whole laboratory works with one derived bundle per polygon: half-edge
vectors, their midpoints, local triangle areas, the skip-one determinants,
interior/exterior angles and the turning (winding) number.  Everything else
in the package consumes these arrays, so they are computed once, here, and
frozen.

Index convention: all arrays are 0-based and cyclic, aligned so that entry
``i`` of ``delta`` is the determinant of half-edges ``i-1`` and ``i``
(indices mod n).  Angles live at the shared vertex of those two half-edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneratePolygon, NotLocallyConvex

# Accept a turning sum as a winding number only this close to an integer.
WINDING_TOL = 1e-9


def det2(u, v):
    """2x2 determinant det(u, v) = u_x v_y - u_y v_x.

    Accepts single vectors or arrays of vectors (last axis = 2) and
    broadcasts like the underlying numpy expression.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def inner2(u, v):
    """Standard inner product on the plane, broadcasting over vector arrays."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]


@dataclass(frozen=True)
class OrbitPolygon:
    """A closed polygon with derived cyclic data.

    Fields
    ------
    vertices : (n, 2) array, the cyclic vertex list z_i
    r        : (n, 2) array, half-edge vectors r_i = (z_i - z_{i+1}) / 2
    rbar     : (n, 2) array, edge midpoints (z_i + z_{i+1}) / 2
    s        : (n,) array, half-edge lengths |r_i| > 0
    delta    : (n,) array, local areas det(r_{i-1}, r_i)
    dvec     : (n,) array, skip determinants det(r_{i-1}, r_{i+1})
    alpha    : (n,) array, interior angles at z_i
    exterior : (n,) array, signed turning angles in (-pi, pi)
    winding  : int, total turning / 2 pi
    locally_convex : bool, True when every delta entry clears the area floor

    Raw polygons (not locally convex) are allowed; operations that need
    positivity call :meth:`require_locally_convex` first.
    """

    vertices: np.ndarray
    r: np.ndarray
    rbar: np.ndarray
    s: np.ndarray
    delta: np.ndarray
    dvec: np.ndarray
    alpha: np.ndarray
    exterior: np.ndarray
    winding: int
    locally_convex: bool

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def scale(self) -> float:
        """Length scale of the polygon: the largest half-edge length."""
        return float(np.max(self.s))

    def require_locally_convex(self) -> "OrbitPolygon":
        if not self.locally_convex:
            raise NotLocallyConvex(
                "operation needs all local areas positive; "
                f"min(delta) = {float(np.min(self.delta)):.3e}"
            )
        return self

    @property
    def is_admissible(self) -> bool:
        """Locally convex with winding m satisfying 0 < 2m < n."""
        return self.locally_convex and 0 < 2 * self.winding < self.n


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def derive_orbit_polygon(
    vertices: Sequence, convexity_tol: float | None = None
) -> OrbitPolygon:
    """Build the full derived bundle for a closed polygon.

    ``convexity_tol`` is the area floor below which the polygon is flagged
    as not locally convex; default 1e-12 * (max half-edge length)^2.

    Raises DegeneratePolygon when consecutive vertices coincide or the
    turning angles do not sum to an integer multiple of 2 pi.
    """
    z = np.asarray(vertices, dtype=float)
    if z.ndim != 2 or z.shape[1] != 2 or len(z) < 3:
        raise DegeneratePolygon("need at least 3 plane points")
    if not np.all(np.isfinite(z)):
        raise DegeneratePolygon("vertices must be finite")

    n = len(z)
    zn = np.roll(z, -1, axis=0)
    r = (z - zn) / 2.0
    rbar = (z + zn) / 2.0
    s = np.hypot(r[:, 0], r[:, 1])
    smax = float(np.max(s))
    if smax == 0.0 or np.any(s <= 1e-15 * smax):
        raise DegeneratePolygon("repeated consecutive vertices")

    rp = np.roll(r, 1, axis=0)   # r_{i-1}
    rn = np.roll(r, -1, axis=0)  # r_{i+1}
    delta = det2(rp, r)
    dvec = det2(rp, rn)

    # Signed turning from r_{i-1} to r_i; interior angle is its complement.
    exterior = np.arctan2(delta, inner2(rp, r))
    alpha = np.pi - exterior

    turns = float(np.sum(exterior)) / (2.0 * np.pi)
    m = int(round(turns))
    if abs(turns - m) >= WINDING_TOL:
        raise DegeneratePolygon(
            f"turning angles sum to {turns:.12f} revolutions, not an integer"
        )

    if convexity_tol is None:
        convexity_tol = 1e-12 * smax * smax
    locally_convex = bool(np.all(delta > convexity_tol))

    return OrbitPolygon(
        vertices=_freeze(z.copy()),
        r=_freeze(r),
        rbar=_freeze(rbar),
        s=_freeze(s),
        delta=_freeze(delta),
        dvec=_freeze(dvec),
        alpha=_freeze(alpha),
        exterior=_freeze(exterior),
        winding=m,
        locally_convex=locally_convex,
    )


def polygon_area(vertices: Sequence) -> float:
    """Signed shoelace area; positive for counterclockwise orientation."""
    z = np.asarray(vertices, dtype=float)
    zn = np.roll(z, -1, axis=0)
    return 0.5 * float(np.sum(z[:, 0] * zn[:, 1] - z[:, 1] * zn[:, 0]))


def regular_star(n: int, m: int, radius: float = 1.0, phase: float = 0.0) -> np.ndarray:
    """Vertices of the regular star polygon that advances m steps per edge.

    Requires gcd(n, m) = 1 so the cycle visits all n points.
    """
    if np.gcd(n, m) != 1:
        raise DegeneratePolygon(f"star ({n},{m}) is not a single cycle")
    k = np.arange(n)
    ang = phase + 2.0 * np.pi * m * k / n
    return np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])


def diameter(points: Sequence) -> float:
    """Largest pairwise distance; fine at the small n used here."""
    p = np.asarray(points, dtype=float)
    diff = p[:, None, :] - p[None, :, :]
    return float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))
