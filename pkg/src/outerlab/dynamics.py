"""The outer billiard map around a convex curve.

A point z strictly outside the curve determines a supporting line through a
boundary point p, oriented so the curve lies on the LEFT of the ray from z
through p; the map reflects z through p.  The map is undefined on supporting
lines that meet the boundary in more than one point (the singular set):
iteration aborts there rather than choosing arbitrarily.

Curves are either polygons (vertex support, corners everywhere) or densely
sampled smooth boundaries with tangents; the smooth representation is
resolution-limited and documented as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegeneratePolygon,
    InputError,
    InsideCurve,
    NotPeriodic,
    SingularLine,
    SingularOrbit,
    ValidationFailed,
)
from .geometry import OrbitPolygon, derive_orbit_polygon, det2, inner2

# Normalized-sine thresholds on supporting-line ties.
SINGULAR_ABORT = 1e-10
SINGULAR_FLAG = 1e-8


@dataclass(frozen=True)
class ConvexCurve:
    """A strictly convex closed curve, counterclockwise.

    kind is "polygon" (points are the vertices; every vertex is a corner) or
    "smooth" (points sample the boundary densely; tangents are unit vectors,
    computed by central differences when not supplied).
    """

    kind: str
    points: np.ndarray
    tangents: Optional[np.ndarray] = None
    corners: tuple[int, ...] = ()

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2 or len(p) < 3:
            raise InputError("curve needs at least 3 plane points")
        if not np.all(np.isfinite(p)):
            raise InputError("curve points must be finite")
        e = np.roll(p, -1, axis=0) - p
        cross = det2(e, np.roll(e, -1, axis=0))
        if np.any(cross <= 0):
            raise InputError("curve must be strictly convex and counterclockwise")
        object.__setattr__(self, "points", p)
        if self.kind == "smooth" and self.tangents is None:
            t = np.roll(p, -1, axis=0) - np.roll(p, 1, axis=0)
            t /= np.hypot(t[:, 0], t[:, 1])[:, None]
            object.__setattr__(self, "tangents", t)
        elif self.tangents is not None:
            t = np.asarray(self.tangents, dtype=float)
            if t.shape != p.shape:
                raise InputError("tangents must match points in shape")
            t = t / np.hypot(t[:, 0], t[:, 1])[:, None]
            object.__setattr__(self, "tangents", t)

    @staticmethod
    def polygon(vertices: Sequence) -> "ConvexCurve":
        v = np.asarray(vertices, dtype=float)
        return ConvexCurve(kind="polygon", points=v, corners=tuple(range(len(v))))

    @staticmethod
    def smooth(points: Sequence, tangents: Sequence | None = None) -> "ConvexCurve":
        t = None if tangents is None else np.asarray(tangents, dtype=float)
        return ConvexCurve(kind="smooth", points=np.asarray(points, dtype=float), tangents=t)

    @staticmethod
    def circle(radius: float = 1.0, center=(0.0, 0.0), samples: int = 2048) -> "ConvexCurve":
        th = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        c = np.asarray(center, dtype=float)
        pts = c + radius * np.column_stack([np.cos(th), np.sin(th)])
        tan = np.column_stack([-np.sin(th), np.cos(th)])
        return ConvexCurve.smooth(pts, tan)

    @property
    def centroid(self) -> np.ndarray:
        return np.mean(self.points, axis=0)

    @property
    def diameter(self) -> float:
        p = self.points
        lo, hi = np.min(p, axis=0), np.max(p, axis=0)
        return float(np.hypot(*(hi - lo)))

    def contains(self, z) -> bool:
        """True when z is inside or on the boundary (the map needs outside)."""
        z = np.asarray(z, dtype=float)
        p = self.points
        e = np.roll(p, -1, axis=0) - p
        side = det2(e, z - p)
        return bool(np.all(side >= -1e-12 * self.diameter**2))

    def distance_to_boundary(self, q) -> float:
        """Distance from q to the sampled boundary (segment-accurate)."""
        q = np.asarray(q, dtype=float)
        a = self.points
        b = np.roll(a, -1, axis=0)
        ab = b - a
        tt = np.clip(np.sum((q - a) * ab, axis=1) / np.sum(ab * ab, axis=1), 0.0, 1.0)
        proj = a + tt[:, None] * ab
        return float(np.min(np.hypot(*(q - proj).T)))


@dataclass(frozen=True)
class OrbitRecord:
    """Forward orbit data: points[k+1] = F(points[k]).

    period is the smallest certified n with |F^n(z0) - z0| < tol, or None;
    winding is taken from the closed orbit polygon when it is available.
    """

    start: np.ndarray
    points: np.ndarray
    period: Optional[int]
    winding: Optional[int]
    closure_residual: float
    singular_flag: bool


def _support_polygon(curve: ConvexCurve, z: np.ndarray) -> tuple[np.ndarray, float]:
    v = curve.points
    u = v - z
    best = 0
    for j in range(1, len(v)):
        if u[best, 0] * u[j, 1] - u[best, 1] * u[j, 0] < 0.0:
            best = j
    # Certify and measure the tie margin against every other vertex.
    cross = det2(u[best], u)
    norms = np.hypot(u[:, 0], u[:, 1]) * float(np.hypot(*u[best]))
    sines = cross / norms
    sines[best] = np.inf
    margin = float(np.min(np.abs(sines)))
    if np.min(sines) < -SINGULAR_ABORT:
        raise SingularLine("no single clockwise-most vertex; z sees a tie")
    return v[best].copy(), margin


def _support_smooth(curve: ConvexCurve, z: np.ndarray) -> tuple[np.ndarray, float]:
    p = curve.points
    t = curve.tangents
    g = det2(p - z, t)
    sign = np.sign(g)
    # Exact zeros at samples are regular tangencies, not extra crossings:
    # count sign changes over the nonzero samples only.
    nzi = np.nonzero(sign != 0)[0]
    if nzi.size < 2:
        raise SingularLine("sight function vanishes along the whole boundary")
    s = sign[nzi]
    flips = np.nonzero(s != np.roll(s, -1))[0]
    if len(flips) != 2:
        raise SingularLine("tangency condition is not a pair of simple roots")
    centroid = curve.centroid
    chosen = None
    for f in flips:
        k = int(nzi[f])
        k2 = int(nzi[(f + 1) % nzi.size])
        gap = (k2 - k) % len(p)
        if gap > 1:
            # the crossing passes through sampled zeros; take their middle
            q = p[(k + gap // 2) % len(p)]
        else:
            a, b = p[k], p[k2]
            ta, tb = t[k], t[k2]
            ga = g[k]
            lo, hi = 0.0, 1.0
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                q = (1 - mid) * a + mid * b
                tq = (1 - mid) * ta + mid * tb
                gm = det2(q - z, tq)
                if (gm > 0) == (ga > 0):
                    lo = mid
                    ga = gm
                else:
                    hi = mid
            q = (1 - 0.5 * (lo + hi)) * a + 0.5 * (lo + hi) * b
        if det2(q - z, centroid - z) > 0:
            chosen = q
    if chosen is None:
        raise SingularLine("no supporting point with the curve on the left")
    # Singularity margin: any distant boundary sample on the support line?
    u = p - z
    uc = chosen - z
    sines = det2(uc, u) / (np.hypot(*uc) * np.hypot(u[:, 0], u[:, 1]))
    ahead = inner2(u, uc) > 0
    far = np.hypot(*(p - chosen).T) > 2.0 * curve.diameter / len(p) * 4.0
    mask = ahead & far
    margin = float(np.min(np.abs(sines[mask]))) if np.any(mask) else 1.0
    return chosen, margin


def _support(curve: ConvexCurve, z: np.ndarray) -> tuple[np.ndarray, float]:
    if curve.contains(z):
        raise InsideCurve("the outer map needs a point strictly outside the curve")
    if curve.kind == "polygon":
        p, margin = _support_polygon(curve, z)
    else:
        p, margin = _support_smooth(curve, z)
    if margin <= SINGULAR_ABORT:
        raise SingularLine("supporting line meets the curve in more than one point")
    return p, margin


def tangency_point(curve: ConvexCurve, z) -> np.ndarray:
    """The support point p with the curve on the left of the ray z -> p."""
    p, _ = _support(curve, np.asarray(z, dtype=float))
    return p


def outer_map(curve: ConvexCurve, z) -> np.ndarray:
    """F(z) = 2 p - z, the reflection of z through its support point."""
    z = np.asarray(z, dtype=float)
    p, _ = _support(curve, z)
    return 2.0 * p - z


def iterate(
    curve: ConvexCurve, z0, steps: int, tol: float | None = None
) -> OrbitRecord:
    """Iterate the outer map, certifying the smallest period found.

    A period candidate k (|z_k - z0| < tol) is certified by one more map
    application: F(z_k) must land within 2 tol of z_1.  The singular flag is
    set when any supporting line came within a normalized sine of 1e-8 of a
    second boundary contact; closer than 1e-10 aborts with SingularOrbit.
    """
    if steps < 1:
        raise InputError("steps must be >= 1")
    z0 = np.asarray(z0, dtype=float)
    if tol is None:
        tol = 1e-9 * curve.diameter
    pts = [z0]
    flagged = False
    period = None
    closure = np.inf
    z = z0
    for k in range(1, steps + 1):
        try:
            p, margin = _support(curve, z)
        except SingularLine as exc:
            raise SingularOrbit(k - 1, str(exc)) from exc
        if margin < SINGULAR_FLAG:
            flagged = True
        z = 2.0 * p - z
        pts.append(z)
        resid = float(np.hypot(*(z - z0)))
        # Period 2 is impossible: the two tangent lines from an exterior
        # point are distinct, so the smallest admissible period is 3.
        if resid < tol and k >= 3:
            try:
                p2, _ = _support(curve, z)
            except SingularLine as exc:
                raise SingularOrbit(k, str(exc)) from exc
            znext = 2.0 * p2 - z
            if np.hypot(*(znext - pts[1])) < 2.0 * tol:
                period = k
                closure = resid
                break
    winding = None
    if period is not None and period >= 3:
        try:
            winding = derive_orbit_polygon(np.asarray(pts[:period])).winding
        except DegeneratePolygon:
            winding = None
    return OrbitRecord(
        start=z0,
        points=np.asarray(pts),
        period=period,
        winding=winding,
        closure_residual=closure,
        singular_flag=flagged,
    )


def orbit_polygon(
    rec: OrbitRecord, curve: ConvexCurve | None = None, tol: float | None = None
) -> OrbitPolygon:
    """The certified periodic orbit as an orbit polygon.

    When the curve is supplied, every edge midpoint is checked to lie on the
    boundary (within tol, default 1e-10 * diameter) and local convexity is
    enforced; these hold by construction for genuine orbits.
    """
    if rec.period is None:
        raise NotPeriodic("record carries no certified period")
    poly = derive_orbit_polygon(rec.points[: rec.period])
    if curve is not None:
        t = 1e-10 * curve.diameter if tol is None else tol
        worst = max(curve.distance_to_boundary(q) for q in poly.rbar)
        if worst > t:
            raise ValidationFailed(
                f"orbit midpoint leaves the curve by {worst:.3e} (tol {t:.3e})"
            )
        poly.require_locally_convex()
    return poly
