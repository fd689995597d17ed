"""Minimal SVG emission for curves and orbits.

Diagnostic plots only: the curve, the orbit points with index labels, the
connecting segments and hollow midpoint markers, in a viewBox fitted to the
data with a 10 percent margin.
"""

from __future__ import annotations

import numpy as np

from .dynamics import ConvexCurve, OrbitRecord


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def orbit_svg(curve: ConvexCurve, rec: OrbitRecord | None = None,
              width: int = 640) -> str:
    pts = [np.asarray(curve.points)]
    if rec is not None:
        pts.append(np.asarray(rec.points))
    allp = np.vstack(pts)
    lo = np.min(allp, axis=0)
    hi = np.max(allp, axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = 0.10 * float(np.max(span))
    x0, y0 = lo - pad
    w, h = (hi - lo) + 2 * pad
    # Flip y so the plot is in the usual orientation.
    def sx(p):
        return _fmt(p[0])

    def sy(p):
        return _fmt(y0 + h - (p[1] - y0))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        f'<g stroke-width="{_fmt(0.004 * max(w, h))}" fill="none">',
    ]
    curve_path = " ".join(f"{sx(p)},{sy(p)}" for p in curve.points)
    lines.append(f'<polygon points="{curve_path}" stroke="#1a6" fill="#1a61" />')
    if rec is not None:
        orbit = np.asarray(rec.points)
        path = " ".join(f"{sx(p)},{sy(p)}" for p in orbit)
        lines.append(f'<polyline points="{path}" stroke="#36c" />')
        rdot = 0.012 * max(w, h)
        mids = 0.5 * (orbit[:-1] + orbit[1:])
        for q in mids:
            lines.append(
                f'<circle cx="{sx(q)}" cy="{sy(q)}" r="{_fmt(0.6 * rdot)}" '
                'stroke="#777" />'
            )
        for i, p in enumerate(orbit[:-1] if rec.period else orbit):
            lines.append(
                f'<circle cx="{sx(p)}" cy="{sy(p)}" r="{_fmt(rdot)}" '
                'fill="#36c" stroke="none" />'
            )
            lines.append(
                f'<text x="{sx(p)}" y="{_fmt(float(sy(p)) - 1.6 * rdot)}" '
                f'font-size="{_fmt(3 * rdot)}" fill="#222" stroke="none" '
                f'text-anchor="middle">{i}</text>'
            )
    lines.append("</g></svg>")
    return "\n".join(lines) + "\n"


def save_orbit_svg(path: str, curve: ConvexCurve,
                   rec: OrbitRecord | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(orbit_svg(curve, rec))
