"""Integral-element calculus on orbit polygons.

An orbit polygon carries a band-cyclic matrix C(c) whose rows encode the
three-term recurrence delta_{i+2} w_i + c_{i+1} w_{i+1} + delta_{i+1} w_{i+2} = 0.
A coefficient vector c is an *integral element* when rank C(c) = n - 2; it is
*convex* when additionally c_i <= d_i componentwise.  Convex integral elements
are exactly the candidates compatible with a convex billiard curve, equality
c_i = d_i encoding a corner of the curve at the edge midpoint.

For n = 4, 5, 6 the rank condition is equivalent to explicit polynomial
systems, and those systems admit rational charts: fixing the first two
(n = 5) or three (n = 6) coordinates determines the rest.  The convex-element
search walks those charts instead of raw coefficient space, so every
candidate it scores already sits on the variety to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    NotConvexElement,
    NotIntegralElement,
    OddPeriod,
    UnsupportedPeriod,
    ValidationFailed,
    WrongPeriod,
    WrongPeriodOrWinding,
)
from .geometry import OrbitPolygon

RANK_REL_DEFAULT = 1e-9
VARIETY_REL_DEFAULT = 1e-8


@dataclass(frozen=True)
class RankTolerance:
    """Relative singular-value threshold for numerical rank decisions."""

    rel: float = RANK_REL_DEFAULT


@dataclass(frozen=True)
class SearchBudget:
    """Effort knobs for the convex-element search.

    ``grid`` is the number of samples per chart axis of the coarse sweep;
    the best point of every chart is refined by ``zoom_rounds`` rounds of a
    ``zoom_grid``-per-axis local grid with shrinking span.  When no chart
    reaches feasibility, ``starts`` random parameter points in the search
    box are tried as extra coarse starts before giving up.
    """

    starts: int = 200
    grid: int = 21
    zoom_rounds: int = 3
    zoom_grid: int = 9
    seed: int = 0


@dataclass(frozen=True)
class CyclicMatrixC:
    """The n x n band-cyclic matrix C(c) of an orbit polygon."""

    n: int
    entries: np.ndarray
    c: np.ndarray
    delta: np.ndarray


@dataclass(frozen=True)
class IntegralElement:
    """A coefficient vector c on an orbit polygon, with its classification.

    ``rank_margin`` is the relative spectral gap at the rank n - 2 cut:
    (sigma_{n-3} - sigma_{n-2}) / sigma_0.  Values near zero mean the rank
    decision is ill-conditioned and the sample should be treated as suspect.
    """

    base: OrbitPolygon
    c: np.ndarray
    is_valid: bool
    is_convex: bool
    is_special_minus: bool
    is_special_plus: bool
    rank_margin: float


@dataclass(frozen=True)
class CurvatureProfile:
    """Curvatures at the edge midpoints; np.inf marks a corner."""

    kappa: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.kappa, dtype=float)
        if np.any(k[np.isfinite(k)] <= 0):
            raise ValidationFailed("curvatures must be positive or infinite")


def convexity_tol(poly: OrbitPolygon) -> float:
    """Default slack for the componentwise bound c_i <= d_i (area units)."""
    return 1e-12 * poly.scale**2


def build_matrix_C(poly: OrbitPolygon, c) -> CyclicMatrixC:
    """Assemble C(c).  Row j holds c_j on the diagonal, delta_j to its right
    and delta_{j+1} to its left (cyclically), so that row j of C v = 0 is the
    three-term recurrence attached to edge j."""
    poly.require_locally_convex()
    n = poly.n
    c = np.asarray(c, dtype=float)
    if c.shape != (n,):
        raise WrongPeriod(f"coefficient vector must have length {n}")
    d = poly.delta
    M = np.zeros((n, n))
    j = np.arange(n)
    M[j, j] = c
    M[j, (j + 1) % n] = d
    M[j, (j - 1) % n] = np.roll(d, -1)
    return CyclicMatrixC(n=n, entries=M, c=c, delta=d.copy())


def numerical_rank(M, tol: RankTolerance | float | None = None) -> int:
    """Singular values above rel * sigma_max count toward the rank."""
    rel = _rank_rel(tol)
    sv = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel * sv[0]))


def _rank_rel(tol: RankTolerance | float | None) -> float:
    if tol is None:
        return RANK_REL_DEFAULT
    if isinstance(tol, RankTolerance):
        return tol.rel
    return float(tol)


def _rank_cut_margin(M: np.ndarray, n: int) -> float:
    """Relative spectral gap at the rank n - 2 cut."""
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0:
        return 0.0
    return float((sv[n - 3] - sv[n - 2]) / sv[0])


# ---------------------------------------------------------------------------
# Variety equations for small n (raw residuals; relative form used for tests)

def variety_equations_n4(poly: OrbitPolygon, c) -> np.ndarray:
    """Residuals (c_1 + c_3, c_2 + c_4, c_1 c_2 + D_2 D_4 - D_1 D_3)."""
    if poly.n != 4:
        raise WrongPeriod("n = 4 required")
    c = np.asarray(c, dtype=float)
    D = poly.delta
    return np.array([
        c[0] + c[2],
        c[1] + c[3],
        c[0] * c[1] + D[1] * D[3] - D[0] * D[2],
    ])


def variety_equations_n5(poly: OrbitPolygon, c) -> np.ndarray:
    """The five cyclic shifts of c_i c_{i+1} - c_{i+3} D_{i+1} - D_i D_{i+2}."""
    if poly.n != 5:
        raise WrongPeriod("n = 5 required")
    c = np.asarray(c, dtype=float)
    D = poly.delta
    k = np.arange(5)
    return (c[k] * c[(k + 1) % 5]
            - c[(k + 3) % 5] * D[(k + 1) % 5]
            - D[k] * D[(k + 2) % 5])


def variety_equations_n6(poly: OrbitPolygon, c) -> np.ndarray:
    """Both displayed hexagon equations and their six cyclic shifts (12 total).

    The system is redundant; the variety it cuts out is the rank n - 2 locus.
    """
    if poly.n != 6:
        raise WrongPeriod("n = 6 required")
    c = np.asarray(c, dtype=float)
    D = poly.delta
    k = np.arange(6)
    ab = c[(3 + k) % 6] * c[(4 + k) % 6] - D[(3 + k) % 6] * D[(5 + k) % 6]
    e1 = D[(4 + k) % 6] * (c[k] * c[(1 + k) % 6] - D[k] * D[(2 + k) % 6]) \
        + D[(1 + k) % 6] * ab
    e2 = D[(4 + k) % 6] * (c[k] * D[(3 + k) % 6] - c[(4 + k) % 6] * D[(2 + k) % 6]) \
        + c[(2 + k) % 6] * ab
    return np.concatenate([e1, e2])


def variety_residual_rel(poly: OrbitPolygon, c) -> float:
    """Largest equation residual, each normalized by its biggest term.

    The equations for different n have different polynomial degrees, so a
    per-equation relative measure is the only scale-free choice.
    """
    c = np.asarray(c, dtype=float)
    D = poly.delta
    n = poly.n
    if n == 4:
        res = variety_equations_n4(poly, c)
        mags = np.array([
            max(abs(c[0]), abs(c[2])),
            max(abs(c[1]), abs(c[3])),
            max(abs(c[0] * c[1]), abs(D[1] * D[3]), abs(D[0] * D[2])),
        ])
    elif n == 5:
        res = variety_equations_n5(poly, c)
        k = np.arange(5)
        mags = np.max(np.abs(np.stack([
            c[k] * c[(k + 1) % 5],
            c[(k + 3) % 5] * D[(k + 1) % 5],
            D[k] * D[(k + 2) % 5],
        ])), axis=0)
    elif n == 6:
        res = variety_equations_n6(poly, c)
        k = np.arange(6)
        ab = np.abs(c[(3 + k) % 6] * c[(4 + k) % 6]) \
            + np.abs(D[(3 + k) % 6] * D[(5 + k) % 6])
        m1 = np.max(np.abs(np.stack([
            D[(4 + k) % 6] * c[k] * c[(1 + k) % 6],
            D[(4 + k) % 6] * D[k] * D[(2 + k) % 6],
            D[(1 + k) % 6] * ab,
        ])), axis=0)
        m2 = np.max(np.abs(np.stack([
            D[(4 + k) % 6] * c[k] * D[(3 + k) % 6],
            D[(4 + k) % 6] * c[(4 + k) % 6] * D[(2 + k) % 6],
            c[(2 + k) % 6] * ab,
        ])), axis=0)
        mags = np.concatenate([m1, m2])
    else:
        raise WrongPeriod("explicit equations exist only for n in {4, 5, 6}")
    floor = 1e-300
    return float(np.max(np.abs(res) / np.maximum(mags, floor)))


# ---------------------------------------------------------------------------
# Rational charts of the variety (n = 5, 6)

def variety_point_n5(poly: OrbitPolygon, c1, c2, shift: int = 0):
    """Complete (c1, c2) to a full variety point, cyclically shifted charts.

    Broadcasts over arrays of (c1, c2).  Returns (c, ok) where ok masks out
    parameter values that hit the chart's rational degeneracy.
    """
    if poly.n != 5:
        raise WrongPeriod("n = 5 required")
    D = np.roll(poly.delta, -shift)
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    tiny = 1e-12 * poly.scale**2
    c3 = (c1 * c2 - D[0] * D[2]) / D[1]
    ok = np.abs(c3) > tiny
    safe = np.where(ok, c3, 1.0)
    cvals = [
        c1,
        c2,
        (c1 * D[3] + D[2] * D[4]) / safe,
        c3,
        (c2 * D[4] + D[3] * D[0]) / safe,
    ]
    c = np.stack(np.broadcast_arrays(*cvals), axis=-1)
    if shift:
        c = np.roll(c, shift, axis=-1)
    return c, ok & np.all(np.isfinite(c), axis=-1)


def variety_point_n6(poly: OrbitPolygon, c1, c2, c3, shift: int = 0):
    """Complete (c1, c2, c3) to a full variety point for hexagons."""
    if poly.n != 6:
        raise WrongPeriod("n = 6 required")
    D = np.roll(poly.delta, -shift)
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    c3 = np.asarray(c3, dtype=float)
    sc2 = poly.scale**2
    q = -D[4] * (c1 * c2 - D[0] * D[2]) / D[1]
    ok = np.abs(q) > 1e-12 * sc2 * sc2
    qs = np.where(ok, q, 1.0)
    c5 = (D[4] * c1 * D[3] + c3 * qs) / (D[4] * D[2])
    ok = ok & (np.abs(c5) > 1e-12 * sc2)
    c5s = np.where(np.abs(c5) > 1e-12 * sc2, c5, 1.0)
    c4 = (qs + D[3] * D[5]) / c5s
    c6 = D[4] * (c4 * D[0] - D[5] * c2) / qs
    c = np.stack(np.broadcast_arrays(c1, c2, c3, c4, c5, c6), axis=-1)
    if shift:
        c = np.roll(c, shift, axis=-1)
    return c, ok & np.all(np.isfinite(c), axis=-1)


# ---------------------------------------------------------------------------
# Classification

def make_element(
    poly: OrbitPolygon,
    c,
    rank_tol: RankTolerance | float | None = None,
    variety_tol: float = VARIETY_REL_DEFAULT,
    convex_tol: float | None = None,
) -> IntegralElement:
    """Classify a coefficient vector: rank test, variety cross-check for
    n in {4, 5, 6}, convexity box, special-element detection."""
    poly.require_locally_convex()
    M = build_matrix_C(poly, c)
    n = poly.n
    rank = numerical_rank(M.entries, rank_tol)
    margin = _rank_cut_margin(M.entries, n)
    valid = rank == n - 2
    if valid and n in (4, 5, 6):
        valid = variety_residual_rel(poly, M.c) <= variety_tol
    eps = convexity_tol(poly) if convex_tol is None else convex_tol
    convex = valid and bool(np.all(M.c <= poly.dvec + eps))
    special_tol = 1e-9 * poly.scale**2
    minus = bool(np.max(np.abs(M.c + poly.dvec)) <= special_tol)
    plus = n % 2 == 0 and bool(np.max(np.abs(M.c - poly.dvec)) <= special_tol)
    return IntegralElement(
        base=poly,
        c=M.c,
        is_valid=valid,
        is_convex=convex,
        is_special_minus=minus,
        is_special_plus=plus,
        rank_margin=margin,
    )


def is_integral_element(
    poly: OrbitPolygon,
    c,
    rank_tol: RankTolerance | float | None = None,
    variety_tol: float = VARIETY_REL_DEFAULT,
) -> bool:
    return make_element(poly, c, rank_tol, variety_tol).is_valid


def is_convex_element(
    poly: OrbitPolygon,
    c,
    rank_tol: RankTolerance | float | None = None,
    variety_tol: float = VARIETY_REL_DEFAULT,
    convex_tol: float | None = None,
) -> bool:
    el = make_element(poly, c, rank_tol, variety_tol, convex_tol)
    if not el.is_valid:
        raise NotIntegralElement("coefficient vector is not an integral element")
    return el.is_convex


def special_element_minus(
    poly: OrbitPolygon, rank_tol: RankTolerance | float | None = None
) -> IntegralElement:
    """The element c = -d, certified: rank n - 2 and C r = 0 for both
    coordinate projections of the half-edge vectors."""
    poly.require_locally_convex()
    el = make_element(poly, -poly.dvec, rank_tol)
    _certify_null(poly, el, poly.r)
    return el


def special_element_plus(
    poly: OrbitPolygon, rank_tol: RankTolerance | float | None = None
) -> IntegralElement:
    """The element c = +d for even n, with alternating-signed null vectors."""
    if poly.n % 2:
        raise OddPeriod("c = +d is an integral element only for even n")
    poly.require_locally_convex()
    el = make_element(poly, poly.dvec.copy(), rank_tol)
    signs = (-1.0) ** np.arange(poly.n)
    _certify_null(poly, el, signs[:, None] * poly.r)
    return el


def _certify_null(poly: OrbitPolygon, el: IntegralElement, vecs: np.ndarray):
    if not el.is_valid:
        raise ValidationFailed(
            f"special element has rank margin {el.rank_margin:.3e}; "
            "input polygon is numerically degenerate"
        )
    M = build_matrix_C(poly, el.c).entries
    resid = np.max(np.abs(M @ vecs))
    bound = 1e-10 * np.max(np.abs(M)) * max(np.max(np.abs(vecs)), 1e-300)
    if resid > bound:
        raise ValidationFailed(f"null-vector residual {resid:.3e} exceeds {bound:.3e}")


# ---------------------------------------------------------------------------
# Curvature transfer

def curvature_from_element(
    poly: OrbitPolygon, c, convex_tol: float | None = None
) -> CurvatureProfile:
    """Recover midpoint curvatures from a convex coefficient vector.

    kappa_j = 2 delta_j delta_{j+1} / ((d_j - c_j) s_j^3); equality c_j = d_j
    within tolerance gives kappa_j = inf (a corner).  Only the convexity
    bound is enforced here; integrality is the caller's concern.
    """
    poly.require_locally_convex()
    c = np.asarray(c, dtype=float)
    eps = convexity_tol(poly) if convex_tol is None else convex_tol
    gap = poly.dvec - c
    if np.any(gap < -eps):
        raise NotConvexElement("some c_i exceeds d_i beyond tolerance")
    num = 2.0 * poly.delta * np.roll(poly.delta, -1)
    kappa = np.where(gap <= eps, np.inf, num / (np.maximum(gap, 1e-300) * poly.s**3))
    return CurvatureProfile(kappa=kappa)


def element_from_curvature(poly: OrbitPolygon, profile: CurvatureProfile) -> np.ndarray:
    """Inverse transfer: c_j = d_j - 2 delta_j delta_{j+1} / (kappa_j s_j^3),
    with corners (kappa = inf) mapping to c_j = d_j exactly."""
    poly.require_locally_convex()
    kappa = np.asarray(profile.kappa, dtype=float)
    num = 2.0 * poly.delta * np.roll(poly.delta, -1)
    with np.errstate(divide="ignore"):
        drop = np.where(np.isinf(kappa), 0.0, num / (kappa * poly.s**3))
    return poly.dvec - drop


# ---------------------------------------------------------------------------
# Paradox classification (hexagonal star polygons)

def paradox_margin(poly: OrbitPolygon) -> float:
    """max over i of min(alpha_{i-1} + alpha_i - pi, alpha_i + alpha_{i+1} - pi).

    Positive exactly when some vertex has both adjacent angle-pair sums
    above pi.
    """
    if poly.n != 6 or poly.winding != 2:
        raise WrongPeriodOrWinding("defined for hexagons with winding 2")
    a = poly.alpha
    left = np.roll(a, 1) + a - np.pi
    right = a + np.roll(a, -1) - np.pi
    return float(np.max(np.minimum(left, right)))


def classify_paradoxical(poly: OrbitPolygon) -> bool:
    return paradox_margin(poly) > 0.0


# ---------------------------------------------------------------------------
# Convex-element search

def convex_element_search(
    poly: OrbitPolygon, budget: SearchBudget | None = None
) -> Optional[IntegralElement]:
    """Look for a convex integral element; None when none is found.

    Strategy per n: n = 3 has a single closed-form element; n = 4 sweeps the
    one-parameter conic under the convexity box; n = 5, 6 run a multi-start
    search over the rational charts of the variety, scoring candidates by
    their worst convexity slack min_i (d_i - c_i) and refining the best with
    shrinking local grids.  The element maximizing that slack is returned, so a
    strictly interior element is preferred over the ever-present corner
    element c = d of even n.  A None for odd n is evidence of absence, not
    proof; verifiers aggregate over many samples.
    """
    poly.require_locally_convex()
    if budget is None:
        budget = SearchBudget()
    n = poly.n
    if n == 3:
        el = make_element(poly, np.roll(poly.delta, 1))
        return el if (el.is_valid and el.is_convex) else None
    if n == 4:
        cands = _candidates_n4(poly, budget)
    elif n == 5:
        cands = _candidates_chart(poly, budget, dim=2)
        cands.append(-poly.dvec)
    elif n == 6:
        cands = _candidates_chart(poly, budget, dim=3)
        cands.append(-poly.dvec)
        cands.append(poly.dvec.copy())
    else:
        raise UnsupportedPeriod("search implemented for n in {3, 4, 5, 6}")

    eps = convexity_tol(poly)
    best: Optional[IntegralElement] = None
    best_margin = -np.inf
    order = sorted(cands, key=lambda c: -float(np.min(poly.dvec - c)))
    for c in order:
        margin = float(np.min(poly.dvec - c))
        if margin < -eps or margin <= best_margin:
            continue
        el = make_element(poly, c)
        if el.is_valid and el.is_convex:
            best = el
            best_margin = margin
    return best


def _candidates_n4(poly: OrbitPolygon, budget: SearchBudget) -> list[np.ndarray]:
    """Conic sweep c = (t, K/t, -t, -K/t) plus its degenerate branches."""
    D = poly.delta
    d = poly.dvec
    K = D[0] * D[2] - D[1] * D[3]
    sc2 = poly.scale**2
    tiny = 1e-12 * sc2
    cands = [d.copy()]
    lo = -3.0 * np.abs(d) - 3.0 * float(np.mean(D))
    for t in np.linspace(lo[0], d[0], budget.grid):
        if abs(t) > tiny:
            cands.append(np.array([t, K / t, -t, -K / t]))
    for t in np.linspace(lo[1], d[1], budget.grid):
        if abs(t) > tiny:
            cands.append(np.array([K / t, t, -K / t, -t]))
    if abs(K) <= tiny * sc2:
        # degenerate conic: the union of the two coordinate lines
        cands.append(np.array([d[0], 0.0, -d[0], 0.0]))
        cands.append(np.array([0.0, d[1], 0.0, -d[1]]))
    return cands


def _chart_point(poly: OrbitPolygon, params: np.ndarray, shift: int):
    if poly.n == 5:
        return variety_point_n5(poly, params[..., 0], params[..., 1], shift)
    return variety_point_n6(
        poly, params[..., 0], params[..., 1], params[..., 2], shift
    )


def _best_on_chart(
    poly: OrbitPolygon, params: np.ndarray, shift: int
) -> tuple[float, np.ndarray | None, np.ndarray | None]:
    """Score a batch of chart parameters by the slack min(d - c)."""
    c, ok = _chart_point(poly, params, shift)
    if not np.any(ok):
        return -np.inf, None, None
    c = c[ok]
    margins = np.min(poly.dvec - c, axis=-1)
    k = int(np.argmax(margins))
    return float(margins[k]), c[k], params[ok][k]


def _zoom(poly: OrbitPolygon, p0: np.ndarray, span: np.ndarray, shift: int,
          budget: SearchBudget) -> tuple[float, np.ndarray | None]:
    """Shrinking local grids around a start; deterministic refinement."""
    best_m, best_c = -np.inf, None
    center = p0.copy()
    for _ in range(budget.zoom_rounds):
        axes = [np.linspace(center[a] - span[a], center[a] + span[a],
                            budget.zoom_grid) for a in range(len(center))]
        grids = np.meshgrid(*axes, indexing="ij")
        params = np.stack(grids, axis=-1).reshape(-1, len(center))
        m, c, p = _best_on_chart(poly, params, shift)
        if c is not None and m > best_m:
            best_m, best_c, center = m, c, p
        span = span / 4.0
    return best_m, best_c


def _candidates_chart(
    poly: OrbitPolygon, budget: SearchBudget, dim: int
) -> list[np.ndarray]:
    n = poly.n
    d = poly.dvec
    lo = -3.0 * np.abs(d) - 3.0 * float(np.mean(poly.delta))
    out: list[np.ndarray] = []
    eps = convexity_tol(poly)
    any_feasible = False

    for shift in range(n):
        idx = [(shift + k) % n for k in range(dim)]
        axes = [np.linspace(lo[i], d[i], budget.grid) for i in idx]
        grids = np.meshgrid(*axes, indexing="ij")
        params = np.stack(grids, axis=-1).reshape(-1, dim)
        m, c, p = _best_on_chart(poly, params, shift)
        if c is None:
            continue
        out.append(c)
        cell = np.array([(d[i] - lo[i]) / (budget.grid - 1) for i in idx])
        mz, cz = _zoom(poly, p, cell, shift, budget)
        if cz is not None:
            out.append(cz)
            m = max(m, mz)
        any_feasible = any_feasible or m >= -eps

    if not any_feasible and budget.starts > 0:
        # Random extra starts across the box, refined the same way.
        rng = np.random.default_rng(budget.seed)
        for shift in range(n):
            idx = [(shift + k) % n for k in range(dim)]
            low = np.array([lo[i] for i in idx])
            high = np.array([d[i] for i in idx])
            params = rng.uniform(low, high, size=(budget.starts // n + 1, dim))
            m, c, p = _best_on_chart(poly, params, shift)
            if c is None:
                continue
            out.append(c)
            mz, cz = _zoom(poly, p, (high - low) / budget.grid, shift, budget)
            if cz is not None:
                out.append(cz)
    return out
