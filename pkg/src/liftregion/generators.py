"""Example bodies: dilated standard simplices, the delta-parameterized
2-partitionable family, cones over Type 3 triangles, and an exhaustive
search for small maximal lattice-free triangles."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import exact
from .classify import find_2partition
from .errors import CapExceededError, LiftError, ValidationError
from .exact import Q, floor_q, qvec
from .polytope import SimplicialPolytope, maximality_report, simplex_from_vertices


def standard_simplex(n: int, m: int | None = None) -> SimplicialPolytope:
    m = n if m is None else m
    verts = [tuple([0] * n)] + [tuple(m * int(i == j) for j in range(n)) for i in range(n)]
    return simplex_from_vertices(verts)


def simplex_from_inequalities(rows, rhs) -> SimplicialPolytope:
    """Simplex in R^n from n+1 inequalities ``rows[i] . x <= rhs[i]``."""
    rows = [qvec(r) for r in rows]
    rhs = qvec(rhs)
    n = len(rows[0])
    verts = []
    for skip in range(n + 1):
        idx = [i for i in range(n + 1) if i != skip]
        verts.append(exact.solve([rows[i] for i in idx], [rhs[i] for i in idx]))
    return simplex_from_vertices(verts)


def delta_family(n: int, delta) -> SimplicialPolytope:
    """``{-x_i + d_i x_{n+1} <= 0, sum x_i + d_{n+1} x_{n+1} <= n, x_{n+1} >= -1}``."""
    delta = qvec(delta)
    if len(delta) != n + 1:
        raise ValidationError(f"delta needs {n + 1} entries", code="INVALID_DELTA")
    if any(x < 0 for x in delta):
        raise ValidationError("delta entries must be nonnegative", code="INVALID_DELTA")
    if sum(delta) <= 0:
        raise ValidationError("sum of delta must be positive", code="INVALID_DELTA")
    rows, rhs = [], []
    for i in range(n):
        rows.append(tuple(-int(j == i) for j in range(n)) + (delta[i],))
        rhs.append(0)
    rows.append(tuple([1] * n) + (delta[n],))
    rhs.append(n)
    rows.append(tuple([0] * n) + (-1,))
    rhs.append(1)
    D = simplex_from_inequalities(rows, rhs)
    report = maximality_report(D)
    if not report.maximal:
        raise ValidationError(
            "delta body is not maximal lattice-free",
            code="INVALID_DELTA",
            lattice_free=report.lattice_free,
            relint_counts=report.relint_counts(),
        )
    if find_2partition(D, report) is None:
        raise ValidationError(
            "delta body is not 2-partitionable",
            code="INVALID_DELTA",
            boundary_levels=sorted({p[-1] for p in report.boundary_points()}),
        )
    base = next(i for i, F in enumerate(D.facets) if F.normal == tuple([0] * n) + (-1,))
    for p in base_copy_points(n, delta):
        if not (D.contains(p) and D.facets[base].slack(p) == 0):
            raise ValidationError("base facet misses the translated slice copy", code="INVALID_DELTA")
    return D


def base_copy_points(n: int, delta) -> list:
    """``p^1 = (-floor d_1, ..., -floor d_n, -1)`` and ``p^1 + n e^j``."""
    delta = qvec(delta)
    p1 = tuple(-floor_q(d) for d in delta[:n]) + (-1,)
    pts = [p1]
    for j in range(n):
        pts.append(tuple(x + n * int(k == j) for k, x in enumerate(p1)))
    return pts


# -- triangles -------------------------------------------------------------------

@dataclass(frozen=True)
class TriangleTag:
    relint_counts: tuple
    integral_vertices: tuple
    kind: str

    @property
    def one_point_per_side(self) -> bool:
        return all(c == 1 for c in self.relint_counts)

    @property
    def has_fractional_vertex(self) -> bool:
        return not all(self.integral_vertices)


def tag_triangle(T: SimplicialPolytope, report=None) -> TriangleTag:
    report = report or maximality_report(T)
    counts = tuple(report.relint_counts())
    integral = tuple(exact.is_integral(v) for v in T.vertices)
    if any(c >= 2 for c in counts):
        kind = "type2"
    elif all(integral) and all(c == 1 for c in counts):
        kind = "type1"
    elif len(report.boundary_points()) == 3 and all(c == 1 for c in counts):
        kind = "type3"
    else:
        kind = "other"
    return TriangleTag(counts, integral, kind)


def is_type3(T: SimplicialPolytope) -> bool:
    if T.n != 2 or not T.is_simplex:
        return False
    report = maximality_report(T)
    return report.maximal and tag_triangle(T, report).kind == "type3"


def _candidate_triples(pts, lat, chunk_first):
    """Vectorized maximal-lattice-free filter over triples ``(a, b, c)`` with
    ``a = chunk_first`` and ``a < b < c``; coordinates are scaled integers."""
    K = len(pts)
    a = chunk_first
    bc = np.array([(b, c) for b in range(a + 1, K) for c in range(b + 1, K)], dtype=np.int64)
    if bc.size == 0:
        return []
    A = pts[a][None, :]
    B = pts[bc[:, 0]]
    C = pts[bc[:, 1]]
    area = (B[:, 0] - A[:, 0]) * (C[:, 1] - A[:, 1]) - (B[:, 1] - A[:, 1]) * (C[:, 0] - A[:, 0])
    keep = area != 0
    bc, B, C, area = bc[keep], B[keep], C[keep], area[keep]
    flip = area < 0
    B2 = np.where(flip[:, None], C, B)
    C2 = np.where(flip[:, None], B, C)
    L = lat[None, :, :]

    def edge(P, Q):
        # cross(Q - P, L - P), positive on the left
        return ((Q[:, None, 0] - P[:, None, 0]) * (L[..., 1] - P[:, None, 1])
                - (Q[:, None, 1] - P[:, None, 1]) * (L[..., 0] - P[:, None, 0]))

    Ab = np.broadcast_to(A, B2.shape)
    e0 = edge(Ab, B2)
    e1 = edge(B2, C2)
    e2 = edge(C2, Ab)
    interior = (e0 > 0) & (e1 > 0) & (e2 > 0)
    ok = ~interior.any(axis=1)
    for e, o1, o2 in ((e0, e1, e2), (e1, e2, e0), (e2, e0, e1)):
        ok &= ((e == 0) & (o1 > 0) & (o2 > 0)).any(axis=1)
    return [(a, int(b), int(c)) for b, c in bc[ok]]


def search_simplices(n: int = 2, q: int = 2, box=(-2, 3), cap=None) -> list:
    """All maximal lattice-free triangles with vertices in ``(1/q) Z`` inside
    ``box``, sorted by vertex tuple, each with its tag."""
    if n != 2:
        raise LiftError("search is implemented for triangles only", code="DIMENSION_UNSUPPORTED")
    lo, hi = int(box[0]), int(box[1])
    coords = range(lo * q, hi * q + 1)
    pts = np.array([(x, y) for x in coords for y in coords], dtype=np.int64)
    K = len(pts)
    total = K * (K - 1) * (K - 2) // 6
    cap = exact.enum_cap() if cap is None else cap
    if total > cap:
        raise CapExceededError(
            f"{total} vertex triples exceed cap {cap}", code="CAP_EXCEEDED", candidates=total
        )
    lat = np.array(
        [(x * q, y * q) for x in range(lo, hi + 1) for y in range(lo, hi + 1)], dtype=np.int64
    )
    found = []
    for a in range(K):
        for tri in _candidate_triples(pts, lat, a):
            verts = sorted(tuple(Fraction(int(v), q) for v in pts[k]) for k in tri)
            T = simplex_from_vertices(verts)
            report = maximality_report(T)
            if report.maximal:
                found.append((tuple(verts), T, tag_triangle(T, report)))
    found.sort(key=lambda item: item[0])
    return [(T, tag) for _, T, tag in found]


def type3_cylinder_cone(T: SimplicialPolytope, M) -> SimplicialPolytope:
    """Cone over ``{1} x T`` whose section at ``x_1 = 0`` is the ``M``-fold
    homothetic copy of ``T`` about its centroid; the apex sits at height
    ``M / (M - 1)``."""
    M = Q(M)
    if not is_type3(T):
        raise ValidationError("triangle is not Type 3", code="NOT_TYPE3")
    if M <= 1:
        raise ValidationError("blow-up factor must exceed 1", code="VALIDATION_FAILED")
    c = T.centroid()
    base = [(Fraction(0),) + tuple(ci + M * (ti - ci) for ti, ci in zip(t, c)) for t in T.vertices]
    apex = (M / (M - 1),) + tuple(c)
    D = simplex_from_vertices(base + [apex])
    report = maximality_report(D)
    if not report.maximal:
        raise ValidationError(
            "cone is not maximal lattice-free", code="VALIDATION_FAILED",
            relint_counts=report.relint_counts(),
        )
    counts = report.relint_counts()
    base_facet = next(i for i, F in enumerate(D.facets) if F.normal == (-1, 0, 0))
    if counts[base_facet] <= 1 or any(k != 1 for i, k in enumerate(counts) if i != base_facet):
        raise ValidationError(
            "only the base facet may carry several lattice points", code="VALIDATION_FAILED",
            relint_counts=counts,
        )
    return D
