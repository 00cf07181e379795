"""Simplicial polytopes with primitive facet inequalities, maximality
checks and the gauge function of ``B - f``."""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import exact
from .errors import LiftError, ValidationError
from .exact import dot, qvec, vsub


@dataclass(frozen=True)
class Facet:
    """``normal . x <= offset``; ``incidence`` lists the n vertex indices."""

    incidence: tuple
    normal: tuple
    offset: Fraction

    def value(self, x):
        return dot(self.normal, x)

    def slack(self, x):
        return self.offset - dot(self.normal, x)


@dataclass(frozen=True)
class SimplicialPolytope:
    n: int
    vertices: tuple
    facets: tuple

    @property
    def is_simplex(self) -> bool:
        return len(self.vertices) == self.n + 1

    def facet_vertices(self, i):
        return tuple(self.vertices[j] for j in self.facets[i].incidence)

    def inequalities(self):
        return [(F.normal, F.offset) for F in self.facets]

    def contains(self, x) -> bool:
        x = qvec(x)
        return all(F.slack(x) >= 0 for F in self.facets)

    def in_interior(self, x) -> bool:
        x = qvec(x)
        return all(F.slack(x) > 0 for F in self.facets)

    def tight_facets(self, x):
        x = qvec(x)
        return tuple(i for i, F in enumerate(self.facets) if F.slack(x) == 0)

    def centroid(self):
        m = len(self.vertices)
        return tuple(sum(v[j] for v in self.vertices) / m for j in range(self.n))

    def integer_bbox(self):
        return exact.integer_bbox(self.vertices)

    def lattice_points(self, cap=None):
        return exact.enumerate_lattice_points(self.inequalities(), self.integer_bbox(), cap)

    def map_affine(self, U, b) -> "SimplicialPolytope":
        """Image under ``x -> U x + b`` (U invertible)."""
        verts = [exact.vadd(exact.matvec(exact.qmat(U), v), qvec(b)) for v in self.vertices]
        if self.is_simplex:
            return simplex_from_vertices(verts)
        return simplicial_from_data(verts, [F.incidence for F in self.facets])


def hyperplane_through(points):
    """Normal (up to scale) of the hyperplane through n affinely
    independent points of R^n, via signed maximal minors."""
    pts = [qvec(p) for p in points]
    n = len(pts[0])
    rows = [vsub(p, pts[0]) for p in pts[1:]]
    normal = []
    for m in range(n):
        minor = [tuple(r[j] for j in range(n) if j != m) for r in rows]
        normal.append((-1) ** m * exact.det(minor) if minor else Fraction(1))
    return tuple(normal)


def _oriented_facet(points, incidence, away):
    """Facet through ``points`` oriented so that ``away`` is on the strict side."""
    c = hyperplane_through(points)
    if not any(c):
        raise ValidationError("facet vertices are affinely dependent", code="NOT_SUPPORTING")
    c = exact.primitive_normal(c)
    d = dot(c, points[0])
    if dot(c, away) > d:
        c = tuple(-x for x in c)
        d = -d
    return Facet(tuple(incidence), c, Fraction(d))


def simplex_from_vertices(points) -> SimplicialPolytope:
    pts = tuple(qvec(p) for p in points)
    n = len(pts[0])
    if len(pts) != n + 1 or any(len(p) != n for p in pts):
        raise ValidationError(f"a simplex in R^{n} needs {n + 1} points", code="DEGENERATE")
    if not exact.affinely_independent(pts):
        raise ValidationError("points are affinely dependent", code="DEGENERATE")
    facets = []
    for k in range(n + 1):
        inc = tuple(j for j in range(n + 1) if j != k)
        facets.append(_oriented_facet([pts[j] for j in inc], inc, pts[k]))
    return SimplicialPolytope(n, pts, tuple(facets))


def simplicial_from_data(vertices, facet_incidences) -> SimplicialPolytope:
    """Validated simplicial polytope from vertices and facet vertex sets."""
    pts = tuple(qvec(p) for p in vertices)
    n = len(pts[0])
    if len(pts) < n + 1 or not exact.rank([vsub(p, pts[0]) for p in pts[1:]]) == n:
        raise ValidationError("vertices do not span R^n", code="UNBOUNDED")
    violations = []
    facets = []
    centroid = tuple(sum(p[j] for p in pts) / len(pts) for j in range(n))
    for inc in facet_incidences:
        inc = tuple(sorted(int(i) for i in inc))
        if len(inc) != n or len(set(inc)) != n:
            raise ValidationError(
                f"facet {list(inc)} does not have exactly {n} vertices",
                code="NOT_SIMPLICIAL",
                facet=list(inc),
            )
        fpts = [pts[i] for i in inc]
        if not exact.affinely_independent(fpts):
            violations.append(f"facet {list(inc)}: vertices affinely dependent")
            continue
        F = _oriented_facet(fpts, inc, centroid)
        for j, p in enumerate(pts):
            if j in inc:
                continue
            s = F.slack(p)
            if s < 0:
                violations.append(f"facet {list(inc)}: vertex {j} on the wrong side")
            elif s == 0:
                violations.append(f"facet {list(inc)}: vertex {j} on the facet hyperplane")
        facets.append(F)
    if violations:
        raise ValidationError("; ".join(violations), code="NOT_SUPPORTING", violations=violations)
    ridges = Counter()
    for F in facets:
        for r in itertools.combinations(F.incidence, n - 1):
            ridges[r] += 1
    open_ridges = [list(r) for r, k in ridges.items() if k != 2]
    unused = [j for j in range(len(pts)) if not any(j in F.incidence for F in facets)]
    if open_ridges or unused:
        raise ValidationError(
            "facet list does not close up into a bounded polytope",
            code="UNBOUNDED",
            open_ridges=open_ridges,
            unused_vertices=unused,
        )
    return SimplicialPolytope(n, pts, tuple(facets))


# -- maximality ----------------------------------------------------------------

@dataclass(frozen=True)
class FacetPoints:
    all_points: tuple
    relative_interior_points: tuple


@dataclass(frozen=True)
class MaximalityReport:
    lattice_free: bool
    interior_witness: Optional[tuple]
    per_facet: tuple
    maximal: bool
    interior_points: tuple = field(default=(), repr=False)

    def relint_counts(self):
        return [len(fp.relative_interior_points) for fp in self.per_facet]

    def boundary_points(self):
        seen = set()
        for fp in self.per_facet:
            seen.update(fp.all_points)
        return sorted(seen)


def maximality_report(P: SimplicialPolytope, cap=None) -> MaximalityReport:
    pts = P.lattice_points(cap)
    per_all = [[] for _ in P.facets]
    per_rel = [[] for _ in P.facets]
    interior = []
    for p in pts:
        tight = P.tight_facets(p)
        if not tight:
            interior.append(p)
            continue
        for i in tight:
            per_all[i].append(p)
        if len(tight) == 1:
            per_rel[tight[0]].append(p)
    per_facet = tuple(FacetPoints(tuple(a), tuple(r)) for a, r in zip(per_all, per_rel))
    lattice_free = not interior
    maximal = lattice_free and all(fp.relative_interior_points for fp in per_facet)
    return MaximalityReport(
        lattice_free,
        interior[0] if interior else None,
        per_facet,
        maximal,
        tuple(interior),
    )


def require_maximal(P: SimplicialPolytope, report=None) -> MaximalityReport:
    report = report or maximality_report(P)
    if not report.lattice_free:
        raise ValidationError(
            "body is not lattice-free",
            code="NOT_LATTICE_FREE",
            interior_witness=list(report.interior_witness),
        )
    if not report.maximal:
        raise ValidationError(
            "body is lattice-free but not maximal",
            code="NOT_MAXIMAL",
            relint_counts=report.relint_counts(),
        )
    return report


# -- gauge ---------------------------------------------------------------------

def normalized_normals(P: SimplicialPolytope, f):
    """Normals ``a^i`` with ``B = {x : a^i.(x - f) <= 1}``."""
    f = qvec(f)
    out = []
    for F in P.facets:
        s = F.slack(f)
        if s <= 0:
            raise LiftError("f is not in the interior of the body", code="F_NOT_INTERIOR")
        out.append(tuple(Fraction(c) / s for c in F.normal))
    return out


def gauge_psi(P: SimplicialPolytope, f, r, normals=None) -> Fraction:
    """psi(r) = max_i a^i . r; pass precomputed ``normals`` in hot loops."""
    normals = normals if normals is not None else normalized_normals(P, f)
    r = qvec(r)
    return max(dot(a, r) for a in normals)


# -- JSON ----------------------------------------------------------------------

def body_from_json(data) -> SimplicialPolytope:
    n = int(data["n"])
    verts = [qvec(v) for v in data["vertices"]]
    if any(len(v) != n for v in verts):
        raise ValidationError("vertex dimension does not match n", code="DIMENSION_MISMATCH")
    facets = data.get("facets")
    if facets is None:
        if len(verts) != n + 1:
            raise ValidationError(
                "facets are required unless the body is a simplex", code="NOT_SIMPLICIAL"
            )
        return simplex_from_vertices(verts)
    return simplicial_from_data(verts, [F["incidence"] for F in facets])


def body_to_json(P: SimplicialPolytope) -> dict:
    return {
        "n": P.n,
        "vertices": [exact.fmt_vec(v) for v in P.vertices],
        "facets": [
            {
                "incidence": list(F.incidence),
                "normal": list(F.normal),
                "offset": exact.fmt(F.offset),
            }
            for F in P.facets
        ],
    }
