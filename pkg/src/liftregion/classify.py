"""Structural tests: unimodular equivalence with ``conv{0, m e^1, ..., m e^n}``,
the one-point-per-facet hypothesis, the centrally symmetric parallelotope
bound, 2-partitions and lattice-preserving slices."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import exact
from .errors import HypothesisViolated, LiftError
from .exact import dot, qvec, vsub
from .lifting import BodyClass, build_region, classify_body
from .polytope import (
    SimplicialPolytope,
    maximality_report,
    require_maximal,
    simplex_from_vertices,
)


class Prediction(str, enum.Enum):
    UNIQUE = "UNIQUE"
    MULTIPLE = "MULTIPLE"


def _as_prediction(cls: BodyClass) -> Prediction:
    return Prediction.UNIQUE if cls is BodyClass.UNIQUE_FOR_ALL_F else Prediction.MULTIPLE


@dataclass(frozen=True)
class UnimodEquiv:
    """``x -> U x + b`` maps ``m e^j`` to ``vertices[perm[j]]`` (``e^0 = 0``)."""

    U: tuple
    b: tuple
    vertex_permutation: tuple
    scale: int

    def apply(self, x):
        return exact.vadd(exact.matvec(exact.qmat(self.U), qvec(x)), qvec(self.b))

    def to_json(self):
        return {
            "U": [list(r) for r in self.U],
            "b": list(self.b),
            "vertex_permutation": list(self.vertex_permutation),
            "scale": self.scale,
        }


def equiv_standard_simplex(S: SimplicialPolytope, m: int) -> Optional[UnimodEquiv]:
    """Witness that ``S`` is an affine unimodular image of ``conv{0, m e^j}``."""
    if not S.is_simplex:
        return None
    n = S.n
    for base in range(n + 1):
        v0 = S.vertices[base]
        if not exact.is_integral(v0):
            continue
        rest = [k for k in range(n + 1) if k != base]
        cols = [exact.vscale(Fraction(1, m), vsub(S.vertices[k], v0)) for k in rest]
        if not all(exact.is_integral(c) for c in cols):
            continue
        U = exact.transpose(cols)
        if abs(exact.det(U)) != 1:
            continue
        U_int = tuple(tuple(int(x) for x in row) for row in U)
        return UnimodEquiv(U_int, exact.as_int_vec(v0), (base, *rest), m)
    return None


def one_point_per_facet(P: SimplicialPolytope, report=None) -> bool:
    report = require_maximal(P, report)
    return all(c == 1 for c in report.relint_counts())


def _require_simplex(S):
    if not S.is_simplex:
        raise HypothesisViolated("body is not a simplex", clause="simplex")


@dataclass(frozen=True)
class StructureVerdict:
    predicted: Prediction
    volume_verdict: Prediction
    cross_check: bool
    witness: Optional[UnimodEquiv] = None
    partition: Optional["TwoPartition"] = None
    slice: Optional[SimplicialPolytope] = None

    def to_json(self):
        out = {
            "predicted": self.predicted.value,
            "volume_verdict": self.volume_verdict.value,
            "cross_check": self.cross_check,
            "witness": self.witness.to_json() if self.witness else None,
        }
        if self.partition is not None:
            out["partition"] = self.partition.to_json()
        if self.slice is not None:
            out["slice_vertices"] = [exact.fmt_vec(v) for v in self.slice.vertices]
        return out


def one_point_verdict(S: SimplicialPolytope) -> StructureVerdict:
    """Structure-based prediction for one-point-per-facet simplices, checked
    against the volume-based classification."""
    _require_simplex(S)
    report = maximality_report(S)
    if not report.maximal:
        raise HypothesisViolated("simplex is not maximal lattice-free", clause="maximal")
    if not one_point_per_facet(S, report):
        raise HypothesisViolated(
            "some facet does not have exactly one relative-interior lattice point",
            clause="one_point_per_facet",
            relint_counts=report.relint_counts(),
        )
    witness = equiv_standard_simplex(S, S.n)
    predicted = Prediction.UNIQUE if witness else Prediction.MULTIPLE
    volume = _as_prediction(classify_body(S))
    return StructureVerdict(predicted, volume, predicted == volume, witness)


# -- centrally symmetric parallelotope ---------------------------------------------

@dataclass(frozen=True)
class SymmetricBodyCheck:
    vol_S: Fraction
    vol_R0: Fraction
    relation_holds: bool
    lattice_free_interior: bool
    minkowski_bound: bool
    translation: tuple

    def to_json(self):
        return {
            "vol_S": exact.fmt(self.vol_S),
            "vol_R0": exact.fmt(self.vol_R0),
            "relation_holds": self.relation_holds,
            "lattice_free_interior": self.lattice_free_interior,
            "minkowski_bound": self.minkowski_bound,
        }


def symmetric_body_check(S: SimplicialPolytope, base_vertex: int = 0) -> SymmetricBodyCheck:
    """Build ``{x : |a^i . x| <= a^i . y^i, i != 0}`` after moving the
    lattice point of the facet opposite ``base_vertex`` to the origin."""
    _require_simplex(S)
    report = maximality_report(S)
    if not report.maximal or not all(c == 1 for c in report.relint_counts()):
        raise HypothesisViolated(
            "needs a maximal simplex with one lattice point per facet",
            clause="one_point_per_facet",
        )
    n = S.n
    opposite = {}
    for i, F in enumerate(S.facets):
        (missing,) = set(range(n + 1)) - set(F.incidence)
        opposite[missing] = i
    i0 = opposite[base_vertex]
    y0 = report.per_facet[i0].relative_interior_points[0]
    shift = tuple(-x for x in y0)
    T = S.map_affine(exact.identity(n), shift)
    rep_t = maximality_report(T)
    rows, rhs = [], []
    for i, F in enumerate(T.facets):
        if i == i0:
            continue
        (y,) = rep_t.per_facet[i].relative_interior_points
        rows.append(tuple(Fraction(c) for c in F.normal))
        rhs.append(dot(F.normal, y))
    A = tuple(rows)
    absdet = abs(exact.det(A))
    vol_S = math.prod((2 * b for b in rhs), start=Fraction(1)) / absdet
    # the piece of R(v^0) anchored at the lattice point of the opposite facet
    region = build_region(S, S.vertices[base_vertex])
    fr = region.regions[i0]
    piece = next(b for b in fr.boxes if b.y == y0)
    vol_R0 = fr.piece_volume(piece)
    # int(S) lattice points: enumerate the bounding box of its 2^n vertices
    A_inv = exact.inverse(A)
    corners = [
        exact.matvec(A_inv, tuple(s * b for s, b in zip(signs, rhs)))
        for signs in itertools.product((-1, 1), repeat=n)
    ]
    box = exact.integer_bbox(corners)
    ineqs = [(r, b) for r, b in zip(rows, rhs)] + [(tuple(-x for x in r), b) for r, b in zip(rows, rhs)]
    pts = exact.enumerate_lattice_points([(tuple(int(x) for x in c), d) for c, d in ineqs], box)
    interior = [p for p in pts if all(abs(dot(r, p)) < b for r, b in zip(rows, rhs))]
    lattice_free = interior == [tuple([0] * n)]
    bound = vol_S <= 2**n
    if not bound:
        raise LiftError("symmetric body violates the Minkowski bound", code="INTERNAL")
    return SymmetricBodyCheck(vol_S, vol_R0, vol_S == 2**n * vol_R0, lattice_free, bound, shift)


# -- 2-partitions and slices -------------------------------------------------------

@dataclass(frozen=True)
class TwoPartition:
    """Boundary lattice points satisfy ``c.p in {d, d+1}``; ``c.x = d`` carries a facet."""

    c: tuple
    d: int
    facet_on_H1: int

    def to_json(self):
        return {"c": list(self.c), "d": self.d, "facet_on_H1": self.facet_on_H1}


def find_2partition(P: SimplicialPolytope, report=None) -> Optional[TwoPartition]:
    report = require_maximal(P, report)
    boundary = report.boundary_points()
    for i, F in enumerate(P.facets):
        c = tuple(-x for x in F.normal)
        d = -F.offset
        if d.denominator != 1:
            continue
        values = {sum(a * b for a, b in zip(c, p)) for p in boundary}
        if values == {int(d), int(d) + 1}:
            return TwoPartition(c, int(d), i)
    return None


def unimodular_with_last_row(c) -> tuple:
    """Integer matrix with determinant +-1 whose last row is primitive ``c``."""
    c = tuple(int(x) for x in c)
    n = len(c)
    if c.count(0) == n - 1 and abs(sum(c)) == 1:
        k = next(j for j, x in enumerate(c) if x)
        order = [j for j in range(n) if j != k] + [k]
        return tuple(
            tuple((c[k] if r == n - 1 else 1) * int(j == order[r]) for j in range(n))
            for r in range(n)
        )
    _, U = exact.hnf([[x] for x in c])
    # U c = e^1, so c is the first column of U^{-1}
    W = exact.transpose(exact.inverse(U))
    W = [tuple(int(x) for x in row) for row in W]
    return tuple(W[1:] + W[:1])


def slice_simplex(D: SimplicialPolytope, part: TwoPartition):
    """``D cap {c.x = d+1}`` in lattice coordinates of that hyperplane.

    Returns ``(slice, A)`` where ``A`` is the unimodular map whose last
    coordinate is ``c.x``; slice coordinates are the first n of ``A x``.
    """
    _require_simplex(D)
    level = part.d + 1
    apex_candidates = [k for k in range(len(D.vertices)) if k not in D.facets[part.facet_on_H1].incidence]
    (apex,) = apex_candidates
    height = lambda v: dot(part.c, v)
    if height(D.vertices[apex]) <= level:
        raise LiftError("apex does not reach the second hyperplane", code="SLICE_NOT_SIMPLEX")
    top = D.vertices[apex]
    pts = []
    for k in D.facets[part.facet_on_H1].incidence:
        v = D.vertices[k]
        s = (level - height(v)) / (height(top) - height(v))
        pts.append(exact.vadd(v, exact.vscale(s, vsub(top, v))))
    A = unimodular_with_last_row(part.c)
    mapped = [exact.matvec(exact.qmat(A), p) for p in pts]
    assert all(p[-1] == level for p in mapped)
    S = simplex_from_vertices([p[:-1] for p in mapped])
    report = maximality_report(S)
    if not report.maximal:
        raise LiftError("slice is not maximal lattice-free", code="SLICE_NOT_SIMPLEX")
    return S, A


def partition_verdict(D: SimplicialPolytope) -> StructureVerdict:
    _require_simplex(D)
    report = maximality_report(D)
    if not report.maximal:
        raise HypothesisViolated("simplex is not maximal lattice-free", clause="maximal")
    part = find_2partition(D, report)
    if part is None:
        raise HypothesisViolated("no 2-partition along a facet normal", clause="two_partition")
    counts = report.relint_counts()
    others = [k for i, k in enumerate(counts) if i != part.facet_on_H1]
    if counts[part.facet_on_H1] <= 1 or any(k > 1 for k in others):
        raise HypothesisViolated(
            "the facet on H1 must be the only facet with several relative-interior lattice points",
            clause="single_multi_facet",
            relint_counts=counts,
        )
    S, _ = slice_simplex(D, part)
    witness = equiv_standard_simplex(S, S.n)
    predicted = Prediction.UNIQUE if witness else Prediction.MULTIPLE
    volume = _as_prediction(classify_body(D))
    return StructureVerdict(predicted, volume, predicted == volume, witness, part, S)
