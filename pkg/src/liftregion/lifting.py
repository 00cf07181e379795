"""Lifting regions ``R(f)`` of simplicial maximal lattice-free polytopes and
their exact volume modulo ``Z^n``.

For facet ``i`` with vertices ``v^{i1..in}`` every integer point ``y`` on the
closed facet has barycentric coordinates ``lam`` (independent of ``f``), and
the parallelotope ``R_{iy}`` is the image of the axis-aligned box
``[0, lam]`` under ``mu -> f + G mu`` with ``G = [v^{ij} - f]``.  A lattice
vector ``t`` with ``a^i . t = 0`` acts on these mu-coordinates as the
translation ``tau(t)``, again independent of ``f``.  Only such ``t`` can make
pieces of the same facet overlap, and pieces of different facets never
overlap modulo the lattice, so the torus volume is a sum over facets of
``|det G_i|`` times a mu-space box-union measure.
"""
from __future__ import annotations

import enum
import functools
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import exact
from .errors import CapExceededError, LiftError
from .exact import dot, qvec, vadd, vsub
from .polytope import (
    SimplicialPolytope,
    gauge_psi,
    maximality_report,
    normalized_normals,
)


# -- f-independent facet data --------------------------------------------------

@dataclass(frozen=True)
class Box:
    """mu-space box ``[0, lam]`` belonging to the facet lattice point ``y``."""

    y: tuple
    lam: tuple

    @property
    def degenerate(self) -> bool:
        return any(x == 0 for x in self.lam)


@dataclass(frozen=True)
class FacetData:
    index: int
    normal: tuple
    vertices: tuple
    boxes: tuple
    lattice: exact.IntLattice
    ref_inv: tuple  # inverse of [v^{ij} - p] for an interior reference point p
    ref_point: tuple

    def tau(self, t) -> tuple:
        """mu-coordinates of a lattice vector ``t`` with ``a.t = 0``."""
        return exact.matvec(self.ref_inv, qvec(t))

    def barycentric(self, x) -> tuple:
        """Affine coordinates of a point of the facet hyperplane."""
        return exact.matvec(self.ref_inv, vsub(qvec(x), self.ref_point))


def _facet_basis_inverse(P: SimplicialPolytope, i: int):
    p = P.centroid()
    cols = [vsub(v, p) for v in P.facet_vertices(i)]
    return exact.inverse(exact.columns_to_matrix(cols)), p


def barycentric_on_facet(P: SimplicialPolytope, i: int, y) -> tuple:
    """Coefficients ``lam >= 0`` with ``sum lam = 1`` and ``sum lam_j v^{ij} = y``."""
    inv, p = _facet_basis_inverse(P, i)
    lam = exact.matvec(inv, vsub(qvec(y), p))
    if sum(lam) != 1 or any(x < 0 for x in lam):
        raise LiftError(f"{exact.fmt_vec(y)} is not on facet {i}", code="NOT_ON_FACET")
    return lam


@functools.lru_cache(maxsize=256)
def facet_data(P: SimplicialPolytope) -> tuple:
    report = maximality_report(P)
    out = []
    for i, F in enumerate(P.facets):
        inv, p = _facet_basis_inverse(P, i)
        boxes = []
        for y in report.per_facet[i].all_points:
            lam = exact.matvec(inv, vsub(qvec(y), p))
            assert sum(lam) == 1 and all(x >= 0 for x in lam)
            boxes.append(Box(y, lam))
        out.append(
            FacetData(
                i,
                F.normal,
                P.facet_vertices(i),
                tuple(boxes),
                exact.kernel_lattice(F.normal),
                inv,
                p,
            )
        )
    return tuple(out)


# -- the region for a given f ----------------------------------------------------

@dataclass(frozen=True)
class FacetRegion:
    data: FacetData
    f: tuple
    G: tuple
    absdet: Fraction
    G_inv: Optional[tuple]

    @property
    def index(self):
        return self.data.index

    @property
    def boxes(self):
        return self.data.boxes

    @property
    def lattice(self):
        return self.data.lattice

    def mu(self, x) -> tuple:
        return exact.matvec(self.G_inv, vsub(qvec(x), self.f))

    def corner_points(self, box: Box):
        """The 2^n vertices of the parallelotope ``R_{iy}``."""
        cols = exact.transpose(self.G)
        pts = []
        for mask in itertools.product((0, 1), repeat=len(self.f)):
            p = self.f
            for j, bit in enumerate(mask):
                if bit:
                    p = vadd(p, exact.vscale(box.lam[j], cols[j]))
            pts.append(p)
        return pts

    def piece_volume(self, box: Box) -> Fraction:
        return self.absdet * math.prod(box.lam, start=Fraction(1))

    def contains(self, x) -> bool:
        x = qvec(x)
        if self.G_inv is not None:
            mu = self.mu(x)
            return any(all(0 <= m <= l for m, l in zip(mu, b.lam)) for b in self.boxes)
        return self._contains_flat(x)

    def _contains_flat(self, x) -> bool:
        # f lies on this facet: x - f = sum mu_j (v_j - f) holds iff
        # mu = (xi - beta) + S beta for the free scalar S = sum mu_j
        if dot(self.data.normal, x) != dot(self.data.normal, self.f):
            return False
        xi = self.data.barycentric(x)
        beta = self.data.barycentric(self.f)
        for b in self.boxes:
            lo, hi = None, None
            ok = True
            for xj, bj, lj in zip(xi, beta, b.lam):
                if bj == 0:
                    if not (0 <= xj <= lj):
                        ok = False
                        break
                    continue
                a = (bj - xj) / bj
                c = (lj - xj + bj) / bj
                lo = a if lo is None else max(lo, a)
                hi = c if hi is None else min(hi, c)
            if ok and (lo is None or lo <= hi):
                return True
        return False


@dataclass(frozen=True)
class LiftingRegion:
    polytope: SimplicialPolytope
    f: tuple
    regions: tuple
    is_boundary_f: bool


def build_region(P: SimplicialPolytope, f) -> LiftingRegion:
    f = qvec(f)
    if len(f) != P.n or not P.contains(f):
        raise LiftError("f lies outside the body", code="F_OUTSIDE")
    regions = []
    for fd in facet_data(P):
        cols = [vsub(v, f) for v in fd.vertices]
        G = exact.columns_to_matrix(cols)
        d = exact.det(G)
        G_inv = exact.inverse(G) if d != 0 else None
        regions.append(FacetRegion(fd, f, G, abs(d), G_inv))
    return LiftingRegion(P, f, tuple(regions), not P.in_interior(f))


def membership(region: LiftingRegion, x) -> bool:
    """Exact test ``x in R(f)``."""
    return any(r.contains(x) for r in region.regions)


# -- exact torus volume ----------------------------------------------------------

_ORDERS = {"lex": exact.lex_positive, "revlex": exact.revlex_positive}


def overlap_translations(fr: FacetRegion, order: str = "lex", cap=None) -> list:
    """Lattice vectors ``t`` in the facet's intersection lattice with
    ``t > 0`` in the term order whose mu-shift makes two full-dimensional
    boxes overlap in a set of positive measure."""
    positive = _ORDERS[order]
    boxes = [b for b in fr.boxes if not b.degenerate]
    basis = fr.lattice.basis
    n = len(fr.f)
    if not boxes or not basis:
        return []
    reach = [max(b.lam[j] for b in boxes) for j in range(n)]
    T = [fr.data.tau(b) for b in basis]  # columns tau(b_m)
    m = len(T)
    # pick m rows of T forming an invertible block; |tau_j| < reach_j bounds z
    for rows in itertools.combinations(range(n), m):
        block = [[T[c][r] for c in range(m)] for r in rows]
        if exact.det(block) != 0:
            break
    else:
        raise LiftError("translation map has deficient rank", code="SINGULAR")
    block_inv = exact.inverse(block)
    bounds = [
        exact.floor_q(sum(abs(block_inv[k][s]) * reach[r] for s, r in enumerate(rows)))
        for k in range(m)
    ]
    cap = exact.enum_cap() if cap is None else cap
    count = math.prod(2 * b + 1 for b in bounds)
    if count > cap:
        raise CapExceededError(
            f"{count} translation candidates exceed cap {cap}",
            code="ENUMERATION_CAP",
            candidates=count,
        )
    out = []
    for z in itertools.product(*(range(-b, b + 1) for b in bounds)):
        if not any(z):
            continue
        t = fr.lattice.combine(z)
        if not positive(t):
            continue
        tau = tuple(sum(zk * T[k][j] for k, zk in enumerate(z)) for j in range(n))
        if any(abs(tau[j]) >= reach[j] for j in range(n)):
            continue
        if any(
            all(tau[j] < bk.lam[j] and tau[j] + bl.lam[j] > 0 for j in range(n))
            for bk in boxes
            for bl in boxes
        ):
            out.append((t, tau))
    return out


def _scaled_axis(values):
    den = math.lcm(*(v.denominator for v in values))
    return den, sorted({int(v * den) for v in values})


def _box_minus_union(box_hi, others) -> Fraction:
    """Measure of ``[0, box_hi] minus the union of ``others``
    (each a (lo, hi) pair), by coordinate-grid cell classification."""
    n = len(box_hi)
    clipped = []
    for lo, hi in others:
        clo = tuple(max(Fraction(0), a) for a in lo)
        chi = tuple(min(b, c) for b, c in zip(box_hi, hi))
        if all(a < b for a, b in zip(clo, chi)):
            clipped.append((clo, chi))
    full = math.prod(box_hi, start=Fraction(1))
    if not clipped:
        return full
    dens, cuts = [], []
    for j in range(n):
        vals = [Fraction(0), box_hi[j]] + [c[0][j] for c in clipped] + [c[1][j] for c in clipped]
        den, axis = _scaled_axis(vals)
        dens.append(den)
        cuts.append(axis)
    covered = np.zeros(tuple(len(c) - 1 for c in cuts), dtype=bool)
    for lo, hi in clipped:
        sl = []
        for j in range(n):
            a = cuts[j].index(int(lo[j] * dens[j]))
            b = cuts[j].index(int(hi[j] * dens[j]))
            sl.append(slice(a, b))
        covered[tuple(sl)] = True
    widths = [np.diff(np.array(c, dtype=object)) for c in cuts]
    bound = math.prod(c[-1] - c[0] for c in cuts)
    free = ~covered
    if bound < 2**62:
        acc = free.astype(np.int64)
        for w in reversed(widths):
            acc = acc @ w.astype(np.int64)
        scaled = int(acc)
    else:
        acc = free.astype(object)
        for w in reversed(widths):
            acc = acc.dot(w)
        scaled = int(acc)
    return Fraction(scaled, math.prod(dens))


def facet_mu_measure(fr: FacetRegion, order: str = "lex", cap=None) -> Fraction:
    """mu-space measure of the canonical representatives of the facet's
    pieces modulo the lattice: ``U - union_{t > 0} (U + tau(t))``."""
    boxes = sorted({b.lam for b in fr.boxes if not b.degenerate})
    if not boxes:
        return Fraction(0)
    shifts = [tau for _, tau in overlap_translations(fr, order, cap)]
    zero = tuple(Fraction(0) for _ in fr.f)
    shifted = [
        (tau, vadd(tau, lam)) for tau in shifts for lam in boxes
    ]
    total = Fraction(0)
    for k, lam in enumerate(boxes):
        others = [(zero, prev) for prev in boxes[:k]] + shifted
        others = [
            (lo, hi)
            for lo, hi in others
            if all(a < l and b > 0 for a, b, l in zip(lo, hi, lam))
        ]
        total += _box_minus_union(lam, others)
    return total


@dataclass(frozen=True)
class Verdict:
    torus_volume: Fraction
    unique_lifting: bool
    per_facet_volumes: tuple
    witnesses: Optional[tuple] = None

    def to_json(self) -> dict:
        out = {
            "torus_volume": exact.fmt(self.torus_volume),
            "unique_lifting": self.unique_lifting,
            "per_facet": [exact.fmt(v) for v in self.per_facet_volumes],
        }
        if self.witnesses:
            out["witnesses"] = [exact.fmt_vec(w) for w in self.witnesses]
        return out


def torus_volume_exact(region: LiftingRegion, order: str = "lex", cap=None,
                       witness: bool = False) -> Verdict:
    per_facet = []
    for fr in region.regions:
        if fr.absdet == 0:
            per_facet.append(Fraction(0))
            continue
        per_facet.append(fr.absdet * facet_mu_measure(fr, order, cap))
    vol = sum(per_facet, Fraction(0))
    if vol > 1:
        raise LiftError(f"torus volume {vol} exceeds 1", code="INTERNAL")
    wit = None
    if witness and vol < 1:
        w = find_uncovered_witness(region)
        wit = (w,) if w is not None else None
    return Verdict(vol, vol == 1, tuple(per_facet), wit)


def torus_volume_at(P: SimplicialPolytope, f, order: str = "lex") -> Fraction:
    return torus_volume_exact(build_region(P, f), order).torus_volume


# -- coverage checks -------------------------------------------------------------

def point_covered(region: LiftingRegion, x) -> bool:
    """Exact test whether ``x + w`` lies in ``R(f)`` for some integer ``w``."""
    x = qvec(x)
    lo, hi = exact.integer_bbox(region.polytope.vertices)
    vlo = [min(v[j] for v in region.polytope.vertices) for j in range(len(x))]
    vhi = [max(v[j] for v in region.polytope.vertices) for j in range(len(x))]
    ranges = [
        range(exact.ceil_q(a - xj), exact.floor_q(b - xj) + 1)
        for a, b, xj in zip(vlo, vhi, x)
    ]
    return any(
        membership(region, vadd(x, qvec(w))) for w in itertools.product(*ranges)
    )


def _ceil_div(a, b):
    return -((-a) // b)


def _mark_box(cover_diff, full, fr: FacetRegion, box: Box, N: int):
    """Mark grid cells ``(2m+1)/(2N)`` lying in the parallelotope, modulo N."""
    n = len(fr.f)
    s = 2 * N
    H, lo_c, hi_c = [], [], []
    for j in range(n):
        h = fr.G_inv[j]
        q = math.lcm(*(x.denominator for x in h))
        Hj = [int(x * q) for x in h]
        hf = dot(h, fr.f)
        H.append(Hj)
        lo_c.append(exact.ceil_q(q * s * hf))
        hi_c.append(exact.floor_q(q * s * (box.lam[j] + hf)))
    corners = fr.corner_points(box)
    mlo = [exact.ceil_q((s * min(p[j] for p in corners) - 1) / 2) for j in range(n)]
    mhi = [exact.floor_q((s * max(p[j] for p in corners) - 1) / 2) for j in range(n)]
    if any(a > b for a, b in zip(mlo, mhi)):
        return
    magnitude = max(abs(x) for row in H for x in row) * n * (2 * max(map(abs, mlo + mhi)) + 2)
    if magnitude + max(map(abs, lo_c + hi_c)) >= 2**62:
        raise LiftError("oracle grid too fine for 64-bit arithmetic", code="ORACLE_OVERFLOW")
    Hn = np.array(H, dtype=np.int64)
    if n > 1:
        axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(mlo[:-1], mhi[:-1])]
        prefix = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n - 1)
    else:
        prefix = np.zeros((1, 0), dtype=np.int64)
    rest = (2 * prefix + 1) @ Hn[:, :-1].T + Hn[:, -1]  # shape (L, n)
    low = np.full(prefix.shape[0], mlo[-1], dtype=np.int64)
    high = np.full(prefix.shape[0], mhi[-1], dtype=np.int64)
    for j in range(n):
        c = int(Hn[j, -1])
        a = lo_c[j] - rest[:, j]
        b = hi_c[j] - rest[:, j]
        if c > 0:
            low = np.maximum(low, _ceil_div(a, 2 * c))
            high = np.minimum(high, b // (2 * c))
        elif c < 0:
            low = np.maximum(low, _ceil_div(-b, -2 * c))
            high = np.minimum(high, (-a) // (-2 * c))
        else:
            bad = (a > 0) | (b < 0)
            high = np.where(bad, low - 1, high)
    keep = high >= low
    prefix, low, high = prefix[keep], low[keep], high[keep]
    if prefix.shape[0] == 0:
        return
    pidx = tuple((prefix % N).T)
    length = high - low + 1
    wide = length >= N
    if np.any(wide):
        full[tuple(a[wide] for a in pidx)] = True
    narrow = ~wide
    pidx = tuple(a[narrow] for a in pidx)
    start = low[narrow] % N
    end = start + length[narrow]
    np.add.at(cover_diff, pidx + (start,), 1)
    inside = end <= N
    np.add.at(cover_diff, tuple(a[inside] for a in pidx) + (end[inside],), -1)
    wrap = ~inside
    wp = tuple(a[wrap] for a in pidx)
    np.add.at(cover_diff, wp + (np.zeros(int(wrap.sum()), dtype=np.int64),), 1)
    np.add.at(cover_diff, wp + (end[wrap] - N,), -1)


@dataclass(frozen=True)
class OracleResult:
    covered_fraction: Fraction
    uncovered_samples: tuple
    N: int

    def to_json(self):
        return {
            "N": self.N,
            "covered_fraction": exact.fmt(self.covered_fraction),
            "uncovered_samples": [exact.fmt_vec(p) for p in self.uncovered_samples],
        }


def cover_grid(region: LiftingRegion, N: int) -> np.ndarray:
    """Boolean array over the torus grid ``(2m+1)/(2N)``, True where covered.

    Only full-dimensional pieces are rasterized; grid points hitting the
    measure-zero pieces are a null event that the exact check handles.
    """
    if N < 2:
        raise LiftError("grid resolution must be at least 2", code="BAD_RESOLUTION")
    n = region.polytope.n
    diff = np.zeros((N,) * (n - 1) + (N + 1,), dtype=np.int64)
    full = np.zeros((N,) * (n - 1), dtype=bool) if n > 1 else np.zeros((), dtype=bool)
    for fr in region.regions:
        if fr.absdet == 0:
            continue
        for box in fr.boxes:
            if not box.degenerate:
                _mark_box(diff, full, fr, box, N)
    covered = np.cumsum(diff, axis=-1)[..., :N] > 0
    covered |= full[..., None] if n > 1 else full
    return covered


def torus_cover_oracle(region: LiftingRegion, N: int, max_samples: int = 10) -> OracleResult:
    covered = cover_grid(region, N)
    n = region.polytope.n
    holes = np.argwhere(~covered)[:max_samples]
    samples = tuple(
        tuple(Fraction(2 * int(m) + 1, 2 * N) for m in idx) for idx in holes
    )
    return OracleResult(Fraction(int(covered.sum()), N**n), samples, N)


def find_uncovered_witness(region: LiftingRegion, levels=(4, 8, 16, 32, 64)):
    """A point of the torus certified (exactly) to be outside ``R(f) + Z^n``."""
    for N in levels:
        covered = cover_grid(region, N)
        for idx in np.argwhere(~covered)[:20]:
            x = tuple(Fraction(2 * int(m) + 1, 2 * N) for m in idx)
            if not point_covered(region, x):
                return x
    return None


# -- behaviour in f --------------------------------------------------------------

def random_interior_points(P: SimplicialPolytope, count: int, seed: int = 0) -> list:
    """Rational points with strictly positive weights on every vertex."""
    rng = random.Random(seed)
    pts = []
    for _ in range(count):
        w = [rng.randint(1, 20) for _ in P.vertices]
        tot = sum(w)
        pts.append(
            tuple(
                sum(Fraction(wk, tot) * v[j] for wk, v in zip(w, P.vertices))
                for j in range(P.n)
            )
        )
    return pts


@functools.lru_cache(maxsize=256)
def vertex_volumes(P: SimplicialPolytope) -> tuple:
    return tuple(torus_volume_at(P, v) for v in P.vertices)


@dataclass(frozen=True)
class AffineFit:
    coefficients: tuple
    constant: Fraction
    vertex_volumes: tuple
    probes: tuple
    probe_volumes: tuple
    residuals: tuple
    verified: bool

    def __call__(self, f):
        return dot(self.coefficients, qvec(f)) + self.constant

    def to_json(self):
        return {
            "coefficients": exact.fmt_vec(self.coefficients),
            "constant": exact.fmt(self.constant),
            "vertex_volumes": exact.fmt_vec(self.vertex_volumes),
            "probes": [exact.fmt_vec(p) for p in self.probes],
            "probe_volumes": exact.fmt_vec(self.probe_volumes),
            "residuals": exact.fmt_vec(self.residuals),
            "verified": self.verified,
        }


def affine_volume_function(P: SimplicialPolytope, probes: int = 5, seed: int = 0) -> AffineFit:
    """Fit ``vol(f) = c.f + c0`` from vertex volumes and verify it elsewhere."""
    vols = vertex_volumes(P)
    basis = []
    for k, v in enumerate(P.vertices):
        if exact.affinely_independent([P.vertices[j] for j in basis] + [v]):
            basis.append(k)
        if len(basis) == P.n + 1:
            break
    A = [tuple(P.vertices[k]) + (Fraction(1),) for k in basis]
    sol = exact.solve(A, [vols[k] for k in basis])
    coeffs, const = sol[:-1], sol[-1]
    checks = [P.vertices[k] for k in range(len(P.vertices)) if k not in basis]
    checks.append(P.centroid())
    checks += random_interior_points(P, probes, seed)
    measured = tuple(torus_volume_at(P, p) for p in checks)
    residuals = tuple(m - (dot(coeffs, p) + const) for m, p in zip(measured, checks))
    return AffineFit(
        tuple(coeffs), const, vols, tuple(checks), measured, residuals,
        all(r == 0 for r in residuals),
    )


class BodyClass(str, enum.Enum):
    UNIQUE_FOR_ALL_F = "UNIQUE_FOR_ALL_F"
    MULTIPLE_FOR_ALL_F = "MULTIPLE_FOR_ALL_F"


def classify_body(P: SimplicialPolytope) -> BodyClass:
    """The set where the volume equals 1 is a face, so vertices decide."""
    if all(v == 1 for v in vertex_volumes(P)):
        return BodyClass.UNIQUE_FOR_ALL_F
    return BodyClass.MULTIPLE_FOR_ALL_F


def lift_candidates(P: SimplicialPolytope, f, r, region=None):
    """Pairs ``(w, psi(r + w))`` for integer ``w`` with ``f + r + w`` in R(f)."""
    f, r = qvec(f), qvec(r)
    region = region or build_region(P, f)
    normals = normalized_normals(P, f)
    p = vadd(f, r)
    vlo = [min(v[j] for v in P.vertices) for j in range(P.n)]
    vhi = [max(v[j] for v in P.vertices) for j in range(P.n)]
    ranges = [
        range(exact.ceil_q(a - pj), exact.floor_q(b - pj) + 1)
        for a, b, pj in zip(vlo, vhi, p)
    ]
    out = []
    for w in itertools.product(*ranges):
        wq = qvec(w)
        if membership(region, vadd(p, wq)):
            out.append((w, gauge_psi(P, f, vadd(r, wq), normals)))
    return out


def lift_value(P: SimplicialPolytope, f, r, region=None) -> Fraction:
    """Value at ``r`` of the unique minimal lifting (trivial fill-in)."""
    if classify_body(P) is not BodyClass.UNIQUE_FOR_ALL_F:
        raise LiftError("body has multiple minimal liftings", code="MULTIPLE_LIFTINGS")
    if not P.in_interior(qvec(f)):
        raise LiftError("f is not in the interior of the body", code="F_NOT_INTERIOR")
    cands = lift_candidates(P, f, r, region)
    assert cands, "covering property violated"
    return min(v for _, v in cands)
