"""Exact rational linear algebra and integer-lattice utilities.

Scalars are :class:`fractions.Fraction`; vectors are tuples of Fractions and
matrices are tuples of row tuples. Integer vectors are tuples of ``int``.
Nothing in here touches floating point.
"""
from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, LiftError, SingularMatrixError

DEFAULT_ENUM_CAP = 10**7

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")

Vec = tuple
Mat = tuple


def enum_cap() -> int:
    """Enumeration cap, overridable through ``LIFTING_ENUM_CAP``."""
    raw = os.environ.get("LIFTING_ENUM_CAP")
    return int(raw) if raw else DEFAULT_ENUM_CAP


# -- scalars -----------------------------------------------------------------

def Q(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused on purpose.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if not m:
            raise ValueError(f"not a rational of the form p or p/q: {value!r}")
        num, den = m.group(1), m.group(2)
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in {value!r}")
        return Fraction(int(num), int(den) if den else 1)
    raise TypeError(f"refusing to convert {type(value).__name__} to a rational")


def fmt(q) -> str:
    q = Q(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def qvec(values: Iterable) -> Vec:
    return tuple(Q(v) for v in values)


def qmat(rows: Iterable[Iterable]) -> Mat:
    return tuple(qvec(r) for r in rows)


def fmt_vec(v) -> list:
    return [fmt(x) for x in v]


def is_integral(v) -> bool:
    return all(Q(x).denominator == 1 for x in v)


def as_int_vec(v) -> tuple:
    if not is_integral(v):
        raise LiftError(f"{fmt_vec(v)} is not an integer vector", code="NOT_INTEGRAL")
    return tuple(int(Q(x)) for x in v)


def floor_q(q) -> int:
    q = Q(q)
    return q.numerator // q.denominator


def ceil_q(q) -> int:
    q = Q(q)
    return -((-q.numerator) // q.denominator)


# -- vectors -----------------------------------------------------------------

def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def vadd(u, v) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vscale(s, v) -> Vec:
    return tuple(s * a for a in v)


def lex_positive(v) -> bool:
    for x in v:
        if x:
            return x > 0
    return False


def revlex_positive(v) -> bool:
    return lex_positive(tuple(reversed(tuple(v))))


# -- matrices ----------------------------------------------------------------

def identity(n: int) -> Mat:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(M) -> Mat:
    return tuple(zip(*M))


def matvec(M, v) -> Vec:
    return tuple(dot(row, v) for row in M)


def matmul(A, B) -> Mat:
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def columns_to_matrix(cols: Sequence[Sequence]) -> Mat:
    return transpose([qvec(c) for c in cols])


def det(M) -> Fraction:
    """Exact determinant by Gaussian elimination over the rationals."""
    A = [list(qvec(r)) for r in M]
    n = len(A)
    if any(len(r) != n for r in A):
        raise LiftError("determinant of a non-square matrix", code="NOT_SQUARE")
    sign = 1
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        piv = A[c][c]
        result *= piv
        for r in range(c + 1, n):
            if A[r][c]:
                factor = A[r][c] / piv
                A[r] = [a - factor * b for a, b in zip(A[r], A[c])]
    return sign * result


def _gauss_jordan(A, B):
    """Reduce [A | B] to [I | A^-1 B]; raises on singular A."""
    n = len(A)
    aug = [list(qvec(A[i])) + list(qvec(B[i])) for i in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                factor = aug[r][c]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


def solve(A, b) -> Vec:
    """Return x with A x = b exactly. Raises SingularMatrixError."""
    if any(len(r) != len(A) for r in A):
        raise LiftError("solve needs a square matrix", code="NOT_SQUARE")
    return tuple(r[0] for r in _gauss_jordan(A, [[x] for x in b]))


def inverse(A) -> Mat:
    return _gauss_jordan(A, identity(len(A)))


def rank(M) -> int:
    A = [list(qvec(r)) for r in M]
    rows = len(A)
    cols = len(A[0]) if A else 0
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(r + 1, rows):
            if A[i][c]:
                factor = A[i][c] / A[r][c]
                A[i] = [a - factor * b for a, b in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def affinely_independent(points) -> bool:
    pts = [qvec(p) for p in points]
    if len(pts) <= 1:
        return True
    base = pts[0]
    return rank([vsub(p, base) for p in pts[1:]]) == len(pts) - 1


# -- integer lattices --------------------------------------------------------

def primitive_normal(v) -> tuple:
    """Smallest integer vector positively parallel to ``v``.

    Only scaling is applied, never a sign flip: an inequality normal must
    keep its direction.
    """
    v = qvec(v)
    if not any(v):
        raise LiftError("zero vector has no primitive normal", code="ZERO_VECTOR")
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    return tuple(x // g for x in ints)


def hnf(M):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` as tuples of int rows with ``U`` unimodular and
    ``U @ M == H``. Pivots are positive and entries above a pivot lie in
    ``[0, pivot)``. Zero rows are kept at the bottom.
    """
    H = [[int(x) for x in row] for row in M]
    m = len(H)
    ncols = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap(a, b):
        H[a], H[b] = H[b], H[a]
        U[a], U[b] = U[b], U[a]

    def addmul(dst, src, k):
        # row_dst -= k * row_src
        if k:
            H[dst] = [x - k * y for x, y in zip(H[dst], H[src])]
            U[dst] = [x - k * y for x, y in zip(U[dst], U[src])]

    r = 0
    for c in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            swap(r, p)
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    addmul(i, r, H[i][c] // H[r][c])
                    if H[i][c]:
                        done = False
            if done:
                break
        if all(H[i][c] == 0 for i in range(r, m)):
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            addmul(i, r, H[i][c] // H[r][c])
        r += 1
    return tuple(map(tuple, H)), tuple(map(tuple, U))


def int_det(M) -> int:
    return int(det(M))


def is_unimodular(M) -> bool:
    return all(Q(x).denominator == 1 for row in M for x in row) and abs(det(M)) == 1


@dataclass(frozen=True)
class IntLattice:
    """Integer lattice given by HNF-reduced basis rows."""

    n: int
    basis: tuple

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, x) -> bool:
        x = tuple(int(v) for v in x)
        if len(x) != self.n:
            return False
        if not self.basis:
            return not any(x)
        # basis is in echelon form: peel off pivots left to right
        rest = list(x)
        for row in self.basis:
            c = next(j for j, v in enumerate(row) if v)
            q, rem = divmod(rest[c], row[c])
            if rem:
                return False
            rest = [a - q * b for a, b in zip(rest, row)]
        return not any(rest)

    def combine(self, coeffs) -> tuple:
        out = [0] * self.n
        for z, row in zip(coeffs, self.basis):
            out = [a + z * b for a, b in zip(out, row)]
        return tuple(out)


def kernel_lattice(a) -> IntLattice:
    """Basis of ``{x in Z^n : a.x = 0}`` for a primitive integer ``a``."""
    a = tuple(int(x) for x in a)
    if not any(a):
        raise LiftError("kernel of the zero vector", code="ZERO_VECTOR")
    if math.gcd(*a) != 1:
        raise LiftError(f"{a} is not primitive", code="NOT_PRIMITIVE")
    n = len(a)
    _, U = hnf([[x] for x in a])
    # U a = (1, 0, ..., 0): the remaining rows of U span the kernel
    rows = [row for row in U[1:]]
    if not rows:
        return IntLattice(n, ())
    H, _ = hnf(rows)
    basis = tuple(row for row in H if any(row))
    return IntLattice(n, basis)


# -- lattice-point enumeration -----------------------------------------------

def _int_rhs(d) -> int:
    # c.x <= d with integral c, x  <=>  c.x <= floor(d)
    return floor_q(d)


def enumerate_lattice_points(ineqs, bbox, cap: int | None = None) -> list:
    """Integer points of the box ``bbox = (lo, hi)`` (inclusive) satisfying
    every ``c.x <= d`` in ``ineqs``. Lexicographic order.
    """
    cap = enum_cap() if cap is None else cap
    lo, hi = (tuple(int(v) for v in b) for b in bbox)
    n = len(lo)
    sizes = [h - l + 1 for l, h in zip(lo, hi)]
    if any(s <= 0 for s in sizes):
        return []
    total = math.prod(sizes)
    if total > cap:
        raise CapExceededError(
            f"box holds {total} candidates, cap is {cap}", candidates=total, cap=cap
        )
    C = [tuple(int(x) for x in c) for c, _ in ineqs]
    D = [_int_rhs(d) for _, d in ineqs]
    bound = max([abs(v) for v in lo + hi] + [1])
    cmax = max([abs(x) for c in C for x in c] + [1])
    if not C:
        return [tuple(p) for p in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi)))]
    if n * cmax * bound >= 2**62 or max(abs(d) for d in D) >= 2**62:
        return _enumerate_python(C, D, lo, hi)
    Cn = np.array(C, dtype=np.int64)
    Dn = np.array(D, dtype=np.int64)
    out = []
    # chunk over the first axis to bound memory
    tail = [np.arange(l, h + 1, dtype=np.int64) for l, h in zip(lo[1:], hi[1:])]
    if tail:
        grid = np.stack(np.meshgrid(*tail, indexing="ij"), axis=-1).reshape(-1, n - 1)
    else:
        grid = np.zeros((1, 0), dtype=np.int64)
    for x0 in range(lo[0], hi[0] + 1):
        pts = np.concatenate([np.full((grid.shape[0], 1), x0, dtype=np.int64), grid], axis=1)
        ok = np.all(pts @ Cn.T <= Dn, axis=1)
        out.extend(tuple(int(v) for v in p) for p in pts[ok])
    return out


def _enumerate_python(C, D, lo, hi):
    out = []
    for p in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi))):
        if all(sum(a * b for a, b in zip(c, p)) <= d for c, d in zip(C, D)):
            out.append(tuple(p))
    return out


def integer_bbox(points) -> tuple:
    """Smallest integer box containing every point."""
    pts = [qvec(p) for p in points]
    n = len(pts[0])
    lo = tuple(ceil_q(min(p[j] for p in pts)) for j in range(n))
    hi = tuple(floor_q(max(p[j] for p in pts)) for j in range(n))
    return lo, hi
