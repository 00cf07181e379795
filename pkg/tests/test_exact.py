import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftregion import exact
from liftregion.errors import CapExceededError, LiftError, SingularMatrixError

ints = st.integers(min_value=-9, max_value=9)
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def square(n, elems=ints):
    return st.lists(st.lists(elems, min_size=n, max_size=n), min_size=n, max_size=n)


def test_Q_parses_integers_and_ratios():
    assert exact.Q("3/4") == Fraction(3, 4)
    assert exact.Q("-2") == -2
    assert exact.Q(" 5 / 10 ") == Fraction(1, 2)
    assert exact.Q(7) == 7
    assert exact.Q(Fraction(2, 3)) == Fraction(2, 3)


@pytest.mark.parametrize("bad", ["0.5", "1e3", "1/0", "abc", 0.5, True, ""])
def test_Q_rejects_floats_and_garbage(bad):
    with pytest.raises((ValueError, TypeError)):
        exact.Q(bad)


def test_fmt_roundtrip():
    for q in (Fraction(0), Fraction(-7, 3), Fraction(5)):
        assert exact.Q(exact.fmt(q)) == q
    assert exact.fmt(Fraction(4, 2)) == "2"


def test_floor_ceil():
    assert exact.floor_q(Fraction(-1, 2)) == -1
    assert exact.ceil_q(Fraction(-1, 2)) == 0
    assert exact.floor_q(3) == exact.ceil_q(3) == 3


def test_term_orders():
    assert exact.lex_positive((0, 1, -5))
    assert not exact.lex_positive((0, -1, 5))
    assert exact.revlex_positive((-5, 0, 1, 0))
    assert not exact.revlex_positive((5, -1, 0))


def test_det_solve_inverse_small():
    A = exact.qmat([[2, 1], [1, 1]])
    assert exact.det(A) == 1
    assert exact.solve(A, (3, 2)) == (1, 1)
    assert exact.matmul(A, exact.inverse(A)) == exact.identity(2)
    with pytest.raises(SingularMatrixError):
        exact.inverse([[1, 2], [2, 4]])


@settings(max_examples=60, deadline=None)
@given(square(3, rationals), st.lists(rationals, min_size=3, max_size=3))
def test_solve_consistent(A, b):
    if exact.det(A) == 0:
        with pytest.raises(SingularMatrixError):
            exact.solve(A, b)
        return
    x = exact.solve(A, b)
    assert exact.matvec(exact.qmat(A), x) == tuple(b)


@settings(max_examples=60, deadline=None)
@given(square(3))
def test_det_matches_leibniz(A):
    leib = 0
    for perm in itertools.permutations(range(3)):
        sign = (-1) ** sum(1 for i, j in itertools.combinations(range(3), 2) if perm[i] > perm[j])
        leib += sign * A[0][perm[0]] * A[1][perm[1]] * A[2][perm[2]]
    assert exact.det(A) == leib


def test_hnf_known_value():
    H, U = exact.hnf([[2, 4], [1, 3]])
    assert H == ((1, 1), (0, 2))
    assert U == ((1, -1), (-1, 2))


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(
    lambda m: st.lists(st.lists(ints, min_size=3, max_size=3), min_size=m, max_size=m)))
def test_hnf_is_unimodular_transform(M):
    H, U = exact.hnf(M)
    assert exact.is_unimodular(U)
    assert exact.matmul(exact.qmat(U), exact.qmat(M)) == exact.qmat(H)
    # echelon: pivot columns strictly increase, pivots positive
    pivots = [next((j for j, x in enumerate(r) if x), None) for r in H]
    nz = [p for p in pivots if p is not None]
    assert nz == sorted(set(nz))
    for r, p in zip(H, pivots):
        if p is not None:
            assert r[p] > 0


def brute_kernel(a, R=4):
    return {x for x in itertools.product(range(-R, R + 1), repeat=len(a))
            if sum(p * q for p, q in zip(a, x)) == 0}


@pytest.mark.parametrize("a", [(2, 3), (0, 0, 1), (1, 1), (1, -2, 3), (3, 5, 7), (1, 0, 0, 2)])
def test_kernel_lattice_matches_brute_force(a):
    L = exact.kernel_lattice(a)
    assert L.rank == len(a) - 1
    R = 4
    box = list(itertools.product(range(-R, R + 1), repeat=len(a)))
    assert {x for x in box if L.contains(x)} == brute_kernel(a, R)
    for row in L.basis:
        assert sum(p * q for p, q in zip(a, row)) == 0


def test_kernel_lattice_known_bases():
    assert exact.kernel_lattice((2, 3)).basis == ((3, -2),)
    assert exact.kernel_lattice((0, 0, 1)).basis == ((1, 0, 0), (0, 1, 0))
    assert exact.kernel_lattice((1, 1)).basis == ((1, -1),)


def test_kernel_lattice_errors():
    with pytest.raises(LiftError) as e:
        exact.kernel_lattice((2, 4))
    assert e.value.code == "NOT_PRIMITIVE"
    with pytest.raises(LiftError) as e:
        exact.kernel_lattice((0, 0))
    assert e.value.code == "ZERO_VECTOR"


def naive_points(ineqs, lo, hi):
    return [p for p in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
            if all(sum(c * x for c, x in zip(cc, p)) <= d for cc, d in ineqs)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.tuples(ints, ints, ints), rationals), min_size=1, max_size=4))
def test_enumeration_matches_naive_scan(ineqs):
    lo, hi = (-3, -2, -3), (3, 2, 2)
    assert exact.enumerate_lattice_points(ineqs, (lo, hi)) == naive_points(ineqs, lo, hi)


def test_enumeration_cap():
    with pytest.raises(CapExceededError) as e:
        exact.enumerate_lattice_points([], ((0, 0), (99, 99)), cap=100)
    assert e.value.code == "BOX_TOO_LARGE"


def test_enumeration_cap_from_environment(monkeypatch):
    monkeypatch.setenv("LIFTING_ENUM_CAP", "10")
    with pytest.raises(CapExceededError):
        exact.enumerate_lattice_points([], ((0, 0), (3, 3)))


def test_integer_bbox():
    assert exact.integer_bbox([(Fraction(-1, 2), 2), (Fraction(5, 2), Fraction(1, 3))]) == ((0, 1), (2, 2))
