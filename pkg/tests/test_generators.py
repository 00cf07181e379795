import itertools
from fractions import Fraction

import pytest

from conftest import first_type3

from liftregion.errors import CapExceededError, LiftError, ValidationError
from liftregion.generators import (
    base_copy_points,
    delta_family,
    is_type3,
    search_simplices,
    standard_simplex,
    tag_triangle,
    type3_cylinder_cone,
)
from liftregion.lifting import build_region, torus_volume_exact, vertex_volumes
from liftregion.polytope import maximality_report

F = Fraction
H = F(1, 2)


def test_standard_simplex_vertices():
    assert standard_simplex(3).vertices == ((0, 0, 0), (3, 0, 0), (0, 3, 0), (0, 0, 3))
    assert standard_simplex(2, 2).vertices == ((0, 0), (2, 0), (0, 2))


def test_delta_family_valid_member():
    D = delta_family(2, (H, H, H))
    assert set(D.vertices) == {(3, F(-1, 2), -1), (F(-1, 2), 3, -1), (F(-1, 2), F(-1, 2), -1), (F(2, 3), F(2, 3), F(4, 3))}
    rep = maximality_report(D)
    assert rep.maximal
    base = next(i for i, Fc in enumerate(D.facets) if Fc.normal == (0, 0, -1))
    for p in base_copy_points(2, (H, H, H)):
        assert p in rep.per_facet[base].all_points


def test_delta_family_rejects_zero_and_negative():
    for bad in [(0, 0, 0), (-1, 1, 1)]:
        with pytest.raises(ValidationError) as e:
            delta_family(2, bad)
        assert e.value.code == "INVALID_DELTA"


def test_delta_half_half_zero_reports_boundary_levels():
    # the body is built and found maximal, but its boundary lattice points
    # occupy four levels of x_3, so no facet-normal 2-partition exists
    with pytest.raises(ValidationError) as e:
        delta_family(2, (H, H, 0))
    assert e.value.code == "INVALID_DELTA"
    assert e.value.details["boundary_levels"] == [-1, 0, 1, 2]


def test_delta_one_zero_zero_is_reported_not_assumed():
    try:
        D = delta_family(2, (1, 0, 0))
    except ValidationError as e:
        assert e.code == "INVALID_DELTA"
    else:
        assert maximality_report(D).maximal


# -- triangle search ------------------------------------------------------------

def naive_maximal_triangles(q, lo, hi):
    """Pure-Python scan: every triple, lattice points tested by sign checks."""
    coords = [F(k, q) for k in range(lo * q, hi * q + 1)]
    pts = [(x, y) for x in coords for y in coords]
    lattice = [(x, y) for x in range(lo, hi + 1) for y in range(lo, hi + 1)]
    cross = lambda o, a, b: (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    found = set()
    for a, b, c in itertools.combinations(pts, 3):
        s = cross(a, b, c)
        if s == 0:
            continue
        if s < 0:
            b, c = c, b
        edges = [(a, b), (b, c), (c, a)]
        rel = [0, 0, 0]
        free = True
        for p in lattice:
            vals = [cross(u, v, p) for u, v in edges]
            if all(v > 0 for v in vals):
                free = False
                break
            for k in range(3):
                if vals[k] == 0 and vals[(k + 1) % 3] > 0 and vals[(k + 2) % 3] > 0:
                    rel[k] += 1
        if free and all(rel):
            found.add(tuple(sorted((a, b, c))))
    return found


def test_search_matches_naive_scan_small_box():
    got = {T.vertices for T, _ in search_simplices(2, 2, (-1, 2))}
    got = {tuple(sorted(v)) for v in got}
    assert got == naive_maximal_triangles(2, -1, 2)


def test_search_contains_standard_triangle():
    res = search_simplices(2, 2, (-2, 3))
    assert len(res) == 640
    std = [(T, tag) for T, tag in res if sorted(T.vertices) == sorted(standard_simplex(2).vertices)]
    assert len(std) == 1
    tag = std[0][1]
    assert tag.kind == "type1" and tag.one_point_per_side and not tag.has_fractional_vertex
    kinds = sorted({tag.kind for _, tag in res})
    assert kinds == ["type1", "type2"]


def test_half_integral_triangles_with_one_point_per_side_are_integral():
    # with no integral vertex each side's lattice point would be its midpoint,
    # forcing integral vertices; mixed cases are only ruled out empirically
    for T, tag in search_simplices(2, 2, (-3, 4)):
        if tag.one_point_per_side:
            assert not tag.has_fractional_vertex


def test_search_finds_type3_with_denominator_three():
    res = search_simplices(2, 3, (-1, 2))
    assert len(res) == 56
    t3 = [T for T, tag in res if tag.kind == "type3"]
    assert len(t3) == 24
    assert all(is_type3(T) for T in t3)


def test_search_output_revalidates_and_is_sorted():
    res = search_simplices(2, 3, (-1, 2))
    keys = [T.vertices for T, _ in res]
    assert keys == sorted(keys)
    for T, tag in res:
        assert maximality_report(T).maximal
        assert tag_triangle(T) == tag


def test_search_empty_and_errors():
    assert search_simplices(2, 1, (0, 1)) == []
    with pytest.raises(CapExceededError) as e:
        search_simplices(2, 4, (-3, 3), cap=1000)
    assert e.value.code == "CAP_EXCEEDED"
    with pytest.raises(LiftError) as e:
        search_simplices(3, 2, (0, 1))
    assert e.value.code == "DIMENSION_UNSUPPORTED"


# -- cone over a Type 3 triangle --------------------------------------------------

def test_cone_m4_structure():
    T = first_type3()
    D = type3_cylinder_cone(T, 4)
    assert set(D.vertices) == {(0, -4, F(-11, 3)), (0, -4, F(1, 3)), (0, 8, F(13, 3)), (F(4, 3), 0, F(1, 3))}
    rep = maximality_report(D)
    assert sorted(rep.relint_counts()) == [1, 1, 1, 18]


def test_cone_slice_at_height_one_is_the_triangle():
    T = first_type3()
    D = type3_cylinder_cone(T, 4)
    apex = next(v for v in D.vertices if v[0] != 0)
    sl = []
    for v in D.vertices:
        if v is apex:
            continue
        s = (1 - v[0]) / (apex[0] - v[0])
        sl.append(tuple(a + s * (b - a) for a, b in zip(v, apex))[1:])
    assert sorted(sl) == sorted(T.vertices)


def test_cone_cylinder_per_facet_volume():
    T = first_type3()
    D = type3_cylinder_cone(T, 4)
    c = T.centroid()
    base = next(i for i, Fc in enumerate(D.facets) if Fc.normal == (-1, 0, 0))
    for t in T.vertices:
        big = (F(0),) + tuple(ci + 4 * (ti - ci) for ti, ci in zip(t, c))
        vd = torus_volume_exact(build_region(D, big))
        vt = torus_volume_exact(build_region(T, t))
        nonzero = [k for k, v in enumerate(vd.per_facet_volumes) if v]
        assert nonzero and base not in nonzero
        assert vd.torus_volume == vt.torus_volume


def test_cone_m2_and_m3():
    T = first_type3()
    D2 = type3_cylinder_cone(T, 2)
    assert sorted(maximality_report(D2).relint_counts()) == [1, 1, 1, 3]
    assert sorted(vertex_volumes(D2)) == [F(2, 3)] * 3 + [F(8, 9)]
    assert max(vertex_volumes(type3_cylinder_cone(T, 3))) == F(17, 18)


def test_cone_rejects_bad_input():
    with pytest.raises(ValidationError) as e:
        type3_cylinder_cone(standard_simplex(2), 4)
    assert e.value.code == "NOT_TYPE3"
    with pytest.raises(ValidationError) as e:
        type3_cylinder_cone(first_type3(), 1)
    assert e.value.code == "VALIDATION_FAILED"
