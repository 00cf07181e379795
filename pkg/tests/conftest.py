import functools
from fractions import Fraction

import pytest

from liftregion.generators import (
    delta_family,
    search_simplices,
    standard_simplex,
    type3_cylinder_cone,
)
from liftregion.polytope import simplicial_from_data, simplex_from_vertices

H = Fraction(1, 2)


@functools.lru_cache(maxsize=None)
def first_type3():
    return next(T for T, tag in search_simplices(2, 3, (-1, 2)) if tag.kind == "type3")


@functools.lru_cache(maxsize=None)
def corpus():
    """Named bodies used across the suite (n = 2 and n = 3)."""
    std2 = standard_simplex(2)
    T3 = first_type3()
    return {
        "std2": std2,
        "std2_image": std2.map_affine(((1, 1), (0, 1)), (1, -2)),
        "diamond": simplicial_from_data(
            [(-H, H), (H, -H), (3 * H, H), (H, 3 * H)], [(0, 1), (1, 2), (2, 3), (3, 0)]
        ),
        "type2": simplex_from_vertices([(-3 * H, 3 * H), (0, 0), (0, 3)]),
        "type3": T3,
        "std3": standard_simplex(3),
        "delta_half": delta_family(2, (H, H, H)),
        "cone4": type3_cylinder_cone(T3, 4),
    }


@pytest.fixture(scope="session")
def bodies():
    return corpus()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
