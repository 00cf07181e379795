"""Static SVG drawings of planar lifting regions."""
from __future__ import annotations

from .errors import LiftError
from .lifting import LiftingRegion
from .polytope import maximality_report

SCALE = 60
PAD = 1


def _xy(p, lo, hi):
    # floats only for drawing coordinates
    x = (float(p[0]) - lo[0] + PAD) * SCALE
    y = (hi[1] - float(p[1]) + PAD) * SCALE
    return f"{x:.3f},{y:.3f}"


def region_svg(region: LiftingRegion) -> str:
    P = region.polytope
    if P.n != 2:
        raise LiftError("only planar bodies can be drawn", code="DIMENSION_UNSUPPORTED")
    lo = [min(float(v[j]) for v in P.vertices) for j in range(2)]
    hi = [max(float(v[j]) for v in P.vertices) for j in range(2)]
    width = (hi[0] - lo[0] + 2 * PAD) * SCALE
    height = (hi[1] - lo[1] + 2 * PAD) * SCALE
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for fr in region.regions:
        for box in fr.boxes:
            corners = fr.corner_points(box)
            f0, a, ab, b = corners[0], corners[2], corners[3], corners[1]
            ring = []
            for p in (f0, a, ab, b):
                if p not in ring:
                    ring.append(p)
            if fr.absdet == 0 or box.degenerate:
                ends = sorted(set(corners))
                out.append(
                    f'<polyline class="piece degenerate" points="{_xy(ends[0], lo, hi)} '
                    f'{_xy(ends[-1], lo, hi)}" stroke="#555" stroke-width="3" fill="none"/>'
                )
            else:
                pts = " ".join(_xy(p, lo, hi) for p in ring)
                out.append(
                    f'<polygon class="piece" points="{pts}" fill="#777" fill-opacity="0.6" '
                    f'stroke="#333" stroke-width="1"/>'
                )
    # boundary: follow shared vertices from edge to edge
    ring_idx = list(P.facets[0].incidence)
    while len(ring_idx) < len(P.vertices):
        last = ring_idx[-1]
        nxt = next(
            k for F in P.facets if last in F.incidence
            for k in F.incidence if k not in ring_idx
        )
        ring_idx.append(nxt)
    ring = " ".join(_xy(P.vertices[k], lo, hi) for k in ring_idx)
    out.append(f'<polygon class="boundary" points="{ring}" fill="none" stroke="black" stroke-width="4"/>')
    report = maximality_report(P)
    boundary = set(report.boundary_points())
    for p in P.lattice_points():
        x, y = _xy(p, lo, hi).split(",")
        fill = "black" if p in boundary else "white"
        out.append(f'<circle class="lattice" cx="{x}" cy="{y}" r="4" fill="{fill}" stroke="black"/>')
    x, y = _xy(region.f, lo, hi).split(",")
    out.append(f'<circle class="f" cx="{x}" cy="{y}" r="5" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

