"""Command-line front end.

Exit codes: 0 success, 2 validation or domain error (error JSON on stdout),
3 enumeration cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import exact
from .classify import (
    find_2partition,
    one_point_verdict,
    partition_verdict,
    symmetric_body_check,
)
from .errors import CapExceededError, HypothesisViolated, LiftError, ValidationError
from .generators import (
    delta_family,
    search_simplices,
    standard_simplex,
    type3_cylinder_cone,
)
from .lifting import (
    affine_volume_function,
    build_region,
    classify_body,
    torus_cover_oracle,
    torus_volume_exact,
)
from .polytope import body_from_json, body_to_json, maximality_report
from .render import region_svg


def rational_vector(text: str) -> tuple:
    """Parse ``"1/2,1/2"``; floats are rejected."""
    try:
        return tuple(exact.Q(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_body(path):
    try:
        if path in (None, "-"):
            data = json.load(sys.stdin)
        else:
            with open(path) as fh:
                data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read body: {exc}", code="BAD_INPUT") from None
    try:
        return body_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed body: {exc}", code="BAD_INPUT") from None


def _emit(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _jsonable(x):
    if isinstance(x, Fraction):
        return exact.fmt(x)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _maximality_json(report):
    return {
        "lattice_free": report.lattice_free,
        "maximal": report.maximal,
        "relint_counts": report.relint_counts(),
        "per_facet": [
            {
                "points": [exact.fmt_vec(p) for p in fp.all_points],
                "relative_interior": [exact.fmt_vec(p) for p in fp.relative_interior_points],
            }
            for fp in report.per_facet
        ],
    }


def cmd_analyze(args):
    P = _read_body(args.inp)
    report = maximality_report(P)
    out = {"maximality": _maximality_json(report)}
    if report.maximal:
        region = build_region(P, args.f)
        verdict = torus_volume_exact(region, order=args.order, witness=True)
        out.update(verdict.to_json())
        out["f"] = exact.fmt_vec(region.f)
    else:
        raise ValidationError(
            "body is not maximal lattice-free",
            code="NOT_MAXIMAL" if report.lattice_free else "NOT_LATTICE_FREE",
            relint_counts=report.relint_counts(),
        )
    return _dump(out)


def cmd_sweep(args):
    P = _read_body(args.inp)
    maximality = maximality_report(P)
    if not maximality.maximal:
        raise ValidationError("body is not maximal lattice-free", code="NOT_MAXIMAL")
    fit = affine_volume_function(P, probes=args.probes, seed=args.seed)
    out = fit.to_json()
    out["dichotomy"] = classify_body(P).value
    return _dump(out)


def cmd_render(args):
    P = _read_body(args.inp)
    if P.n != 2:
        raise LiftError("only planar bodies can be drawn", code="DIMENSION_UNSUPPORTED")
    return region_svg(build_region(P, args.f))


def cmd_oracle(args):
    P = _read_body(args.inp)
    res = torus_cover_oracle(build_region(P, args.f), args.N)
    return _dump(res.to_json())


def cmd_generate(args):
    fam = args.family
    if fam == "standard":
        P = standard_simplex(args.n, args.m)
    elif fam == "delta":
        if args.delta is None:
            raise ValidationError("--delta is required", code="BAD_INPUT")
        P = delta_family(args.n, args.delta)
    elif fam in ("type3", "cone"):
        found = [T for T, tag in search_simplices(2, args.q, tuple(args.box)) if tag.kind == "type3"]
        if not found:
            raise ValidationError("search found no Type 3 triangle", code="NOT_FOUND")
        P = found[args.index % len(found)]
        if fam == "cone":
            P = type3_cylinder_cone(P, args.M)
    elif fam == "search":
        items = []
        for T, tag in search_simplices(2, args.q, tuple(args.box)):
            body = body_to_json(T)
            body["tag"] = {
                "kind": tag.kind,
                "relint_counts": list(tag.relint_counts),
                "integral_vertices": list(tag.integral_vertices),
            }
            items.append(body)
        return _dump(items)
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown family {fam}", code="BAD_INPUT")
    return _dump(body_to_json(P))


def cmd_classify(args):
    P = _read_body(args.inp)
    report = maximality_report(P)
    if not report.maximal:
        raise ValidationError("body is not maximal lattice-free", code="NOT_MAXIMAL")
    out = {"body_class": classify_body(P).value}
    counts = report.relint_counts()
    if P.is_simplex and all(c == 1 for c in counts):
        out["structure"] = "one_point_per_facet"
        out["verdict"] = one_point_verdict(P).to_json()
        out["symmetric_body"] = symmetric_body_check(P).to_json()
    elif P.is_simplex and find_2partition(P, report) is not None:
        out["structure"] = "two_partition"
        try:
            out["verdict"] = partition_verdict(P).to_json()
        except HypothesisViolated as exc:
            out["verdict"] = None
            out["hypothesis"] = exc.to_json()
    else:
        out["structure"] = None
    return _dump(out)


def build_parser():
    p = argparse.ArgumentParser(prog="liftregion", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def io(sp, body=True):
        if body:
            sp.add_argument("--in", dest="inp", default="-", help="body JSON (default stdin)")
        sp.add_argument("--out", default="-", help="output file (default stdout)")

    sp = sub.add_parser("analyze", help="maximality, exact torus volume, verdict")
    io(sp)
    sp.add_argument("--f", type=rational_vector, required=True)
    sp.add_argument("--order", choices=("lex", "revlex"), default="lex")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("sweep", help="affine volume fit and dichotomy")
    io(sp)
    sp.add_argument("--probes", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("render", help="SVG of a planar lifting region")
    io(sp)
    sp.add_argument("--f", type=rational_vector, required=True)
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("oracle", help="grid estimate of the covered fraction")
    io(sp)
    sp.add_argument("--f", type=rational_vector, required=True)
    sp.add_argument("--N", type=int, default=64)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("generate", help="emit a body JSON")
    io(sp, body=False)
    sp.add_argument("family", choices=("standard", "delta", "type3", "cone", "search"))
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--delta", type=rational_vector)
    sp.add_argument("--q", type=int, default=3)
    sp.add_argument("--box", type=int, nargs=2, default=(-1, 2))
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--M", type=exact.Q, default="4")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("classify", help="structure-based verdict cross-checked by volume")
    io(sp)
    sp.set_defaults(func=cmd_classify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except CapExceededError as exc:
        sys.stdout.write(_dump(exc.to_json()))
        return 3
    except LiftError as exc:
        sys.stdout.write(_dump(exc.to_json()))
        return 2
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
