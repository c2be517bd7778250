"""Command-line front end.  Every command prints a report; ``--json`` for machines.

Exit codes: 0 success, 1 usage or input error, 2 the mathematics said no.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .exactla import (
    ExactMatrix,
    IndexMismatch,
    find_invertible_intertwiner,
    intertwiner_space,
)
from .formats import (
    FormatError,
    file_sha256,
    load_domain,
    load_spectrum,
    load_triple,
    matrix_to_json,
    triple_to_json,
    write_json,
)
from .gallery import (
    ProjectiveSpec,
    QuadraticDesignSpec,
    TileDomain,
    WreathSpec,
    dihedral_geometry,
    gww_domains,
    projective_geometry,
    quadratic_design,
    symmetric_group,
    wreath_triple,
)
from .geom import (
    build_drum_geometry,
    find_duality,
    is_super_strong,
    is_symmetric_design,
    triple_from_geometry,
    verify_D,
    verify_SD,
)
from .gstriple import are_isomorphic, check_ac, check_ec, check_flags, reduce_ff
from .permcore import PermError, PermGroup
from .spectral import SpectralError, compare_spectra, domain_spectrum, weyl_check

DEFAULT_SEED = 0


class Failure(Exception):
    """Raised by a command whose report is complete but whose check failed."""


class Context:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.inputs: dict[str, str] = {}

    def input(self, path: str) -> str:
        p = Path(path)
        if p.exists():
            self.inputs[path] = file_sha256(p)
        return path


def _triple_summary(t) -> dict[str, Any]:
    return {
        "name": t.name,
        "order": t.group.order,
        "degree": t.group.degree,
        "u_order": t.left.order,
        "v_order": t.right.order,
        "index_u": t.group.order // t.left.order,
        "index_v": t.group.order // t.right.order,
    }


def _ensure_ff(t, results: dict) -> Any:
    flags = check_flags(t)
    if not flags.ff:
        results["reduced_ff"] = True
        return reduce_ff(t)
    results["reduced_ff"] = False
    return t


# --- commands ------------------------------------------------------------------


def cmd_gen(ctx: Context) -> dict:
    a = ctx.args
    if a.family == "pg":
        dg, t = projective_geometry(ProjectiveSpec(a.n, a.p))
    elif a.family == "design":
        dg = quadratic_design(QuadraticDesignSpec(a.m, a.form), orthogonal=a.orthogonal)
        t = triple_from_geometry(dg)
    else:
        dg = dihedral_geometry(a.n)
        t = triple_from_geometry(dg)
    results = _triple_summary(t)
    results["points"] = dg.geometry.num_points
    results["lines"] = dg.geometry.num_lines
    if a.out:
        write_json(a.out, triple_to_json(t))
        results["triple_file"] = a.out
    if a.geometry_out:
        write_json(a.geometry_out, dg.geometry.to_json())
        results["geometry_file"] = a.geometry_out
    return results


def cmd_check(ctx: Context) -> dict:
    t = load_triple(ctx.input(ctx.args.triple))
    results = _triple_summary(t)
    flags = check_flags(t)
    results["flags"] = flags.to_json()
    if not flags.ec:
        raise Failure(results)
    return results


def cmd_geometry(ctx: Context) -> dict:
    a = ctx.args
    t = load_triple(ctx.input(a.triple))
    results: dict[str, Any] = {}
    t = _ensure_ff(t, results)
    dg = build_drum_geometry(t)
    g = dg.geometry
    results["points"] = g.num_points
    results["lines"] = g.num_lines
    results["lines_per_point"] = sorted({len(s) for s in g.lines_on})
    results["points_per_line"] = sorted({len(s) for s in g.points_on})
    d, sd = verify_D(dg), verify_SD(dg)
    results["D"] = {"holds": d.holds, "witness": d.witness}
    results["SD"] = {"holds": sd.holds, "witness": sd.witness}
    if g.num_points == g.num_lines:
        strong, det = is_super_strong(g)
        results["determinant"] = str(det)
        results["super_strong"] = strong
        design = is_symmetric_design(g)
        results["symmetric_design"] = list(design) if design else None
        results["duality"] = find_duality(g) is not None
        if sd.holds and not strong:
            results["finding"] = "strong drum geometry with singular incidence matrix"
    if a.out:
        write_json(a.out, g.to_json())
    if a.dot:
        Path(a.dot).write_text(g.to_dot())
        results["dot_file"] = a.dot
    if not d.holds:
        raise Failure(results)
    return results


def cmd_wreath(ctx: Context) -> dict:
    a = ctx.args
    base = load_triple(ctx.input(a.triple))
    if a.top == "symmetric":
        T = symmetric_group(a.copies)
    else:
        T = PermGroup(a.copies, [tuple((i + 1) % a.copies for i in range(a.copies))], name=f"C{a.copies}")
    w = wreath_triple(WreathSpec(base, a.copies, T))
    results = _triple_summary(w)
    results["flags"] = check_flags(w).to_json()
    if a.out:
        write_json(a.out, triple_to_json(w))
        results["triple_file"] = a.out
    return results


def cmd_intertwine(ctx: Context) -> dict:
    a = ctx.args
    t = load_triple(ctx.input(a.triple))
    results: dict[str, Any] = {"ac": check_ac(t).holds, "seed": a.seed}
    try:
        basis = intertwiner_space(t)
    except IndexMismatch as exc:
        results.update(dimension=0, found=False, reason=str(exc))
        raise Failure(results)
    results["dimension"] = len(basis)
    T = find_invertible_intertwiner(basis, seed=a.seed)
    results["found"] = T is not None
    if T is None:
        raise Failure(results)
    results["determinant"] = str(T.det())
    results["verified"] = _verify_intertwiner(t, T, a.seed)
    if a.out:
        write_json(a.out, matrix_to_json(T))
        results["matrix_file"] = a.out
    if not results["verified"]:
        raise Failure(results)
    return results


def _verify_intertwiner(t, T: ExactMatrix, seed: int, samples: int = 20) -> bool:
    left, right = t.left_action, t.right_action
    rng = random.Random(seed)
    els = t.group.sorted_elements
    checks = list(t.group.generators) + [rng.choice(els) for _ in range(samples)]
    for g in checks:
        P = ExactMatrix.permutation(left.perm(g))
        Q = ExactMatrix.permutation(right.perm(g))
        if P @ T != T @ Q:
            return False
    return True


def _domain(ctx: Context, spec: str) -> TileDomain:
    if spec in ("gww_a", "gww_b"):
        a, b = gww_domains()
        return a if spec == "gww_a" else b
    return load_domain(ctx.input(spec))


def cmd_spectrum(ctx: Context) -> dict:
    a = ctx.args
    dom = _domain(ctx, a.domain)
    s = domain_spectrum(dom, Fraction(a.h), a.k, seed=a.seed)
    results = s.to_json()
    results["area"] = str(dom.area)
    if a.out:
        write_json(a.out, s.to_json())
        results["spectrum_file"] = a.out
    return results


def cmd_compare(ctx: Context) -> dict:
    a = ctx.args
    da, db = _domain(ctx, a.a), _domain(ctx, a.b)
    h = Fraction(a.h)
    sa, sb = domain_spectrum(da, h, a.k, seed=a.seed), domain_spectrum(db, h, a.k, seed=a.seed)
    coarse = None
    if not a.no_refinement:
        coarse = (domain_spectrum(da, 2 * h, a.k, seed=a.seed), domain_spectrum(db, 2 * h, a.k, seed=a.seed))
    cmp = compare_spectra(sa, sb, a.k, coarse)
    results = cmp.to_json()
    results.update(h=str(h), k=a.k, a=sa.eigenvalues.tolist(), b=sb.eigenvalues.tolist(), tolerance=a.tol)
    if cmp.max_relative > a.tol:
        raise Failure(results)
    return results


def cmd_weyl(ctx: Context) -> dict:
    a = ctx.args
    s = load_spectrum(ctx.input(a.spectrum))
    fit = weyl_check(s, Fraction(a.area))
    results = fit.to_json()
    results["tolerance"] = a.tol
    if abs(fit.ratio - 1) > a.tol:
        raise Failure(results)
    return results


def cmd_roundtrip(ctx: Context) -> dict:
    t = load_triple(ctx.input(ctx.args.triple))
    results: dict[str, Any] = {}
    t = _ensure_ff(t, results)
    dg = build_drum_geometry(t)
    ac, ec = check_ac(t).holds, check_ec(t).holds
    sd, d = verify_SD(dg).holds, verify_D(dg).holds
    back = triple_from_geometry(dg)
    iso = are_isomorphic(t, back)
    results.update(
        ac=ac,
        ec=ec,
        SD=sd,
        D=d,
        consistent=(ac == sd and ec == d),
        points=dg.geometry.num_points,
        lines=dg.geometry.num_lines,
        isomorphic=iso.value,
    )
    if not results["consistent"] or iso.value != "yes":
        raise Failure(results)
    return results


COMMANDS = {
    "gen": cmd_gen,
    "check": cmd_check,
    "geometry": cmd_geometry,
    "wreath": cmd_wreath,
    "intertwine": cmd_intertwine,
    "spectrum": cmd_spectrum,
    "compare": cmd_compare,
    "weyl": cmd_weyl,
    "roundtrip": cmd_roundtrip,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")

    p = argparse.ArgumentParser(prog="drumgeom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="build an example triple")
    gen.add_argument("family", choices=["pg", "design", "dihedral"])
    gen.add_argument("--n", type=int, default=3, help="matrix size (pg) or polygon size (dihedral)")
    gen.add_argument("--p", type=int, default=2, help="prime field size (pg)")
    gen.add_argument("--m", type=int, default=2, help="half dimension (design)")
    gen.add_argument("--form", choices=["hyperbolic", "elliptic"], default="hyperbolic")
    gen.add_argument("--orthogonal", action="store_true", help="extend translations by the orthogonal group")
    gen.add_argument("--out", help="write the triple file here")
    gen.add_argument("--geometry-out", help="write the geometry file here")

    c = sub.add_parser("check", parents=[common], help="EC/AC/FF/MAX/PAIR flags of a triple")
    c.add_argument("--triple", required=True)

    g = sub.add_parser("geometry", parents=[common], help="build and verify the drum geometry of a triple")
    g.add_argument("--triple", required=True)
    g.add_argument("--out", help="write the geometry file here")
    g.add_argument("--dot", help="write the incidence graph in DOT format here")

    w = sub.add_parser("wreath", parents=[common], help="wreath-product triple")
    w.add_argument("--triple", required=True)
    w.add_argument("--copies", type=int, default=2)
    w.add_argument("--top", choices=["symmetric", "cyclic"], default="symmetric")
    w.add_argument("--out")

    i = sub.add_parser("intertwine", parents=[common], help="invertible intertwiner between the two coset actions")
    i.add_argument("--triple", required=True)
    i.add_argument("--out", help="write the matrix (row-major strings) here")

    s = sub.add_parser("spectrum", parents=[common], help="smallest Dirichlet eigenvalues of a tile domain")
    s.add_argument("--domain", required=True, help="domain file, or gww_a / gww_b")
    s.add_argument("--h", required=True, help="mesh step, e.g. 1/32")
    s.add_argument("--k", type=int, default=10)
    s.add_argument("--out")

    cp = sub.add_parser("compare", parents=[common], help="compare the spectra of two domains")
    cp.add_argument("--a", required=True)
    cp.add_argument("--b", required=True)
    cp.add_argument("--h", required=True)
    cp.add_argument("--k", type=int, default=10)
    cp.add_argument("--tol", type=float, default=0.02, help="maximum relative difference")
    cp.add_argument("--no-refinement", action="store_true", help="skip the 2h run")

    wy = sub.add_parser("weyl", parents=[common], help="Weyl-law slope check of a spectrum")
    wy.add_argument("--spectrum", required=True)
    wy.add_argument("--area", required=True, help="domain area, e.g. 7/2")
    wy.add_argument("--tol", type=float, default=0.10)

    r = sub.add_parser("roundtrip", parents=[common], help="triple -> geometry -> triple")
    r.add_argument("--triple", required=True)
    return p


def _print_human(report: dict, out) -> None:
    print(f"{report['command']}: {report['status']}", file=out)
    for key, value in report["results"].items():
        if isinstance(value, dict):
            print(f"  {key}:", file=out)
            for k2, v2 in value.items():
                print(f"    {k2}: {v2}", file=out)
        elif isinstance(value, list) and len(value) > 12:
            print(f"  {key}: [{', '.join(map(str, value[:12]))}, ...] ({len(value)} values)", file=out)
        else:
            print(f"  {key}: {value}", file=out)


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    ctx = Context(args)
    start = time.perf_counter()
    status, code = "ok", 0
    try:
        results = COMMANDS[args.command](ctx)
    except Failure as exc:
        results = exc.args[0]
        status, code = "failed", 2
    except (PermError, FormatError, SpectralError, ValueError, OSError, KeyError) as exc:
        print(f"drumgeom {args.command}: error: {exc}", file=sys.stderr)
        return 1
    report = {
        "command": args.command,
        "tool_version": __version__,
        "seed": args.seed,
        "status": status,
        "inputs": ctx.inputs,
        "results": results,
    }
    if args.timings:
        report["timings"] = {"seconds": round(time.perf_counter() - start, 3)}
    if args.json:
        json.dump(report, out, indent=2, default=str)
        out.write("\n")
    else:
        _print_human(report, out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
