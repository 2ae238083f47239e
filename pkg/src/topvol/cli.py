"""Command-line front end: ``topvol <group> <command> ...``.

Plain text goes to stdout by default; ``--json`` prints one record with the
command, its result, the precision and any warnings, keys sorted so equal
invocations give equal bytes.  Exit status is 0 on success, 1 on a domain
error (or a failed audit) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import mpmath

from . import bounds, census, cfrac, dilog, gluing, lens, voldiff
from .errors import TopVolError

SUPPRESS = argparse.SUPPRESS


def _num(x, digits):
    if isinstance(x, int):
        return str(x)
    return mpmath.nstr(x, digits, strip_zeros=False)


def _cnum(z, digits):
    # abs() rounds to the ambient context, so widen it first
    with mpmath.workdps(digits + 10):
        re_, im = _num(z.real, digits), _num(abs(z.imag), digits)
    sign = "-" if z.imag < 0 else "+"
    return f"{re_}{sign}{im}j"


def _slope(s):
    return f"({s.p},{s.q})"


class Result:
    def __init__(self, payload, lines, warnings=(), ok=True):
        self.payload = payload
        self.lines = lines
        self.warnings = list(warnings)
        self.ok = ok


# -- handlers ----------------------------------------------------------------


def cmd_dilog(args):
    digits = args.precision
    with mpmath.workdps(digits + 10):
        z = mpmath.mpc(mpmath.mpf(args.re), mpmath.mpf(args.im))
    value = dilog.bloch_wigner(z, digits)
    text = _num(value, digits)
    return Result({"z": _cnum(z, digits), "D": text}, [text])


def _load_shapes(spec):
    if spec in gluing.FIXTURES and not Path(spec).exists():
        return gluing.load_fixture(spec)
    path = Path(spec)
    if not path.is_file():
        raise TopVolError(f"{spec}: no such file or bundled fixture")
    return gluing.load_system(path)


def _solution_payload(sol, digits):
    return {
        "label": sol.label,
        "shapes": [_cnum(z, digits) for z in sol.values],
        "volume": _num(sol.volume, digits),
        "residual": mpmath.nstr(sol.residual, 5),
        "iterations": sol.iterations,
    }


def cmd_shapes_solve(args):
    system = _load_shapes(args.file)
    sol = gluing.solve_geometric(system, seeds=args.seed or None, precision=args.precision)
    payload = _solution_payload(sol, args.precision)
    lines = [f"{i}: {z}" for i, z in enumerate(payload["shapes"])]
    lines += [f"volume: {payload['volume']}", f"residual: {payload['residual']}"]
    return Result(payload, lines)


def cmd_shapes_verify_equal(args):
    a = gluing.solve_geometric(_load_shapes(args.file_a), precision=args.precision)
    b = gluing.solve_geometric(_load_shapes(args.file_b), precision=args.precision)
    report = gluing.verify_equal_volume(a, b, tol=args.tol)
    payload = {
        "a": _solution_payload(a, args.precision),
        "b": _solution_payload(b, args.precision),
        "difference": mpmath.nstr(report.difference, 5),
        "tol": args.tol,
        "equal": report.passed,
    }
    lines = [
        f"{report.lhs} = {payload['a']['volume']}",
        f"{report.rhs} = {payload['b']['volume']}",
        f"difference: {payload['difference']}",
        "equal" if report.passed else "NOT equal",
    ]
    return Result(payload, lines, ok=report.passed)


def cmd_lens_slopes(args):
    lc = lens.canonical_lens(args.p, args.q)
    slopes = sorted(lens.lens_equivalent_slopes(lc, args.window))
    payload = {"lens": str(lc), "window": args.window, "slopes": [_slope(s) for s in slopes]}
    return Result(payload, [f"{lc}: " + " ".join(payload["slopes"])])


def _estimate(est, digits):
    return {
        "c2": str(est.c2),
        "c4": str(est.c4),
        "Q": est.error_order,
        "value": _num(est.value(digits), digits),
    }


def cmd_lens_minimiser(args):
    lc = lens.canonical_lens(args.p, args.q)
    v = voldiff.lens_minimiser(lc, window=args.window)
    digits = args.precision
    census_name = "m129" if v.parent is voldiff.Parent.W else "m125"
    payload = {
        "lens": str(lc),
        "parent": v.parent.value,
        "slope": _slope(v.slope),
        "census_slope": f"{census_name}{_slope(v.census_slope)}",
        "delta_vol": _estimate(v.estimate, digits),
        "filled_volume": _num(v.filled_volume(digits), digits),
        "bits": v.bits,
    }
    lines = [
        f"{lc}: {v.parent.value}{_slope(v.slope)} = {payload['census_slope']}",
        f"delta vol: {payload['delta_vol']['value']}",
        f"filled volume estimate: {payload['filled_volume']}",
    ]
    return Result(payload, lines, v.warnings)


def cmd_lens_decide(args):
    d = voldiff.decide_w_vs_p((args.p, args.q))
    digits = args.precision
    payload = {
        "slope": _slope(d.slope),
        "parent": d.parent.value,
        "w": _estimate(d.w, digits),
        "p": _estimate(d.p, digits),
        "bits": d.bits,
    }
    lines = [
        f"{_slope(d.slope)}: {d.parent.value}",
        f"delta vol W: {payload['w']['value']}",
        f"delta vol P: {payload['p']['value']}",
    ]
    return Result(payload, lines, d.warnings)


def cmd_frame(args):
    s = lens.Slope(args.p, args.q)
    if args.parent == "w":
        out, name = lens.frame_w(s), "m129"
    else:
        out, name = lens.frame_p(s), "m125"
    text = f"{name}{_slope(out)}"
    return Result({"slope": _slope(s), "parent": args.parent.upper(), "census": text}, [text])


def cmd_cfrac(args):
    x = cfrac.X1 if args.which == "x1" else cfrac.X2
    terms = cfrac.cf_expand(x, args.terms)
    payload = {"x": args.which, "terms": terms}
    lines = [" ".join(map(str, terms))]
    if args.convergents:
        conv = cfrac.convergents(x, args.terms)
        payload["convergents"] = [str(c) for c in conv]
        lines.append(" ".join(payload["convergents"]))
    return Result(payload, lines)


def _bound(r, digits):
    return {"kind": r.kind.value, "value": _num(r.value, digits), "source": r.source}


def cmd_bounds_surgery(args):
    r = bounds.surgery_upper_bound(args.c, args.n, args.precision)
    b = _bound(r, args.precision)
    return Result(b, [b["value"]])


def cmd_bounds_sfs(args):
    octa, coarse = bounds.sfs_upper_bound(args.g, args.N, args.precision)
    payload = {
        "octahedral": _bound(octa, args.precision),
        "integer": _bound(coarse, args.precision),
    }
    lines = [
        f"octahedral: {payload['octahedral']['value']}",
        f"integer: {payload['integer']['value']}",
    ]
    return Result(payload, lines)


def cmd_bounds_homology(args):
    r = bounds.homology_lower_bound(args.rank, args.prime, args.precision)
    b = _bound(r, args.precision)
    return Result(b, [b["value"]])


def cmd_bounds_cover(args):
    r = bounds.cover_upper_bound(args.volt, args.d, args.precision)
    b = _bound(r, args.precision)
    return Result(b, [b["value"]])


def _db(args):
    return census.load_census(args.data_dir) if args.data_dir else census.default_census()


def _entry_payload(e):
    return {
        "manifold": e.manifold,
        "volume": e.volume,
        "family": e.family.value,
        "realisations": [str(r) for r in e.realisations],
    }


def cmd_census_lookup(args):
    db = _db(args)
    volume, reals = census.volt_lookup(args.name, db)
    entry = db.entry(args.name)
    payload = _entry_payload(entry)
    lines = [f"volume: {volume}", "realisation: " + " ".join(str(r) for r in reals)]
    return Result(payload, lines)


def cmd_census_at_volume(args):
    found = census.manifolds_at_volume(args.volume, _db(args))
    payload = {"volume": args.volume, "count": len(found), "entries": [_entry_payload(e) for e in found]}
    lines = [f"{e.manifold}\t" + " ".join(str(r) for r in e.realisations) for e in found]
    lines.append(f"{len(found)} manifold(s)")
    return Result(payload, lines)


def cmd_census_parenthood(args):
    row = census.parenthood(args.name, _db(args))
    m129 = f"m129{_slope(row.via_m129)}" if row.via_m129 else None
    m125 = [f"m125{_slope(s)}" for s in row.via_m125] if row.via_m125 else None
    payload = {"child": row.child, "m129": m129, "m125": m125}
    lines = [f"m129: {m129 or 'none'}", "m125: " + (" ".join(m125) if m125 else "none")]
    return Result(payload, lines)


def cmd_census_second(args):
    recs = census.second_minimisers(args.name, _db(args))
    items, lines = [], []
    for r in recs:
        item = {"knot": r.knot, "ambient": r.ambient, "realisation": str(r.realisation)}
        line = f"{r.knot} via {r.realisation}"
        if r.homology is not None:
            item.update(
                knot_homology=str(r.homology),
                ambient_homology=str(r.ambient_homology),
                minimiser=r.minimiser,
                minimiser_homology=str(r.minimiser_homology),
            )
            line += (
                f"; H1 {r.homology} vs minimiser {r.minimiser} {r.minimiser_homology}"
                f"; H1(ambient) {r.ambient_homology}"
            )
        items.append(item)
        lines.append(line)
    if not recs:
        lines.append("no recorded non-minimising knots")
    return Result({"ambient": args.name, "knots": items}, lines)


def cmd_census_audit(args):
    report = census.consistency_audit(_db(args))
    failures = [{"check": f.check, "message": f.message} for f in report.failures]
    lines = [f"({f['check']}) {f['message']}" for f in failures] or ["clean"]
    return Result({"clean": report.clean, "failures": failures}, lines, ok=report.clean)


# -- parser ------------------------------------------------------------------


def _globals(parser, default):
    parser.add_argument(
        "--json", action="store_true", default=False if default else SUPPRESS,
        help="print a JSON record instead of text",
    )  # fmt: skip
    parser.add_argument(
        "--precision", type=int, default=50 if default else SUPPRESS, metavar="DIGITS",
        help="working precision in decimal digits (default 50)",
    )  # fmt: skip


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, default=False)

    parser = argparse.ArgumentParser(
        prog="topvol", description="Topological volume toolkit."
    )
    _globals(parser, default=True)
    sub = parser.add_subparsers(dest="group", metavar="COMMAND", required=True)

    def leaf(subparsers, name, func, help):
        p = subparsers.add_parser(name, parents=[common], help=help, description=help)
        p.set_defaults(func=func)
        return p

    p = leaf(sub, "dilog", cmd_dilog, "Bloch-Wigner dilogarithm D(re + i im)")
    p.add_argument("re")
    p.add_argument("im")

    shapes = sub.add_parser("shapes", help="gluing equations").add_subparsers(
        dest="cmd", metavar="COMMAND", required=True
    )
    p = leaf(shapes, "solve", cmd_shapes_solve, "solve a rect-form gluing system")
    p.add_argument("file", help="path to a .rect file or a bundled fixture name")
    p.add_argument("--seed", action="append", help="starting shape, repeat once per tetrahedron")
    p = leaf(shapes, "verify-equal", cmd_shapes_verify_equal, "compare two volumes")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--tol", default="1e-12")

    lens_p = sub.add_parser("lens", help="lens spaces and the W/P minimiser").add_subparsers(
        dest="cmd", metavar="COMMAND", required=True
    )
    p = leaf(lens_p, "slopes", cmd_lens_slopes, "slopes filling to L(p,q)")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--window", type=int, default=3)
    p = leaf(lens_p, "minimiser", cmd_lens_minimiser, "two-term minimiser for L(p,q)")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)
    p.add_argument("--window", type=int, default=3)
    p = leaf(lens_p, "decide", cmd_lens_decide, "compare W and P along slope (p,q)")
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)

    p = leaf(sub, "frame", cmd_frame, "topological slope to census framing")
    p.add_argument("parent", choices=("w", "p"))
    p.add_argument("p", type=int)
    p.add_argument("q", type=int)

    p = leaf(sub, "cfrac", cmd_cfrac, "continued fraction of x1 or x2")
    p.add_argument("which", choices=("x1", "x2"))
    p.add_argument("--terms", type=int, default=9)
    p.add_argument("--convergents", action="store_true")

    bnd = sub.add_parser("bounds", help="volume bounds").add_subparsers(
        dest="cmd", metavar="COMMAND", required=True
    )
    p = leaf(bnd, "surgery", cmd_bounds_surgery, "bound from a surgery diagram")
    p.add_argument("c", type=int, help="crossing number")
    p.add_argument("n", type=int, help="number of components")
    p = leaf(bnd, "sfs", cmd_bounds_sfs, "bound for a Seifert fibered space")
    p.add_argument("g", type=int, help="base genus")
    p.add_argument("N", type=int, help="number of exceptional fibres")
    p = leaf(bnd, "homology", cmd_bounds_homology, "lower bound from mod-p homology rank")
    p.add_argument("rank", type=int)
    p.add_argument("prime", type=int)
    p = leaf(bnd, "cover", cmd_bounds_cover, "bound for a d-fold cover")
    p.add_argument("volt", help="topological volume of the base")
    p.add_argument("d", type=int)

    cen = sub.add_parser("census", help="low-volume census").add_subparsers(
        dest="cmd", metavar="COMMAND", required=True
    )
    for name, func, arg, help in (
        ("lookup", cmd_census_lookup, "name", "volume and realisations of a manifold"),
        ("at-volume", cmd_census_at_volume, "volume", "all manifolds of a volume"),
        ("parenthood", cmd_census_parenthood, "name", "m125/m129 fillings giving a cusped manifold"),
        ("second", cmd_census_second, "name", "non-minimising knots in a manifold"),
        ("audit", cmd_census_audit, None, "cross-table consistency checks"),
    ):
        p = leaf(cen, name, func, help)
        if arg:
            p.add_argument(arg)
        p.add_argument(
            "--data-dir",
            default=os.environ.get(census.ENV_VAR),
            help=f"census directory (default ${census.ENV_VAR} or the bundled tables)",
        )
    return parser


def _command_echo(argv):
    return " ".join(a for a in argv if a != "--json")


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI; returns the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if args.precision < 5:
        stderr.write("error: --precision must be at least 5\n")
        return 2
    try:
        result = args.func(args)
    except (TopVolError, ValueError, ArithmeticError) as exc:
        if args.json:
            record = {"command": _command_echo(argv), "error": str(exc), "precision": args.precision}
            stdout.write(json.dumps(record, sort_keys=True) + "\n")
        stderr.write(f"error: {exc}\n")
        return 1
    if args.json:
        record = {
            "command": _command_echo(argv),
            "result": result.payload,
            "precision": args.precision,
            "warnings": result.warnings,
        }
        stdout.write(json.dumps(record, sort_keys=True) + "\n")
    else:
        for line in result.lines:
            stdout.write(line + "\n")
        for w in result.warnings:
            stdout.write(f"warning: {w}\n")
    return 0 if result.ok else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
