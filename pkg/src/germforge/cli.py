"""Command line interface: ``germforge <subcommand> [options]``.

Exit codes: 0 success, 2 parse or usage error, 3 not a tangential family,
4 inconclusive at the requested jet, 5 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .catalog import (adjacency, adjacency_closure, extra_directions, normal_form,
                      normal_form_text, parse_class, table_direction_series, table_directions)
from .classify import classify
from .deform import (apply, bifurcation_grid, discriminant_samples, miniversal_spec,
                     parse_assignments, parse_grid)
from .envelope import emit, envelope_branches, trace_numeric
from .errors import ContractViolation, GermforgeError, ParseError
from .germ import MapGerm, PrenormalForm, family_from_graph, to_prenormal, validate_tangential
from .parser import evaluate, parse_family
from .series import Series2, default_truncation, qstr, render
from .tanspace import DEFAULT_DEGREE, codimension, miniversal_basis, tangential_codimension


class UsageError(GermforgeError):
    code = 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str, data: bytes | str) -> None:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    p.write_bytes(data)


def _jet(args) -> int:
    if args.max_jet is not None:
        if args.max_jet < 3:
            raise UsageError("--max-jet must be at least 3")
        return args.max_jet
    try:
        return default_truncation()
    except ContractViolation as ex:
        raise UsageError(str(ex)) from None


def _family_map(text: str, trunc: int, presentation: str) -> MapGerm:
    fam = parse_family(text)
    p, q = evaluate(fam.xExpr, trunc), evaluate(fam.yExpr, trunc)
    if presentation == "graph":
        if p != Series2.xi(trunc):
            raise UsageError("graph presentation expects the family as 'xi ; psi'")
        return family_from_graph(q)
    return MapGerm(p, q)


def _input_prenormal(args, trunc: int | None = None) -> tuple[PrenormalForm, str]:
    """Prenormal form from ``--family`` or ``--class``, and an echo of the input."""
    trunc = trunc or _jet(args)
    if getattr(args, "family", None):
        f = _family_map(args.family, trunc, getattr(args, "presentation", "tangential"))
        return to_prenormal(validate_tangential(f)), args.family
    if getattr(args, "cls", None):
        cls = parse_class(args.cls)
        return normal_form(cls, trunc), "xi + t ; " + normal_form_text(cls)
    raise UsageError("give --family or --class")


def _box(text: str) -> tuple[float, float, float, float]:
    bits = text.split(":")
    if len(bits) != 4:
        raise UsageError("--box expects x0:x1:y0:y1")
    try:
        x0, x1, y0, y1 = (float(b) for b in bits)
    except ValueError:
        raise UsageError(f"bad --box {text!r}") from None
    if not (x1 > x0 and y1 > y0):
        raise UsageError("--box must have x0 < x1 and y0 < y1")
    return x0, x1, y0, y1


def _usage(fn, *a):
    try:
        return fn(*a)
    except ContractViolation as ex:
        raise UsageError(str(ex)) from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_classify(args) -> int:
    pf, echo = _input_prenormal(args)
    rep = classify(pf, maxJet=args.max_jet)
    out = {"input": echo, "prenormal": pf.to_json(), "report": rep.to_json()}
    if rep.envelope is not None:
        out["envelope"] = rep.envelope.to_json()
    text = _dump(out)
    sys.stdout.write(text)
    if args.json:
        _write(args.json, text)
    return 0


def cmd_prenormal(args) -> int:
    pf, echo = _input_prenormal(args)
    out = {"input": echo, "prenormal": pf.to_json(),
           "family": "xi + t ; " + render(pf.phi),
           "graph": "xi ; " + render(pf.graph_phi())}
    text = _dump(out)
    sys.stdout.write(text)
    if args.json:
        _write(args.json, text)
    return 0


def _envelope_outputs(pf: PrenormalForm, args, title: str) -> dict:
    box = _box(args.box)
    sketch = trace_numeric(pf, box, args.res)
    written = {}
    if args.svg:
        _write(args.svg, emit(sketch, "svg"))
        written["svg"] = args.svg
    if args.csv:
        _write(args.csv, emit(sketch, "csv"))
        written["csv"] = args.csv
    if args.plot:
        from .plotting import plot_envelope
        plot_envelope(sketch, args.plot, title)
        written["plot"] = args.plot
    return written


def cmd_envelope(args) -> int:
    pf, echo = _input_prenormal(args)
    rep = envelope_branches(pf)
    out = {"input": echo, "envelope": rep.to_json(),
           "artifacts": _envelope_outputs(pf, args, echo)}
    text = _dump(out)
    sys.stdout.write(text)
    if args.json:
        _write(args.json, text)
    return 0


def cmd_codim(args) -> int:
    N = args.degree
    trunc = args.max_jet if args.max_jet is not None else max(default_truncation(), N + 3)
    pf, echo = _input_prenormal(args, trunc)
    f = pf.as_map()
    c, cs = codimension(f, N)
    tau, ts = tangential_codimension(f, N)
    out = {"input": echo, "codim": c, "codimStable": cs, "tangCodim": tau, "tangCodimStable": ts}
    if args.basis and cs:
        table = extra = None
        if args.cls:
            cls = parse_class(args.cls)
            table = table_direction_series(cls, trunc)
            extra = [evaluate(parse_family("0 ; " + e).yExpr, trunc) for e in extra_directions(cls)]
        out["miniversal"] = miniversal_basis(f, N, table, extra or ()).to_json()
    text = _dump(out)
    sys.stdout.write(text)
    if args.json:
        _write(args.json, text)
    return 0


def cmd_normal_form(args) -> int:
    cls = parse_class(args.cls)
    fam = "xi + t ; " + normal_form_text(cls)
    dirs = table_directions(cls)
    if args.json:
        _write(args.json, _dump({"class": cls.to_json(), "family": fam, "directions": dirs}))
    sys.stdout.write(fam + "\n")
    sys.stdout.write("directions: " + (", ".join(dirs) if dirs else "(none)") + "\n")
    return 0


def cmd_deform(args) -> int:
    cls = parse_class(args.cls)
    spec = miniversal_spec(cls)
    lam = _usage(parse_assignments, args.deform or "", spec)
    pf = apply(normal_form(cls, _jet(args)), spec, lam)
    rep = classify(pf, maxJet=args.max_jet)
    out = {"deformation": spec.to_json(), "lambda": [qstr(v) for v in lam],
           "family": "xi + t ; " + render(pf.phi), "report": rep.to_json()}
    text = _dump(out)
    sys.stdout.write(text)
    if args.json:
        _write(args.json, text)
    if args.svg or args.csv or args.plot:
        _envelope_outputs(pf, args, f"{cls.name} deformed")
    return 0


def cmd_discriminant(args) -> int:
    n = args.n
    if n < 1:
        raise UsageError("--n must be >= 1")
    axes = _usage(parse_grid, args.grid or "", n)
    samples = discriminant_samples(n, axes)
    names = [f"l{i + 1}" for i in range(n)]
    lines = [",".join(names + ["resultant"])]
    for pt, d in samples:
        lines.append(",".join([qstr(v) for v in pt] + [qstr(d)]))
    csv_text = "\n".join(lines) + "\n"
    if args.csv:
        _write(args.csv, csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.json:
        _write(args.json, _dump({"n": n, "points": [{"lambda": [qstr(v) for v in pt], "resultant": qstr(d)}
                                                    for pt, d in samples]}))
    if args.plot:
        from .plotting import plot_discriminant
        plot_discriminant(samples, args.plot)
    return 0


def cmd_bifurcation(args) -> int:
    cls = parse_class(args.cls)
    spec = miniversal_spec(cls)
    axes = _usage(parse_grid, args.grid or "", spec.tau)
    grid = bifurcation_grid(cls, axes, trunc=_jet(args), maxJet=args.max_jet,
                            selfTangency=args.self_tangency, traceRes=args.res)
    data = grid.to_csv()
    if args.csv:
        _write(args.csv, data)
    else:
        sys.stdout.write(data.decode())
    if args.json:
        _write(args.json, grid.dumps())
    if args.plot:
        from .plotting import plot_grid
        plot_grid(grid, args.plot)
    return 0


def cmd_adjacency(args) -> int:
    src = parse_class(args.source)
    if args.target:
        dst = parse_class(args.target)
        out = {"from": src.name, "to": dst.name, "adjacent": adjacency(src, dst)}
    else:
        out = {"from": src.name, "limit": args.limit,
               "closure": [c.name for c in adjacency_closure(src, args.limit)]}
    text = _dump(out)
    sys.stdout.write(text)
    if args.json:
        _write(args.json, text)
    return 0


def cmd_report(args) -> int:
    """Classification JSON, envelope SVG/CSV/PNG and, for simple classes with
    at most two parameters, a bifurcation grid, all in one directory."""
    pf, echo = _input_prenormal(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rep = classify(pf, maxJet=args.max_jet)
    box = _box(args.box)
    sketch = trace_numeric(pf, box, args.res)
    _write(outdir / "envelope.svg", emit(sketch, "svg"))
    _write(outdir / "envelope.csv", emit(sketch, "csv"))
    from .plotting import plot_envelope, plot_grid
    plot_envelope(sketch, str(outdir / "envelope.png"), f"{rep.cls.name}: {echo}")
    files = ["classification.json", "envelope.svg", "envelope.csv", "envelope.png"]
    cls = rep.cls
    if cls.simple and 1 <= len(table_directions(cls)) <= 2:
        spec = miniversal_spec(cls)
        axes = _usage(parse_grid, ",".join(f"{p}=-1/2:1/2:{args.grid_points}" for p in spec.paramNames),
                      spec.tau)
        grid = bifurcation_grid(cls, axes, trunc=_jet(args))
        _write(outdir / "bifurcation.csv", grid.to_csv())
        _write(outdir / "bifurcation.json", grid.dumps())
        plot_grid(grid, str(outdir / "bifurcation.png"), axes=(0, 1) if spec.tau > 1 else (0, 0))
        files += ["bifurcation.csv", "bifurcation.json", "bifurcation.png"]
    out = {"input": echo, "prenormal": pf.to_json(), "report": rep.to_json(), "files": sorted(files)}
    if rep.envelope is not None:
        out["envelope"] = rep.envelope.to_json()
    _write(outdir / "classification.json", _dump(out))
    sys.stdout.write("\n".join(str(outdir / f) for f in sorted(files)) + "\n")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="germforge",
                                 description="Classify tangential family germs of plane curves.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, family=True, cls=True):
        if family:
            p.add_argument("--family", help='family as "<x-expr> ; <y-expr>" in xi and t')
            p.add_argument("--presentation", choices=("tangential", "graph"), default="tangential",
                           help="'graph' reads --family as 'xi ; psi' and uses (xi+t, psi(xi+t, t))")
        if cls:
            p.add_argument("--class", dest="cls", metavar="NAME",
                           help="class name: I, II, S1,n, Tn, S2,2, S2,3+, S2,3-, S2,4")
        p.add_argument("--max-jet", type=int, default=None, metavar="N",
                       help="truncation degree (default: $GERMFORGE_MAX_JET or 16)")
        p.add_argument("--json", metavar="PATH", help="also write JSON here; errors go to stderr as JSON")

    def trace(p):
        p.add_argument("--box", default="-0.5:0.5:-0.5:0.5", help="source box xi0:xi1:t0:t1")
        p.add_argument("--res", type=int, default=400, help="grid resolution for tracing")
        p.add_argument("--svg", metavar="PATH")
        p.add_argument("--csv", metavar="PATH")
        p.add_argument("--plot", metavar="PATH", help="matplotlib rendering (PNG/PDF by extension)")

    p = sub.add_parser("classify", help="singularity class and invariants")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("prenormal", help="prenormal form (xi + t, phi)")
    common(p)
    p.set_defaults(func=cmd_prenormal)

    p = sub.add_parser("envelope", help="envelope branches and traced sketch")
    common(p)
    trace(p)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("codim", help="codimension and tangential codimension")
    common(p)
    p.add_argument("--degree", type=int, default=DEFAULT_DEGREE, help="starting jet degree of the tangent space")
    p.add_argument("--basis", action="store_true", help="include a miniversal monomial complement")
    p.set_defaults(func=cmd_codim)

    p = sub.add_parser("normal-form", help="normal form and miniversal directions of a class")
    common(p, family=False)
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("deform", help="apply the miniversal deformation and reclassify")
    common(p, family=False)
    p.add_argument("--deform", metavar="l1=v,...", help="parameter values; unspecified ones are 0")
    trace(p)
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("discriminant", help="resultant(Q, Q') of x^(n+1) + l_n x^(n-1) + ... + l_1")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", metavar="SPEC", help="l1=start:stop:count,...")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--plot", metavar="PATH")
    p.set_defaults(func=cmd_discriminant)

    p = sub.add_parser("bifurcation", help="classify a grid of miniversal deformation parameters")
    common(p, family=False)
    p.add_argument("--grid", metavar="SPEC", help="l1=start:stop:count,...")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--plot", metavar="PATH")
    p.add_argument("--self-tangency", action="store_true",
                   help="flag numeric self-tangencies of the traced envelope")
    p.add_argument("--res", type=int, default=200, help="trace resolution for --self-tangency")
    p.set_defaults(func=cmd_bifurcation)

    p = sub.add_parser("adjacency", help="adjacency query or closure")
    p.add_argument("--from", dest="source", required=True, metavar="NAME")
    p.add_argument("--to", dest="target", metavar="NAME")
    p.add_argument("--limit", type=int, default=8, help="index cut for infinite families in closures")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_adjacency)

    p = sub.add_parser("report", help="write JSON, SVG, CSV and PNG figures into a directory")
    common(p)
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--box", default="-0.5:0.5:-0.5:0.5")
    p.add_argument("--res", type=int, default=400)
    p.add_argument("--grid-points", type=int, default=9)
    p.set_defaults(func=cmd_report)
    return ap


def _error_payload(ex: GermforgeError) -> dict:
    out = {"error": type(ex).__name__, "message": str(ex), "exitCode": ex.code}
    if isinstance(ex, ParseError):
        out.update(line=ex.line, column=ex.column)
    axiom = getattr(ex, "axiom", None)
    if axiom:
        out["axiom"] = axiom
    max_jet = getattr(ex, "max_jet", None)
    if max_jet is not None:
        out["maxJet"] = max_jet
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GermforgeError as ex:
        if getattr(args, "json", None):
            sys.stderr.write(json.dumps(_error_payload(ex), sort_keys=True) + "\n")
        else:
            sys.stderr.write(f"germforge: {type(ex).__name__}: {ex}\n")
        return ex.code


if __name__ == "__main__":
    sys.exit(main())
