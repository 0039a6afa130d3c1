"""
Command-line front end.

    fibered-links check <curve-file>
    fibered-links intersect <curve-file>
    fibered-links triangulate <lift-file> -o <tri-file>
    fibered-links solve <tri-file>
    fibered-links bounds <lift-file> [--arcs <pants-file>] [--family g]
    fibered-links pipeline <lift-file> [<lift-file> ...] [--jobs N]
    fibered-links gen twist <n> [-o <lift-file>]
    fibered-links gen star <lift1> <lift2> [-o <lift-file>]
    fibered-links gen puncture <lift> [--face KEY] [-o <lift-file>]

Exit codes: 0 success, 1 validation failure, 2 solver did not converge,
3 unreadable or malformed input.  Errors go to stderr as JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .bounds import WordError, bounds_report, parse_pants
from .curves import DiagramError, filling_check, parse_diagram, self_intersection
from .geometry import build_gluing_system, solve_shapes, volume
from .lifts import (LiftError, add_puncture, family_index, gen_twist_family,
                    parse_lift, star_sum, write_lift)
from .triangulation import (TriangulationError, build_drilled_complement, parse_tri,
                            validate, write_tri)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3
TOLERANCE = 1e-6


class CommandError(Exception):
    def __init__(self, code, kind, message, **extra):
        super().__init__(message)
        self.code = code
        self.kind = kind
        self.extra = extra


def round_numbers(obj):
    """Floats to 15 significant digits, recursively."""
    if isinstance(obj, float):
        return float("%.15g" % obj)
    if isinstance(obj, dict):
        return {k: round_numbers(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_numbers(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(round_numbers(obj), indent=2, sort_keys=True)


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CommandError(EXIT_IO, "io", "cannot read %s: %s" % (path, e.strerror))


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise CommandError(EXIT_IO, "io", "cannot write %s: %s" % (path, e.strerror))


def _parse(kind, parser, path):
    text = _read(path)
    try:
        return parser(text), text
    except (DiagramError, TriangulationError, WordError) as e:
        raise CommandError(EXIT_IO, "format", "%s: %s" % (path, e), file=path, input=kind)


def _load_lift(path):
    return _parse("lift", parse_lift, path)


# ------------------------------------------------------------ commands

def cmd_check(args):
    d, _ = _parse("curve", parse_diagram, args.curve)
    rep = filling_check(d)
    out = rep.as_dict()
    lines = ["genus %d, %d faces, orbifold Euler characteristic %s"
             % (rep.genus, rep.num_faces, rep.orbifold_euler),
             "filling: %s, taut: %s" % (_yes(rep.is_filling), _yes(rep.is_taut))]
    lines += ["  %s: %s" % (k or "(surface)", r) for k, r in rep.offending_faces]
    code = EXIT_OK
    if not (rep.is_filling and rep.is_taut):
        code = EXIT_INVALID
    return out, lines, code


def cmd_intersect(args):
    d, _ = _parse("curve", parse_diagram, args.curve)
    try:
        i = self_intersection(d)
    except DiagramError as e:
        raise CommandError(EXIT_INVALID, "validation", str(e))
    return {"self_intersection": i}, ["i(γ,γ) = %d" % i], EXIT_OK


def _triangulate(l):
    try:
        t = build_drilled_complement(l)
    except TriangulationError as e:
        raise CommandError(EXIT_INVALID, "validation", str(e))
    rep = validate(t)
    if not rep.ok:
        raise CommandError(EXIT_INVALID, "validation", "built triangulation is invalid",
                           failures=rep.failures)
    return t, rep


def _tri_stats(t, rep):
    return {"T": rep.num_tetrahedra, "E": rep.num_edges,
            "cusps": [{"index": i, "label": s} for i, s in enumerate(t.cusp_labels)]}


def cmd_triangulate(args):
    l, _ = _load_lift(args.lift)
    t, rep = _triangulate(l)
    _write(args.output, write_tri(t))
    lines = ["%d tetrahedra, %d edges, %d cusps" % (rep.num_tetrahedra, rep.num_edges,
                                                     rep.num_cusps)]
    lines += ["  cusp %d: %s" % (i, s) for i, s in enumerate(t.cusp_labels)]
    return _tri_stats(t, rep), lines, EXIT_OK


def _solve(t):
    try:
        system = build_gluing_system(t)
    except TriangulationError as e:
        raise CommandError(EXIT_INVALID, "validation", str(e))
    sol = solve_shapes(system)
    out = {"status": sol.status, "geometric": sol.geometric,
           "residual": sol.residual, "iterations": sol.iterations,
           "volume": volume(sol) if sol.converged else None}
    return sol, out


def cmd_solve(args):
    t, _ = _parse("triangulation", parse_tri, args.tri)
    sol, out = _solve(t)
    lines = ["status %s after %d iterations, residual %.3g"
             % (sol.status, sol.iterations, sol.residual)]
    if out["volume"] is not None:
        lines.append("volume %.15g" % out["volume"])
    return out, lines, EXIT_OK if sol.converged else EXIT_SOLVER


def _crossing_count(l):
    try:
        return self_intersection(l.base)
    except DiagramError as e:
        raise CommandError(EXIT_INVALID, "validation", str(e))


def _family_genus(l):
    try:
        family_index(l)
    except LiftError:
        return None
    return 1


def cmd_bounds(args):
    l, _ = _load_lift(args.lift)
    arcs = None
    if args.arcs:
        arcs, _ = _parse("pants", parse_pants, args.arcs)
    c = _crossing_count(l)
    rep = bounds_report(c, args.family, arcs).as_dict()
    return rep, _bounds_lines(rep), EXIT_OK


def _bounds_lines(b):
    lines = ["upper bound %.15g" % b["upper"]]
    if b["family_lower"] is not None:
        lines.append("family lower bound %.15g" % b["family_lower"])
    if b["pants_lower"] is not None:
        lines.append("pants lower bound %.15g (clamped %.15g), class counts %s"
                     % (b["pants_lower"], b["pants_lower_clamped"], b["per_pants_counts"]))
    return lines


def run_pipeline(path, family=None, arcs_path=None):
    """Full report for one lift file, as a plain dict."""
    l, text = _load_lift(path)
    rep = filling_check(l.base)
    c = _crossing_count(l)
    t, vrep = _triangulate(l)
    sol, solved = _solve(t)
    if family is None:
        family = _family_genus(l)
    arcs = None
    if arcs_path:
        arcs, _ = _parse("pants", parse_pants, arcs_path)
    bounds = bounds_report(c, family, arcs)
    lower = bounds.family_lower
    if lower is None:
        lower = bounds.pants_lower_clamped
    if not sol.geometric or solved["volume"] is None:
        verdict = "indeterminate"
    else:
        vol = solved["volume"]
        ok = (lower is None or lower <= vol + TOLERANCE) and vol < bounds.upper + TOLERANCE
        verdict = "holds" if ok else "violated"
    return {
        "version": __version__,
        "input": path,
        "input_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        "filling": rep.as_dict(),
        "self_intersection": c,
        "triangulation": _tri_stats(t, vrep),
        "solver": solved,
        "bounds": bounds.as_dict(),
        "sandwich": verdict,
    }, sol.converged


def _pipeline_job(job):
    path, family, arcs = job
    try:
        report, converged = run_pipeline(path, family, arcs)
        return report, EXIT_OK if converged else EXIT_SOLVER
    except CommandError as e:
        return _error_record(e), e.code


def cmd_pipeline(args):
    jobs = [(p, args.family, args.arcs) for p in args.lift]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_pipeline_job, jobs))
    else:
        results = [_pipeline_job(j) for j in jobs]
    code = max(c for _, c in results)
    lines = []
    for report, c in results:
        if "error" in report:
            lines.append("%s: error: %s" % (report.get("file", "?"), report["error"]))
            continue
        tri, s = report["triangulation"], report["solver"]
        lines.append("%s: i = %d, T = %d, %d cusps, solver %s, volume %s, sandwich %s" % (
            report["input"], report["self_intersection"], tri["T"], len(tri["cusps"]),
            s["status"], "%.15g" % s["volume"] if s["volume"] is not None else "n/a",
            report["sandwich"]))
        lines += ["  " + x for x in _bounds_lines(report["bounds"])]
    out = results[0][0] if len(results) == 1 else [r for r, _ in results]
    if code != EXIT_OK and len(results) == 1 and "error" in out:
        first = results[0]
        raise CommandError(first[1], out["kind"], out["error"])
    return out, lines, code


def cmd_gen(args):
    try:
        if args.what == "twist":
            l = gen_twist_family(args.n)
        elif args.what == "star":
            l1, _ = _load_lift(args.lift1)
            l2, _ = _load_lift(args.lift2)
            l = star_sum(l1, l2)
        else:
            l0, _ = _load_lift(args.lift)
            l = add_puncture(l0, args.face)
    except ValueError as e:
        raise CommandError(EXIT_INVALID, "validation", str(e))
    text = write_lift(l)
    _write(args.output, text)
    rep = filling_check(l.base)
    out = {"crossings": len(l.base.crossings), "genus": rep.genus,
           "faces": rep.num_faces, "output": args.output}
    lines = ["wrote lift with %d crossings, genus %d, %d faces"
             % (len(l.base.crossings), rep.genus, rep.num_faces)]
    return out, lines, EXIT_OK


# ------------------------------------------------------------ plumbing

def _yes(flag):
    return "yes" if flag else "no"


def _error_record(e: CommandError):
    rec = {"error": str(e), "kind": e.kind, "exit_code": e.code}
    rec.update(e.extra)
    return rec


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print JSON instead of a summary")

    p = argparse.ArgumentParser(prog="fibered-links", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", parents=[common], help="filling and tautness report")
    s.add_argument("curve")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("intersect", parents=[common], help="self-intersection number")
    s.add_argument("curve")
    s.set_defaults(func=cmd_intersect)

    s = sub.add_parser("triangulate", parents=[common], help="drilled-complement triangulation")
    s.add_argument("lift")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_triangulate)

    s = sub.add_parser("solve", parents=[common], help="solve gluing equations, report volume")
    s.add_argument("tri")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("bounds", parents=[common], help="volume bounds")
    s.add_argument("lift")
    s.add_argument("--arcs", help="pants-arcs file for the pants lower bound")
    s.add_argument("--family", type=int, metavar="G",
                   help="apply the family lower bound for surface genus G")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("pipeline", parents=[common], help="everything, as one report")
    s.add_argument("lift", nargs="+")
    s.add_argument("--arcs")
    s.add_argument("--family", type=int, metavar="G")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_pipeline)

    g = sub.add_parser("gen", help="generate lifts")
    gsub = g.add_subparsers(dest="what", required=True)
    s = gsub.add_parser("twist", parents=[common])
    s.add_argument("n", type=int)
    s.add_argument("-o", "--output")
    s = gsub.add_parser("star", parents=[common])
    s.add_argument("lift1")
    s.add_argument("lift2")
    s.add_argument("-o", "--output")
    s = gsub.add_parser("puncture", parents=[common])
    s.add_argument("lift")
    s.add_argument("--face", help="canonical key of the face (default: largest)")
    s.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out, lines, code = args.func(args)
    except CommandError as e:
        sys.stderr.write(json.dumps(_error_record(e), sort_keys=True) + "\n")
        return e.code
    if getattr(args, "output", "") is None and args.command == "gen":
        # the lift itself went to stdout
        return code
    if args.json:
        sys.stdout.write(dumps(out) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    if code != EXIT_OK:
        failure = {"error": "command finished with exit code %d" % code, "exit_code": code}
        if args.command == "check":
            failure["reasons"] = [f["reason"] for f in out["offending_faces"]]
        sys.stderr.write(json.dumps(failure, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
