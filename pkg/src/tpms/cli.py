"""Command-line front end: solve, trace, mesh, limits and verify.

Exit codes: 0 success, 1 failed checks or trace, 2 no root, 3 period-closure
fault, 64 usage error.  Options may also come from a plain-text key=value file
given with --config; command-line flags take precedence over it, and it takes
precedence over the built-in defaults.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
from pathlib import Path
from typing import Optional


from . import __version__
from .errors import (
    ClosureError,
    DomainError,
    MeshIOError,
    NoRootError,
    ParameterDomainError,
    TraceError,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NO_ROOT = 2
EXIT_CLOSURE = 3
EXIT_USAGE = 64

CSV_HEADER = "s,a,b,x,i_gamma,i_delta"
CACHE_VERSION = 1

DEFAULTS = {
    "tol": 1e-10,
    "trace_tol": 1e-8,
    "n": 24,
    "resolution": 64,
    "copies": "1,1,1",
    "format": "obj",
    "out": None,
    "cache": None,
    "loops": True,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _g(v: float) -> str:
    return "%.17g" % v


# ---------------------------------------------------------------------------
# configuration


def read_config(path) -> dict:
    """Parse key=value lines; '#' starts a comment, keys use '-' or '_' interchangeably."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    for k, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{k}: expected key=value, got {line!r}")
        key, val = (t.strip() for t in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _resolve(args, name, conv=None):
    """Flag value, else config value, else default."""
    v = getattr(args, name, None)
    if v is None and name in args._config:
        v = args._config[name]
        if conv is not None:
            try:
                v = conv(v)
            except ValueError as exc:
                raise UsageError(f"config value {name}={v!r}: {exc}") from exc
    if v is None:
        v = DEFAULTS.get(name)
    return v


def _positive(name, v):
    if not (v > 0 and math.isfinite(v)):
        raise UsageError(f"{name} must be positive, got {v}")
    return v


def _parse_copies(text) -> tuple:
    try:
        c = tuple(int(t) for t in str(text).replace(" ", ",").split(",") if t)
    except ValueError as exc:
        raise UsageError(f"copies must be three integers, got {text!r}") from exc
    if len(c) != 3 or min(c) < 1:
        raise UsageError(f"copies must be three integers >= 1, got {text!r}")
    return c


def _bool(text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# ---------------------------------------------------------------------------
# trace cache


def default_cache_path() -> Path:
    root = os.environ.get("TPMS_CACHE_DIR")
    base = Path(root) if root else Path.home() / ".cache" / "tpms"
    return base / "trace.csv"


def trace_csv(points) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for q in points:
        a, b, x = q.params.as_tuple()
        buf.write(",".join(_g(v) for v in (q.s, a, b, x, q.residual.i_gamma, q.residual.i_delta)) + "\n")
    return buf.getvalue()


def write_cache(path, points, tol: float) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    head = f"# tpms-trace version={CACHE_VERSION} tol={_g(tol)} n={len(points)}\n"
    path.write_text(head + trace_csv(points), encoding="ascii")


def read_cache(path, tol: float):
    """Points from a cache file, or None if it is missing or stale."""
    from .periods import FamilyCurvePoint, PeriodResidual
    from .weierstrass import SurfaceParams

    path = Path(path)
    if not path.exists():
        return None
    lines = path.read_text(encoding="ascii").splitlines()
    if not lines or not lines[0].startswith("# tpms-trace"):
        return None
    meta = dict(t.split("=", 1) for t in lines[0].split()[2:] if "=" in t)
    if int(meta.get("version", -1)) != CACHE_VERSION or float(meta.get("tol", "inf")) > tol:
        return None
    if len(lines) < 3 or lines[1] != CSV_HEADER:
        return None
    pts = []
    for ln in lines[2:]:
        s, a, b, x, ig, idl = (float(t) for t in ln.split(","))
        p = SurfaceParams(a, b, x, limit=(x == 0.0))
        pts.append(FamilyCurvePoint(s, p, PeriodResidual(ig, idl, idl - ig)))
    return pts


# ---------------------------------------------------------------------------
# commands


def cmd_solve(args, out) -> int:
    from .periods import in_region, residuals, solve_b
    from .weierstrass import make_params

    tol = _positive("tol", float(_resolve(args, "tol", float)))
    a, x = args.a, args.x
    for ok, text in ((0 < a, "0 < a"), (a < 1, "a < 1"), (0 < x, "0 < x"), (x < 1, "x < 1")):
        if not ok:
            raise UsageError(f"inequality {text} violated by (a, x) = ({a}, {x})")
    print(f"a = {_g(a)}", file=out)
    print(f"x = {_g(x)}", file=out)
    try:
        inside = in_region(a, x)
    except DomainError:
        inside = False
    print(f"in_region = {str(inside).lower()}", file=out)
    try:
        b = solve_b(a, x, tol)
    except (NoRootError, DomainError) as exc:
        print(f"no root: {exc}", file=out)
        return EXIT_NO_ROOT
    res = residuals(make_params(a, b, x))
    print(f"b = {_g(b)}", file=out)
    print(f"i_gamma = {_g(res.i_gamma)}", file=out)
    print(f"i_delta = {_g(res.i_delta)}", file=out)
    print(f"i_sigma = {_g(res.i_sigma)}", file=out)
    return EXIT_OK


def cmd_trace(args, out) -> int:
    from .periods import trace_family_curve

    n = int(_resolve(args, "n", int))
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    tol = _positive("trace_tol", float(_resolve(args, "trace_tol", float)))
    dest = _resolve(args, "out")
    cache = _resolve(args, "cache") or default_cache_path()
    try:
        pts = trace_family_curve(n, tol=tol)
    except TraceError as exc:
        text = trace_csv(exc.points)
        _write_text(dest, text, out)
        last = exc.last_good
        where = f" (last good a={_g(last.a)}, x={_g(last.x)})" if last is not None else ""
        print(f"trace failed: {exc}{where}", file=sys.stderr)
        return EXIT_FAIL
    _write_text(dest, trace_csv(pts), out)
    try:
        write_cache(cache, pts, tol)
    except OSError as exc:
        print(f"warning: trace cache not written to {cache}: {exc}", file=sys.stderr)
    return EXIT_OK


def _write_text(dest, text, out):
    if dest in (None, "-"):
        out.write(text)
        return
    try:
        Path(dest).write_text(text, encoding="ascii")
    except OSError as exc:
        raise MeshIOError(f"cannot write ({exc.strerror or exc})", dest) from exc


def _mesh_params(args, out):
    from .periods import curve_point_at, resolve_s, trace_family_curve
    from .weierstrass import make_params

    if args.s is not None:
        if any(v is not None for v in (args.a, args.b, args.x)):
            raise UsageError("give either --s or --a/--b/--x, not both")
        if not (0.0 <= args.s <= 1.0):
            raise UsageError(f"s must lie in [0, 1], got {args.s}")
        if args.s in (0.0, 1.0):
            raise UsageError("the endpoints s = 0 and s = 1 are degenerate surfaces")
        tol = float(_resolve(args, "trace_tol", float))
        cache = _resolve(args, "cache") or default_cache_path()
        pts = read_cache(cache, tol)
        if pts is None:
            pts = trace_family_curve(int(DEFAULTS["n"]), tol=tol)
            try:
                write_cache(cache, pts, tol)
            except OSError:
                pass
        q = resolve_s(args.s, pts)
        print(f"# s = {_g(args.s)} resolved to (a, b, x) = "
              f"({_g(q.params.a)}, {_g(q.params.b)}, {_g(q.params.x)})", file=out)
        return q.params
    if any(v is None for v in (args.a, args.b, args.x)):
        raise UsageError("mesh needs --s or all of --a, --b, --x")
    try:
        p = make_params(args.a, args.b, args.x)
    except ParameterDomainError as exc:
        raise UsageError(str(exc)) from exc
    if args.project:
        q = curve_point_at(p.a, p.x)
        print(f"# projected ({_g(p.a)}, {_g(p.b)}, {_g(p.x)}) onto the solution curve at fixed a: "
              f"({_g(q.params.a)}, {_g(q.params.b)}, {_g(q.params.x)})", file=out)
        p = q.params
    return p


def cmd_mesh(args, out) -> int:
    from .surface import check_loop_periods, export_mesh, quality_report
    from .surface.assemble import assemble_fundamental_piece
    from .surface.patch import mesh_patch

    res = int(_resolve(args, "resolution", int))
    if res < 8:
        raise UsageError(f"resolution must be >= 8, got {res}")
    copies = _parse_copies(_resolve(args, "copies"))
    fmt = str(_resolve(args, "format")).lower()
    if fmt not in ("obj", "ply"):
        raise UsageError(f"format must be obj or ply, got {fmt!r}")
    dest = _resolve(args, "out")
    if dest is None:
        raise UsageError("mesh needs --out")
    loops = _resolve(args, "loops", _bool)
    if args.no_loops:
        loops = False
    p = _mesh_params(args, out)
    try:
        piece = assemble_fundamental_piece(mesh_patch(p, res), p)
        checks = check_loop_periods(piece, p) if loops else []
    except ClosureError as exc:
        print(f"period-closure fault: {exc}", file=out)
        if not args.project and args.s is None:
            print("hint: parameters must lie on the solution curve; try --project", file=out)
        return EXIT_CLOSURE
    export_mesh(piece, dest, fmt, copies)
    print(f"params = {_g(p.a)},{_g(p.b)},{_g(p.x)}", file=out)
    for k, v in enumerate(piece.lattice):
        print(f"lattice[{k}] = " + " ".join(_g(c) for c in v), file=out)
    for line in quality_report(piece).lines():
        print(line, file=out)
    if checks:
        worst = max(c.residual for c in checks)
        print(f"loop periods in lattice span: {len(checks)} loops, worst relative residual {worst:.3e}", file=out)
    print(f"wrote {dest}", file=out)
    return EXIT_OK


def limit_schedules():
    """Curve points approaching s = 0 (by a) and s = 1 (by x)."""
    from .periods import curve_point_at, curve_point_at_x

    scherk_a = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
    hw_x = (1e-1, 3e-2, 1e-2, 1e-3, 1e-4)
    return [curve_point_at(a) for a in scherk_a], [curve_point_at_x(x) for x in hw_x]


def cmd_limits(args, out) -> int:
    from .limits import hw_gap, is_monotone_decreasing, scherk_gap
    from .periods import FamilyCurvePoint, residuals, terminal_point
    from .weierstrass import make_params

    term = terminal_point()
    print(f"terminal a* = {_g(term.params.a)} b* = {_g(term.params.b)}", file=out)
    if any(v is not None for v in (args.a, args.b, args.x)):
        if any(v is None for v in (args.a, args.b, args.x)):
            raise UsageError("a point needs all of --a, --b, --x")
        try:
            p = make_params(args.a, args.b, args.x)
        except ParameterDomainError as exc:
            raise UsageError(str(exc)) from exc
        q = FamilyCurvePoint(float("nan"), p, residuals(p))
        print(f"scherk_gap = {_g(scherk_gap(q))}", file=out)
        print(f"hw_gap = {_g(hw_gap(q, terminal=term))}", file=out)
        return EXIT_OK
    sch, hw = limit_schedules()
    gs = [scherk_gap(q) for q in sch]
    gh = [hw_gap(q, terminal=term) for q in hw]
    for q, g in zip(sch, gs):
        print(f"scherk a={_g(q.params.a)} gap={_g(g)}", file=out)
    for q, g in zip(hw, gh):
        print(f"hw x={_g(q.params.x)} gap={_g(g)}", file=out)
    ok = is_monotone_decreasing(gs) and is_monotone_decreasing(gh)
    print(f"monotone = {str(ok).lower()}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def verify_checks():
    """(name, ok, worst) triples for the invariant suite."""
    from .checks import run_all

    return run_all()


def cmd_verify(args, out) -> int:
    results = verify_checks()
    for name, status, worst in results:
        print(f"{name},{status},{worst:.3e}", file=out)
    return EXIT_OK if all(s != "fail" for _, s, _ in results) else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tpms", description="Genus-7 triply periodic minimal surfaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key=value file with defaults for the options")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", help="solve I_gamma(a, b, x) = 0 for b")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("trace", help="trace the solution curve and write CSV")
    p.add_argument("--n", type=int)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--trace-tol", dest="trace_tol", type=float)
    p.add_argument("--cache", help="trace cache path consumed by mesh --s")

    p = sub.add_parser("mesh", help="mesh the fundamental piece")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--s", type=float, help="curve parameter, resolved against the trace cache")
    p.add_argument("--project", action="store_true", help="move (a, b, x) onto the curve at fixed a")
    p.add_argument("--resolution", type=int)
    p.add_argument("--copies", help="lattice translates n1,n2,n3")
    p.add_argument("--format", choices=("obj", "ply"))
    p.add_argument("--out")
    p.add_argument("--no-loops", dest="no_loops", action="store_true", help="skip the loop-period check")
    p.add_argument("--trace-tol", dest="trace_tol", type=float)
    p.add_argument("--cache")

    p = sub.add_parser("limits", help="Scherk and genus-5 limit gaps")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--x", type=float)

    sub.add_parser("verify", help="run the invariant suite")
    return parser


COMMANDS = {
    "solve": cmd_solve,
    "trace": cmd_trace,
    "mesh": cmd_mesh,
    "limits": cmd_limits,
    "verify": cmd_verify,
}


def main(argv: Optional[list] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        args._config = read_config(args.config) if args.config else {}
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except MeshIOError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
