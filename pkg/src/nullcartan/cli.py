"""Command-line surface: file ingestion, verdict reports, sample tables.

Input files are UTF-8 JSON.  A symbolic curve file carries ``dimension``,
``parameter``, ``components`` (expression strings) and ``domain``; a
synthesized curve file (as written by ``synthesize``) carries the curvature
recipe instead and is re-integrated on ingestion, so frame extraction on it
is exact rather than spline-limited.  Reports open with one ``#`` header line
(the only place a timestamp appears); the rest of the body is deterministic,
with floats printed to 17 significant digits.  Exit codes: 0 verdict computed
(true or false), 2 input/parse error, 3 hypothesis/family violation,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .bundled import NULL_QUINTIC
from .constructions import (
    CurvatureProfile,
    bertrand_check,
    bertrand_mate,
    evolute,
    involute,
    pseudo_spherical_test,
    synthesize,
)
from .curve import Curve, chebyshev_grid, classify, pseudo_arc_reparam
from .errors import (
    DegenerateBasisError,
    ExprEvaluationError,
    ExprSyntaxError,
    FrameDegeneracyError,
    HypothesisError,
    InputError,
    NullCartanError,
    SingularRecursionError,
    StepSizeError,
)
from .frame import cartan_frame_at, frame_jets, frenet_residuals

_INPUT_ERRORS = (InputError, ExprSyntaxError)
_HYPOTHESIS_ERRORS = (HypothesisError,)
_NUMERICAL_ERRORS = (FrameDegeneracyError, StepSizeError, SingularRecursionError,
                     ExprEvaluationError, DegenerateBasisError)


# ---------------------------------------------------------------------------
# Serialization: 17-significant-digit floats, deterministic bodies
# ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x != x or x in (float("inf"), float("-inf")):
            return "null"
        return f"{x:.17g}"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "null"
    return json.dumps(str(x))


def _render_json(obj, indent=0):
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {_render_json(v, indent + 2)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        if flat:
            return "[" + ", ".join(_fmt(v) for v in seq) + "]"
        items = [f"{pad}  {_render_json(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return _fmt(obj)


def _table_csv(table):
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(table["columns"])
    for row in table["rows"]:
        writer.writerow([_fmt(v).strip('"') for v in row])
    return buf.getvalue()


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append((prefix, "[" + " ".join(_fmt(v).strip('"') for v in obj) + "]"))
    else:
        out.append((prefix, _fmt(obj).strip('"')))


def write_report(body, args, pure_json=False):
    """Emit the report atomically to --output or stdout."""
    header = (f"# nullcartan {body.get('command', '')} v{__version__} "
              f"generated {datetime.now(timezone.utc).isoformat()}\n")
    if pure_json or args.format == "json":
        text = ("" if pure_json else header) + _render_json(body) + "\n"
    else:
        table = body.pop("table", None)
        scalars = []
        _flatten("", body, scalars)
        lines = [header.rstrip("\n")]
        lines += [f"# {k}: {v}" for k, v in scalars]
        text = "\n".join(lines) + "\n"
        if table is not None:
            text += _table_csv(table)
    out_path = getattr(args, "output", None)
    if out_path:
        directory = os.path.dirname(os.path.abspath(out_path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".nullcartan-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, out_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Input files
# ---------------------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    digest = hashlib.sha256(raw).hexdigest()
    try:
        decoded = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not UTF-8: {exc}") from None
    text = "\n".join(line for line in decoded.splitlines()
                     if not line.lstrip().startswith("#"))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data, f"sha256:{digest}"


def _require(data, key, path):
    if key not in data:
        raise InputError(f"{path}: missing field {key!r}")
    return data[key]


def load_curve(path):
    """Curve-like object from a curve spec file (symbolic or synthesized)."""
    data, digest = _read_json(path)
    n = int(_require(data, "dimension", path))
    parameter = data.get("parameter", "s")
    if data.get("kind") == "synthesized" or "curvatures" in data:
        profile = CurvatureProfile.from_strings(
            n, [str(k) for k in _require(data, "curvatures", path)], parameter)
        interval = _require(data, "interval", path)
        step = float(data.get("step", 1e-3))
        curve = synthesize(profile, (float(interval[0]), float(interval[1])), step)
        return curve, data, digest
    components = _require(data, "components", path)
    if len(components) != n:
        raise InputError(
            f"{path}: {len(components)} components for dimension {n}")
    domain = _require(data, "domain", path)
    curve = Curve.from_strings([str(c) for c in components], parameter,
                               (float(domain[0]), float(domain[1])))
    return curve, data, digest


def load_profile(path):
    data, digest = _read_json(path)
    n = int(_require(data, "dimension", path))
    profile = CurvatureProfile.from_strings(
        n, [str(k) for k in _require(data, "curvatures", path)],
        data.get("parameter", "t"))
    return profile, data, digest


def _grid_for(args, curve, data, default_points, uniform=False):
    points = args.grid or data.get("grid_density") or default_points
    if points < 1:
        raise InputError(f"grid size must be positive, got {points}")
    a, b = curve.domain
    if uniform:
        return np.linspace(a, b, points)
    return chebyshev_grid(a, b, points)


def _base_body(command, args, digest):
    echo = {k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "output") and v is not None}
    return {"command": command, "arguments": echo, "input_digest": digest}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_classify(args):
    curve, data, digest = load_curve(args.file)
    grid = _grid_for(args, curve, data, 17)
    report = classify(curve, grid, args.tol)
    n = curve.dimension
    body = _base_body("classify", args, digest)
    body["tolerances"] = {"classification": args.tol}
    body["verdicts"] = {"family": report.family}
    body["summary"] = {
        "dimension": n,
        "nullity_sequence": list(report.report.nullity_sequence),
        "index_sequence": list(report.report.index_sequence),
        "degeneration_degree": report.report.degeneration_degree,
        "grid": list(report.grid),
    }
    body["table"] = {
        "columns": ["i", "r_i", "q_i"],
        "rows": [[i, r, q] for i, (r, q) in enumerate(
            zip(report.report.nullity_sequence, report.report.index_sequence))],
    }
    write_report(body, args)
    return 0


def _frame_columns(n):
    cols = ["t"]
    cols += [f"x{j + 1}" for j in range(n)]
    for name in ["L1", "L2", "W3", "N2", "N1"] + [f"W{i}" for i in range(4, n - 1)]:
        cols += [f"{name}_{j + 1}" for j in range(n)]
    cols += [f"k{i + 1}" for i in range(n - 3)]
    return cols


def cmd_frame(args):
    curve, data, digest = load_curve(args.file)
    grid = _grid_for(args, curve, data, 61, uniform=True)
    n = curve.dimension
    rows = []
    max_closure = 0.0
    for t in grid:
        f = cartan_frame_at(curve, float(t), tol=args.tol)
        point = np.asarray(curve.point(float(t)), dtype=float)
        row = [t, *point, *f.L1, *f.L2, *f.W[0], *f.N2, *f.N1]
        for w in f.W[1:]:
            row.extend(w)
        row.extend(f.curvatures)
        rows.append(row)
        max_closure = max(max_closure, f.closure_residual)
    body = _base_body("frame", args, digest)
    body["tolerances"] = {"frame": args.tol}
    body["summary"] = {"dimension": n, "samples": len(rows),
                       "max_closure_residual": max_closure}
    if len(grid) >= 7:
        res = frenet_residuals(curve, grid)
        body["summary"]["frenet_residuals"] = dict(res.per_equation)
        body["summary"]["max_frenet_residual"] = res.overall
    body["table"] = {"columns": _frame_columns(n), "rows": rows}
    write_report(body, args)
    return 0


def cmd_bertrand(args):
    curve, data, digest = load_curve(args.file)
    grid = _grid_for(args, curve, data, 17)
    try:
        result = bertrand_mate(curve, args.mu, grid, args.tol)
        report = result.report
        rows = [[s, sb, *pt] for s, sb, pt in
                zip(report.grid, report.sbar, result.sampled.points)]
    except HypothesisError as exc:
        if exc.condition != "k1 = k2 = 0":
            raise
        verdict = bertrand_check(curve, grid, args.tol)
        body = _base_body("bertrand", args, digest)
        body["tolerances"] = {"curvature": args.tol}
        body["verdicts"] = {"bertrand": False}
        body["summary"] = {"max_k1": verdict.max_k1, "max_k2": verdict.max_k2,
                           "reason": str(exc)}
        write_report(body, args)
        return 0
    n = curve.dimension
    body = _base_body("bertrand", args, digest)
    body["tolerances"] = {"curvature": args.tol}
    body["verdicts"] = {"bertrand": report.verdict}
    body["summary"] = {
        "mu": args.mu,
        "max_k1": report.max_k1,
        "max_k2": report.max_k2,
        "alignment_defect": report.alignment_defect,
        "correspondence_offset": report.correspondence_offset,
    }
    body["table"] = {
        "columns": ["s", "sbar"] + [f"mate_x{j + 1}" for j in range(n)],
        "rows": rows,
    }
    write_report(body, args)
    return 0


def cmd_sphere(args):
    curve, data, digest = load_curve(args.file)
    grid = _grid_for(args, curve, data, 17)
    report = pseudo_spherical_test(curve, grid, args.tol)
    n = curve.dimension
    body = _base_body("sphere", args, digest)
    body["tolerances"] = {"constancy": args.tol}
    body["verdicts"] = {"is_spherical": report.is_spherical,
                        "last_coefficient_nonzero": report.last_coefficient_nonzero}
    body["summary"] = {
        "radius": report.radius,
        "center": None if report.center is None else list(report.center),
        "max_radius_spread": report.max_radius_spread,
        "max_center_spread": report.max_center_spread,
        "sphere_equation_residual": report.sphere_equation_residual,
    }
    a_cols = [f"a{i + 1}" for i in range(n - 4)]
    body["table"] = {
        "columns": ["t"] + a_cols + ["radius_sq"] + [f"center_x{j + 1}" for j in range(n)],
        "rows": [[t, *a, r, *c] for t, a, r, c in
                 zip(report.grid, report.a_values, report.radius_sq, report.centers)],
    }
    write_report(body, args)
    return 0


def cmd_evolute(args):
    curve, data, digest = load_curve(args.file)
    grid = _grid_for(args, curve, data, 33, uniform=True)
    result = evolute(curve, grid)
    body = _base_body("evolute", args, digest)
    body["summary"] = {
        "speed_defect": result.speed_defect,
        "min_abs_slope": result.min_abs_slope,
    }
    if args.roundtrip:
        fj = frame_jets(curve, float(grid[0]), extra_order=1)
        offset = 1.0 / fj.curvatures[2].value
        inv = involute(result.curve, float(grid[0]), grid, arc_offset=offset)
        sup = max(float(np.max(np.abs(inv.sampled.points[i] -
                                      np.asarray(curve.point(float(t))))))
                  for i, t in enumerate(grid))
        body["summary"]["roundtrip_arc_offset"] = offset
        body["summary"]["roundtrip_sup_distance"] = sup
    body["table"] = {
        "columns": ["t"] + [f"E_x{j + 1}" for j in range(curve.dimension)],
        "rows": [[t, *p] for t, p in zip(result.grid, result.sampled.points)],
    }
    write_report(body, args)
    return 0


def cmd_involute(args):
    curve, data, digest = load_curve(args.file)
    grid = _grid_for(args, curve, data, 33, uniform=True)
    result = involute(curve, args.t0, grid, arc_offset=args.s0)
    body = _base_body("involute", args, digest)
    body["summary"] = {"t0": args.t0, "arc_offset": args.s0}
    body["table"] = {
        "columns": ["t", "s"] + [f"I_x{j + 1}" for j in range(curve.dimension)],
        "rows": [[t, result.curve.arc_length(t), *p]
                 for t, p in zip(result.grid, result.sampled.points)],
    }
    write_report(body, args)
    return 0


def cmd_synthesize(args):
    profile, data, digest = load_profile(args.file)
    interval = _require(data, "interval", args.file)
    step = args.step or float(data.get("step", 1e-3))
    curve = synthesize(profile, (float(interval[0]), float(interval[1])), step)
    points = args.grid or data.get("grid_density") or 129
    grid = np.linspace(curve.domain[0], curve.domain[1], points)
    table = curve.frame_table(grid)
    n = curve.dimension
    body = _base_body("synthesize", args, digest)
    body["kind"] = "synthesized"
    body["dimension"] = n
    body["parameter"] = profile.parameter
    body["curvatures"] = [str(k) for k in data["curvatures"]]
    body["interval"] = [curve.domain[0], curve.domain[1]]
    body["step"] = step
    body["max_gram_defect"] = curve.max_gram_defect
    columns = _frame_columns(n)
    rows = []
    for i, t in enumerate(grid):
        row = [t, *table["points"][i], *table["L1"][i], *table["L2"][i],
               *table["W3"][i], *table["N2"][i], *table["N1"][i]]
        for name in [f"W{j}" for j in range(4, n - 1)]:
            row.extend(table[name][i])
        row.extend(table["curvatures"][i])
        rows.append(row)
    body["table"] = {"columns": columns, "rows": rows}
    write_report(body, args)
    return 0


def cmd_reparam(args):
    curve, data, digest = load_curve(args.file)
    result = pseudo_arc_reparam(curve, grid_density=args.grid or 129, tol=args.tol)
    body = _base_body("reparam", args, digest)
    body["summary"] = {"unit_speed_defect": result.unit_speed_defect,
                       "pseudo_arc_span": [result.sampled.grid[0],
                                           result.sampled.grid[-1]]}
    body["table"] = {
        "columns": ["t", "sbar"],
        "rows": [[t, s] for t, s in zip(result.table_t, result.table_s)],
    }
    write_report(body, args)
    return 0


def cmd_fixture(args):
    body = dict(NULL_QUINTIC)
    write_report(body, args, pure_json=True)
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="nullcartan",
        description="Cartan frames, curvatures, classification sequences and "
                    "theorem-level constructions for null curves in index-2 "
                    "pseudo-Euclidean spaces.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, file_help="curve spec file (JSON)", tol=1e-9,
               tol_help="tolerance for classification/frame gates"):
        p.add_argument("file", help=file_help)
        p.add_argument("--grid", type=int, default=None,
                       help="number of grid points (default per command)")
        p.add_argument("--tol", type=float, default=tol,
                       help=f"{tol_help} (default {tol:g})")
        p.add_argument("--format", choices=("csv", "json"), default="json",
                       help="report format (default json)")
        p.add_argument("--output", default=None,
                       help="write the report to PATH (atomic; default stdout)")

    p = sub.add_parser("classify", help="nullity/index sequences and family flag")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("frame", help="Cartan frame samples and Frenet residuals")
    common(p)
    p.set_defaults(func=cmd_frame)

    p = sub.add_parser("bertrand", help="Bertrand verdict and offset mate")
    common(p, tol=1e-8, tol_help="curvature-vanishing tolerance")
    p.add_argument("--mu", type=float, default=1.0,
                   help="offset along W3 (nonzero, default 1)")
    p.set_defaults(func=cmd_bertrand)

    p = sub.add_parser("sphere", help="pseudo-sphere membership test")
    common(p, tol=1e-5, tol_help="radius/center constancy tolerance")
    p.set_defaults(func=cmd_sphere)

    p = sub.add_parser("evolute", help="evolute of a dimension-6 family curve")
    common(p)
    p.add_argument("--roundtrip", action="store_true",
                   help="also unwind the evolute and report the sup distance")
    p.set_defaults(func=cmd_evolute)

    p = sub.add_parser("involute", help="involute of a spacelike curve")
    common(p)
    p.add_argument("--t0", type=float, required=True,
                   help="base point parameter for the arc length")
    p.add_argument("--s0", type=float, default=0.0,
                   help="arc-length offset added to s(t) (default 0)")
    p.set_defaults(func=cmd_involute)

    p = sub.add_parser("synthesize",
                       help="integrate the Frenet system for a curvature profile")
    common(p, file_help="curvature profile file (JSON)")
    p.add_argument("--step", type=float, default=None,
                   help="integration step (default from file or 1e-3)")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("reparam", help="pseudo-arc reparametrization table")
    common(p)
    p.set_defaults(func=cmd_reparam)

    p = sub.add_parser("fixture", help="print the bundled demonstration curve")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_fixture)

    return parser


def _diagnostic(category, exc):
    payload = {"category": category, "error": type(exc).__name__,
               "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        _diagnostic("input", exc)
        return 2
    except _HYPOTHESIS_ERRORS as exc:
        _diagnostic("hypothesis", exc)
        return 3
    except _NUMERICAL_ERRORS as exc:
        _diagnostic("numerical", exc)
        return 4
    except NullCartanError as exc:
        # remaining library errors are family/classification violations
        _diagnostic("family", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
