"""Command-line interface: ``toric-kahler <command> SPEC.json [options]``.

Exit codes: 0 success, 1 a check or domain failure, 2 bad input. Facet
indices on the command line and in every output are 1-based.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .audit import DEFAULT_SEED, run_checks
from .convex import DomainError
from .polytope import (
    PointKind,
    SamplingError,
    ToricSpec,
    bounding_box,
    classify_point,
    enumerate_faces,
    validate,
)
from .potentials import (
    ProjectiveParams,
    metric_hessian_face,
    metric_hessian_flat,
    metric_hessian_projective,
)
from .quotient import stratum_report

log = logging.getLogger("toric_kahler")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
GRID_INSET = 0.02
GRID_FIELDS = ("dual", "h", "min_eig", "eigenvalues")


class InputError(Exception):
    """Anything wrong with the files or flags a user supplied."""


# -- parsing ----------------------------------------------------------------------


def _number(value, what: str) -> float:
    if isinstance(value, bool):
        raise InputError(f"{what}: expected a number, got {value!r}")
    try:
        out = float(Fraction(value)) if isinstance(value, str) else float(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: cannot read {value!r} as a number") from exc
    if not math.isfinite(out):
        raise InputError(f"{what}: {value!r} is not finite")
    return out


def parse_spec(doc) -> tuple[ToricSpec, float | None]:
    """Spec document -> (spec, projective R or None)."""
    if not isinstance(doc, dict):
        raise InputError("spec file must hold a JSON object")
    facets = doc.get("facets")
    if not isinstance(facets, list) or not facets:
        raise InputError("'facets' must be a non-empty list")
    normals, offsets = [], []
    for k, facet in enumerate(facets, start=1):
        if not isinstance(facet, dict) or "normal" not in facet or "offset" not in facet:
            raise InputError(f"facet {k}: needs 'normal' and 'offset'")
        u = facet["normal"]
        if not isinstance(u, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in u):
            raise InputError(f"facet {k}: normal must be a list of integers")
        normals.append(tuple(u))
        offsets.append(_number(facet["offset"], f"facet {k} offset"))
    dims = {len(u) for u in normals}
    if len(dims) != 1:
        raise InputError("normals have differing lengths")
    (n,) = dims
    if n == 0:
        raise InputError("normals must be non-empty")
    if "dim" in doc and doc["dim"] != n:
        raise InputError(f"'dim' is {doc['dim']!r} but normals have length {n}")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise InputError("'name' must be a string")
    R = None
    proj = doc.get("projective")
    if proj is not None:
        if not isinstance(proj, dict) or "R" not in proj:
            raise InputError("'projective' must be an object with key 'R'")
        R = _number(proj["R"], "projective R")
    try:
        spec = ToricSpec(tuple(normals), tuple(offsets), name=name)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return spec, R


def load_spec(path: str) -> tuple[ToricSpec, float | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return parse_spec(doc)


def parse_point(text: str) -> np.ndarray:
    """``"1/3,1/3"`` or ``"[0.5]"``; an empty string is the 0-dimensional point."""
    body = text.strip().strip("[]()").strip()
    if not body:
        return np.zeros(0)
    return np.array([_number(p.strip(), "point coordinate") for p in body.split(",")])


def parse_indices(text: str) -> tuple[int, ...]:
    """1-based list such as ``2``, ``[2]`` or ``1,3``; returned 0-based and sorted."""
    body = text.strip().strip("[]").strip()
    try:
        idx = [int(p) for p in body.split(",")] if body else []
    except ValueError as exc:
        raise InputError(f"cannot read facet indices from {text!r}") from exc
    if any(i < 1 for i in idx):
        raise InputError("facet indices are 1-based")
    return tuple(sorted({i - 1 for i in idx}))


def parse_box(text: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``lo..hi`` per axis, comma separated, e.g. ``-1..1,0..2``."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise InputError(f"--box needs {n} ranges, got {len(parts)}")
    lo, hi = [], []
    for p in parts:
        a, sep, b = p.partition("..")
        if not sep:
            raise InputError(f"--box range {p!r} is not of the form lo..hi")
        lo.append(_number(a, "--box"))
        hi.append(_number(b, "--box"))
    lo, hi = np.array(lo), np.array(hi)
    if np.any(lo >= hi):
        raise InputError("--box needs lo < hi on every axis")
    return lo, hi


# -- output -----------------------------------------------------------------------


def _plain(obj):
    """JSON-ready copy; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        x = obj
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _error(message: str, code: int, **extra) -> int:
    sys.stderr.write(dumps({"error": message, **extra}))
    return code


def _valid_spec(args) -> tuple[ToricSpec, float | None]:
    """Load and validate; an invalid spec is an input error for every command but validate."""
    spec, R = load_spec(args.spec)
    report = validate(spec)
    if not report.ok:
        raise InputError("spec failed validation", report.to_dict(one_based=True))
    return spec, R


def _projective_R(args, file_R: float | None) -> float | None | bool:
    """``False`` when the flat quotient is wanted, else the R to use (None = min_R)."""
    if args.projective is None:
        return False
    if args.projective == "file":
        return file_R
    return _number(args.projective, "--projective")


def _face_for(spec: ToricSpec, active: tuple[int, ...]):
    for face in enumerate_faces(spec):
        if face.active_set == active:
            return face
    shown = [i + 1 for i in active]
    raise InputError(f"{shown} is not the active set of any face")


# -- commands ---------------------------------------------------------------------


def cmd_validate(args) -> int:
    spec, _ = load_spec(args.spec)
    report = validate(spec)
    _emit(dumps({"spec": spec.name, **report.to_dict(one_based=True)}), args.out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_faces(args) -> int:
    spec, _ = _valid_spec(args)
    rows = []
    for entry in stratum_report(spec):
        face = entry.face
        rows.append({
            "active_set": [i + 1 for i in face.active_set],
            "dim": face.dim,
            "witness": face.witness,
            "lin_basis": face.lin_basis,
            "stratum_dim": entry.stratum_dim,
            **entry.stratum.to_dict(),
        })
    _emit(dumps(rows), args.out)
    return EXIT_OK


def _params(spec: ToricSpec, R) -> ProjectiveParams:
    try:
        return ProjectiveParams.for_spec(spec, R)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_eval(args) -> int:
    spec, file_R = _valid_spec(args)
    R = _projective_R(args, file_R)
    point = parse_point(args.point) if args.point is not None else None
    record = {"spec": spec.name}
    try:
        if args.face is not None:
            if R is not False:
                raise InputError("--face and --projective cannot be combined")
            face = _face_for(spec, parse_indices(args.face))
            w = np.zeros(face.dim) if point is None else point
            if w.size != face.dim:
                raise InputError(f"face chart has dimension {face.dim}, point has {w.size}")
            report = metric_hessian_face(spec, face, w)
            record.update(mode="face", face=[i + 1 for i in face.active_set], eta=face.point(w))
        else:
            if point is None:
                raise InputError("--point is required")
            if point.size != spec.n:
                raise InputError(f"point has dimension {point.size}, spec has {spec.n}")
            if R is False:
                report = metric_hessian_flat(spec, point)
                record.update(mode="flat")
            else:
                params = _params(spec, R)
                report = metric_hessian_projective(spec, params, point)
                record.update(mode="projective", R=params.R)
    except DomainError as exc:
        if exc.index is None:
            return _error(str(exc), EXIT_FAIL)
        which = "deficit" if exc.index == spec.N else f"facet {exc.index + 1}"
        return _error(f"{exc} at {which}", EXIT_FAIL, violated_constraint=exc.index + 1)
    record.update(report.to_dict())
    _emit(dumps(record), args.out)
    return EXIT_OK


def _grid_box(spec: ToricSpec, args) -> tuple[np.ndarray, np.ndarray]:
    if args.box is not None:
        return parse_box(args.box, spec.n)
    lo, hi = bounding_box(spec)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise InputError("P is unbounded; pass --box")
    pad = GRID_INSET * (hi - lo)
    return lo + pad, hi - pad


def cmd_grid(args) -> int:
    spec, file_R = _valid_spec(args)
    if args.resolution < 2:
        raise InputError("--resolution must be at least 2")
    fields = [f.strip() for f in args.fields.split(",") if f.strip()]
    unknown = [f for f in fields if f not in GRID_FIELDS]
    if unknown or not fields:
        raise InputError(f"unknown --fields {unknown}; choose from {list(GRID_FIELDS)}")
    R = _projective_R(args, file_R)
    params = None if R is False else _params(spec, R)
    lo, hi = _grid_box(spec, args)
    axes = [np.linspace(a, b, args.resolution) for a, b in zip(lo, hi)]

    header = [f"eta{i + 1}" for i in range(spec.n)]
    for f in fields:
        header += [f"eig{i + 1}" for i in range(spec.n)] if f == "eigenvalues" else [f]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    rows = skipped = 0
    for eta in itertools.product(*axes):  # last axis varies fastest
        eta = np.array(eta)
        if classify_point(spec, eta).kind is not PointKind.INTERIOR:
            continue
        try:
            rep = (metric_hessian_flat(spec, eta) if params is None
                   else metric_hessian_projective(spec, params, eta))
        except DomainError:
            skipped += 1
            continue
        values = {"dual": rep.dual_value, "h": rep.h_value, "min_eig": rep.min_eigenvalue}
        row = [repr(float(x)) for x in eta]
        for f in fields:
            if f == "eigenvalues":
                row += [repr(float(e)) for e in np.linalg.eigvalsh(rep.hessian)]
            else:
                row.append(repr(float(values[f])))
        writer.writerow(row)
        rows += 1
    if skipped:
        log.info("%d interior grid points sat on the deficit singularity and were skipped", skipped)
    if rows == 0:
        return _error("the grid box does not meet the interior of P", EXIT_FAIL)

    _emit(buf.getvalue(), args.out)
    meta = {
        "spec": spec.name,
        "mode": "flat" if params is None else "projective",
        "R": None if params is None else params.R,
        "resolution": args.resolution,
        "box": {"lo": lo, "hi": hi},
        "inset": None if args.box is not None else GRID_INSET,
        "fields": fields,
        "columns": header,
        "order": "row-major, last coordinate fastest",
        "rows": rows,
        "grid_points": args.resolution ** spec.n,
    }
    meta_path = args.meta or (f"{args.out}.json" if args.out else None)
    if meta_path:
        Path(meta_path).write_text(dumps(meta))
    return EXIT_OK


def cmd_check(args) -> int:
    spec, file_R = _valid_spec(args)
    if args.samples < 1:
        raise InputError("--samples must be positive")
    R = _projective_R(args, file_R)
    R = file_R if R is False else R
    box = parse_box(args.box, spec.n) if args.box is not None else None
    try:
        summary = run_checks(spec, samples=args.samples, seed=args.seed,
                             R=R, box=box)
    except SamplingError as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(dumps(summary), args.out)
    if summary["failed"]:
        sys.stderr.write(f"failed suites: {', '.join(summary['failed'])}\n")
        return EXIT_FAIL
    return EXIT_OK


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toric-kahler", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("spec", help="spec file (JSON)")
        p.add_argument("--out", help="write the result here instead of stdout")
        p.set_defaults(func=func)
        return p

    def projective(p):
        p.add_argument("--projective", nargs="?", const="file", metavar="R",
                       help="use the reduction of CP^N scaled by R (default: the file's R, else min_R)")

    command("validate", cmd_validate, "check interior, minimality, primitivity and span")
    command("faces", cmd_faces, "list faces with stratum classifications")

    p = command("eval", cmd_eval, "evaluate potentials and the metric at a point")
    p.add_argument("--point", help="coordinates, e.g. 1/3,1/3 (chart coordinates with --face)")
    p.add_argument("--face", metavar="I", help="1-based active set, e.g. 2 or [1,3]")
    projective(p)

    p = command("grid", cmd_grid, "tabulate potentials on a grid over P")
    p.add_argument("--resolution", type=int, default=11)
    p.add_argument("--box", help="lo..hi per axis, comma separated")
    p.add_argument("--fields", default="dual,h,min_eig", help=f"subset of {','.join(GRID_FIELDS)}")
    p.add_argument("--meta", help="metadata sidecar path (default: OUT.json when --out is set)")
    projective(p)

    p = command("check", cmd_check, "run all property suites")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--box", help="sampling box for unbounded P: lo..hi per axis")
    projective(p)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("TORIC_LOG", "WARNING").strip().upper()
    value = int(level) if level.isdigit() else logging.getLevelName(level)
    if not isinstance(value, int):
        value = logging.WARNING
    logging.basicConfig(level=value, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        extra = {"report": exc.args[1]} if len(exc.args) > 1 else {}
        return _error(str(exc.args[0]), EXIT_INPUT, **extra)
    except OSError as exc:
        return _error(f"cannot write output: {exc}", EXIT_INPUT)


if __name__ == "__main__":
    raise SystemExit(main())
