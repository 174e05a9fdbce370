"""Command-line front end: ``dualpair {transform,evolve,verify,scan,inspect}``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 numerical failure.  Set ``DUALPAIR_LOG`` (e.g. ``INFO``) for log output.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from typing import Callable

import numpy as np

from . import coverings as cov
from .duality import dual_invert, dual_transform, project_to_dual, project_to_sutherland, su_dual_invert, su_dual_transform, zx_invert, zx_map
from .dynamics import (
    all_invariants,
    eval_H,
    eval_HRS,
    eval_Hhat,
    evolve_dual,
    evolve_sutherland,
    invariant_names,
    write_csv,
)
from .errors import DocumentError, NoPath, NumericalFailure
from .io import MODELS, PointDocument
from .linalg import eig_hermitian
from .slices import completed_slice, dual_slice_interior, moment_residual, sutherland_slice
from .spaces import Coupling, DualInteriorPoint
from .verify import SUITES, reports_json, run_suite

log = logging.getLogger("dualpair")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# Transform graph
# ---------------------------------------------------------------------------

# (source, target, map); order matters for the breadth-first search, so the
# covering projections come before the horizontal dualities.
EDGES: list[tuple[str, str, Callable]] = [
    ("P2-I", "P1-I", lambda pt, c, tol: cov.psi2_I(pt)),
    ("P2-II", "P1-II", lambda pt, c, tol: cov.psi2_II(pt)),
    ("P1-I", "P", lambda pt, c, tol: cov.psi1_I(pt, c)),
    ("P1-II", "PhatC", lambda pt, c, tol: cov.psi1_II(pt, c)),
    ("P", "PhatC", lambda pt, c, tol: dual_transform(pt, c)),
    ("PhatC", "P", lambda pt, c, tol: dual_invert(pt, c)),
    ("Phat", "PhatC", lambda pt, c, tol: zx_map(pt, c)),
    ("PhatC", "Phat", lambda pt, c, tol: zx_invert(pt, c, tol)),
    ("CM-I", "CM-II", lambda pt, c, tol: su_dual_transform(pt, c)),
    ("CM-II", "CM-I", lambda pt, c, tol: su_dual_invert(pt, c)),
    ("P1-I", "P1-II", lambda pt, c, tol: cov.lift_rel_I_to_II(pt, c)),
    ("P1-II", "P1-I", lambda pt, c, tol: cov.lift_rel_II_to_I(pt, c)),
    ("P2-I", "P2-II", lambda pt, c, tol: cov.lift_rel_I_to_II(pt, c)),
    ("P2-II", "P2-I", lambda pt, c, tol: cov.lift_rel_II_to_I(pt, c)),
    ("P", "Level", lambda pt, c, tol: sutherland_slice(pt, c)),
    ("PhatC", "Level", lambda pt, c, tol: completed_slice(pt, c)),
    ("Phat", "Level", lambda pt, c, tol: dual_slice_interior(pt, c)),
    ("Level", "P", lambda pt, c, tol: project_to_sutherland(pt, c)),
    ("Level", "PhatC", lambda pt, c, tol: project_to_dual(pt, c)),
]


def find_path(source: str, target: str) -> list[tuple[str, str, Callable]]:
    """Shortest composition of registered maps; lifts up a covering are never registered."""
    if source == target:
        return []
    prev: dict[str, tuple] = {source: None}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for edge in EDGES:
            if edge[0] == node and edge[1] not in prev:
                prev[edge[1]] = edge
                if edge[1] == target:
                    path = []
                    cur = target
                    while prev[cur] is not None:
                        path.append(prev[cur])
                        cur = prev[cur][0]
                    return path[::-1]
                queue.append(edge[1])
    raise NoPath(f"no map from {source} to {target} (lifts up a covering are not unique)")


def transform(doc: PointDocument, target: str, tol: float = 1e-12) -> PointDocument:
    if target not in MODELS:
        raise DocumentError(f"unknown model {target!r}")
    pt = doc.point
    for src, dst, fn in find_path(doc.model, target):
        log.info("transform %s -> %s", src, dst)
        pt = fn(pt, doc.coupling, tol)
    return PointDocument(doc.coupling, target, pt)


# ---------------------------------------------------------------------------
# Observables for scan and inspect
# ---------------------------------------------------------------------------


def observable(name: str, level, dual=None) -> float:
    """``H<k>``, ``Hhat<k>`` (``k`` may be negative), ``HRS``, ``mingap`` or ``absz<j>``."""
    if name == "HRS":
        return eval_HRS(level)
    if name == "mingap":
        ev = eig_hermitian(1j * level.J).values
        return float(np.min(ev[:-1] - ev[1:]))
    for prefix, fn in (("Hhat", eval_Hhat), ("H", eval_H)):
        if name.startswith(prefix):
            k = _int_suffix(name, prefix)
            if k == 0 or abs(k) > level.n or (prefix == "H" and k < 0):
                raise DocumentError(f"label out of range in {name!r}")
            return fn(level, k)
    if name.startswith("absz"):
        j = _int_suffix(name, "absz")
        if dual is None or not 1 <= j <= dual.n - 1:
            raise DocumentError(f"{name!r} needs 1 <= j <= n-1")
        return float(abs(dual.z[j - 1]))
    raise DocumentError(f"unknown quantity {name!r}")


def _int_suffix(name: str, prefix: str) -> int:
    try:
        return int(name[len(prefix):])
    except ValueError:
        raise DocumentError(f"unknown quantity {name!r}") from None


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:num`` (inclusive linspace) or a comma-separated list; empty string is an empty grid."""
    spec = spec.strip()
    if not spec:
        return np.zeros(0)
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise DocumentError(f"grid {spec!r} must be lo:hi:num")
        lo, hi, num = float(parts[0]), float(parts[1]), int(parts[2])
        if num < 0:
            raise DocumentError("grid size must be non-negative")
        return np.linspace(lo, hi, num)
    return np.array([float(v) for v in spec.split(",") if v.strip()])


def scan_rows(c: Coupling, quantity: str, gaps: np.ndarray, qhat: float = 0.0, last: float = 0.0):
    """Observable over equal chamber gaps; rows outside the closed chamber are skipped."""
    header = ["gap"] + [f"phat_{i}" for i in range(1, c.n + 1)] + [quantity]
    rows = []
    for gap in gaps:
        if not np.isfinite(gap) or gap < abs(c.x):
            log.info("skip gap %g outside the chamber", gap)
            continue
        phat = last + gap * np.arange(c.n - 1, -1, -1, dtype=float)
        pt = DualInteriorPoint.make(np.full(c.n, qhat), phat, c, interior=False)
        dual = zx_map(pt, c)
        level = completed_slice(dual, c)
        rows.append([float(gap)] + list(phat) + [observable(quantity, level, dual)])
    return header, rows


def inspect(doc: PointDocument, tol: float = 1e-9) -> dict:
    c = doc.coupling
    info = {"model": doc.model, "coupling": {"n": c.n, "x": c.x}}
    try:
        level = transform(doc, "Level").point
    except NoPath:
        info["note"] = "no projection to the unreduced space from this model"
        return info
    res = moment_residual(level, c)
    ev = eig_hermitian(1j * level.J).values
    info.update(
        {
            "moment_residual": res,
            "on_shell": bool(res < tol),
            "spectrum_minus_iJ": [float(v) for v in ev],
            "min_gap": float(np.min(ev[:-1] - ev[1:])) if ev.size > 1 else None,
            "invariants": dict(zip(invariant_names(c.n), (float(v) for v in all_invariants(level)))),
            "HRS": eval_HRS(level),
        }
    )
    return info


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def parse_coupling(text: str) -> Coupling:
    try:
        n, x = text.split(",")
        return Coupling(int(n), float(x))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"coupling must be 'n,x' with n >= 2 and x != 0 ({exc})") from None


def _read_doc(path: str) -> PointDocument:
    text = sys.stdin.read() if path == "-" else open(path).read()
    return PointDocument.loads(text)


def _check_coupling(doc: PointDocument, c: Coupling | None):
    if c is not None and c != doc.coupling:
        raise DocumentError(f"--coupling {c.n},{c.x:g} disagrees with the document's coupling")


def _write_text(text: str, out: str | None):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_transform(args) -> int:
    doc = _read_doc(args.input)
    _check_coupling(doc, args.coupling)
    out = transform(doc, args.to, args.tol if args.tol is not None else 1e-12)
    _write_text(out.dumps(), args.out)
    return EXIT_OK


def cmd_evolve(args) -> int:
    doc = _read_doc(args.input)
    _check_coupling(doc, args.coupling)
    c = doc.coupling
    if args.family == "H":
        pt = transform(doc, "P").point
        traj = evolve_sutherland(pt, c, args.k, args.t, args.samples)
    else:
        pt = transform(doc, "PhatC").point
        traj = evolve_dual(pt, c, args.k, args.t, args.samples)
    if args.out in (None, "-"):
        write_csv(traj, sys.stdout)
    else:
        write_csv(traj, args.out)
    log.info("max invariant drift %.3e", traj.max_drift)
    return EXIT_OK


def _suite_job(args):
    name, seed = args
    return run_suite(name, seed)


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            chunks = list(pool.map(_suite_job, [(s, args.seed) for s in names]))
    else:
        chunks = [run_suite(s, args.seed) for s in names]
    reports = [r for chunk in chunks for r in chunk]
    for r in reports:
        log.info(r.line())
    _write_text(reports_json(reports) + "\n", args.out)
    failed = [r.check_name for r in reports if not r.passed]
    if failed:
        sys.stderr.write(f"{len(failed)} of {len(reports)} checks failed: {', '.join(failed)}\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.coupling is None:
        raise DocumentError("scan needs --coupling n,x")
    header, rows = scan_rows(args.coupling, args.quantity, parse_grid(args.grid), args.qhat, args.last)
    fh = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([format(float(v), ".17g") for v in r])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_inspect(args) -> int:
    doc = _read_doc(args.input)
    _check_coupling(doc, args.coupling)
    info = inspect(doc, args.tol if args.tol is not None else 1e-9)
    _write_text(json.dumps(info, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--coupling", type=parse_coupling, default=None, metavar="N,X")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", default=None, help="output path (default: stdout)")

    p = argparse.ArgumentParser(prog="dualpair", description="Sutherland / Ruijsenaars-Schneider duality toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("transform", parents=[common], help="map a point document to another model")
    s.add_argument("input", help="point document (JSON) or - for stdin")
    s.add_argument("--to", required=True, choices=MODELS)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("evolve", parents=[common], help="integrate a commuting flow and write CSV")
    s.add_argument("input")
    s.add_argument("--family", choices=("H", "Hhat"), required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--samples", type=int, default=11)
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("verify", parents=[common], help="run certification suites and write a JSON report")
    s.add_argument("--suite", default="all", choices=["all", *SUITES])
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", parents=[common], help="tabulate an observable over a chamber-gap grid")
    s.add_argument("--quantity", required=True, help="H<k>, Hhat<k>, HRS, mingap or absz<j>")
    s.add_argument("--grid", required=True, help="lo:hi:num or comma-separated gaps")
    s.add_argument("--qhat", type=float, default=0.0, help="common value of all dual angles")
    s.add_argument("--last", type=float, default=0.0, help="value of the lowest chamber coordinate")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("inspect", parents=[common], help="print invariant diagnostics for a point document")
    s.add_argument("input")
    s.set_defaults(func=cmd_inspect)
    return p


def _configure_logging():
    level = os.environ.get("DUALPAIR_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.jobs < 1:
        sys.stderr.write("dualpair: --jobs must be positive\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except NumericalFailure as exc:
        sys.stderr.write(f"dualpair: numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"dualpair: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
