"""Command-line front end.

Reads an instance file, solves it and writes a JSON report to stdout::

    geomedian --input anchors.csv --verify --trace run.csv

Exit status: 0 when the result is certified (converged, exact or collinear),
2 when the iteration budget ran out, 1 on bad input or usage.
"""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import core, exact3, oracle, subdiff, weiszfeld
from .errors import GeoMedianError

log = logging.getLogger("geomedian")

EXIT_OK, EXIT_INPUT, EXIT_MAX_ITER = 0, 1, 2
_WEIGHT_HEADERS = {"w", "weight", "weights"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    p = _Parser(prog="geomedian", description=__doc__.splitlines()[0])
    p.add_argument("--input", required=True, metavar="PATH",
                   help="CSV rows 'x1,...,xn' (weights via a 'weight' header column) or JSON "
                        '{"anchors": [[...], ...], "weights": [...]}')
    p.add_argument("--algorithm", choices=("auto", "weiszfeld", "exact3"), default="auto")
    p.add_argument("--tol", type=float, default=subdiff.CERT_TOL, help="certificate tolerance")
    p.add_argument("--step-tol", type=float, default=weiszfeld.SolverConfig.step_tol)
    p.add_argument("--max-iter", type=int, default=weiszfeld.SolverConfig.max_iter)
    p.add_argument("--start", metavar="x1,...,xn", help="Weiszfeld starting point")
    p.add_argument("--escape", choices=("nudge", "stop"), default="nudge",
                   help="what to do when an iterate lands on a non-optimal anchor")
    p.add_argument("--trace", metavar="PATH", help="write iterates as CSV: iter,coords...,phi,step_norm")
    p.add_argument("--verify", action="store_true", help="compare against the grid oracle")
    p.add_argument("--quiet", action="store_true", help="suppress diagnostics on stderr")
    return p


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def read_csv(path):
    with open(path, newline="") as fh:
        rows = [[c.strip() for c in row] for row in csv.reader(fh) if any(c.strip() for c in row)]
    if not rows:
        raise UsageError(f"{path}: no data rows")
    weight_col = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.lower() for c in rows.pop(0)]
        hits = [j for j, name in enumerate(header) if name in _WEIGHT_HEADERS]
        if len(hits) > 1:
            raise UsageError(f"{path}: more than one weight column")
        weight_col = hits[0] if hits else None
        if not rows:
            raise UsageError(f"{path}: header but no data rows")
    width = len(rows[0])
    data = []
    for lineno, row in enumerate(rows, 1):
        if len(row) != width:
            raise UsageError(f"{path}: data row {lineno} has {len(row)} fields, expected {width}")
        try:
            data.append([float(c) for c in row])
        except ValueError:
            raise UsageError(f"{path}: data row {lineno} is not numeric") from None
    arr = np.array(data)
    if weight_col is None:
        return arr, None
    return np.delete(arr, weight_col, axis=1), arr[:, weight_col]


def read_json(path):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(obj, dict) or "anchors" not in obj:
        raise UsageError(f'{path}: expected an object with an "anchors" list')
    anchors = obj["anchors"]
    if not isinstance(anchors, list) or not anchors or not all(isinstance(r, list) for r in anchors):
        raise UsageError(f"{path}: anchors must be a non-empty list of coordinate lists")
    if len({len(r) for r in anchors}) != 1:
        raise UsageError(f"{path}: anchors do not share one dimension")
    return anchors, obj.get("weights")


def load_instance(path):
    """Parse a CSV or JSON instance file (JSON when the suffix is .json or the text starts with '{')."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{path}: no such file")
    text = p.read_text()
    if p.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        anchors, weights = read_json(p)
    else:
        anchors, weights = read_csv(p)
    return core.Instance(anchors, weights)


def _g(v):
    text = format(float(v), ".17g")
    return text if any(c in text for c in ".ein") else text + ".0"


def dumps(obj):
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj if not isinstance(obj, np.bool_) else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return _g(obj)


def write_trace(path, steps):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        n = len(steps[0].x)
        writer.writerow(["iter", *(f"x{j + 1}" for j in range(n)), "phi", "step_norm"])
        for s in steps:
            writer.writerow([s.k, *(_g(c) for c in s.x), _g(s.phi), _g(s.step_norm)])


def _choose(args, inst):
    if args.algorithm != "auto":
        return args.algorithm
    return "exact3" if inst.m == 3 and inst.n == 2 and inst.is_unweighted else "weiszfeld"


def run(argv=None, stdout=None):
    """Execute the CLI; returns the process exit code."""
    stdout = stdout or sys.stdout
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"geomedian: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="geomedian: %(message)s", stream=sys.stderr, force=True)
    if args.quiet:
        logging.getLogger("geomedian").setLevel(logging.ERROR)

    try:
        inst = load_instance(args.input)
        cfg = weiszfeld.SolverConfig(
            step_tol=args.step_tol, cert_tol=args.tol, max_iter=args.max_iter,
            escape_policy="nudge" if args.escape == "nudge" else "certify-and-stop")
        start = None
        if args.start is not None:
            start = core.as_point([float(c) for c in args.start.split(",")], inst.n, "--start")
        algorithm = _choose(args, inst)
        if algorithm == "exact3":
            if inst.m != 3 or inst.n != 2 or not inst.is_unweighted:
                raise UsageError("exact3 needs three distinct, equally weighted points in the plane")
            report, steps = _run_exact3(inst, cfg)
        else:
            report, steps = _run_weiszfeld(inst, start, cfg)
        if args.verify:
            report["verify"] = _verify(inst, report, algorithm, cfg)
        if args.trace:
            write_trace(args.trace, steps)
            report["trace_file"] = str(args.trace)
    except (UsageError, GeoMedianError, ValueError, OSError) as exc:
        print(f"geomedian: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    log.info("%s: status %s after %d iterations", algorithm, report["status"], report["iterations"])
    stdout.write(dumps(report) + "\n")
    return EXIT_MAX_ITER if report["status"] == "max-iter" else EXIT_OK


def _report(point, value, status, cert, iterations):
    return {
        "point": [float(c) for c in point],
        "value": float(value),
        "status": status,
        "certificate": {"kind": cert.kind, "residual": float(cert.residual)},
        "iterations": int(iterations),
    }


def _run_weiszfeld(inst, start, cfg):
    sol, trace = weiszfeld.solve(inst, start, cfg)
    return _report(sol.point, sol.value, sol.status, sol.certificate, sol.iterations), trace.steps


def _run_exact3(inst, cfg):
    case = exact3.solve_exact3(*inst.anchors)
    status = "collinear-degenerate" if case.kind == "collinear" else "exact"
    cert = subdiff.certify(inst, case.point, cfg.cert_tol)
    value = core.objective(inst, case.point)
    step = weiszfeld.TraceStep(0, case.point, value, 0.0, case.vertex_index)
    return _report(case.point, value, status, cert, 0), [step]


def _verify(inst, report, algorithm, cfg):
    if inst.n > oracle.MAX_DIM:
        raise UsageError(f"--verify supports n <= {oracle.MAX_DIM}")
    grid = oracle.grid_minimize(inst)
    out = {"oracle_value": grid.best_value, "gap": report["value"] - grid.best_value}
    if algorithm == "exact3":
        sol, _ = weiszfeld.solve(inst, None, cfg, record=False)
        out["weiszfeld_value"] = sol.value
    return out


def main(argv=None):
    sys.exit(run(argv))
