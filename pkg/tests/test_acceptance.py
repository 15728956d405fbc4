"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in pytest's terminal summary (see conftest.py) and by
running this file directly: ``python3 tests/test_acceptance.py``.
"""
import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from geomedian import core, exact3, oracle, subdiff, weiszfeld  # noqa: E402
from geomedian.core import Instance  # noqa: E402
from geomedian.errors import AtVertexError  # noqa: E402
from geomedian.weiszfeld import SolverConfig, solve  # noqa: E402

from conftest import COLLINEAR3, EQUILATERAL, PLUS, SQUARE  # noqa: E402

RESULTS = {}
SEED = 20240611
ONE_PLUS_SQRT2 = 2.414214


def record(num, ok, detail):
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[num] = line
    print(line)
    return ok


def rng_for(num):
    return np.random.default_rng(SEED + num)


def weighted_instance(rng, weighted):
    m = int(rng.integers(3, 11))
    return Instance(rng.random((m, 2)), rng.uniform(0.5, 2.0, m) if weighted else None)


def random_start(rng, inst):
    while True:
        x = rng.uniform(-0.25, 1.25, inst.n)
        if core.vertex_index(inst, x) is None:
            return x


def test_01_descent():
    rng = rng_for(1)
    cfg = SolverConfig()
    violations = checked = 0
    t0 = time.perf_counter()
    for _ in range(1000):
        inst = Instance(rng.random((int(rng.integers(3, 11)), 2)))
        _, trace = solve(inst, random_start(rng, inst), cfg)
        pts, steps = trace.points(), trace.step_norms()
        if len(pts) < 2:
            continue
        moved = steps[1:] > 1e-12
        dec = core.objective_decrease(inst, pts[:-1], pts[1:])
        checked += int(moved.sum())
        violations += int(np.sum(dec[moved] <= 0))
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 10.0
    assert record(1, ok, f"{violations} violations over {checked} steps, {elapsed:.2f} s")


def test_02_gradient_vs_finite_differences():
    rng = rng_for(2)
    worst = 0.0
    done = 0
    while done < 100:
        inst = weighted_instance(rng, weighted=bool(done % 2))
        x = rng.uniform(-0.5, 1.5, 2)
        try:
            fd = oracle.fd_gradient(inst, x, h=1e-6)
        except AtVertexError:
            continue
        g = core.gradient(inst, x)
        worst = max(worst, float(np.linalg.norm(g - fd) / max(np.linalg.norm(g), 1e-300)))
        done += 1
    assert record(2, worst <= 1e-6, f"max relative error {worst:.2e} over 100 points")


def _verdicts_agree(inst, grid=None):
    grid = grid or oracle.grid_minimize(inst)
    bad = 0
    for k in range(inst.m):
        if oracle.vertex_verdict(inst, k, grid) is not subdiff.resultant(inst, k).optimal:
            bad += 1
    return bad


def test_03_vertex_criterion():
    plus, square = Instance(PLUS), Instance(SQUARE)
    r_plus = subdiff.resultant(plus, 0)
    r_square = subdiff.resultant(square, 0)
    pinned = (r_plus.optimal and abs(r_plus.resultant_norm - 1.0) <= 1e-12
              and not r_square.optimal
              and abs(r_square.resultant_norm - (np.sqrt(2) + 1)) <= 1e-12)
    bad = _verdicts_agree(plus) + _verdicts_agree(square)
    rng = rng_for(3)
    optimal_seen = checks = 0
    for i in range(200):
        m = int(rng.integers(3, 9))
        # half the instances get one heavy anchor so optimal vertices occur
        w = np.ones(m)
        if i % 2:
            w[rng.integers(m)] = rng.uniform(1.0, m)
        inst = Instance(rng.random((m, 2)), w)
        bad += _verdicts_agree(inst)
        checks += inst.m
        optimal_seen += sum(subdiff.resultant(inst, k).optimal for k in range(inst.m))
    ok = pinned and bad == 0
    assert record(3, ok, f"pinned {'ok' if pinned else 'WRONG'}, {bad} disagreements over "
                         f"{checks} random anchors ({optimal_seen} optimal)")


def test_04_solver_matches_oracle():
    rng = rng_for(4)
    worst_ratio = worst_res = 0.0
    failures = done = 0
    t0 = time.perf_counter()
    while done < 200:
        inst = weighted_instance(rng, weighted=bool(done % 2))
        if core.collinear(inst):
            continue
        done += 1
        sol, _ = solve(inst, record=False)
        grid = oracle.grid_minimize(inst, levels=6, initial_divisions=48)
        bound = inst.total_weight * grid.resolution * np.sqrt(2)
        gap = abs(sol.value - grid.best_value)
        worst_ratio = max(worst_ratio, gap / bound)
        worst_res = max(worst_res, sol.certificate.residual)
        failures += gap > bound or sol.certificate.residual > 1e-8
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 30.0
    assert record(4, ok, f"{failures} failures, worst gap/bound {worst_ratio:.3f}, "
                         f"worst residual {worst_res:.1e}, {elapsed:.2f} s")


def _random_triangles(rng, count):
    out = []
    while len(out) < count:
        p = rng.random((3, 2))
        if exact3.classify(*p)[0] != "collinear":
            out.append(p)
    return out


def test_05_exact3_cross_validation():
    rng = rng_for(5)
    cfg = SolverConfig()
    worst_dphi = worst_sum = 0.0
    worst_cos = -1.0
    failures = 0
    kinds = {"interior": 0, "vertex": 0}
    for p in _random_triangles(rng, 500):
        inst = Instance(p)
        case = exact3.solve_exact3(*p)
        kinds[case.kind] += 1
        sol, _ = solve(inst, cfg=cfg, record=False)
        dphi = abs(core.objective(inst, case.point) - sol.value)
        worst_dphi = max(worst_dphi, dphi)
        bad = dphi > 1e-7
        if case.kind == "interior":
            s = float(np.linalg.norm(subdiff.unit_directions(inst, case.point).sum(axis=0)))
            worst_sum = max(worst_sum, s)
            bad |= s > 1e-8
        else:
            c = subdiff.three_point_conditions(inst, case.point).cosines[0]
            worst_cos = max(worst_cos, c)
            bad |= c > -0.5 + 1e-7
        failures += bad
    assert record(5, failures == 0,
                  f"{failures} failures; max |dphi| {worst_dphi:.1e}, max |sum v| {worst_sum:.1e} "
                  f"({kinds['interior']} interior), max vertex cos {worst_cos:.4f} "
                  f"({kinds['vertex']} vertex)")


def test_06_interior_angles():
    rng = rng_for(6)
    worst = 0.0
    count = 0
    for p in _random_triangles(rng, 500):
        case = exact3.solve_exact3(*p)
        if case.kind != "interior":
            continue
        rep = subdiff.three_point_conditions(Instance(p), case.point)
        worst = max(worst, max(abs(c + 0.5) for c in rep.cosines))
        count += 1
    assert record(6, count > 0 and worst <= 1e-6,
                  f"max |cos + 1/2| {worst:.1e} over {count} interior triangles")


def test_07_expansion_ratio():
    rep = weiszfeld.expansion_ratio(Instance(SQUARE), 0, 1e-6)
    err = abs(rep.min_ratio - ONE_PLUS_SQRT2)
    assert record(7, err <= 1e-3, f"sampled ratio {rep.min_ratio:.6f} at r=1e-6, |error| {err:.1e}")


def test_08_vertex_capture():
    base = Instance(SQUARE)
    x0 = np.array([0.98, 0.03])
    landing = weiszfeld.f_step(base, x0)
    inst = Instance(np.vstack([base.anchors, landing]))
    lands = core.vertex_index(inst, weiszfeld.f_step(inst, x0)) == 4
    non_optimal = not subdiff.resultant(inst, 4).optimal
    nudged, _ = solve(inst, x0, SolverConfig(escape_policy="nudge"))
    stopped, _ = solve(inst, x0, SolverConfig(escape_policy="certify-and-stop"))
    ok = (lands and non_optimal
          and nudged.status == "converged" and nudged.certificate.residual <= 1e-8
          and stopped.certificate.kind == "vertex" and stopped.certificate.index == 4
          and stopped.certificate.residual > 0)
    assert record(8, ok, f"capture {'built' if lands and non_optimal else 'NOT built'}; nudge "
                         f"{nudged.status} residual {nudged.certificate.residual:.1e}; stop reports "
                         f"vertex residual {stopped.certificate.residual:.4f}")


def test_09_collinear():
    sol, _ = solve(Instance(COLLINEAR3))
    pinned = sol.status == "collinear-degenerate" and sol.point.tolist() == [1.0, 0.0]
    rng = rng_for(9)
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 12))
        t = rng.uniform(-5, 5, m)
        direction = rng.standard_normal(2)
        direction /= np.linalg.norm(direction)
        a = rng.uniform(-1, 1, 2) + t[:, None] * direction
        inst = Instance(a, rng.uniform(0.5, 2.0, m))
        s, _ = solve(inst, record=False)
        _, best = oracle.brute_median_1d(inst.anchors, inst.weights)
        worst = max(worst, abs(s.value - best) / (1 + best))
    ok = pinned and worst <= 1e-12
    assert record(9, ok, f"(0,0),(1,0),(3,0) -> {sol.point.tolist()}; max relative gap to "
                         f"1-D oracle {worst:.1e} over 200 instances")


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "geomedian", *map(str, args), "--quiet"],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout


def test_10_cli_contract(tmp_path):
    square = tmp_path / "square.csv"
    square.write_text("\n".join(f"{x},{y}" for x, y in SQUARE) + "\n")
    line = tmp_path / "line.csv"
    line.write_text("\n".join(f"{x},{y}" for x, y in COLLINEAR3) + "\n")
    tri = tmp_path / "equilateral.json"
    tri.write_text(json.dumps({"anchors": EQUILATERAL}))
    checks = []
    for argv, status, point in [
        (["--input", square], "converged", [0.5, 0.5]),
        (["--input", line], "collinear-degenerate", [1.0, 0.0]),
        (["--input", tri, "--algorithm", "exact3"], "exact", [0.5, np.sqrt(3) / 6]),
    ]:
        code1, out1 = _cli(*argv)
        code2, out2 = _cli(*argv)
        rep = json.loads(out1) if out1 else {}
        checks.append(code1 == 0 and out1 == out2 and rep.get("status") == status
                      and np.allclose(rep.get("point"), point, rtol=0, atol=1e-15))
    code_bad, _ = _cli("--input", tmp_path / "missing.csv")
    code_budget, _ = _cli("--input", square, "--start", "0.9,0.05", "--max-iter", "1")
    ok = all(checks) and code_bad == 1 and code_budget == 2
    assert record(10, ok, f"examples {sum(checks)}/3 ok and deterministic; exit codes "
                          f"bad-input={code_bad} max-iter={code_budget}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
