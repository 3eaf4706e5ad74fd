"""Acceptance criteria; each test prints one PASS/FAIL line even when output is captured."""
from __future__ import annotations

import itertools
import math
import time

import numpy as np
import pytest

from reebrecon import geo
from reebrecon.cli import main
from reebrecon.experiments import annulus_trial, approx_trial, bound_trial, topology_trial
from reebrecon.gh import FiniteMetricSpace, gh_bruteforce, is_isometric
from reebrecon.metric_graph import restricted_distortion
from reebrecon.reeb import reeb_as_metric_graph
from reebrecon.rips import rips_edges_bruteforce, rips_edges_grid
from reebrecon.synth import circle_fixture, standard_fixtures

GEO_ARGS = ["--slice-start", "90", "--slice-width", "20", "--slice-end", "110",
            "--eta", "80", "--alpha", "1000", "--sigma", "200", "--seed", "7"]


def report(capsys, number: int, passed: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\nACCEPTANCE {number}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert passed, detail


def test_1_topology_recovery(capsys):
    lines, ok = [], True
    for name, fx in standard_fixtures().items():
        t0 = time.perf_counter()
        hits = sum(topology_trial(fx, seed) == fx.betti1 for seed in range(20))
        dt = time.perf_counter() - t0
        ok &= hits >= 19 and dt < 10.0
        lines.append(f"{name} {hits}/20 in {dt:.1f}s")
    report(capsys, 1, ok, "; ".join(lines))


def test_2_gh_bound(capsys):
    t0 = time.perf_counter()
    trials = [bound_trial(seed) for seed in range(50)]
    dt = time.perf_counter() - t0
    bad = sum(not t.ok for t in trials)
    worst = max(t.gh / t.bound for t in trials)
    report(capsys, 2, bad == 0 and dt < 60.0,
           f"{bad} violations over 50 seeds, largest gh/bound {worst:.4f}, {dt:.1f}s")


def test_3_band_diameters(capsys):
    t0 = time.perf_counter()
    trials = [annulus_trial(fx, seed) for fx in standard_fixtures().values() for seed in range(4)]
    dt = time.perf_counter() - t0
    bad = sum(t.violations for t in trials)
    checks = sum(t.checks for t in trials)
    report(capsys, 3, len(trials) == 20 and bad == 0 and dt < 30.0,
           f"{bad} violations in {checks} band checks on {len(trials)} pairs, {dt:.1f}s")


def test_4_rips_approximation(capsys):
    fx = circle_fixture()
    first = approx_trial(fx, 0)
    trials = [first] + [approx_trial(fx, s, distortion=first.distortion) for s in range(1, 20)]
    bad = sum(not (t.hypothesis and t.approx_ok) for t in trials)
    worst_dh = max(t.hausdorff for t in trials)
    report(capsys, 4, bad == 0,
           f"{bad} violations over 20 seeds; distortion {first.distortion:.4f} <= 4/3, "
           f"max d_H {worst_dh:.4f} < eta/4 = {first.eta / 4:.4f}")


def test_5_distortion_monotonicity(capsys):
    fx = circle_fixture()
    step = 0.05
    etas, r_mins = (0.3, 0.6, 1.2), (0.5, 1.0, 2.0)
    t0 = time.perf_counter()
    grid = np.array([[restricted_distortion(fx.graph, eta, r, step).value for r in r_mins]
                     for eta in etas])
    dt = time.perf_counter() - t0
    tol = 2 * step
    up_in_eta = bool(np.all(np.diff(grid, axis=0) >= -tol))
    down_in_r = bool(np.all(np.diff(grid, axis=1) <= tol))
    report(capsys, 5, up_in_eta and down_in_r and dt < 20.0,
           f"grid {np.round(grid, 4).tolist()}, {dt:.1f}s")


def random_cloud(rng: np.random.Generator, k: int) -> tuple[np.ndarray, float]:
    n = int(rng.integers(2, 2001))
    dim = int(rng.integers(1, 4))
    if k % 10 == 0:
        # integer lattice at eta = 1: many pairs exactly at the threshold
        side = max(2, int(round(n ** (1.0 / dim))))
        P = np.array(list(itertools.product(range(side), repeat=dim)), dtype=float)
        return P[:2000], 1.0
    P = rng.random((n, dim)) * float(rng.uniform(1, 100))
    if k % 7 == 0:
        P = np.vstack([P, P[: n // 10]])[:2000]  # duplicated points
    eta = float(np.ptp(P, axis=0).max()) * float(rng.uniform(0.005, 0.1))
    return P, eta


def test_6_rips_grid_matches_bruteforce(capsys):
    rng = np.random.default_rng(20240601)
    mismatches, largest = 0, 0
    for k in range(100):
        P, eta = random_cloud(rng, k)
        largest = max(largest, len(P))
        mismatches += not np.array_equal(rips_edges_grid(P, eta), rips_edges_bruteforce(P, eta))
    report(capsys, 6, mismatches == 0,
           f"{mismatches} mismatches on 100 clouds (largest n = {largest})")


def tiny_space(rng: np.random.Generator) -> FiniteMetricSpace:
    n = int(rng.integers(1, 5))
    pts = rng.choice(25, size=n, replace=False)
    return FiniteMetricSpace.from_points(np.c_[pts // 5, pts % 5].astype(float))


def test_7_gh_oracle_sanity(capsys):
    point = FiniteMetricSpace([[0.0]])
    spaces = [FiniteMetricSpace.from_graph(fx.graph) for fx in standard_fixtures().values()
              if fx.graph.n_vertices <= 5]
    spaces += [FiniteMetricSpace.from_graph(fx.skeleton) for fx in standard_fixtures().values()
               if fx.skeleton.n_vertices <= 5]
    rng = np.random.default_rng(7)
    spaces += [FiniteMetricSpace.from_points(rng.random((n, 2))) for n in range(1, 6)]
    to_point = all(gh_bruteforce(X, point) == X.diameter / 2 for X in spaces)
    bad_pairs = 0
    for _ in range(50):
        X, Y = tiny_space(rng), tiny_space(rng)
        g = gh_bruteforce(X, Y)
        bad_pairs += g != gh_bruteforce(Y, X) or (g == 0) != is_isometric(X, Y)
    report(capsys, 7, to_point and bad_pairs == 0,
           f"diam/2 exact on {len(spaces)} spaces: {to_point}; "
           f"{bad_pairs}/50 pairs break symmetry or zero-iff-isometric")


def test_8_geo_pipeline(tmp_path, capsys):
    t0 = time.perf_counter()
    outs = [tmp_path / f"run{k}.geojson" for k in (1, 2)]
    codes = [main(["reconstruct", *GEO_ARGS, "--output", str(p),
                   "--diagnostics", str(tmp_path / f"diag{k}.csv")])
             for k, p in enumerate(outs)]
    identical = outs[0].read_bytes() == outs[1].read_bytes()
    cat = geo.ingest_catalog(geo.BUNDLED_CATALOG)
    res = geo.run_pipeline(cat, 90, 20, geo.PipelineParams(80, 1000, 200, seed=7), slice_end=110)
    (only,) = res.reconstructed
    connected = reeb_as_metric_graph(only.reconstruction.embedded_reeb).is_connected()
    recon = geo.read_recon_geojson(outs[0])
    contour = geo.select_contour(geo.load_slab_contours(geo.BUNDLED_CONTOURS), 100)
    cmp = geo.compare_to_slab(recon.lines_for_depth(100), contour, recon.projection)
    capsys.readouterr()
    code = main(["compare", "--recon", str(outs[0]), "--depth", "100"])
    dt = time.perf_counter() - t0
    ok = (codes == [0, 0] and code == 0 and identical and connected
          and math.isfinite(cmp.hausdorff_km) and cmp.length_ratio < 1 and dt < 60.0)
    report(capsys, 8, ok,
           f"identical={identical}, principal component {only.reconstruction.principal.size} "
           f"of {len(only.slice)} events, Hausdorff {cmp.hausdorff_km:.1f} km, "
           f"length ratio {cmp.length_ratio:.3f}, {dt:.1f}s")
