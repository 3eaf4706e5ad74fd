"""Empirical checks of the reconstruction guarantees on synthetic fixtures.

Each ``*_trial`` function runs one seeded experiment and returns a small
record; the ``*_suite`` functions run them over the standard fixtures and are
what ``reebrecon verify`` prints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import hausdorff_cloud_to_graph
from .gh import (Correspondence, FiniteMetricSpace, GhBoundInputs, annulus_component_diameter,
                 certified_epsilon, check_eps_r_approx, gh_exact, theorem_bound)
from .metric_graph import betti_1, restricted_distortion, subdivide
from .reeb import build_alpha_reeb, filter_values, make_cover, reeb_as_metric_graph
from .rips import build_rips
from .synth import Fixture, NoisySampleSpec, circle_fixture, sample_graph, standard_fixtures

MAX_SAMPLING_DISTORTION = 4.0 / 3.0


@dataclass(frozen=True)
class SuiteRow:
    name: str
    passed: bool
    detail: str


def nearest_correspondence(xs: np.ndarray, ys: np.ndarray) -> Correspondence:
    """Every point paired with its nearest neighbour on the other side."""
    _, x_to_y = cKDTree(ys).query(xs)
    _, y_to_x = cKDTree(xs).query(ys)
    return Correspondence([(i, int(j)) for i, j in enumerate(x_to_y)]
                          + [(int(i), j) for j, i in enumerate(y_to_x)])


# ------------------------------------------------------------- topology

def topology_trial(fixture: Fixture, seed: int) -> int | None:
    """beta_1 of the alpha-Reeb graph of a noisy sample, or None if the Rips graph splits.

    Spacing 0.01 diam, noise eta/8, eta = 0.05 diam, alpha = 0.1 diam, basepoint 0.
    """
    diam = fixture.diameter
    eta = 0.05 * diam
    sample = sample_graph(NoisySampleSpec(fixture.graph, 1.0 / (0.01 * diam), eta / 8.0, seed))
    rips = build_rips(sample.cloud, eta)
    if not rips.graph.is_connected():
        return None
    d = filter_values(rips.graph, 0)
    reeb = build_alpha_reeb(rips.graph, 0, make_cover(float(d.max()), 0.1 * diam))
    return betti_1(reeb_as_metric_graph(reeb))


def topology_suite(runs: int = 20) -> list[SuiteRow]:
    rows = []
    need = math.ceil(0.95 * runs)
    for name, fx in standard_fixtures().items():
        got = [topology_trial(fx, seed) for seed in range(runs)]
        hits = sum(b == fx.betti1 for b in got)
        rows.append(SuiteRow(name, hits >= need,
                             f"beta1={fx.betti1} matched {hits}/{runs} (need {need})"))
    return rows


# ------------------------------------------- Rips approximation hypothesis

@dataclass(frozen=True)
class ApproxTrial:
    distortion: float
    hausdorff: float
    eta: float
    r_cap: float
    epsilon: float
    hypothesis: bool  # distortion <= 4/3 and d_H < eta/4
    approx_ok: bool
    excess: float


def approx_trial(fixture: Fixture, seed: int, eta_frac: float = 0.1, r_frac: float = 0.3,
                 step_frac: float = 0.01, distortion: float | None = None) -> ApproxTrial:
    """Check the (R/2, R)-approximation of a fixture by the Rips graph of a noisy sample.

    eta = eta_frac diam and R = r_frac diam; the sample has spacing and noise
    chosen so its Hausdorff distance to the fixture stays below eta/4. The
    intrinsic side is the fixture cut at ``step_frac`` diam and the
    correspondence pairs nearest points both ways. A distortion computed
    earlier for the same parameters may be passed in to skip recomputing it.
    """
    diam = fixture.diameter
    eta, r_cap, step = eta_frac * diam, r_frac * diam, step_frac * diam
    if distortion is None:
        distortion = restricted_distortion(fixture.graph, eta, r_cap, min(step, eta / 4)).value
    sample = sample_graph(NoisySampleSpec(fixture.graph, 1.0 / (eta / 4.0), eta / 16.0, seed))
    dh = hausdorff_cloud_to_graph(sample.cloud, fixture.graph, eta).value
    rips = build_rips(sample.cloud, eta)
    fine = subdivide(fixture.graph, step)
    X = FiniteMetricSpace.from_graph(rips.graph)
    Y = FiniteMetricSpace.from_graph(fine)
    C = nearest_correspondence(sample.cloud.points, fine.positions)
    epsilon = r_cap / 2.0
    check = check_eps_r_approx(X, Y, C, epsilon, r_cap)
    hypothesis = distortion <= MAX_SAMPLING_DISTORTION and dh < eta / 4.0
    return ApproxTrial(distortion, dh, eta, r_cap, epsilon, hypothesis, check.ok, check.excess)


def distortion_suite(seeds: int = 3) -> list[SuiteRow]:
    rows = []
    for name, fx in standard_fixtures().items():
        first = approx_trial(fx, 0)
        trials = [first] + [approx_trial(fx, s, distortion=first.distortion)
                            for s in range(1, seeds)]
        ok = all(t.hypothesis and t.approx_ok for t in trials)
        worst = max(t.excess for t in trials)
        rows.append(SuiteRow(name, ok, f"distortion={first.distortion:.4f} (<= 4/3) "
                             f"worst gap={worst:.4f} <= 2 eps={2 * first.epsilon:.4f}"))
    return rows


# ----------------------------------------------------- band diameters

@dataclass(frozen=True)
class AnnulusTrial:
    checks: int
    violations: int
    worst_margin: float  # min over bands of rhs - lhs
    epsilon: float
    r_cap: float


def annulus_trial(fixture: Fixture, seed: int, r_frac: float = 0.5) -> AnnulusTrial:
    """Compare band-component diameters of a Rips graph X with those of the fixture Y.

    For every band centre d on a grid in [alpha, max filter], checks
    D(X, d, alpha) <= D(Y, d, alpha + (4M/R + 4) eps) + (4M/R + 2) eps with
    M = diam(Y) and eps certified from the nearest-point correspondence.
    """
    diam = fixture.diameter
    eta = 0.05 * diam
    alpha = 0.1 * diam
    r_cap = r_frac * diam
    sample = sample_graph(NoisySampleSpec(fixture.graph, 1.0 / (0.01 * diam), eta / 8.0, seed))
    rips = build_rips(sample.cloud, eta)
    fine = subdivide(fixture.graph, 0.005 * diam)
    X = FiniteMetricSpace.from_graph(rips.graph)
    Y = FiniteMetricSpace.from_graph(fine)
    C = nearest_correspondence(sample.cloud.points, fine.positions)
    eps = certified_epsilon(X, Y, C, r_cap)
    x0 = 0
    y0 = next(j for i, j in C.pairs if i == x0)
    dx = filter_values(rips.graph, x0)
    dy = filter_values(fine, y0)
    m_diam = Y.diameter
    widen = (4.0 * m_diam / r_cap + 4.0) * eps
    slack = (4.0 * m_diam / r_cap + 2.0) * eps
    centres = np.linspace(alpha, float(dx.max()), 12)
    violations, worst = 0, math.inf
    for d in centres:
        lhs = annulus_component_diameter(rips.graph, x0, d, alpha, dx)
        rhs = annulus_component_diameter(fine, y0, d, alpha + widen, dy) + slack
        worst = min(worst, rhs - lhs)
        violations += lhs > rhs
    return AnnulusTrial(len(centres), violations, worst, eps, r_cap)


# ------------------------------------------------------------ GH bound

@dataclass(frozen=True)
class BoundTrial:
    gh: float
    bound: float
    bound_limit: float  # the R -> infinity form
    epsilon: float
    n_points: int
    n_nodes: int
    beta1: int

    @property
    def ok(self) -> bool:
        return self.gh <= self.bound and self.gh <= self.bound_limit


def bound_trial(seed: int) -> BoundTrial:
    """GH distance between a 12-point noisy 12-gon sample and its alpha-Reeb graph vs the bound.

    The Rips scale is 0.7, alpha = 1, and R is the polygon's diameter (the
    limit form R = inf is evaluated too). Epsilon is certified on the
    nearest-point correspondence with the polygon cut at 0.01, plus 0.01 to
    cover the points between cuts.
    """
    fx = circle_fixture(12)
    fine = subdivide(fx.graph, 0.01)
    Y = FiniteMetricSpace.from_graph(fine)
    m_diam = fx.diameter
    sample = sample_graph(NoisySampleSpec(fx.graph, 0.5, 0.05, seed))
    rips = build_rips(sample.cloud, 0.7)
    X = FiniteMetricSpace.from_graph(rips.graph)
    C = nearest_correspondence(sample.cloud.points, fine.positions)
    alpha = 1.0
    reeb = build_alpha_reeb(rips.graph, 0, make_cover(float(filter_values(rips.graph, 0).max()),
                                                      alpha))
    H = reeb_as_metric_graph(reeb)
    b1 = betti_1(H)
    gh = gh_exact(X, FiniteMetricSpace.from_graph(H))
    bounds = []
    for r_cap in (m_diam, math.inf):
        eps = certified_epsilon(X, Y, C, r_cap) + 0.01
        bounds.append((theorem_bound(GhBoundInputs(b1, alpha, eps, r_cap, m_diam, fx.census)), eps))
    return BoundTrial(gh, bounds[0][0], bounds[1][0], bounds[0][1], len(sample.cloud),
                      reeb.n_nodes, b1)


def bounds_suite(seeds: int = 4) -> list[SuiteRow]:
    rows = []
    for name, fx in standard_fixtures().items():
        trials = [annulus_trial(fx, s) for s in range(seeds)]
        bad = sum(t.violations for t in trials)
        total = sum(t.checks for t in trials)
        margin = min(t.worst_margin for t in trials)
        rows.append(SuiteRow(f"band diameters / {name}", bad == 0,
                             f"{total - bad}/{total} bands hold, least margin {margin:.4f}"))
    trials = [bound_trial(s) for s in range(seeds)]
    worst = max(t.gh / t.bound for t in trials)
    rows.append(SuiteRow("GH bound / 12-point circle", all(t.ok for t in trials),
                         f"{sum(t.ok for t in trials)}/{len(trials)} seeds, "
                         f"largest gh/bound {worst:.4f}"))
    return rows


SUITES = {"bounds": bounds_suite, "distortion": distortion_suite, "topology": topology_suite}
