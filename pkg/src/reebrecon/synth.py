"""Synthetic ground-truth graphs and Hausdorff-bounded noisy samples of them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import PointCloud
from .metric_graph import EmbeddedMetricGraph, betti_1, diameter, edge_length_census


@dataclass(frozen=True, eq=False)
class NoisySampleSpec:
    graph: EmbeddedMetricGraph
    points_per_unit_length: float
    noise_radius: float
    seed: int = 0

    @property
    def spacing(self) -> float:
        return 1.0 / self.points_per_unit_length


@dataclass(frozen=True, eq=False)
class NoisySample:
    cloud: PointCloud
    hausdorff_bound: float  # certified d_H(sample, graph) upper bound
    spacing: float  # coarsest arc-length spacing actually used


def uniform_ball(rng: np.random.Generator, n: int, dim: int, radius: float) -> np.ndarray:
    """``n`` points uniform in the closed ball of ``radius`` in R^dim."""
    if radius == 0 or n == 0:
        return np.zeros((n, dim))
    direction = rng.standard_normal((n, dim))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    r = radius * rng.random((n, 1)) ** (1.0 / dim)
    return direction / norms * r


def sample_graph(spec: NoisySampleSpec) -> NoisySample:
    """Arc-length equispaced points on every edge, each moved uniformly within the noise ball.

    Vertices are sampled once; every edge of length L contributes the interior
    points of its ``ceil(L / spacing)`` equal pieces.
    """
    G = spec.graph
    if spec.points_per_unit_length <= 0 or spec.noise_radius < 0:
        raise ValueError("need positive density and nonnegative noise radius")
    if G.positions is None or not G.embedded:
        raise ValueError("sampling needs an embedded graph")
    if G.n_vertices == 0:
        raise ValueError("cannot sample an empty graph")
    spacing = spec.spacing
    chunks = [G.positions]
    coarsest = 0.0
    for (i, j), length in zip(G.edges, G.lengths):
        if length == 0:
            continue
        pieces = max(1, math.ceil(length / spacing))
        t = np.arange(1, pieces)[:, None] / pieces
        a, b = G.positions[i], G.positions[j]
        chunks.append(a + t * (b - a))
        coarsest = max(coarsest, length / pieces)
    clean = np.vstack(chunks)
    rng = np.random.default_rng(spec.seed)
    noisy = clean + uniform_ball(rng, len(clean), G.dim, spec.noise_radius)
    return NoisySample(PointCloud(noisy), float(spec.noise_radius + coarsest / 2.0),
                       float(coarsest))


@dataclass(frozen=True, eq=False)
class Fixture:
    """A polyline embedding plus its combinatorial skeleton (branch vertices and branch lengths)."""

    name: str
    graph: EmbeddedMetricGraph
    skeleton: EmbeddedMetricGraph

    @property
    def betti1(self) -> int:
        return betti_1(self.skeleton)

    @property
    def diameter(self) -> float:
        return diameter(self.skeleton).value

    @property
    def branch_lengths(self) -> np.ndarray:
        return np.asarray(self.skeleton.lengths)

    def census(self, ell: float) -> int:
        return edge_length_census(self.skeleton, ell)


class _PolylineBuilder:
    def __init__(self):
        self.points: list[np.ndarray] = []
        self.edges: list[tuple[int, int]] = []

    def vertex(self, p) -> int:
        self.points.append(np.asarray(p, dtype=float))
        return len(self.points) - 1

    def chain(self, start: int, interior, end: int) -> float:
        """Connect start -> interior points -> end; returns the chain's length."""
        ids = [start] + [self.vertex(p) for p in interior] + [end]
        self.edges.extend(zip(ids[:-1], ids[1:]))
        return float(sum(np.linalg.norm(self.points[b] - self.points[a])
                         for a, b in zip(ids[:-1], ids[1:])))

    def graph(self) -> EmbeddedMetricGraph:
        return EmbeddedMetricGraph(np.array(self.points), self.edges)


def _skeleton(n: int, edges, lengths) -> EmbeddedMetricGraph:
    return EmbeddedMetricGraph(None, edges, lengths, n_vertices=n, embedded=False)


def segment_fixture() -> Fixture:
    g = EmbeddedMetricGraph([[0.0, 0.0], [1.0, 0.0]], [(0, 1)])
    return Fixture("segment", g, _skeleton(2, [(0, 1)], [1.0]))


def circle_fixture(segments: int = 128) -> Fixture:
    b = _PolylineBuilder()
    t = 2 * np.pi * np.arange(segments) / segments
    start = b.vertex((1.0, 0.0))
    length = b.chain(start, np.c_[np.cos(t[1:]), np.sin(t[1:])], start)
    return Fixture("circle", b.graph(), _skeleton(1, [(0, 0)], [length]))


def y_fixture() -> Fixture:
    angles = np.deg2rad([90.0, 210.0, 330.0])
    pts = np.vstack([[0.0, 0.0], np.c_[np.cos(angles), np.sin(angles)]])
    edges = [(0, 1), (0, 2), (0, 3)]
    return Fixture("Y", EmbeddedMetricGraph(pts, edges), _skeleton(4, edges, [1.0, 1.0, 1.0]))


def theta_fixture(segments_per_arc: int = 64) -> Fixture:
    """Unit circle plus the horizontal diameter; branch vertices at (-1, 0) and (1, 0)."""
    b = _PolylineBuilder()
    left, right = b.vertex((-1.0, 0.0)), b.vertex((1.0, 0.0))
    t = np.pi * np.arange(1, segments_per_arc) / segments_per_arc
    upper = b.chain(right, np.c_[np.cos(t), np.sin(t)], left)
    lower = b.chain(left, np.c_[np.cos(np.pi + t), np.sin(np.pi + t)], right)
    chord = b.chain(left, [], right)
    return Fixture("theta", b.graph(),
                   _skeleton(2, [(0, 1), (0, 1), (0, 1)], [upper, lower, chord]))


def figure_eight_fixture(segments_per_lobe: int = 128, scale: float = 1.0) -> Fixture:
    """Lemniscate of Bernoulli; the lobes cross at the origin at right angles."""

    def lemniscate(t):
        den = 1.0 + np.sin(t) ** 2
        return np.c_[scale * np.cos(t) / den, scale * np.sin(t) * np.cos(t) / den]

    b = _PolylineBuilder()
    origin = b.vertex((0.0, 0.0))
    step = np.pi / segments_per_lobe
    k = np.arange(1, segments_per_lobe)
    right = b.chain(origin, lemniscate(-np.pi / 2 + k * step), origin)
    left = b.chain(origin, lemniscate(np.pi / 2 + k * step), origin)
    return Fixture("figure-eight", b.graph(), _skeleton(1, [(0, 0), (0, 0)], [right, left]))


def standard_fixtures() -> dict[str, Fixture]:
    fixtures = [segment_fixture(), circle_fixture(), y_fixture(), theta_fixture(),
                figure_eight_fixture()]
    return {f.name: f for f in fixtures}
