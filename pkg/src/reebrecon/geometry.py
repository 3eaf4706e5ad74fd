"""Euclidean primitives: points, clouds, segments and set distances."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np
from scipy.spatial import cKDTree

if TYPE_CHECKING:
    from .metric_graph import EmbeddedMetricGraph


class DimensionError(ValueError):
    """Raised when points of different ambient dimension are combined."""


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point has non-finite coordinates: {arr}")
    return arr


@dataclass(frozen=True)
class PointCloud:
    """An immutable ordered set of points in R^d, stored as an (n, d) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ValueError("point cloud must be a 2-d array of shape (n, d)")
        if pts.shape[1] == 0 and pts.shape[0] > 0:
            raise ValueError("points must have positive dimension")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __getitem__(self, i):
        return self.points[i]


def as_cloud(A) -> PointCloud:
    return A if isinstance(A, PointCloud) else PointCloud(np.asarray(A, dtype=float))


class Segment(NamedTuple):
    a: np.ndarray
    b: np.ndarray


def euclidean_distance(p, q) -> float:
    p, q = as_point(p), as_point(q)
    if p.shape != q.shape:
        raise DimensionError(f"dimension mismatch: {p.size} vs {q.size}")
    return float(np.linalg.norm(p - q))


def point_segment_distance(p, s: Segment) -> float:
    p, a, b = as_point(p), as_point(s[0]), as_point(s[1])
    if not (p.shape == a.shape == b.shape):
        raise DimensionError("point and segment dimensions differ")
    return float(points_to_segments(p[None, :], a[None, :], b[None, :])[0, 0])


def points_to_segments(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distance matrix of shape (len(P), len(A)) from points to segments A[k]B[k]."""
    P = np.asarray(P, dtype=float)
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    AB = B - A
    denom = np.einsum("kd,kd->k", AB, AB)
    safe = np.where(denom > 0, denom, 1.0)
    AP = P[:, None, :] - A[None, :, :]
    t = np.einsum("nkd,kd->nk", AP, AB) / safe
    t = np.where(denom > 0, np.clip(t, 0.0, 1.0), 0.0)
    foot = A[None, :, :] + t[..., None] * AB[None, :, :]
    return np.linalg.norm(P[:, None, :] - foot, axis=2)


def min_distance_to_segments(P: np.ndarray, A: np.ndarray, B: np.ndarray,
                             chunk: int = 2048) -> np.ndarray:
    """Per-point distance to the nearest of the segments, computed in chunks."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    out = np.empty(len(P))
    # keep the (chunk x segments x d) intermediate bounded
    rows = max(1, min(chunk, int(4_000_000 // max(1, len(A)))))
    for lo in range(0, len(P), rows):
        out[lo:lo + rows] = points_to_segments(P[lo:lo + rows], A, B).min(axis=1)
    return out


def directed_hausdorff(A, B) -> float:
    """sup_{a in A} inf_{b in B} ||a - b||."""
    A, B = as_cloud(A), as_cloud(B)
    if len(A) == 0 or len(B) == 0:
        raise ValueError("Hausdorff distance requires nonempty sets")
    if A.dim != B.dim:
        raise DimensionError(f"dimension mismatch: {A.dim} vs {B.dim}")
    d, _ = cKDTree(B.points).query(A.points, k=1)
    return float(np.max(d))


def hausdorff_distance(A, B) -> float:
    return max(directed_hausdorff(A, B), directed_hausdorff(B, A))


@dataclass(frozen=True)
class GraphHausdorff:
    value: float
    cloud_to_graph: float
    graph_to_cloud: float
    step: float  # coarsest subdivision spacing used on the graph side


def discretize_edges(positions: np.ndarray, edges: np.ndarray, step_for) -> tuple[np.ndarray, float]:
    """Sample every edge segment at spacing no coarser than ``step_for(length)``.

    Returns the stacked samples (edge endpoints included) and the coarsest
    spacing actually used.
    """
    chunks = [positions]
    coarsest = 0.0
    for i, j in edges:
        a, b = positions[i], positions[j]
        length = float(np.linalg.norm(b - a))
        if length == 0.0:
            continue
        step = step_for(length)
        pieces = int(np.ceil(length / step))
        t = np.arange(1, pieces)[:, None] / pieces
        chunks.append(a + t * (b - a))
        coarsest = max(coarsest, length / pieces)
    return np.vstack(chunks), coarsest


def hausdorff_cloud_to_graph(S, G: EmbeddedMetricGraph, eta: float | None = None) -> GraphHausdorff:
    """Hausdorff distance between a finite sample and the union of a graph's edge segments.

    The cloud-to-graph part is exact. The graph-to-cloud part is a maximum over a
    subdivision of every edge at step ``min(length / 100, eta / 10)``; the
    coarsest step is reported with the value.
    """
    S = as_cloud(S)
    if len(S) == 0 or G.n_vertices == 0:
        raise ValueError("Hausdorff distance requires a nonempty sample and graph")
    if G.positions is None:
        raise ValueError("graph has no vertex positions")
    if S.dim != G.dim:
        raise DimensionError(f"dimension mismatch: {S.dim} vs {G.dim}")
    pos = G.positions
    if G.n_edges:
        A, B = pos[G.edges[:, 0]], pos[G.edges[:, 1]]
        to_graph = min_distance_to_segments(S.points, A, B)
    else:
        to_graph = cKDTree(pos).query(S.points, k=1)[0]
    # isolated vertices are part of the graph as points
    isolated = np.setdiff1d(np.arange(G.n_vertices), G.edges.reshape(-1))
    if isolated.size and G.n_edges:
        to_graph = np.minimum(to_graph, cKDTree(pos[isolated]).query(S.points, k=1)[0])
    c2g = float(to_graph.max())

    def step_for(length: float) -> float:
        step = length / 100.0
        if eta is not None:
            step = min(step, eta / 10.0)
        return step

    samples, step = discretize_edges(pos, G.edges, step_for)
    g2c = float(cKDTree(S.points).query(samples, k=1)[0].max())
    return GraphHausdorff(max(c2g, g2c), c2g, g2c, step)
