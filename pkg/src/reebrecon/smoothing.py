"""Ambient embedding of alpha-Reeb graphs by Gaussian-kernel averaging of member points.

Each Reeb edge (v1, v2) is parameterized by t over [f(v1), f(v2)] and mapped to
the weighted mean of the sample points in v1 and v2, with weights
proportional to exp(-(f(p) - t)^2 / (2 sigma^2)).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import as_cloud
from .reeb import AlphaReebGraph

DEFAULT_SAMPLES = 16
UNDERFLOW = 1e-300


def gaussian_weights(filter_vals, t: float, sigma: float) -> np.ndarray:
    """Normalized kernel weights of points with filter values ``filter_vals`` at ``t``.

    If every raw kernel value is below 1e-300 the point with the nearest filter
    value (lowest index on ties) gets weight 1.
    """
    fv = np.asarray(filter_vals, dtype=float).reshape(-1)
    if fv.size == 0:
        raise ValueError("need at least one point")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    k = np.exp(-((fv - t) ** 2) / (2.0 * sigma * sigma))
    if k.max() < UNDERFLOW:
        w = np.zeros_like(fv)
        w[int(np.argmin(np.abs(fv - t)))] = 1.0
        return w
    return k / k.sum()


def embed_edge(points, filter_vals, f1: float, f2: float, sigma: float,
               samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Polyline E(t) = sum_i p_i w_i(t) for ``samples`` evenly spaced t from f1 to f2.

    The endpoints are clamped to the range of the member filter values. When
    f1 == f2 a single weighted point is returned.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    fv = np.asarray(filter_vals, dtype=float).reshape(-1)
    if P.shape[0] == 0:
        raise ValueError("edge has no member points")
    if P.shape[0] != fv.size:
        raise ValueError("one filter value per point required")
    if samples < 2:
        raise ValueError("samples must be at least 2")
    lo, hi = fv.min(), fv.max()
    t1, t2 = float(np.clip(f1, lo, hi)), float(np.clip(f2, lo, hi))
    ts = np.array([t1]) if f1 == f2 else np.linspace(t1, t2, samples)
    return np.stack([gaussian_weights(fv, t, sigma) @ P for t in ts])


@dataclass(frozen=True, eq=False)
class SmoothedEmbedding:
    polylines: tuple[np.ndarray, ...]  # one per Reeb edge, oriented edges[k, 0] -> edges[k, 1]
    edges: np.ndarray
    node_points: dict[int, np.ndarray]  # isolated Reeb nodes
    sigma: float
    samples_per_edge: int

    @property
    def dim(self) -> int:
        for line in self.polylines:
            return line.shape[1]
        for p in self.node_points.values():
            return p.shape[0]
        return 0

    def total_length(self) -> float:
        return float(sum(np.linalg.norm(np.diff(p, axis=0), axis=1).sum() for p in self.polylines))


def embed_reeb(G_alpha: AlphaReebGraph, source, sigma: float,
               samples: int = DEFAULT_SAMPLES) -> SmoothedEmbedding:
    """Embed every Reeb edge (and every isolated Reeb node) into the ambient space."""
    if not sigma < G_alpha.alpha / 4.0:
        raise ValueError(
            f"sigma={sigma} violates sigma < alpha/4 = {G_alpha.alpha / 4.0} "
            "needed for smooth joins between adjacent edges")
    pts = as_cloud(source).points
    d = G_alpha.filter
    polylines = []
    for u, v in G_alpha.edges:
        nu, nv = G_alpha.nodes[u], G_alpha.nodes[v]
        members = np.array(sorted(set(nu.members) | set(nv.members)), dtype=np.int64)
        if members.size == 0:
            raise ValueError(f"Reeb edge ({u}, {v}) has no member points to average")
        polylines.append(embed_edge(pts[members], d[members], nu.f, nv.f, sigma, samples))
    touched = set(G_alpha.edges.reshape(-1).tolist())
    node_points = {}
    for i, node in enumerate(G_alpha.nodes):
        if i in touched or not node.members:
            continue
        members = np.array(node.members, dtype=np.int64)
        node_points[i] = gaussian_weights(d[members], node.f, sigma) @ pts[members]
    return SmoothedEmbedding(tuple(polylines), G_alpha.edges.copy(), node_points,
                             float(sigma), int(samples))
