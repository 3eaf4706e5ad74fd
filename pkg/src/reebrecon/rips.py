"""Vietoris-Rips graphs (1-skeleton) at a fixed scale."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .geometry import PointCloud, as_cloud
from .metric_graph import EmbeddedMetricGraph


def _pair_lengths(P: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    # shared by both builders so the <= eta test is bit-identical between them
    diff = P[i] - P[j]
    return np.sqrt(np.einsum("kd,kd->k", diff, diff))


def _canonical(i: np.ndarray, j: np.ndarray) -> np.ndarray:
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    order = np.lexsort((hi, lo))
    return np.stack([lo[order], hi[order]], axis=1)


def rips_edges_bruteforce(points, eta: float) -> np.ndarray:
    """All pairs i < j with ||p_i - p_j|| <= eta, sorted by (i, j)."""
    P = as_cloud(points).points
    n = len(P)
    ii, jj = [], []
    rows_per_block = max(1, 2_000_000 // max(n, 1))
    for lo in range(0, n, rows_per_block):
        rows = np.arange(lo, min(n, lo + rows_per_block))
        i = np.repeat(rows, n)
        j = np.tile(np.arange(n), rows.size)
        upper = i < j
        i, j = i[upper], j[upper]
        keep = _pair_lengths(P, i, j) <= eta
        ii.append(i[keep])
        jj.append(j[keep])
    if not ii:
        return np.zeros((0, 2), dtype=np.int64)
    return _canonical(np.concatenate(ii), np.concatenate(jj))


def rips_edges_grid(points, eta: float) -> np.ndarray:
    """Same edge set as :func:`rips_edges_bruteforce`, using a uniform grid of cell ~eta."""
    P = as_cloud(points).points
    n, d = P.shape
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    # a hair wider than eta so rounding can never put a within-eta pair two cells apart
    cell = eta * (1.0 + 1e-9)
    keys = np.floor((P - P.min(axis=0)) / cell).astype(np.int64)
    order = np.lexsort(keys.T[::-1])
    sorted_keys = keys[order]
    starts = np.ones(n, dtype=bool)
    starts[1:] = np.any(sorted_keys[1:] != sorted_keys[:-1], axis=1)
    bounds = np.append(np.flatnonzero(starts), n)
    cells = {tuple(sorted_keys[bounds[c]]): order[bounds[c]:bounds[c + 1]]
             for c in range(len(bounds) - 1)}
    # half of the 3^d neighbourhood (lexicographically positive offsets) plus self
    offsets = [o for o in itertools.product((-1, 0, 1), repeat=d) if o > (0,) * d]
    ii, jj = [], []
    for key, members in cells.items():
        if members.size > 1:
            a, b = np.triu_indices(members.size, k=1)
            ii.append(members[a])
            jj.append(members[b])
        for off in offsets:
            other = cells.get(tuple(k + o for k, o in zip(key, off)))
            if other is None:
                continue
            ii.append(np.repeat(members, other.size))
            jj.append(np.tile(other, members.size))
    if not ii:
        return np.zeros((0, 2), dtype=np.int64)
    i, j = np.concatenate(ii), np.concatenate(jj)
    keep = _pair_lengths(P, i, j) <= eta
    return _canonical(i[keep], j[keep])


@dataclass(frozen=True, eq=False)
class RipsGraph:
    base: PointCloud
    eta: float
    graph: EmbeddedMetricGraph


def build_rips(S, eta: float, method: str = "grid") -> RipsGraph:
    """Rips graph of ``S`` at scale ``eta`` (closed threshold, duplicates kept)."""
    S = as_cloud(S)
    if eta <= 0:
        raise ValueError("eta must be positive")
    if len(S) == 0:
        raise ValueError("Rips graph of an empty sample")
    if method == "grid":
        edges = rips_edges_grid(S, eta)
    elif method == "brute":
        edges = rips_edges_bruteforce(S, eta)
    else:
        raise ValueError(f"unknown method {method!r}")
    return RipsGraph(S, float(eta), EmbeddedMetricGraph(S.points, edges))


def rips_metric(R: RipsGraph, i: int, j: int) -> float:
    j = R.graph._check_vertex(j)
    return float(R.graph.distances_from(i)[j])


def check_connectivity(R: RipsGraph) -> tuple[bool, int]:
    n = R.graph.n_components
    return n == 1, n
