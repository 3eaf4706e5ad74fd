"""alpha-Reeb graphs of a metric graph under the distance-from-basepoint filter.

The filter restricted to an edge (u, v) of length L is the tent
``s -> min(d(u) + s, d(v) + L - s)``, which rises from d(u) to the peak
``(d(u) + d(v) + L) / 2`` and falls back to d(v). Each edge therefore splits
into two monotone pieces, and the part of a piece inside an open interval is a
single (possibly empty) arc. Components of an interval preimage are computed
over vertices plus those arcs, so they agree with the components of the
continuous preimage, including components that contain no vertex at all.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .metric_graph import DisconnectedGraphError, EmbeddedMetricGraph, write_graph


@dataclass(frozen=True)
class IntervalCover:
    """Open intervals ``(lo, hi)`` of length ``alpha``; bounds are not clipped to the range."""

    alpha: float
    overlap: float
    filter_max: float
    intervals: tuple[tuple[float, float], ...]

    def __len__(self) -> int:
        return len(self.intervals)

    def containing(self, t: float) -> list[int]:
        return [k for k, (lo, hi) in enumerate(self.intervals) if lo < t < hi]


def make_cover(filter_max: float, alpha: float, overlap: float = 0.5) -> IntervalCover:
    """Cover ``[0, filter_max]`` by intervals ``(k*step - alpha/2, k*step + alpha/2)``.

    ``step = alpha * (1 - overlap)``; with the default 50% overlap this is
    ``k*alpha/2 -+ alpha/2`` for ``k = 0 .. ceil(2*filter_max/alpha)``.
    Overlap must lie in [0.25, 0.5]: consecutive intervals then share at least
    alpha/4 and no point lies in three intervals.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if filter_max < 0 or not np.isfinite(filter_max):
        raise ValueError("filter_max must be finite and nonnegative")
    if not 0.25 <= overlap <= 0.5:
        raise ValueError("overlap must lie in [0.25, 0.5]")
    step = alpha * (1.0 - overlap)
    count = int(np.ceil(filter_max / step)) + 1
    half = alpha / 2.0
    intervals = tuple((k * step - half, k * step + half) for k in range(count))
    return IntervalCover(float(alpha), float(overlap), float(filter_max), intervals)


@dataclass(frozen=True)
class ReebNode:
    intervals: tuple[int, ...]  # more than one only after an equal-filter merge
    component: int
    members: tuple[int, ...]  # source vertices, ascending
    f: float

    @property
    def interval(self) -> int:
        return self.intervals[0]


@dataclass(frozen=True, eq=False)
class AlphaReebGraph:
    nodes: tuple[ReebNode, ...]
    edges: np.ndarray  # (k, 2) node pairs, i < j, sorted
    basepoint: int
    alpha: float
    cover: IntervalCover
    filter: np.ndarray  # filter value of every source vertex
    assignment: tuple[tuple[int, ...], ...]  # source vertex -> containing nodes

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def f(self) -> np.ndarray:
        return np.array([n.f for n in self.nodes])


def filter_values(X: EmbeddedMetricGraph, base: int) -> np.ndarray:
    d = X.distances_from(base)
    if not np.all(np.isfinite(d)):
        raise DisconnectedGraphError("filter needs a connected graph")
    return d


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller root wins so results do not depend on union order
            self.parent[max(ra, rb)] = min(ra, rb)


def _pieces_present(ends: np.ndarray, peak: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Whether the monotone piece spanning [end, peak] meets the open interval."""
    rising = ends < peak
    return np.where(rising, (ends < hi) & (peak > lo), (lo < peak) & (peak < hi))


def build_alpha_reeb(X: EmbeddedMetricGraph, base: int, cover: IntervalCover,
                     fragments: bool = True) -> AlphaReebGraph:
    """alpha-Reeb graph of ``X`` for the filter ``d_X(base, .)`` and ``cover``.

    Nodes are the connected components of each interval preimage, numbered per
    interval by smallest member vertex (vertex-free components last). Nodes of
    consecutive intervals are joined when their preimages intersect. Nodes that
    share a vertex and carry exactly the same filter value are identified.

    With ``fragments=False`` only vertices are used: two vertices are connected
    inside an interval iff both lie in it and are adjacent, and nodes are
    joined iff they share a vertex.
    """
    if not X.is_connected():
        raise DisconnectedGraphError("alpha-Reeb graph needs a connected graph")
    d = filter_values(X, base)
    if d.max() >= cover.intervals[-1][1]:
        raise ValueError("cover does not reach the filter maximum")
    n, m = X.n_vertices, X.n_edges
    a, b, L = X.edges[:, 0], X.edges[:, 1], X.lengths
    da, db = d[a], d[b]
    peak = np.maximum((da + db + L) / 2.0, np.maximum(da, db))
    n_atoms = n + 2 * m if fragments else n
    piece_a = n + 2 * np.arange(m)
    piece_b = piece_a + 1

    def present(lo: float, hi: float):
        vin = (lo < d) & (d < hi)
        if not fragments:
            return vin, None, None
        return vin, _pieces_present(da, peak, lo, hi), _pieces_present(db, peak, lo, hi)

    labels: list[np.ndarray] = []
    raw_nodes: list[tuple[int, int, np.ndarray, float]] = []
    for k, (lo, hi) in enumerate(cover.intervals):
        vin, pa, pb = present(lo, hi)
        if fragments:
            atoms_in = np.concatenate([vin, np.stack([pa, pb], axis=1).reshape(-1)])
            ta, tb = pa & vin[a], pb & vin[b]
            joined = (lo < peak) & (peak < hi)
            rows = np.concatenate([a[ta], b[tb], piece_a[joined]])
            cols = np.concatenate([piece_a[ta], piece_b[tb], piece_b[joined]])
        else:
            atoms_in = vin
            both = vin[a] & vin[b] & (a != b)
            rows, cols = a[both], b[both]
        adj = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n_atoms, n_atoms))
        _, comp = connected_components(adj, directed=False)
        present_ids = np.flatnonzero(atoms_in)
        groups: dict[int, list[int]] = {}
        for atom in present_ids:
            groups.setdefault(int(comp[atom]), []).append(int(atom))

        def key(atoms: list[int]) -> tuple[int, int]:
            verts = [x for x in atoms if x < n]
            return (0, min(verts)) if verts else (1, min(atoms))

        ordered = sorted(groups.values(), key=key)
        local = -np.ones(n_atoms, dtype=np.int64)
        for c, atoms in enumerate(ordered):
            node_id = len(raw_nodes)
            local[atoms] = node_id
            verts = np.array(sorted(x for x in atoms if x < n), dtype=np.int64)
            if verts.size:
                f = float(np.median(d[verts]))
            else:
                f = _fragment_midpoint(atoms, n, da, db, peak, lo, hi)
            raw_nodes.append((k, c, verts, f))
        labels.append(local)

    edge_set: set[tuple[int, int]] = set()
    for k in range(len(cover.intervals) - 1):
        lo, hi = cover.intervals[k + 1][0], cover.intervals[k][1]
        if lo >= hi:
            continue
        vin, pa, pb = present(lo, hi)
        shared = np.flatnonzero(vin)
        if fragments:
            shared = np.concatenate([shared, piece_a[pa], piece_b[pb]])
        left, right = labels[k][shared], labels[k + 1][shared]
        for u, v in zip(left.tolist(), right.tolist()):
            edge_set.add((u, v))

    # identify nodes that share a vertex and have identical filter values
    uf = _UnionFind(len(raw_nodes))
    containing: list[list[int]] = [[] for _ in range(n)]
    for node_id, (_, _, verts, _) in enumerate(raw_nodes):
        for v in verts.tolist():
            containing[v].append(node_id)
    for owners in containing:
        for x in owners:
            for y in owners:
                if x < y and raw_nodes[x][3] == raw_nodes[y][3]:
                    uf.union(x, y)
    roots = sorted({uf.find(i) for i in range(len(raw_nodes))},
                   key=lambda r: (raw_nodes[r][0], raw_nodes[r][1]))
    final_id = {r: i for i, r in enumerate(roots)}
    merged: dict[int, list[int]] = {}
    for i in range(len(raw_nodes)):
        merged.setdefault(uf.find(i), []).append(i)
    nodes = []
    for r in roots:
        parts = merged[r]
        verts = np.unique(np.concatenate([raw_nodes[p][2] for p in parts]))
        nodes.append(ReebNode(
            intervals=tuple(sorted({raw_nodes[p][0] for p in parts})),
            component=raw_nodes[r][1],
            members=tuple(int(v) for v in verts),
            f=raw_nodes[r][3],
        ))
    edges = set()
    for u, v in edge_set:
        fu, fv = final_id[uf.find(u)], final_id[uf.find(v)]
        if fu != fv:
            edges.add((min(fu, fv), max(fu, fv)))
    edge_arr = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
    assignment = tuple(tuple(sorted({final_id[uf.find(x)] for x in owners})) for owners in containing)
    return AlphaReebGraph(tuple(nodes), edge_arr, int(base), cover.alpha, cover, d, assignment)


def _fragment_midpoint(atoms, n, da, db, peak, lo, hi) -> float:
    """Filter value for a node made only of edge-interior arcs: middle of their range."""
    vals_lo, vals_hi = [], []
    for atom in atoms:
        e, side = divmod(atom - n, 2)
        end = da[e] if side == 0 else db[e]
        vals_lo.append(max(lo, min(end, peak[e])))
        vals_hi.append(min(hi, peak[e]))
    return float((min(vals_lo) + max(vals_hi)) / 2.0)


def prune_bumps(G_alpha: AlphaReebGraph) -> AlphaReebGraph:
    """Repeatedly drop nodes that contain no source vertex and have at most one neighbour.

    Such nodes come from short arcs near a local maximum of the filter inside
    a single edge. Removing leaves changes neither beta_1 nor connectivity.
    """
    n = G_alpha.n_nodes
    alive = np.ones(n, dtype=bool)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in G_alpha.edges.tolist():
        nbrs[u].add(v)
        nbrs[v].add(u)
    stack = [i for i in range(n) if not G_alpha.nodes[i].members and len(nbrs[i]) <= 1]
    while stack:
        i = stack.pop()
        if not alive[i] or alive.sum() == 1:
            continue
        alive[i] = False
        for j in nbrs[i]:
            nbrs[j].discard(i)
            if alive[j] and not G_alpha.nodes[j].members and len(nbrs[j]) <= 1:
                stack.append(j)
        nbrs[i].clear()
    new_id = -np.ones(n, dtype=np.int64)
    new_id[alive] = np.arange(int(alive.sum()))
    e = G_alpha.edges
    keep = alive[e[:, 0]] & alive[e[:, 1]]
    edges = new_id[e[keep]].reshape(-1, 2)
    assignment = tuple(tuple(int(new_id[k]) for k in owners) for owners in G_alpha.assignment)
    nodes = tuple(node for node, a in zip(G_alpha.nodes, alive) if a)
    return AlphaReebGraph(nodes, edges, G_alpha.basepoint, G_alpha.alpha, G_alpha.cover,
                          G_alpha.filter, assignment)


def reeb_as_metric_graph(G_alpha: AlphaReebGraph, positions=None) -> EmbeddedMetricGraph:
    """Abstract metric graph on the Reeb nodes; edge length |f1 - f2|, floored at alpha/100."""
    if G_alpha.n_nodes == 0:
        raise ValueError("empty Reeb graph")
    f = G_alpha.f
    e = G_alpha.edges
    lengths = np.maximum(np.abs(f[e[:, 0]] - f[e[:, 1]]), G_alpha.alpha / 100.0)
    return EmbeddedMetricGraph(positions, e, lengths, n_vertices=G_alpha.n_nodes, embedded=False)


def write_reeb(G_alpha: AlphaReebGraph, out: TextIO | str | os.PathLike, positions=None) -> None:
    """Metric-graph text format plus ``n <interval> <component> <f> <member-count>`` lines."""
    notes: Iterable[str] = (
        f"n {node.interval} {node.component} {node.f!r} {len(node.members)}"
        for node in G_alpha.nodes
    )
    write_graph(reeb_as_metric_graph(G_alpha, positions), out, notes)
