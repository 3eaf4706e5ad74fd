"""Metric graphs with a shortest-path metric, optionally embedded in R^d."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, dijkstra

EMBED_TOL = 1e-9


class DisconnectedGraphError(ValueError):
    """Raised when an operation needs a connected graph and did not get one."""


class EmbeddedMetricGraph:
    """A finite metric graph.

    In embedded mode every edge is the straight segment between its endpoint
    positions and its length is their Euclidean distance. In abstract mode the
    lengths are free and ``positions`` may be ``None``. Parallel edges are
    allowed; zero-length edges are allowed between distinct vertices only.
    """

    def __init__(self, positions=None, edges=(), lengths=None, *, n_vertices: int | None = None,
                 embedded: bool | None = None):
        if positions is not None:
            positions = np.array(positions, dtype=float, copy=True)
            if positions.ndim != 2:
                raise ValueError("positions must have shape (n, d)")
            if not np.all(np.isfinite(positions)):
                raise ValueError("positions must be finite")
            if n_vertices is not None and n_vertices != len(positions):
                raise ValueError("n_vertices disagrees with positions")
            n_vertices = len(positions)
            positions.setflags(write=False)
        elif n_vertices is None:
            raise ValueError("abstract graphs need n_vertices")
        edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n_vertices):
            raise IndexError("edge endpoint out of range")
        if embedded is None:
            embedded = lengths is None
        if embedded and positions is None:
            raise ValueError("embedded graphs need vertex positions")
        if embedded:
            euclid = np.linalg.norm(positions[edges[:, 0]] - positions[edges[:, 1]], axis=1)
            if lengths is None:
                lengths = euclid
            else:
                lengths = np.asarray(lengths, dtype=float).reshape(-1)
                if lengths.shape != euclid.shape or np.any(np.abs(lengths - euclid) > EMBED_TOL):
                    raise ValueError("embedded edge lengths must equal endpoint distances")
        else:
            if lengths is None:
                raise ValueError("abstract graphs need explicit edge lengths")
            lengths = np.array(lengths, dtype=float).reshape(-1)
        if lengths.shape[0] != edges.shape[0]:
            raise ValueError("one length per edge required")
        if np.any(~np.isfinite(lengths)) or np.any(lengths < 0):
            raise ValueError("edge lengths must be finite and nonnegative")
        loops = edges[:, 0] == edges[:, 1]
        if np.any(loops & (lengths <= 0)) or (embedded and np.any(loops)):
            raise ValueError("self-loops must be abstract edges of positive length")
        edges.setflags(write=False)
        lengths = np.asarray(lengths, dtype=float)
        lengths.setflags(write=False)
        self.positions = positions
        self.edges = edges
        self.lengths = lengths
        self.n_vertices = int(n_vertices)
        self.embedded = bool(embedded)

    def __repr__(self) -> str:
        mode = "embedded" if self.embedded else "abstract"
        return f"EmbeddedMetricGraph({mode}, V={self.n_vertices}, E={self.n_edges})"

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def dim(self) -> int:
        return 0 if self.positions is None else int(self.positions.shape[1])

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Upper-triangular sparse adjacency with the shortest parallel edge kept."""
        n = self.n_vertices
        keep = self.edges[:, 0] != self.edges[:, 1]
        i = np.minimum(self.edges[keep, 0], self.edges[keep, 1])
        j = np.maximum(self.edges[keep, 0], self.edges[keep, 1])
        w = self.lengths[keep]
        if i.size:
            order = np.lexsort((w, j, i))
            i, j, w = i[order], j[order], w[order]
            first = np.ones(i.size, dtype=bool)
            first[1:] = (i[1:] != i[:-1]) | (j[1:] != j[:-1])
            i, j, w = i[first], j[first], w[first]
        # built without duplicates so explicit zero-length edges survive
        return sp.csr_matrix((w, (i, j)), shape=(n, n))

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    @cached_property
    def _components(self) -> tuple[int, np.ndarray]:
        return connected_components(self.adjacency, directed=False)

    @property
    def n_components(self) -> int:
        return int(self._components[0])

    @property
    def component_labels(self) -> np.ndarray:
        return self._components[1]

    def is_connected(self) -> bool:
        return self.n_components <= 1

    def _check_vertex(self, u) -> int:
        u = int(u)
        if not 0 <= u < self.n_vertices:
            raise IndexError(f"vertex {u} out of range for graph with {self.n_vertices} vertices")
        return u

    def distances_from(self, source) -> np.ndarray:
        """Single-source shortest-path distances (inf across components)."""
        source = self._check_vertex(source)
        return dijkstra(self.adjacency, directed=False, indices=source)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        D = dijkstra(self.adjacency, directed=False)
        D.setflags(write=False)
        return D

    def subgraph(self, vertices: Iterable[int]) -> tuple[EmbeddedMetricGraph, np.ndarray]:
        """Induced subgraph and the array mapping new vertex ids to old ones."""
        keep = np.unique(np.asarray(list(vertices), dtype=np.int64))
        remap = -np.ones(self.n_vertices, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        mask = (remap[self.edges[:, 0]] >= 0) & (remap[self.edges[:, 1]] >= 0)
        pos = None if self.positions is None else self.positions[keep]
        if self.embedded:
            return EmbeddedMetricGraph(pos, remap[self.edges[mask]]), keep
        sub = EmbeddedMetricGraph(pos, remap[self.edges[mask]], self.lengths[mask],
                                  n_vertices=keep.size, embedded=False)
        return sub, keep


def shortest_path_metric(G: EmbeddedMetricGraph, u: int, v: int) -> float:
    v = G._check_vertex(v)
    return float(G.distances_from(u)[v])


@dataclass(frozen=True)
class Diameter:
    value: float
    method: str  # "exact" or "envelope"


def diameter(G: EmbeddedMetricGraph, method: str = "exact") -> Diameter:
    """Diameter of the metric graph including points interior to edges.

    ``method="exact"`` maximizes over all pairs of edge points in closed form;
    ``method="envelope"`` returns the certified upper bound
    (vertex diameter + longest edge), which is cheaper on large graphs.
    """
    if G.n_vertices == 0:
        raise ValueError("empty graph has no diameter")
    if not G.is_connected():
        raise DisconnectedGraphError("diameter of a disconnected graph is infinite")
    D = G.distance_matrix
    vmax = float(D.max())
    if G.n_edges == 0:
        return Diameter(vmax, method)
    if method == "envelope":
        return Diameter(vmax + float(G.lengths.max()), "envelope")
    if method != "exact":
        raise ValueError(f"unknown diameter method {method!r}")
    a, b, L = G.edges[:, 0], G.edges[:, 1], G.lengths
    # two points on one edge: best is the midpoint of the cycle edge + detour
    best = max(vmax, float(np.max((L + D[a, b]) / 2.0)))
    c, d, L2 = a, b, L
    for k in range(G.n_edges):
        ak, bk, Lk = a[k], b[k], L[k]
        Dac, Dbc, Dad, Dbd = D[ak, c], D[bk, c], D[ak, d], D[bk, d]
        # for a point at offset s on edge k, the farthest point on edge e2 sits at
        # distance (dist(x, c) + dist(x, d) + L2) / 2; maximize that tent sum over s
        s_candidates = (
            np.zeros_like(L2),
            np.full_like(L2, Lk),
            np.clip((Lk + Dbc - Dac) / 2.0, 0.0, Lk),
            np.clip((Lk + Dbd - Dad) / 2.0, 0.0, Lk),
        )
        vals = []
        for s in s_candidates:
            to_c = np.minimum(s + Dac, Lk - s + Dbc)
            to_d = np.minimum(s + Dad, Lk - s + Dbd)
            vals.append((to_c + to_d + L2) / 2.0)
        far = np.max(vals, axis=0)
        far[k] = 0.0
        best = max(best, float(far.max()))
    return Diameter(best, "exact")


def edge_length_census(G: EmbeddedMetricGraph, ell: float) -> int:
    if ell <= 0:
        raise ValueError("ell must be positive")
    return int(np.count_nonzero(G.lengths <= ell))


def betti_1(G: EmbeddedMetricGraph) -> int:
    return G.n_edges - G.n_vertices + G.n_components


def is_delta_dense(G: EmbeddedMetricGraph, delta: float) -> bool:
    if delta <= 0:
        raise ValueError("delta must be positive")
    return bool(np.all(G.lengths <= delta))


def subdivide(G: EmbeddedMetricGraph, step: float) -> EmbeddedMetricGraph:
    """Embedded graph whose edges are cut into equal pieces no longer than ``step``."""
    if G.positions is None or not G.embedded:
        raise ValueError("subdivision needs an embedded graph")
    pos = [G.positions]
    new_edges = []
    nxt = G.n_vertices
    for (i, j), length in zip(G.edges, G.lengths):
        pieces = max(1, int(np.ceil(length / step)))
        if pieces == 1:
            new_edges.append((i, j))
            continue
        t = np.arange(1, pieces)[:, None] / pieces
        pos.append(G.positions[i] + t * (G.positions[j] - G.positions[i]))
        chain = [i, *range(nxt, nxt + pieces - 1), j]
        new_edges.extend(zip(chain[:-1], chain[1:]))
        nxt += pieces - 1
    return EmbeddedMetricGraph(np.vstack(pos), new_edges)


def branch_lengths(G: EmbeddedMetricGraph) -> np.ndarray:
    """Lengths of the maximal chains between vertices of degree other than 2.

    This is the edge set of the graph once degree-2 vertices are smoothed out;
    a component that is a bare cycle counts as one loop.
    """
    deg = G.degrees()
    incident: list[list[int]] = [[] for _ in range(G.n_vertices)]
    for k, (i, j) in enumerate(G.edges):
        incident[i].append(k)
        if j != i:
            incident[j].append(k)
    used = np.zeros(G.n_edges, dtype=bool)
    out = []

    def walk(start: int, k: int) -> float:
        total, v = 0.0, start
        while True:
            used[k] = True
            total += G.lengths[k]
            i, j = G.edges[k]
            v = j if v == i else i
            if deg[v] != 2:
                return total
            nxt = [e for e in incident[v] if not used[e]]
            if not nxt:
                return total
            k = nxt[0]

    for v in range(G.n_vertices):
        if deg[v] != 2:
            for k in incident[v]:
                if not used[k]:
                    out.append(walk(v, k))
    for k in range(G.n_edges):
        if not used[k]:
            out.append(walk(int(G.edges[k, 0]), k))
    return np.array(sorted(out))


@dataclass(frozen=True)
class DistortionEstimate:
    value: float
    eta: float
    r_min: float
    discretization_step: float


def restricted_distortion(G: EmbeddedMetricGraph, eta: float, r_min: float,
                          step: float) -> DistortionEstimate:
    """Estimate sup d_G / d^eta_G over pairs with d_G >= r_min on a subdivision of G.

    The graph is cut at arc-length ``step``, the Rips graph at scale ``eta`` is
    built over the cut points, and the ratio of the intrinsic metric to the
    Rips metric is maximized over the admissible pairs. Returns 1.0 when no
    pair is at intrinsic distance ``r_min`` or more.
    """
    from .rips import build_rips

    if eta <= 0 or r_min <= 0 or step <= 0:
        raise ValueError("eta, r_min and step must be positive")
    if step > eta / 4.0:
        raise ValueError("step must be at most eta / 4")
    if not G.is_connected():
        raise DisconnectedGraphError("restricted distortion needs a connected graph")
    fine = subdivide(G, step)
    intrinsic = fine.distance_matrix
    rips = build_rips(fine.positions, eta)
    if not rips.graph.is_connected():
        raise DisconnectedGraphError(
            f"Rips graph at eta={eta} over the subdivision is disconnected; eta is too small")
    chordal = rips.graph.distance_matrix
    far = intrinsic >= r_min
    if not np.any(far):
        return DistortionEstimate(1.0, eta, r_min, step)
    value = float(np.max(intrinsic[far] / chordal[far]))
    return DistortionEstimate(value, eta, r_min, step)


# -- text serialization -------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def format_graph(G: EmbeddedMetricGraph) -> str:
    buf = io.StringIO()
    write_graph(G, buf)
    return buf.getvalue()


def write_graph(G: EmbeddedMetricGraph, out: TextIO | str | os.PathLike,
                extra_lines: Iterable[str] = ()) -> None:
    """Write ``dim``/``v``/``e`` lines; lengths are written only in abstract mode."""
    if not hasattr(out, "write"):
        with open(out, "w", encoding="utf-8") as fh:
            write_graph(G, fh, extra_lines)
        return
    out.write(f"dim {G.dim}\n")
    for k in range(G.n_vertices):
        coords = "" if G.positions is None else " " + " ".join(_fmt(x) for x in G.positions[k])
        out.write(f"v{coords}\n")
    for (i, j), length in zip(G.edges, G.lengths):
        suffix = "" if G.embedded else f" {_fmt(length)}"
        out.write(f"e {i} {j}{suffix}\n")
    for line in extra_lines:
        out.write(line.rstrip("\n") + "\n")


def parse_graph(text: str) -> EmbeddedMetricGraph:
    return read_graph(io.StringIO(text))


def read_graph(src: TextIO | str | os.PathLike) -> EmbeddedMetricGraph:
    """Read the text format; unknown record types (e.g. ``n`` annotations) are skipped."""
    if not hasattr(src, "read"):
        with open(src, encoding="utf-8") as fh:
            return read_graph(fh)
    dim = None
    verts: list[list[float]] = []
    edges: list[tuple[int, int]] = []
    lengths: list[float | None] = []
    for lineno, raw in enumerate(src, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tag, *rest = line.split()
        try:
            if tag == "dim":
                dim = int(rest[0])
            elif tag == "v":
                if dim is None:
                    raise ValueError("'v' before 'dim'")
                coords = [float(x) for x in rest]
                if len(coords) != dim:
                    raise ValueError(f"expected {dim} coordinates")
                verts.append(coords)
            elif tag == "e":
                edges.append((int(rest[0]), int(rest[1])))
                lengths.append(float(rest[2]) if len(rest) > 2 else None)
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if dim is None:
        raise ValueError("missing 'dim' header")
    explicit = [x is not None for x in lengths]
    if any(explicit) and not all(explicit):
        raise ValueError("either all or no edges may carry explicit lengths")
    positions = np.array(verts, dtype=float).reshape(len(verts), dim) if dim > 0 else None
    if lengths and all(explicit):
        return EmbeddedMetricGraph(positions, edges, lengths, n_vertices=len(verts), embedded=False)
    if positions is None:
        if edges:
            raise ValueError("edges without lengths need vertex positions")
        return EmbeddedMetricGraph(None, edges, [], n_vertices=len(verts), embedded=False)
    return EmbeddedMetricGraph(positions, edges)


__all__ = [
    "DisconnectedGraphError", "EmbeddedMetricGraph", "Diameter", "DistortionEstimate",
    "shortest_path_metric", "diameter", "edge_length_census", "betti_1", "is_delta_dense",
    "subdivide", "restricted_distortion", "branch_lengths", "write_graph", "read_graph",
    "format_graph", "parse_graph",
]
