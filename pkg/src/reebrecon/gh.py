"""Correspondences, Gromov-Hausdorff distances of small finite spaces, and reconstruction bounds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .metric_graph import EmbeddedMetricGraph
from .reeb import filter_values

BRUTEFORCE_CAP = 20
EXACT_CAP = 400
METRIC_TOL = 1e-9


class FiniteMetricSpace:
    """A finite metric space given by its distance matrix."""

    def __init__(self, dist, validate: bool = True):
        D = np.array(dist, dtype=float, copy=True)
        if D.ndim != 2 or D.shape[0] != D.shape[1] or D.shape[0] == 0:
            raise ValueError("distance matrix must be square and nonempty")
        if validate:
            scale = max(1.0, float(np.abs(D).max()))
            if not np.all(np.isfinite(D)):
                raise ValueError("distances must be finite")
            if np.any(D < 0) or np.any(np.abs(np.diag(D)) > 0):
                raise ValueError("distances must be nonnegative with zero diagonal")
            if np.any(np.abs(D - D.T) > METRIC_TOL * scale):
                raise ValueError("distance matrix must be symmetric")
            # D[i, k] <= D[i, j] + D[j, k] for all triples
            slack = METRIC_TOL * scale
            if D.shape[0] <= 300 and np.any(D[:, None, :] > D[:, :, None] + D[None, :, :] + slack):
                raise ValueError("triangle inequality violated")
        D.setflags(write=False)
        self.dist = D

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __len__(self) -> int:
        return self.n

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    @classmethod
    def from_graph(cls, G: EmbeddedMetricGraph) -> FiniteMetricSpace:
        return cls(G.distance_matrix, validate=False)

    @classmethod
    def from_points(cls, points) -> FiniteMetricSpace:
        P = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2), validate=False)


@dataclass(frozen=True)
class Correspondence:
    pairs: tuple[tuple[int, int], ...]

    def __init__(self, pairs: Iterable[tuple[int, int]]):
        object.__setattr__(self, "pairs", tuple(sorted({(int(i), int(j)) for i, j in pairs})))

    def validate(self, nx: int, ny: int) -> None:
        xs = {i for i, _ in self.pairs}
        ys = {j for _, j in self.pairs}
        if any(not 0 <= i < nx for i in xs) or any(not 0 <= j < ny for j in ys):
            raise ValueError("correspondence index out of range")
        if len(xs) != nx or len(ys) != ny:
            raise ValueError("correspondence must cover every point of both spaces")

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        arr = np.array(self.pairs, dtype=np.int64).reshape(-1, 2)
        return arr[:, 0], arr[:, 1]


def _pair_gaps(X: FiniteMetricSpace, Y: FiniteMetricSpace, C: Correspondence):
    C.validate(X.n, Y.n)
    i, j = C.arrays()
    dx = X.dist[np.ix_(i, i)]
    dy = Y.dist[np.ix_(j, j)]
    return dx, dy, np.abs(dx - dy)


def correspondence_distortion(X: FiniteMetricSpace, Y: FiniteMetricSpace, C: Correspondence) -> float:
    return float(_pair_gaps(X, Y, C)[2].max())


def gh_bruteforce(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """Half the least distortion over every covering subset of X x Y (|X||Y| <= 20)."""
    P = X.n * Y.n
    if P > BRUTEFORCE_CAP:
        raise ValueError(f"|X|*|Y| = {P} exceeds the enumeration cap of {BRUTEFORCE_CAP}")
    ii, jj = np.divmod(np.arange(P), Y.n)
    gap = np.abs(X.dist[np.ix_(ii, ii)] - Y.dist[np.ix_(jj, jj)])
    # subset masks are built bit by bit: masks containing bit k are (old masks) | 1<<k
    dist = np.zeros(1)
    cov_x = np.zeros(1, dtype=np.int64)
    cov_y = np.zeros(1, dtype=np.int64)
    for k in range(P):
        worst_with_k = np.zeros(1)
        for q in range(k):
            worst_with_k = np.concatenate([worst_with_k, np.maximum(worst_with_k, gap[k, q])])
        dist = np.concatenate([dist, np.maximum(dist, worst_with_k)])
        cov_x = np.concatenate([cov_x, cov_x | (1 << int(ii[k]))])
        cov_y = np.concatenate([cov_y, cov_y | (1 << int(jj[k]))])
    full = (cov_x == (1 << X.n) - 1) & (cov_y == (1 << Y.n) - 1)
    return float(dist[full].min()) / 2.0


def _covering_clique_exists(tau: float, gap: np.ndarray, ii: np.ndarray, jj: np.ndarray,
                            nx: int, ny: int) -> bool:
    P = gap.shape[0]
    compat = [sum(1 << q for q in np.flatnonzero(gap[p] <= tau).tolist()) for p in range(P)]
    by_x = [sum(1 << p for p in range(P) if ii[p] == x) for x in range(nx)]
    by_y = [sum(1 << p for p in range(P) if jj[p] == y) for y in range(ny)]
    full_x, full_y = (1 << nx) - 1, (1 << ny) - 1

    def search(cand: int, cx: int, cy: int) -> bool:
        if cx == full_x and cy == full_y:
            return True
        best = None
        for x in range(nx):
            if not cx >> x & 1:
                opts = cand & by_x[x]
                if not opts:
                    return False
                if best is None or opts.bit_count() < best.bit_count():
                    best = opts
        for y in range(ny):
            if not cy >> y & 1:
                opts = cand & by_y[y]
                if not opts:
                    return False
                if best is None or opts.bit_count() < best.bit_count():
                    best = opts
        while best:
            low = best & -best
            p = low.bit_length() - 1
            best ^= low
            if search(cand & compat[p], cx | 1 << int(ii[p]), cy | 1 << int(jj[p])):
                return True
            # p is now excluded from this branch: any solution using it was already tried
            cand &= ~low
        return False

    return search((1 << P) - 1, 0, 0)


def gh_exact(X: FiniteMetricSpace, Y: FiniteMetricSpace, cap: int = EXACT_CAP) -> float:
    """Exact Gromov-Hausdorff distance by binary search over candidate distortions.

    For a threshold tau, a correspondence of distortion <= tau exists iff the
    pairs of X x Y that are pairwise tau-compatible contain a set covering both
    spaces; that is decided by a branch-and-bound clique search.
    """
    P = X.n * Y.n
    if P > cap:
        raise ValueError(f"|X|*|Y| = {P} exceeds the cap of {cap}")
    ii, jj = np.divmod(np.arange(P), Y.n)
    gap = np.abs(X.dist[np.ix_(ii, ii)] - Y.dist[np.ix_(jj, jj)])
    # the optimum is one of the gap values; the full product always qualifies
    values = np.unique(gap)
    lo, hi = 0, values.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _covering_clique_exists(values[mid], gap, ii, jj, X.n, Y.n):
            hi = mid
        else:
            lo = mid + 1
    return float(values[lo]) / 2.0


@dataclass(frozen=True)
class ApproxCheck:
    ok: bool
    worst: tuple[tuple[int, int], tuple[int, int]] | None  # violating pair of pairs, if any
    excess: float  # largest |d_X - d_Y| among guarded pairs


def check_eps_r_approx(X: FiniteMetricSpace, Y: FiniteMetricSpace, C: Correspondence,
                       epsilon: float, r_cap: float) -> ApproxCheck:
    """Check |d_X - d_Y| <= 2 epsilon on all pairs of C with min(d_X, d_Y) <= r_cap."""
    dx, dy, gap = _pair_gaps(X, Y, C)
    guarded = np.minimum(dx, dy) <= r_cap
    g = np.where(guarded, gap, -np.inf)
    flat = int(np.argmax(g))
    p, q = divmod(flat, g.shape[1])
    worst_gap = float(max(g[p, q], 0.0))
    if worst_gap <= 2.0 * epsilon:
        return ApproxCheck(True, None, worst_gap)
    return ApproxCheck(False, (C.pairs[p], C.pairs[q]), worst_gap)


def certified_epsilon(X: FiniteMetricSpace, Y: FiniteMetricSpace, C: Correspondence,
                      r_cap: float) -> float:
    """Smallest epsilon for which C makes X and Y an (epsilon, r_cap)-approximation."""
    return check_eps_r_approx(X, Y, C, math.inf, r_cap).excess / 2.0


def annulus_component_diameter(X: EmbeddedMetricGraph, base: int, d_center: float,
                               alpha_half: float, filt: np.ndarray | None = None) -> float:
    """Largest diameter of a component of the band ``d in [d_center -+ alpha_half]``.

    Components and their diameters use the subgraph induced on band vertices,
    so geodesics never leave the band. An empty band gives 0.
    """
    d = filter_values(X, base) if filt is None else filt
    band = np.flatnonzero((d >= d_center - alpha_half) & (d <= d_center + alpha_half))
    if band.size == 0:
        return 0.0
    sub, _ = X.subgraph(band)
    D = sub.distance_matrix
    return float(D[np.isfinite(D)].max())


@dataclass(frozen=True)
class GhBoundInputs:
    beta1: int
    alpha: float
    epsilon: float
    r_cap: float  # math.inf selects the limit form
    m_diam: float
    edge_census: Callable[[float], int] = field(compare=False)
    min_edge_length: float | None = None

    def __post_init__(self):
        if self.beta1 < 0 or self.alpha <= 0 or self.epsilon < 0:
            raise ValueError("need beta1 >= 0, alpha > 0, epsilon >= 0")
        if not self.r_cap > 0 or not (self.m_diam > 0 and math.isfinite(self.m_diam)):
            raise ValueError("need r_cap > 0 and a finite positive diameter")

    @property
    def ratio(self) -> float:
        """M / R, zero in the R -> infinity limit."""
        return 0.0 if math.isinf(self.r_cap) else self.m_diam / self.r_cap

    @property
    def scale(self) -> float:
        return self.alpha + 4 * self.epsilon * self.ratio + 4 * self.epsilon


def theorem_bound(inputs: GhBoundInputs) -> float:
    """(b1 + 1) * 4 (2 + N(4 s)) * s + (4 M/R + 2) eps, with s = alpha + 4 eps M/R + 4 eps."""
    s = inputs.scale
    n_short = inputs.edge_census(4 * s)
    return (inputs.beta1 + 1) * 4 * (2 + n_short) * s + (4 * inputs.ratio + 2) * inputs.epsilon


def simplified_bound(inputs: GhBoundInputs) -> float:
    """(b1 + 1)(8 alpha + 36 eps M/R + 34 eps), valid when every edge of G is >= 4 s."""
    threshold = 4 * inputs.scale
    if inputs.min_edge_length is not None:
        premise = inputs.min_edge_length >= threshold
    else:
        premise = inputs.edge_census(threshold) == 0
    if not premise:
        raise ValueError("simplified bound needs every edge of G to be at least "
                         f"4(alpha + 4 eps M/R + 4 eps) = {threshold}")
    eps = inputs.epsilon
    return (inputs.beta1 + 1) * (8 * inputs.alpha + 36 * eps * inputs.ratio + 34 * eps)


def census_from_lengths(lengths: Sequence[float]) -> Callable[[float], int]:
    arr = np.sort(np.asarray(lengths, dtype=float))
    return lambda ell: int(np.searchsorted(arr, ell, side="right"))


def is_isometric(X: FiniteMetricSpace, Y: FiniteMetricSpace, tol: float = 0.0) -> bool:
    """Permutation search; only for tiny spaces."""
    if X.n != Y.n:
        return False
    for perm in itertools.permutations(range(Y.n)):
        p = np.array(perm)
        if np.all(np.abs(X.dist - Y.dist[np.ix_(p, p)]) <= tol):
            return True
    return False
