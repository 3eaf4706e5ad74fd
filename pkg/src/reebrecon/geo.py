"""Hypocenter catalogs to depth-sliced Reeb-graph reconstructions of a slab surface.

Workflow: read a catalog, keep deep and strong enough events, project them to a
local plane in kilometres, cut the result into depth slices, and reconstruct
each slice from its Rips graph. Reconstructions are written as GeoJSON and can
be compared with reference slab-depth contours.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateDataError, InputError
from .gh import GhBoundInputs, census_from_lengths, theorem_bound
from .geometry import directed_hausdorff, min_distance_to_segments
from .metric_graph import EmbeddedMetricGraph, betti_1, branch_lengths, diameter
from .reeb import (AlphaReebGraph, build_alpha_reeb, make_cover, prune_bumps,
                   reeb_as_metric_graph)
from .rips import RipsGraph, build_rips
from .smoothing import DEFAULT_SAMPLES, SmoothedEmbedding, embed_reeb

log = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0
KM_PER_DEGREE = EARTH_RADIUS_KM * math.pi / 180.0
MAX_LON_SPAN = 60.0
REQUIRED_COLUMNS = ("time", "latitude", "longitude", "depth", "mag")
DATA_DIR = Path(__file__).resolve().parent / "data"
BUNDLED_CATALOG = DATA_DIR / "sam_catalog_synthetic.csv"
BUNDLED_CONTOURS = DATA_DIR / "sam_slab_contours_synthetic.csv"


# ---------------------------------------------------------------- catalog

@dataclass(frozen=True)
class HypocenterRecord:
    time: str
    latitude: float
    longitude: float
    depth: float  # km, positive down
    magnitude: float


@dataclass(frozen=True)
class Catalog:
    """Events that passed the filters, plus counts of everything else.

    ``n_rows == len(records) + n_filtered + n_malformed`` always holds.
    """

    records: tuple[HypocenterRecord, ...]
    n_rows: int
    n_filtered: int
    n_malformed: int
    min_depth: float
    min_mag: float

    def __len__(self) -> int:
        return len(self.records)


def _data_lines(fh) -> Iterable[str]:
    for line in fh:
        if line.strip() and not line.lstrip().startswith("#"):
            yield line


def _parse_record(row: dict) -> HypocenterRecord | None:
    try:
        lat, lon = float(row["latitude"]), float(row["longitude"])
        depth, mag = float(row["depth"]), float(row["mag"])
    except (TypeError, ValueError):
        return None
    if not all(math.isfinite(v) for v in (lat, lon, depth, mag)):
        return None
    if not -90.0 <= lat <= 90.0 or not -360.0 <= lon <= 360.0:
        return None
    return HypocenterRecord((row.get("time") or "").strip(), lat, float(_wrap(lon)), depth, mag)


def ingest_catalog(path: str | os.PathLike, min_depth: float = 60.0,
                   min_mag: float = 4.0) -> Catalog:
    """Read a ComCat-style CSV and keep events with depth >= min_depth and mag > min_mag.

    Lines starting with ``#`` are comments. Rows whose coordinates, depth or
    magnitude do not parse as finite numbers are counted as malformed.
    """
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise InputError(f"cannot read catalog {path}: {exc}") from exc
    records, n_rows, n_filtered, n_malformed = [], 0, 0, 0
    with fh:
        reader = csv.DictReader(_data_lines(fh))
        header = reader.fieldnames
        if not header:
            raise InputError(f"catalog {path} is empty")
        missing = [c for c in REQUIRED_COLUMNS if c not in [h.strip() for h in header]]
        if missing:
            raise InputError(f"catalog {path} lacks columns {', '.join(missing)}")
        reader.fieldnames = [h.strip() for h in header]
        for row in reader:
            n_rows += 1
            rec = _parse_record(row)
            if rec is None:
                n_malformed += 1
            elif rec.depth >= min_depth and rec.magnitude > min_mag:
                records.append(rec)
            else:
                n_filtered += 1
    if n_rows == 0:
        raise InputError(f"catalog {path} has no data rows")
    log.info("catalog %s: %d rows, %d kept, %d filtered, %d malformed",
             path, n_rows, len(records), n_filtered, n_malformed)
    return Catalog(tuple(records), n_rows, n_filtered, n_malformed,
                   float(min_depth), float(min_mag))


# ------------------------------------------------------------- projection

def _wrap(lon):
    """Longitude(s) wrapped to [-180, 180)."""
    return (np.asarray(lon, dtype=float) + 180.0) % 360.0 - 180.0


@dataclass(frozen=True)
class LocalProjection:
    """Equirectangular projection to kilometres about ``(lat0, lon0)``.

    x = R (lon - lon0) cos(lat0), y = R (lat - lat0), angles in radians and
    R = 6371 km. Longitude differences are wrapped, so the antimeridian is fine.
    """

    lat0: float
    lon0: float

    def forward(self, lat, lon) -> np.ndarray:
        lat = np.asarray(lat, dtype=float)
        dlon = _wrap(np.asarray(lon, dtype=float) - self.lon0)
        x = KM_PER_DEGREE * dlon * math.cos(math.radians(self.lat0))
        y = KM_PER_DEGREE * (lat - self.lat0)
        return np.stack([x, y], axis=-1)

    def inverse(self, xy) -> tuple[np.ndarray, np.ndarray]:
        xy = np.asarray(xy, dtype=float)
        lat = self.lat0 + xy[..., 1] / KM_PER_DEGREE
        lon = _wrap(self.lon0 + xy[..., 0] / (KM_PER_DEGREE * math.cos(math.radians(self.lat0))))
        return lat, lon

    @classmethod
    def centroid(cls, lat, lon) -> LocalProjection:
        """Centred on the mean latitude and the circular mean longitude.

        Raises if the longitudes span more than 60 degrees, where the
        projection distorts too much.
        """
        lat = np.asarray(lat, dtype=float)
        lon = np.asarray(lon, dtype=float)
        if lat.size == 0:
            raise DegenerateDataError("no events to centre a projection on")
        rad = np.deg2rad(lon)
        lon0 = float(np.rad2deg(math.atan2(np.sin(rad).mean(), np.cos(rad).mean())))
        spread = np.abs(_wrap(lon - lon0))
        if 2.0 * spread.max() > MAX_LON_SPAN:
            raise InputError(f"longitudes span more than {MAX_LON_SPAN} degrees")
        return cls(float(lat.mean()), lon0)


# ----------------------------------------------------------------- slices

@dataclass(frozen=True, eq=False)
class DepthSlice:
    """Events with lo <= depth < hi, projected to the plane (``xy`` in km)."""

    index: int
    lo: float
    hi: float
    records: tuple[HypocenterRecord, ...]
    xy: np.ndarray

    def __len__(self) -> int:
        return len(self.records)

    @property
    def label(self) -> str:
        return f"[{self.lo:g}, {self.hi:g})"


def slice_by_depth(records: Sequence[HypocenterRecord], start: float, width: float,
                   projection: LocalProjection) -> list[DepthSlice]:
    """Half-open bins ``[start + k w, start + (k+1) w)`` covering every record at or below start.

    Records shallower than ``start`` are ignored. Bin membership is checked
    against the computed bounds themselves, so a depth equal to a boundary
    always lands in the upper bin.
    """
    if not width > 0:
        raise ValueError("slice width must be positive")
    depths = np.array([r.depth for r in records], dtype=float)
    keep = depths >= start
    if not np.any(keep):
        return []
    k_of = np.floor((depths - start) / width).astype(np.int64)
    bounds = lambda k: (start + k * width, start + (k + 1) * width)  # noqa: E731
    for idx in np.flatnonzero(keep):
        lo, hi = bounds(k_of[idx])
        if depths[idx] < lo:
            k_of[idx] -= 1
        elif depths[idx] >= hi:
            k_of[idx] += 1
    slices = []
    for k in range(int(k_of[keep].max()) + 1):
        members = np.flatnonzero(keep & (k_of == k))
        if members.size == 0:
            continue
        recs = tuple(records[i] for i in members)
        xy = projection.forward([r.latitude for r in recs], [r.longitude for r in recs])
        lo, hi = bounds(k)
        slices.append(DepthSlice(k, lo, hi, recs, xy.reshape(-1, 2)))
    return slices


# --------------------------------------------------------- reconstruction

@dataclass(frozen=True)
class SliceDiagnostics:
    n_points: int
    n_components: int
    component_sizes: tuple[int, ...]  # descending
    principal_size: int
    basepoint: int  # index into the slice's points
    n_reeb_nodes: int  # of the embedded (possibly pruned) graph
    n_reeb_edges: int
    beta1: int
    rips_diameter_km: float
    bound_km: float | None  # None unless an epsilon was supplied


@dataclass(frozen=True, eq=False)
class SliceReconstruction:
    points: np.ndarray  # all points of the slice
    principal: np.ndarray  # indices of the largest Rips component
    rips: RipsGraph
    reeb: AlphaReebGraph  # built on the principal component; members index into it
    embedded_reeb: AlphaReebGraph  # the graph actually embedded (``reeb`` after pruning)
    embedding: SmoothedEmbedding
    diagnostics: SliceDiagnostics


def _choose_base(size: int, base_index: int | None, seed: int | None) -> int:
    if base_index is not None:
        if not 0 <= base_index < size:
            raise ValueError(f"base index {base_index} outside the principal component "
                             f"of {size} points")
        return int(base_index)
    if seed is not None:
        return int(np.random.default_rng(seed).integers(size))
    return 0


def reconstruct_slice(points, eta: float, alpha: float, sigma: float, overlap: float = 0.5,
                      base_index: int | None = None, seed: int | None = None,
                      epsilon: float | None = None, r_cap: float = 500.0,
                      samples: int = DEFAULT_SAMPLES, prune: bool = True) -> SliceReconstruction:
    """Rips graph, its largest component, an alpha-Reeb graph and its smooth embedding.

    ``points`` is a :class:`DepthSlice` or an (n, 2) array of projected km.
    ``base_index`` selects the basepoint within the largest component (in
    ascending point order); otherwise ``seed`` draws one, and by default the
    first point is used. Raises :class:`DegenerateDataError` when the largest
    component has fewer than ``min(3, n)`` points.

    With ``prune`` the vertex-free leaves of the Reeb graph are dropped before
    embedding (see :func:`reebrecon.reeb.prune_bumps`); beta_1 and the bound
    always refer to the unpruned graph.
    """
    if isinstance(points, DepthSlice):
        points = points.xy
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n = P.shape[0]
    if n < 2:
        raise DegenerateDataError(f"slice has {n} point(s); need at least 2")
    rips = build_rips(P, eta)
    labels = rips.graph.component_labels
    sizes = np.bincount(labels)
    largest = int(np.argmax(sizes))  # ties go to the component of the lowest point index
    principal = np.flatnonzero(labels == largest)
    if principal.size < min(3, n):
        raise DegenerateDataError(
            f"every Rips component at eta={eta} is smaller than {min(3, n)} points")
    sub, _ = rips.graph.subgraph(principal)
    base = _choose_base(principal.size, base_index, seed)
    filt_max = float(sub.distances_from(base).max())
    reeb = build_alpha_reeb(sub, base, make_cover(filt_max, alpha, overlap))
    shown = prune_bumps(reeb) if prune else reeb
    embedding = embed_reeb(shown, P[principal], sigma, samples)
    reeb_graph = reeb_as_metric_graph(reeb)
    b1 = betti_1(reeb_graph)
    m_diam = diameter(sub, method="envelope").value if sub.n_edges else 0.0
    bound = None
    if epsilon is not None and m_diam > 0:
        inputs = GhBoundInputs(b1, alpha, epsilon, r_cap, m_diam,
                               census_from_lengths(branch_lengths(reeb_graph)))
        bound = theorem_bound(inputs)
    diag = SliceDiagnostics(
        n_points=n,
        n_components=int(sizes.size),
        component_sizes=tuple(int(s) for s in sorted(sizes, reverse=True)),
        principal_size=int(principal.size),
        basepoint=int(principal[base]),
        n_reeb_nodes=shown.n_nodes,
        n_reeb_edges=int(shown.edges.shape[0]),
        beta1=b1,
        rips_diameter_km=float(m_diam),
        bound_km=bound,
    )
    return SliceReconstruction(P, principal, rips, reeb, shown, embedding, diag)


@dataclass(frozen=True)
class PipelineParams:
    eta: float
    alpha: float
    sigma: float
    overlap: float = 0.5
    base_index: int | None = None
    seed: int | None = None
    epsilon: float | None = None
    r_cap: float = 500.0
    samples: int = DEFAULT_SAMPLES
    prune: bool = True

    def __post_init__(self):
        if not self.eta > 0 or not self.alpha > 0 or not self.sigma > 0:
            raise ValueError("eta, alpha and sigma must be positive")
        if not self.sigma < self.alpha / 4.0:
            raise ValueError(f"sigma={self.sigma} violates sigma < alpha/4 = {self.alpha / 4.0}")
        if not 0.25 <= self.overlap <= 0.5:
            raise ValueError("overlap must lie in [0.25, 0.5]")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not self.r_cap > 0:
            raise ValueError("r_cap must be positive")


@dataclass(frozen=True, eq=False)
class SliceResult:
    slice: DepthSlice
    reconstruction: SliceReconstruction | None
    skipped: str | None = None  # reason when no reconstruction was possible


@dataclass(frozen=True, eq=False)
class PipelineResult:
    catalog: Catalog
    projection: LocalProjection
    params: PipelineParams
    slices: tuple[SliceResult, ...]
    n_unbinned: int  # kept events outside every reconstructed slice

    @property
    def reconstructed(self) -> list[SliceResult]:
        return [s for s in self.slices if s.reconstruction is not None]


def _slice_seed(seed: int | None, k: int) -> int | None:
    if seed is None:
        return None
    return int(np.random.default_rng([seed, k]).integers(2**31))


def run_pipeline(catalog: Catalog, slice_start: float, slice_width: float,
                 params: PipelineParams, threads: int = 1,
                 projection: LocalProjection | None = None,
                 slice_end: float | None = None) -> PipelineResult:
    """Slice a filtered catalog and reconstruct every slice (in parallel if ``threads > 1``).

    With ``slice_end`` only slices starting above that depth are kept; the
    events below it count as unbinned.
    Slices that are too sparse are skipped with a warning; if none survives a
    :class:`DegenerateDataError` is raised.
    """
    if not catalog.records:
        raise DegenerateDataError("no events left after filtering")
    if projection is None:
        projection = LocalProjection.centroid([r.latitude for r in catalog.records],
                                              [r.longitude for r in catalog.records])
    slices = slice_by_depth(catalog.records, slice_start, slice_width, projection)
    if slice_end is not None:
        slices = [s for s in slices if s.lo < slice_end]
    binned = sum(len(s) for s in slices)

    def work(s: DepthSlice) -> SliceResult:
        try:
            rec = reconstruct_slice(
                s.xy, params.eta, params.alpha, params.sigma, params.overlap,
                params.base_index, _slice_seed(params.seed, s.index), params.epsilon,
                params.r_cap, params.samples, params.prune)
        except DegenerateDataError as exc:
            log.warning("slice %s skipped: %s", s.label, exc)
            return SliceResult(s, None, str(exc))
        log.info("slice %s: %d events, %d Rips components, beta1=%d", s.label, len(s),
                 rec.diagnostics.n_components, rec.diagnostics.beta1)
        return SliceResult(s, rec)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = tuple(pool.map(work, slices))
    else:
        results = tuple(work(s) for s in slices)
    out = PipelineResult(catalog, projection, params, results, len(catalog.records) - binned)
    if not out.reconstructed:
        raise DegenerateDataError("no depth slice could be reconstructed")
    return out


# -------------------------------------------------------- slab contours

@dataclass(frozen=True, eq=False)
class SlabContour:
    """Polylines of one slab-depth contour, as (lon, lat) degrees."""

    depth: float  # km, positive down
    polylines: tuple[np.ndarray, ...]

    def project(self, projection: LocalProjection) -> list[np.ndarray]:
        return [projection.forward(p[:, 1], p[:, 0]) for p in self.polylines]

    @property
    def n_points(self) -> int:
        return sum(len(p) for p in self.polylines)


def _finish(groups: dict[float, list[np.ndarray]], current: list, depth) -> None:
    if len(current) >= 2:
        groups.setdefault(depth, []).append(np.array(current, dtype=float))


def _read_contour_text(text: str) -> dict[float, list[np.ndarray]]:
    groups: dict[float, list[np.ndarray]] = {}
    current: list[tuple[float, float]] = []
    depth = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(">"):
            _finish(groups, current, depth)
            current, depth = [], None
            continue
        if line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        try:
            lon, lat, z = (float(v) for v in parts[:3])
        except ValueError:
            if not current and not groups:  # header row
                continue
            raise InputError(f"unparseable contour line: {raw!r}") from None
        z = abs(z)
        if depth is not None and z != depth:
            _finish(groups, current, depth)
            current = []
        depth = z
        current.append((float(_wrap(lon)), lat))
    _finish(groups, current, depth)
    return groups


def _read_contour_geojson(doc: dict) -> dict[float, list[np.ndarray]]:
    groups: dict[float, list[np.ndarray]] = {}
    feats = doc.get("features", []) if doc.get("type") == "FeatureCollection" else [doc]
    for feat in feats:
        geom = feat.get("geometry") or {}
        props = feat.get("properties") or {}
        lines = {"LineString": [geom.get("coordinates")],
                 "MultiLineString": geom.get("coordinates")}.get(geom.get("type"), [])
        for coords in lines or []:
            arr = np.array(coords, dtype=float)
            if arr.ndim != 2 or arr.shape[0] < 2:
                continue
            if "depth" in props:
                depth = abs(float(props["depth"]))
            elif arr.shape[1] >= 3:
                depth = abs(float(arr[0, 2]))
            else:
                raise InputError("contour feature has no depth")
            groups.setdefault(depth, []).append(np.c_[_wrap(arr[:, 0]), arr[:, 1]])
    return groups


def load_slab_contours(path: str | os.PathLike) -> dict[float, SlabContour]:
    """Read contours from ``lon,lat,depth`` text (blank line between polylines) or GeoJSON.

    Longitudes may be given in 0..360 and depths as negative numbers.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read slab contours {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            groups = _read_contour_geojson(json.loads(text))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise InputError(f"bad GeoJSON in {path}: {exc}") from exc
    else:
        groups = _read_contour_text(text)
    if not groups:
        raise InputError(f"no contour polylines in {path}")
    return {d: SlabContour(d, tuple(lines)) for d, lines in sorted(groups.items())}


def select_contour(contours: dict[float, SlabContour], depth: float) -> SlabContour:
    for d, c in contours.items():
        if abs(d - depth) <= 1e-6:
            return c
    raise InputError(f"no contour at depth {depth:g} km; available: "
                     + ", ".join(f"{d:g}" for d in contours))


# ------------------------------------------------------------ comparison

def densify(polyline: np.ndarray, max_step: float = 1.0) -> np.ndarray:
    """Insert points so consecutive points are at most ``max_step`` apart."""
    P = np.atleast_2d(np.asarray(polyline, dtype=float))
    if len(P) < 2:
        return P.copy()
    out = [P[:1]]
    for a, b in zip(P[:-1], P[1:]):
        pieces = max(1, math.ceil(np.linalg.norm(b - a) / max_step))
        t = np.arange(1, pieces + 1)[:, None] / pieces
        out.append(a + t * (b - a))
    return np.vstack(out)


def _segments(lines: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    A, B = [], []
    for p in lines:
        if len(p) == 1:
            A.append(p)
            B.append(p)
        else:
            A.append(p[:-1])
            B.append(p[1:])
    return np.vstack(A), np.vstack(B)


def _polyline_length(lines: Sequence[np.ndarray]) -> float:
    return float(sum(np.linalg.norm(np.diff(p, axis=0), axis=1).sum() for p in lines))


@dataclass(frozen=True)
class SlabComparison:
    depth: float
    recon_to_slab_km: float  # directed Hausdorff, reconstruction -> contour
    slab_to_recon_km: float
    hausdorff_km: float
    recon_length_km: float
    slab_length_km: float

    @property
    def length_ratio(self) -> float:
        return self.recon_length_km / self.slab_length_km if self.slab_length_km else math.nan

    def as_dict(self) -> dict:
        return {"depth_km": self.depth, "recon_to_slab_km": self.recon_to_slab_km,
                "slab_to_recon_km": self.slab_to_recon_km, "hausdorff_km": self.hausdorff_km,
                "recon_length_km": self.recon_length_km, "slab_length_km": self.slab_length_km,
                "length_ratio": self.length_ratio}


def embedding_lines(embedding: SmoothedEmbedding) -> list[np.ndarray]:
    lines = [np.asarray(p) for p in embedding.polylines]
    lines.extend(np.atleast_2d(p) for _, p in sorted(embedding.node_points.items()))
    return lines


def compare_to_slab(recon_lines: Sequence[np.ndarray], contour: SlabContour,
                    projection: LocalProjection, max_step: float = 1.0) -> SlabComparison:
    """Hausdorff distances (km) between reconstruction polylines and a contour.

    Both sides are densified to ``max_step`` km and each densified point is
    measured against the other side's segments.
    """
    recon = [np.atleast_2d(np.asarray(p, dtype=float)) for p in recon_lines]
    recon = [p for p in recon if p.size]
    slab = contour.project(projection)
    if not recon or not slab:
        raise DegenerateDataError("nothing to compare")
    rd = np.vstack([densify(p, max_step) for p in recon])
    sd = np.vstack([densify(p, max_step) for p in slab])
    r2s = float(min_distance_to_segments(rd, *_segments(slab)).max())
    s2r = float(min_distance_to_segments(sd, *_segments(recon)).max())
    return SlabComparison(contour.depth, r2s, s2r, max(r2s, s2r),
                          _polyline_length(recon), _polyline_length(slab))


def point_to_contour_km(points_xy: np.ndarray, contour: SlabContour,
                        projection: LocalProjection) -> float:
    """Directed Hausdorff distance from raw points to a densified contour."""
    sd = np.vstack([densify(p) for p in contour.project(projection)])
    return directed_hausdorff(points_xy, sd)


# ---------------------------------------------------------------- output

def _fmt_coords(lines_lonlat: np.ndarray) -> str:
    return "[" + ",".join(f"[{lon:.6f},{lat:.6f}]" for lon, lat in lines_lonlat) + "]"


def _json(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), allow_nan=False)


def embedding_features(embedding: SmoothedEmbedding, projection: LocalProjection,
                       properties: dict | None = None) -> list[str]:
    """Serialized GeoJSON features: one LineString per Reeb edge, one Point per isolated node."""
    base = dict(properties or {})
    feats = []
    for k, (line, (u, v)) in enumerate(zip(embedding.polylines, embedding.edges.tolist())):
        lat, lon = projection.inverse(line)
        props = _json({**base, "kind": "edge", "edge": k, "nodes": [u, v]})
        feats.append('{"type":"Feature","geometry":{"type":"LineString","coordinates":'
                     f"{_fmt_coords(np.c_[lon, lat])}}},\"properties\":{props}}}")
    for node, p in sorted(embedding.node_points.items()):
        lat, lon = projection.inverse(np.asarray(p)[None, :])
        props = _json({**base, "kind": "node", "node": node})
        coords = _fmt_coords(np.c_[lon, lat])[1:-1]
        feats.append('{"type":"Feature","geometry":{"type":"Point","coordinates":'
                     f"{coords}}},\"properties\":{props}}}")
    return feats


def emit_geojson(features: Sequence[str], projection: LocalProjection,
                 out: str | os.PathLike, properties: dict | None = None) -> None:
    """Write a FeatureCollection; the projection origin goes into its properties.

    Coordinates have exactly six decimals and keys are sorted, so identical
    inputs give byte-identical files.
    """
    props = {**(properties or {}), "origin": {"lat": projection.lat0, "lon": projection.lon0}}
    body = ",\n".join(features)
    text = ('{"type":"FeatureCollection","properties":' + _json(props)
            + ',"features":[\n' + body + "\n]}\n")
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from exc


def pipeline_geojson(result: PipelineResult, out: str | os.PathLike) -> None:
    p = result.params
    feats = []
    for s in result.reconstructed:
        rec = s.reconstruction
        feats.extend(embedding_features(rec.embedding, result.projection, {
            "slice_lo": s.slice.lo, "slice_hi": s.slice.hi, "beta1": rec.diagnostics.beta1}))
    params = {"eta": p.eta, "alpha": p.alpha, "sigma": p.sigma, "overlap": p.overlap,
              "prune": p.prune}
    emit_geojson(feats, result.projection, out, {"params": params})


@dataclass(frozen=True, eq=False)
class ReconFile:
    projection: LocalProjection
    features: list[dict] = field(default_factory=list)

    def lines_for_depth(self, depth: float) -> list[np.ndarray]:
        """Projected (km) geometries of features whose slice contains ``depth``."""
        out = []
        for feat in self.features:
            props = feat.get("properties") or {}
            lo, hi = props.get("slice_lo"), props.get("slice_hi")
            if lo is not None and hi is not None and not lo <= depth < hi:
                continue
            geom = feat["geometry"]
            coords = np.atleast_2d(np.array(geom["coordinates"], dtype=float))
            out.append(self.projection.forward(coords[:, 1], coords[:, 0]))
        return out


def read_recon_geojson(path: str | os.PathLike) -> ReconFile:
    try:
        doc = json.loads(Path(path).read_text())
        origin = doc["properties"]["origin"]
        projection = LocalProjection(float(origin["lat"]), float(origin["lon"]))
        features = list(doc["features"])
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} is not a reconstruction GeoJSON: {exc}") from exc
    return ReconFile(projection, features)


DIAGNOSTIC_COLUMNS = ("slice_lo", "slice_hi", "n_points", "n_components", "beta1", "bound",
                      "hausdorff_to_slab_km", "principal_size", "basepoint", "reeb_nodes",
                      "reeb_edges", "rips_diameter_km", "status")


def diagnostics_rows(result: PipelineResult,
                     comparisons: dict[int, SlabComparison] | None = None) -> list[dict]:
    rows = []
    for s in result.slices:
        row = {"slice_lo": f"{s.slice.lo:g}", "slice_hi": f"{s.slice.hi:g}",
               "n_points": len(s.slice)}
        rec = s.reconstruction
        if rec is None:
            row["status"] = "skipped: " + (s.skipped or "")
        else:
            d = rec.diagnostics
            comp = (comparisons or {}).get(s.slice.index)
            row.update(n_components=d.n_components, principal_size=d.principal_size,
                       basepoint=d.basepoint, reeb_nodes=d.n_reeb_nodes,
                       reeb_edges=d.n_reeb_edges, beta1=d.beta1,
                       rips_diameter_km=f"{d.rips_diameter_km:.3f}",
                       bound="" if d.bound_km is None else f"{d.bound_km:.3f}",
                       hausdorff_to_slab_km="" if comp is None else f"{comp.hausdorff_km:.3f}",
                       status="ok")
        rows.append({c: row.get(c, "") for c in DIAGNOSTIC_COLUMNS})
    return rows


def write_diagnostics(rows: list[dict], fh) -> None:
    w = csv.DictWriter(fh, fieldnames=list(DIAGNOSTIC_COLUMNS), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
