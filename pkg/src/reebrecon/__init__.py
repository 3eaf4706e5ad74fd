"""Reeb-graph reconstruction of metric graphs from noisy samples."""
from __future__ import annotations

from .errors import DegenerateDataError, InputError
from .geometry import PointCloud, hausdorff_cloud_to_graph, hausdorff_distance
from .gh import (Correspondence, FiniteMetricSpace, GhBoundInputs, annulus_component_diameter,
                 check_eps_r_approx, correspondence_distortion, gh_bruteforce, gh_exact,
                 simplified_bound, theorem_bound)
from .metric_graph import (EmbeddedMetricGraph, betti_1, diameter, edge_length_census,
                           restricted_distortion, shortest_path_metric)
from .reeb import AlphaReebGraph, build_alpha_reeb, make_cover
from .rips import RipsGraph, build_rips
from .smoothing import SmoothedEmbedding, embed_reeb
from .synth import NoisySampleSpec, sample_graph, standard_fixtures

__version__ = "0.1.0"

__all__ = [
    "AlphaReebGraph", "Correspondence", "DegenerateDataError", "EmbeddedMetricGraph",
    "FiniteMetricSpace", "GhBoundInputs", "InputError", "NoisySampleSpec", "PointCloud",
    "RipsGraph", "SmoothedEmbedding", "annulus_component_diameter", "betti_1",
    "build_alpha_reeb", "build_rips", "check_eps_r_approx", "correspondence_distortion",
    "diameter", "edge_length_census", "embed_reeb", "gh_bruteforce", "gh_exact",
    "hausdorff_cloud_to_graph", "hausdorff_distance", "make_cover", "restricted_distortion",
    "sample_graph", "shortest_path_metric", "simplified_bound", "standard_fixtures",
    "theorem_bound",
]
