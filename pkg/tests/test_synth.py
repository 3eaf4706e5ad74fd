from __future__ import annotations

import numpy as np
import pytest

from reebrecon.geometry import hausdorff_cloud_to_graph
from reebrecon.metric_graph import EmbeddedMetricGraph
from reebrecon.synth import (NoisySampleSpec, circle_fixture, sample_graph, segment_fixture,
                             standard_fixtures, uniform_ball, y_fixture)


def test_noise_free_segment_sample():
    s = sample_graph(NoisySampleSpec(segment_fixture().graph, 10.0, 0.0, 0))
    pts = s.cloud.points
    assert len(pts) == 11
    assert np.all(pts[:, 1] == 0)
    assert sorted(pts[:, 0]) == pytest.approx(np.linspace(0, 1, 11))
    assert s.spacing == pytest.approx(0.1)
    assert s.hausdorff_bound == pytest.approx(0.05)


def test_sampling_is_deterministic():
    g = circle_fixture().graph
    a = sample_graph(NoisySampleSpec(g, 50.0, 0.02, 3)).cloud.points
    b = sample_graph(NoisySampleSpec(g, 50.0, 0.02, 3)).cloud.points
    c = sample_graph(NoisySampleSpec(g, 50.0, 0.02, 4)).cloud.points
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_circle_sample_hausdorff():
    fx = circle_fixture()
    s = sample_graph(NoisySampleSpec(fx.graph, 100.0, 0.02, 1))
    dh = hausdorff_cloud_to_graph(s.cloud, fx.graph, 0.01).value
    assert dh <= 0.025
    assert dh <= s.hausdorff_bound


def test_certified_bound_holds_on_every_fixture():
    for fx in standard_fixtures().values():
        s = sample_graph(NoisySampleSpec(fx.graph, 1.0 / (0.02 * fx.diameter),
                                         0.01 * fx.diameter, 2))
        dh = hausdorff_cloud_to_graph(s.cloud, fx.graph, 0.005 * fx.diameter).value
        assert dh <= s.hausdorff_bound


def test_noise_stays_in_ball():
    rng = np.random.default_rng(0)
    v = uniform_ball(rng, 2000, 3, 0.5)
    assert np.linalg.norm(v, axis=1).max() <= 0.5
    assert np.linalg.norm(v, axis=1).max() > 0.45
    assert np.array_equal(uniform_ball(rng, 4, 2, 0.0), np.zeros((4, 2)))


def test_fixture_topology():
    fx = standard_fixtures()
    assert {k: f.betti1 for k, f in fx.items()} == {
        "segment": 0, "circle": 1, "Y": 0, "theta": 2, "figure-eight": 2}
    for f in fx.values():
        assert f.graph.is_connected()


def test_y_fixture_shape():
    fx = y_fixture()
    deg = fx.graph.degrees()
    assert sorted(deg.tolist()) == [1, 1, 1, 3]
    assert fx.diameter == pytest.approx(2.0)
    assert fx.census(1.0) == 3 and fx.census(0.5) == 0


def test_fixture_skeleton_lengths_match_polyline():
    for f in standard_fixtures().values():
        assert f.branch_lengths.sum() == pytest.approx(sum(f.graph.lengths))


def test_sampling_rejects_bad_specs():
    g = segment_fixture().graph
    with pytest.raises(ValueError):
        sample_graph(NoisySampleSpec(g, 0.0, 0.1))
    with pytest.raises(ValueError):
        sample_graph(NoisySampleSpec(g, 1.0, -0.1))
    abstract = EmbeddedMetricGraph(None, [(0, 1)], [1.0], n_vertices=2, embedded=False)
    with pytest.raises(ValueError):
        sample_graph(NoisySampleSpec(abstract, 1.0, 0.1))
