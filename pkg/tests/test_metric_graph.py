from __future__ import annotations

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reebrecon.metric_graph import (DisconnectedGraphError, EmbeddedMetricGraph, betti_1,
                                    branch_lengths, diameter, edge_length_census, format_graph,
                                    is_delta_dense, parse_graph, read_graph, restricted_distortion,
                                    shortest_path_metric, subdivide, write_graph)
from reebrecon.rips import build_rips
from reebrecon.synth import circle_fixture, segment_fixture, standard_fixtures


def path3():
    return EmbeddedMetricGraph([[0.0], [1.0], [2.0]], [(0, 1), (1, 2)])


def abstract(n, edges, lengths):
    return EmbeddedMetricGraph(None, edges, lengths, n_vertices=n, embedded=False)


@st.composite
def random_graphs(draw, max_vertices=12):
    n = draw(st.integers(1, max_vertices))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=3 * n, unique=True)) if pairs else []
    lengths = draw(st.lists(st.floats(0.1, 10.0), min_size=len(chosen), max_size=len(chosen)))
    return abstract(n, chosen, lengths)


def test_shortest_path_examples():
    G = path3()
    assert shortest_path_metric(G, 1, 1) == 0
    assert shortest_path_metric(G, 0, 2) == pytest.approx(2.0)
    two = EmbeddedMetricGraph([[0.0], [1.0], [5.0], [6.0]], [(0, 1), (2, 3)])
    assert math.isinf(shortest_path_metric(two, 0, 3))


def test_shortest_path_invalid_index():
    with pytest.raises(IndexError):
        shortest_path_metric(path3(), 0, 7)


def test_parallel_edges_use_the_shorter_one():
    G = abstract(2, [(0, 1), (0, 1)], [3.0, 1.5])
    assert shortest_path_metric(G, 0, 1) == 1.5


def test_zero_length_edge_between_duplicates():
    G = EmbeddedMetricGraph([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], [(0, 1), (1, 2)])
    assert G.is_connected()
    assert shortest_path_metric(G, 0, 2) == pytest.approx(1.0)


def test_embedded_lengths_are_validated():
    with pytest.raises(ValueError):
        EmbeddedMetricGraph([[0.0], [1.0]], [(0, 1)], [2.0], embedded=True)
    with pytest.raises(ValueError):
        abstract(1, [(0, 0)], [0.0])


@settings(max_examples=40)
@given(random_graphs())
def test_shortest_path_triangle_inequality(G):
    D = G.distance_matrix
    assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :] + 1e-9)


def test_diameter_examples():
    assert diameter(segment_fixture().graph).value == pytest.approx(1.0)
    square = EmbeddedMetricGraph([[0, 0], [0.25, 0], [0.25, 0.25], [0, 0.25]],
                                 [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert diameter(square).value == pytest.approx(0.5)
    assert diameter(path3()).value == pytest.approx(2.0)


def test_diameter_of_loop_and_theta():
    loop = abstract(1, [(0, 0)], [1.0])
    assert diameter(loop).value == pytest.approx(0.5)
    theta = abstract(2, [(0, 1), (0, 1), (0, 1)], [1.0, 1.0, 1.0])
    # midpoints of two different arcs are 1 apart, and no pair is farther
    assert diameter(theta).value == pytest.approx(1.0)


def test_diameter_disconnected_raises():
    with pytest.raises(DisconnectedGraphError):
        diameter(EmbeddedMetricGraph([[0.0], [1.0], [5.0]], [(0, 1)]))


def test_diameter_envelope_is_an_upper_bound():
    for fx in standard_fixtures().values():
        exact = diameter(fx.graph).value
        env = diameter(fx.graph, method="envelope")
        assert env.method == "envelope"
        assert env.value >= exact - 1e-12


@settings(max_examples=25, deadline=None)
@given(random_graphs(max_vertices=7))
def test_exact_diameter_matches_subdivision_oracle(G):
    if not G.is_connected() or G.n_edges == 0:
        return
    # oracle: lay every edge out as a path of short pieces and take the vertex diameter
    step = 0.02
    n, edges, lengths = G.n_vertices, [], []
    for (i, j), L in zip(G.edges, G.lengths):
        pieces = int(np.ceil(L / step))
        chain = [int(i)] + list(range(n, n + pieces - 1)) + [int(j)]
        n += pieces - 1
        edges += list(zip(chain[:-1], chain[1:]))
        lengths += [L / pieces] * pieces
    fine = abstract(n, edges, lengths)
    oracle = float(fine.distance_matrix.max())
    assert diameter(G).value == pytest.approx(oracle, abs=step)


def test_edge_length_census_examples():
    G = EmbeddedMetricGraph([[0.0], [1.0], [3.0], [6.0]], [(0, 1), (1, 2), (2, 3)])
    assert edge_length_census(G, 2.0) == 2
    assert edge_length_census(G, 0.5) == 0
    assert edge_length_census(G, 3.0) == 3


def test_betti_examples():
    tree = EmbeddedMetricGraph(np.arange(5.0)[:, None], [(0, 1), (1, 2), (1, 3), (3, 4)])
    assert betti_1(tree) == 0
    assert betti_1(circle_fixture(16).graph) == 1
    assert betti_1(abstract(2, [(0, 1)] * 3, [1.0, 2.0, 3.0])) == 2


def _spanning_forest_cycles(G):
    parent = list(range(G.n_vertices))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    extra = 0
    for i, j in G.edges:
        ri, rj = find(int(i)), find(int(j))
        if ri == rj:
            extra += 1
        else:
            parent[ri] = rj
    return extra


@given(random_graphs(max_vertices=50))
def test_betti_matches_spanning_tree_count(G):
    assert betti_1(G) == _spanning_forest_cycles(G)


def test_delta_dense_examples():
    rng = np.random.default_rng(0)
    R = build_rips(rng.random((60, 2)), 0.2)
    assert is_delta_dense(R.graph, 0.2)
    assert not is_delta_dense(EmbeddedMetricGraph([[0.0], [2.0]], [(0, 1)]), 1.0)
    assert is_delta_dense(EmbeddedMetricGraph([[0.0], [2.0]]), 1.0)


def test_subdivide_keeps_vertex_distances():
    fx = standard_fixtures()["theta"]
    fine = subdivide(fx.graph, 0.01)
    n = fx.graph.n_vertices
    assert np.allclose(fine.distance_matrix[:n, :n], fx.graph.distance_matrix)
    assert fine.lengths.max() <= 0.01 + 1e-12


def test_branch_lengths_of_fixtures():
    for fx in standard_fixtures().values():
        assert np.allclose(branch_lengths(fx.graph), np.sort(fx.branch_lengths))


def test_restricted_distortion_segment_is_one():
    G = segment_fixture().graph
    est = restricted_distortion(G, 0.2, 0.5, 0.05)
    assert est.value == pytest.approx(1.0, abs=2 * 0.05)
    assert est.discretization_step == 0.05


def test_restricted_distortion_circle_large_eta():
    # [DERIVED] at eta = 2 every chord is a Rips edge; the antipodal pair gives
    # arc / chord = pi / 2
    G = circle_fixture(128).graph
    est = restricted_distortion(G, 2.0, 0.1, 0.05)
    assert est.value == pytest.approx(math.pi / 2, rel=0.05)
    assert est.value <= math.pi / 2 + 2 * 0.05


def test_restricted_distortion_tends_to_one_as_eta_shrinks():
    G = circle_fixture(128).graph
    values = [restricted_distortion(G, eta, 0.5, eta / 4).value for eta in (1.0, 0.4, 0.2, 0.1)]
    assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))
    assert values[-1] == pytest.approx(1.0, abs=0.01)


def test_restricted_distortion_preconditions():
    G = circle_fixture(32).graph
    with pytest.raises(ValueError):
        restricted_distortion(G, 0.4, 0.5, 0.2)
    with pytest.raises(DisconnectedGraphError):
        restricted_distortion(EmbeddedMetricGraph([[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]], [(0, 1)]),
                              0.4, 0.5, 0.1)


def test_restricted_distortion_no_admissible_pairs():
    est = restricted_distortion(segment_fixture().graph, 0.4, 5.0, 0.1)
    assert est.value == 1.0


def test_text_round_trip_embedded():
    G = circle_fixture(7).graph
    text = format_graph(G)
    again = parse_graph(text)
    assert format_graph(again) == text
    assert np.array_equal(again.positions, G.positions)
    assert np.array_equal(again.lengths, G.lengths)


def test_text_round_trip_abstract_with_annotations(tmp_path):
    G = abstract(3, [(0, 1), (1, 2), (0, 0)], [0.1, 1 / 3, 2.5])
    path = tmp_path / "g.txt"
    write_graph(G, path, ["n 0 0 0.0 4", "# comment"])
    H = read_graph(path)
    assert H.embedded is False
    assert list(H.lengths) == [0.1, 1 / 3, 2.5]
    buf = io.StringIO()
    write_graph(H, buf)
    assert buf.getvalue() == format_graph(G)


def test_text_format_rejects_missing_header():
    with pytest.raises(ValueError):
        parse_graph("v 0 0\n")
