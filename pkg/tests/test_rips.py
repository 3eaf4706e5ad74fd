from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reebrecon.geometry import hausdorff_cloud_to_graph
from reebrecon.metric_graph import betti_1, is_delta_dense
from reebrecon.rips import (build_rips, check_connectivity, rips_edges_bruteforce,
                            rips_edges_grid, rips_metric)
from reebrecon.synth import NoisySampleSpec, circle_fixture, sample_graph


def test_single_edge_within_threshold():
    R = build_rips([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]], 1.5)
    assert R.graph.edges.tolist() == [[0, 1]]
    assert R.graph.lengths.tolist() == [1.0]


def test_closed_threshold():
    R = build_rips([[0.0, 0.0], [1.5, 0.0]], 1.5)
    assert R.graph.n_edges == 1


def test_circle_sample_is_connected_with_a_cycle():
    t = 2 * np.pi * np.arange(200) / 200
    S = np.c_[np.cos(t), np.sin(t)]
    R = build_rips(S, 0.2)
    # [DERIVED] oracle: brute-force pair enumeration, component count by union-find
    brute = rips_edges_bruteforce(S, 0.2)
    assert np.array_equal(R.graph.edges, brute)
    assert check_connectivity(R) == (True, 1)
    assert betti_1(R.graph) >= 1


def test_rips_metric_examples():
    R = build_rips([[0.0, 0.0], [0.4, 0.0]], 1.0)
    assert rips_metric(R, 0, 1) == pytest.approx(0.4)
    line = build_rips([[0.0], [1.0], [2.0]], 1.0)
    assert rips_metric(line, 0, 2) == pytest.approx(2.0)
    apart = build_rips([[0.0], [5.0]], 1.0)
    assert math.isinf(rips_metric(apart, 0, 1))
    with pytest.raises(IndexError):
        rips_metric(apart, 0, 2)


def test_connectivity_examples():
    assert check_connectivity(build_rips([[1.0, 2.0]], 0.1)) == (True, 1)
    assert check_connectivity(build_rips([[0.0, 0.0], [10.0, 0.0]], 1.0)) == (False, 2)


def test_noisy_circle_sample_connected():
    fx = circle_fixture(128)
    eta = 0.2
    s = sample_graph(NoisySampleSpec(fx.graph, 1 / 0.02, eta / 8, seed=2))
    assert hausdorff_cloud_to_graph(s.cloud, fx.graph).value < eta / 4
    assert check_connectivity(build_rips(s.cloud, eta))[0]


def test_duplicates_kept_with_zero_length_edge():
    R = build_rips([[0.0, 0.0], [0.0, 0.0], [3.0, 0.0]], 1.0)
    assert R.graph.n_vertices == 3
    assert R.graph.edges.tolist() == [[0, 1]]
    assert R.graph.lengths.tolist() == [0.0]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        build_rips([[0.0, 0.0]], 0.0)
    with pytest.raises(ValueError):
        build_rips(np.zeros((0, 2)), 1.0)
    with pytest.raises(ValueError):
        build_rips([[0.0, 0.0]], 1.0, method="kd")


def test_grid_matches_bruteforce_on_lattice_ties():
    # lattice spacing equal to eta: every axis neighbour sits exactly on the threshold
    g = np.arange(6) * 0.1
    P = np.array([(x, y) for x in g for y in g])
    assert np.array_equal(rips_edges_grid(P, 0.1), rips_edges_bruteforce(P, 0.1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 300), st.integers(1, 3), st.floats(0.01, 0.5), st.integers(0, 2**31))
def test_grid_matches_bruteforce(n, d, eta, seed):
    P = np.random.default_rng(seed).random((n, d))
    assert np.array_equal(rips_edges_grid(P, eta), rips_edges_bruteforce(P, eta))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 120), st.floats(0.05, 0.3), st.floats(0.0, 0.3), st.integers(0, 2**31))
def test_edge_sets_monotone_in_eta(n, eta, extra, seed):
    P = np.random.default_rng(seed).random((n, 2))
    small = {tuple(e) for e in build_rips(P, eta).graph.edges.tolist()}
    large = {tuple(e) for e in build_rips(P, eta + extra).graph.edges.tolist()}
    assert small <= large


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 150), st.floats(0.01, 0.5), st.integers(0, 2**31))
def test_rips_graph_is_eta_dense(n, eta, seed):
    R = build_rips(np.random.default_rng(seed).random((n, 2)), eta)
    assert is_delta_dense(R.graph, eta)
