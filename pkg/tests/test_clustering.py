import math

import numpy as np
import pytest

from topopaths.clustering import (ClusterConnection, add_centroid, cluster_graph,
                                  find_cluster_edges, iterate_clustering)
from topopaths.env import Bounds, Box, Environment, Sphere
from topopaths.roadmap import Roadmap, build_prm, dijkstra_shortest
from topopaths.topology import Path

PLANE = Bounds((-5, -5, -1), (10, 10, 1))


def line_graph(n):
    nodes = [[float(i), 0.0, 0.0] for i in range(n)]
    return Roadmap.from_edges(nodes, [(i, i + 1) for i in range(n - 1)], 0, n - 1)


def ring(n=8, radius=2.0):
    ang = 2 * np.pi * np.arange(n) / n
    nodes = np.c_[radius * np.cos(ang), radius * np.sin(ang), np.zeros(n)]
    return Roadmap.from_edges(nodes, [(i, (i + 1) % n) for i in range(n)], 0, n // 2)


def test_path_graph_two_centroids():
    rm = line_graph(5)
    forest, conns = cluster_graph(rm, [0, 4])
    forest.validate()
    assert forest.cluster[:2] == [0, 0] and forest.cluster[3:] == [1, 1]
    # ties go to the cluster whose frontier reaches c first (lower id pops first)
    assert forest.cluster[2] == 0
    (c,) = conns
    assert c.min_cost == c.max_cost == pytest.approx(4.0)
    assert c.min_nodes == c.max_nodes == [0, 1, 2, 3, 4]


def test_single_centroid_is_dijkstra(rng):
    nodes = rng.uniform(0, 1, (40, 3))
    edges = {tuple(sorted(e)) for e in rng.integers(0, 40, (100, 2)) if e[0] != e[1]}
    rm = Roadmap.from_edges(nodes, sorted(edges))
    forest, conns = cluster_graph(rm, [0])
    dist, _ = dijkstra_shortest(rm, 0)
    assert conns == []
    for a, b in zip(forest.value, dist):
        assert (math.isinf(a) and math.isinf(b)) or a == pytest.approx(b)
    forest.validate()


def test_ring_antipodal_centroids():
    rm = ring()
    forest, (c,) = cluster_graph(rm, [0, 4])
    forest.validate()
    assert c.min_cost == pytest.approx(c.max_cost)
    assert c.min_bridge != c.max_bridge
    assert c.pi_min.length == pytest.approx(c.pi_max.length)
    mid_min = set(c.min_nodes) - {0, 4}
    mid_max = set(c.max_nodes) - {0, 4}
    assert mid_min.isdisjoint(mid_max)


def test_add_centroid_convex_world():
    env = Environment(PLANE)
    rm = build_prm(env, np.array([0.0, 0, 0]), np.array([5.0, 0, 0]), 100, 8, 0.1,
                   np.random.default_rng(3), plane_z=0.0)
    forest, conns = cluster_graph(rm, [0, 1])
    node, can_add = add_centroid(env, forest, conns, 0.1)
    assert (node, can_add) == (None, False)


def corridor_scene():
    # two corridors around a box; the lower one is longer
    nodes = [[0, 0, 0], [4, 0, 0], [1, 1, 0], [2, 1, 0], [3, 1, 0], [3, -2, 0], [2, -2, 0], [1, -2, 0]]
    edges = [(0, 2), (2, 3), (3, 4), (4, 1), (1, 5), (5, 6), (6, 7), (7, 0)]
    env = Environment(PLANE, (Box((0.8, -1.5, -1), (3.2, 0.5, 1)),), clearance=0.1)
    return env, Roadmap.from_edges(nodes, edges)


def test_add_centroid_on_longer_corridor():
    env, rm = corridor_scene()
    forest, conns = cluster_graph(rm, [0, 1])
    node, can_add = add_centroid(env, forest, conns, 0.05)
    assert can_add
    assert rm.nodes[node][1] == -2.0


def test_add_centroid_prefers_larger_ratio():
    rm = line_graph(8)
    forest, _ = cluster_graph(rm, [0, 7])
    p = Path([[0, 0, 0], [1, 0, 0]])

    def conn(i, j, ratio, bridge):
        return ClusterConnection(i, j, 1.0, bridge, ratio, bridge, pi_min=p, pi_max=p, deformable=False)

    conns = [conn(0, 1, 1.2, (2, 3)), conn(0, 1, 1.8, (4, 5))]
    node, can_add = add_centroid(Environment(PLANE), forest, conns, 0.1)
    assert can_add and node in (4, 5)


def test_sparse_graph_single_border():
    rm = line_graph(5)
    forest, conns = cluster_graph(rm, [0, 4])
    g = find_cluster_edges(forest, conns, Environment(Bounds((-1, -1, -1), (5, 1, 1))), 0.1)
    assert g.num_vertices == 2 and len(g.edges) == 1
    w = g.edges[0].path.waypoints
    np.testing.assert_array_equal(w[0], rm.nodes[0])
    np.testing.assert_array_equal(w[-1], rm.nodes[4])
    assert len(w) == 5


def test_sparse_graph_ring_around_obstacle():
    rm = ring()
    env = Environment(PLANE, (Sphere((0, 0, 0), 1.0),))
    forest, conns = cluster_graph(rm, [0, 4])
    g = find_cluster_edges(forest, conns, env, 0.05)
    assert len(g.edges) == 2
    assert {e.kind for e in g.edges} == {"min", "max"}
    assert all(e.path.length == pytest.approx(4 * 2 * 2 * np.sin(np.pi / 8)) for e in g.edges)


def test_sparse_graph_deformable_ring():
    rm = ring()
    forest, conns = cluster_graph(rm, [0, 4])
    g = find_cluster_edges(forest, conns, Environment(PLANE), 0.05)
    assert len(g.edges) == 1


def test_iterate_empty_world():
    env = Environment(PLANE)
    rm = build_prm(env, np.array([0.0, 0, 0]), np.array([5.0, 0, 0]), 200, 10, 0.1,
                   np.random.default_rng(0), plane_z=0.0)
    forest, g = iterate_clustering(rm, env, 9, 0.1)
    assert g.num_vertices == 2


def test_iterate_m2_is_single_pass():
    env, rm = corridor_scene()
    forest, g = iterate_clustering(rm, env, 2, 0.05)
    f1, conns = cluster_graph(rm, [0, 1])
    g1 = find_cluster_edges(f1, conns, env, 0.05)
    assert forest.centroids == [0, 1]
    assert [(e.i, e.j, e.kind, e.length) for e in g.edges] == [(e.i, e.j, e.kind, e.length) for e in g1.edges]


def test_iterate_splits_corridors():
    env, rm = corridor_scene()
    forest, g = iterate_clustering(rm, env, 9, 0.05)
    assert 2 < g.num_vertices <= 9
    forest.validate()


def test_iterate_rejects_small_m():
    env, rm = corridor_scene()
    with pytest.raises(ValueError):
        iterate_clustering(rm, env, 1, 0.05)
