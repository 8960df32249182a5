import math

import numpy as np
import pytest

from topopaths.env import Bounds, Environment, Sphere, WallWithWindows
from topopaths.errors import InvalidQuery, SamplingExhausted, StartGoalDisconnected
from topopaths.roadmap import (Roadmap, bellman_ford, build_prm, dijkstra_shortest, in_spheroid,
                               sample_informed)

S = np.array([1.0, 5.0, 5.0])
G = np.array([9.0, 5.0, 5.0])


def test_sample_count_and_region(empty_env, rng):
    pts = sample_informed(empty_env, S, G, 100, rng)
    assert pts.shape == (100, 3)
    assert np.all(in_spheroid(pts, S, G)) and np.all(empty_env.bounds.contains(pts))


def test_sample_zero(empty_env, rng):
    assert len(sample_informed(empty_env, S, G, 0, rng)) == 0


def test_samples_avoid_obstacle(sphere_env, rng):
    pts = sample_informed(sphere_env, S, G, 10_000, rng)
    assert np.all(sphere_env.is_free(pts))
    assert np.all(in_spheroid(pts, S, G))


def test_planar_samples_stay_in_plane(empty_env, rng):
    pts = sample_informed(empty_env, S, G, 200, rng, plane_z=5.0)
    assert np.all(pts[:, 2] == 5.0)


def test_sampling_exhausted():
    # the whole spheroid lies inside the obstacle
    env = Environment(Bounds((0, 0, 0), (10, 10, 10)), (Sphere((5, 5, 5), 4.0),))
    with pytest.raises(SamplingExhausted):
        sample_informed(env, np.array([4.0, 5, 5]), np.array([6.0, 5, 5]), 5,
                        np.random.default_rng(0))


def test_prm_trivial(empty_env, rng):
    rm = build_prm(empty_env, S, G, 0, 1, 0.1, rng)
    assert rm.num_nodes == 2 and rm.num_edges == 1
    assert rm.shortest_len == pytest.approx(8.0)


def test_prm_disconnected(rng):
    wall = WallWithWindows(0, 4.9, 5.1, (0, 0), (10, 10))
    env = Environment(Bounds((0, 0, 0), (10, 10, 10)), (wall,), clearance=0.1)
    with pytest.raises(StartGoalDisconnected):
        build_prm(env, S, G, 200, 10, 0.1, rng)


def test_prm_invalid_query(sphere_env, rng):
    with pytest.raises(InvalidQuery):
        build_prm(sphere_env, np.array([5.0, 5, 5]), G, 10, 5, 0.1, rng)


@pytest.mark.parametrize("plane_z", [None, 5.0])
def test_prm_near_straight_line(empty_env, plane_z):
    # a single sparse roadmap may zig-zag; the typical one is within 5 %
    ratios = [build_prm(empty_env, S, G, 50, 14, 0.1, np.random.default_rng(seed),
                        plane_z=plane_z).shortest_len / 8.0 for seed in range(20)]
    assert min(ratios) >= 1.0 - 1e-12
    assert np.median(ratios) <= 1.05


def test_prm_invariants(sphere_env, rng):
    env = sphere_env.with_clearance(0.2)
    rm = build_prm(env, S, G, 300, 10, 0.05, rng)
    rm.validate(env, 0.05)


def test_dijkstra_examples():
    rm = Roadmap.from_edges([[0, 0, 0], [1, 0, 0], [2, 0, 0]], [(0, 1), (1, 2)], 0, 2)
    dist, parent = dijkstra_shortest(rm, 0)
    assert dist == [0.0, 1.0, 2.0] and parent == [-1, 0, 1]
    single = Roadmap.from_edges([[0, 0, 0]], [], 0, 0)
    assert dijkstra_shortest(single, 0) == ([0.0], [-1])


def test_dijkstra_matches_bellman_ford(rng):
    for _ in range(10):
        nodes = rng.uniform(0, 1, (30, 3))
        edges = {tuple(sorted(e)) for e in rng.integers(0, 30, (70, 2)) if e[0] != e[1]}
        rm = Roadmap.from_edges(nodes, sorted(edges))
        d1, _ = dijkstra_shortest(rm, 0)
        d2 = bellman_ford(rm, 0)
        for a, b in zip(d1, d2):
            assert (math.isinf(a) and math.isinf(b)) or a == pytest.approx(b)
