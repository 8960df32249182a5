import json
import math

import numpy as np
import pytest

from topopaths.clustering import SparseEdge, SparseGraph
from topopaths.env import Bounds, Box, Environment, Sphere
from topopaths.errors import EndpointMismatch
from topopaths.topology import (Path, filter_paths, find_distinct_paths, paths_from_json,
                                paths_to_json, shorten_path, uvd_deformable)

PLANE = Bounds((0, 0, -1), (10, 8, 1))


def P(*pts):
    return Path([[x, y, 0.0] for x, y in pts])


def test_path_basics():
    p = P((0, 0), (3, 0), (3, 0), (3, 4))
    assert len(p) == 3 and p.length == pytest.approx(7.0)
    np.testing.assert_allclose(p.point_at(0), [0, 0, 0])
    np.testing.assert_allclose(p.point_at(1), [3, 4, 0])
    np.testing.assert_allclose(p.point_at(3 / 7), [3, 0, 0])
    np.testing.assert_allclose(p.point_at(0.5), [3, 0.5, 0])
    with pytest.raises(ValueError):
        P((1, 1), (1, 1))


def test_path_json_roundtrip():
    paths = [P((0, 0), (1, 2), (3, 3)), P((0, 0), (3, 3))]
    back = paths_from_json(paths_to_json(paths))
    assert back == paths
    assert json.loads(paths_to_json(paths, extra=1))["extra"] == 1


def test_densify_spacing():
    p = P((0, 0), (1, 0), (1, 2.5))
    d = p.densify(0.3)
    assert np.max(np.linalg.norm(np.diff(d, axis=0), axis=1)) <= 0.3 + 1e-12
    np.testing.assert_array_equal(d[-1], p.goal)


def test_uvd_reflexive():
    env = Environment(PLANE, (Sphere((5, 4, 0), 1),))
    p = P((1, 4), (5, 6), (9, 4))
    assert uvd_deformable(env, p, p, 0.1)


def test_uvd_convex_world():
    env = Environment(PLANE)
    assert uvd_deformable(env, P((1, 1), (9, 7)), P((1, 1), (2, 6), (9, 7)), 0.1)


def test_uvd_opposite_sides_of_sphere():
    env = Environment(PLANE, (Sphere((5, 4, 0), 1),))
    up, down = P((1, 4), (5, 6), (9, 4)), P((1, 4), (5, 2), (9, 4))
    assert not uvd_deformable(env, up, down, 0.1)
    # the middle connecting segment is the one that crosses the sphere
    mid = np.array([up.point_at(0.5), down.point_at(0.5)])
    assert not env.segment_free(mid[0], mid[1], 0.1)


def test_uvd_endpoint_mismatch():
    with pytest.raises(EndpointMismatch):
        uvd_deformable(Environment(PLANE), P((1, 1), (2, 2)), P((1, 1), (2, 3)), 0.1)


def line_graph(lengths, edges):
    out = []
    for (i, j), L in zip(edges, lengths):
        out.append(SparseEdge(i, j, P((i, 0), (j, 0)) if i != j else P((i, 0), (i, 1)), L))
    return SparseGraph(list(range(1 + max(max(e) for e in edges))), out)


def test_dfs_single_edge():
    g = line_graph([2.0], [(0, 1)])
    assert len(find_distinct_paths(g, 0, 1, 2.0)) == 1


def test_dfs_triangle_budget():
    g = SparseGraph([0, 1, 2], [
        SparseEdge(0, 1, P((0, 0), (2, 0)), 1.0),
        SparseEdge(0, 2, P((0, 0), (1, 1)), 1.0),
        SparseEdge(2, 1, P((1, 1), (2, 0)), 1.0),
    ])
    two = find_distinct_paths(g, 0, 1, 2.0)
    assert len(two) == 2
    assert len(find_distinct_paths(g, 0, 1, 1.5)) == 1
    # reversed edge geometry is stitched in the right direction
    via = [p for p in two if len(p) == 3][0]
    np.testing.assert_allclose(via.waypoints[:, :2], [[0, 0], [1, 1], [2, 0]])


def test_shorten_straight():
    env = Environment(PLANE)
    p = P((1, 1), (9, 7))
    out = shorten_path(env, p, 0.1)
    assert len(out) == 2 and out.length == pytest.approx(p.length)


def test_shorten_zigzag():
    env = Environment(PLANE)
    p = P((1, 1), (2, 6), (4, 1), (6, 7), (8, 2), (9, 4))
    out = shorten_path(env, p, 0.1)
    assert len(out) == 2
    assert out.length == pytest.approx(math.hypot(8, 3))


def taut_over_box(s, g, c1, c2, r):
    # start -> tangent on corner circle c1 -> straight -> corner circle c2 -> goal
    d = math.dist(s, c1)
    theta = math.atan2(c1[1] - s[1], c1[0] - s[0]) + math.asin(r / d)
    return 2 * math.sqrt(d * d - r * r) + math.dist(c1, c2) + 2 * r * theta


def test_shorten_right_angle_detour():
    c, dd = 0.2, 0.1
    env = Environment(PLANE, (Box((4, 0, -1), (6, 4, 1)),), clearance=c)
    p = P((2, 2), (2, 6), (8, 6), (8, 2))
    assert np.all(env.segments_free(p.waypoints[:-1], p.waypoints[1:], dd))
    out = shorten_path(env, p, dd)
    taut = taut_over_box((2, 2), (8, 2), (4, 4), (6, 4), c)
    assert out.length <= p.length
    assert taut - 1e-9 <= out.length <= taut + 2 * dd
    w = out.waypoints
    assert np.all(env.segments_free(w[:-1], w[1:], dd))
    np.testing.assert_array_equal(w[0], p.start)
    np.testing.assert_array_equal(w[-1], p.goal)


def test_filter_identical():
    env = Environment(PLANE)
    p = P((1, 1), (9, 7))
    assert len(filter_paths(env, [p, Path(p.waypoints.copy())], 1.5, 0.1)) == 1


def test_filter_length_threshold():
    env = Environment(Bounds((-1, -1, -1), (11, 8, 1)))
    short = P((0, 0), (10, 0))
    long = P((0, 0), (5, math.sqrt(39)), (10, 0))
    assert long.length == pytest.approx(16.0)
    kept = filter_paths(env, [long, short], 1.5, 0.1, shortened=True)
    assert kept == [short]


def test_filter_two_poles():
    env = Environment(PLANE, (Sphere((5, 2.5, 0), 0.8), Sphere((5, 5.5, 0), 0.8)), clearance=0.1)
    mid_a = P((1, 4), (5, 4), (9, 4))
    mid_b = P((1, 4), (4, 3.9), (6, 4.1), (9, 4))
    top = P((1, 4), (3, 6.9), (7, 6.9), (9, 4))
    for p in (mid_a, mid_b, top):
        assert np.all(env.segments_free(p.waypoints[:-1], p.waypoints[1:], 0.1))
    kept = filter_paths(env, [mid_b, top, mid_a], 2.0, 0.1)
    assert len(kept) == 2
    assert kept[0].length == pytest.approx(8.0)
    assert not uvd_deformable(env, kept[0], kept[1], 0.1)
