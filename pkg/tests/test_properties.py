import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from topopaths.env import Bounds, Environment, Sphere, segment_point_distance
from topopaths.planner import PlannerParams
from topopaths.topology import Path, filter_paths, shorten_path, uvd_deformable

PLANE = Bounds((0, 0, -1), (10, 8, 1))
coord = st.tuples(st.floats(0.2, 9.8), st.floats(0.2, 7.8))
polyline = st.lists(coord, min_size=2, max_size=6, unique=True)


def as_path(pts):
    return Path([[x, y, 0.0] for x, y in pts])


@given(polyline, st.floats(0, 1))
def test_point_at_is_arc_length_proportional(pts, s):
    p = as_path(pts)
    q = p.point_at(s)
    # distance along the polyline to q equals s * length
    seg = np.searchsorted(p.cumulative, s * p.length, side="right") - 1
    seg = min(seg, len(p) - 2)
    along = p.cumulative[seg] + np.linalg.norm(q - p.waypoints[seg])
    assert abs(along - s * p.length) <= 1e-9 * max(1.0, p.length)


@given(polyline)
def test_point_at_endpoints(pts):
    p = as_path(pts)
    np.testing.assert_array_equal(p.point_at(0.0), p.start)
    np.testing.assert_allclose(p.point_at(1.0), p.goal)


@settings(max_examples=60, deadline=None)
@given(st.lists(coord, min_size=0, max_size=4), st.floats(0.3, 1.2), coord)
def test_shorten_keeps_feasibility(mids, radius, centre):
    env = Environment(PLANE, (Sphere((*centre, 0.0), radius),), clearance=0.1)
    p = as_path([(0.2, 4.0), *mids, (9.8, 4.0)])
    w = p.waypoints
    if not np.all(env.segments_free(w[:-1], w[1:], 0.1)):
        return
    out = shorten_path(env, p, 0.1)
    assert out.length <= p.length + 1e-9
    np.testing.assert_array_equal(out.start, p.start)
    np.testing.assert_array_equal(out.goal, p.goal)
    v = out.waypoints
    assert np.all(env.segments_free(v[:-1], v[1:], 0.1))


@settings(max_examples=60, deadline=None)
@given(st.lists(polyline, min_size=1, max_size=4), st.floats(1.0, 2.0))
def test_filter_idempotent(lines, kappa):
    env = Environment(PLANE, (Sphere((5, 4, 0), 0.8),))
    paths = [as_path([(0.2, 4.0), *pts, (9.8, 4.0)]) for pts in lines]
    once = filter_paths(env, paths, kappa, 0.2, shortened=True)
    assert filter_paths(env, once, kappa, 0.2, shortened=True) == once


@settings(max_examples=100, deadline=None)
@given(polyline, polyline, st.sampled_from([0.05, 0.2, 0.5]))
def test_uvd_symmetric(a, b, dd):
    env = Environment(PLANE, (Sphere((5, 4, 0), 1.0),))
    p = as_path([(0.2, 4.0), *a, (9.8, 4.0)])
    q = as_path([(0.2, 4.0), *b, (9.8, 4.0)])
    assert uvd_deformable(env, p, q, dd) == uvd_deformable(env, q, p, dd)


@given(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)), st.floats(0.1, 3))
def test_sphere_sdf_exact(q, r):
    env = Environment(Bounds((-6, -6, -6), (6, 6, 6)), (Sphere((0, 0, 0), r),))
    assert abs(env.sdf(np.array(q))[0] - (np.linalg.norm(q) - r)) <= 1e-12


@given(st.tuples(*[st.floats(-3, 3)] * 3), st.tuples(*[st.floats(-3, 3)] * 3))
def test_segment_free_vs_closed_form(a, b):
    env = Environment(Bounds((-4, -4, -4), (4, 4, 4)), (Sphere((0, 0, 0), 1.0),), clearance=0.1)
    exact = segment_point_distance(a, b, (0, 0, 0)) > 1.1
    got = env.segment_free(np.array(a), np.array(b), 0.05)
    # sphere marching is conservative and exact up to tolerance
    if abs(segment_point_distance(a, b, (0, 0, 0)) - 1.1) > 1e-6:
        assert got == exact


@given(st.integers(0, 2**63 - 1), st.floats(1, 3), st.integers(2, 40))
def test_params_roundtrip(seed, kappa, m):
    p = PlannerParams(seed=seed, kappa_p=kappa, M=m)
    assert PlannerParams(**p.to_dict()) == p
