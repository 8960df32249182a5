"""Paths, uniform visibility deformation and the distinct-path pipeline.

Two paths with shared endpoints are *UVD-deformable* when every straight
segment joining points at equal normalised arc length is collision-free.
The relation is reflexive and symmetric but not transitive, so the greedy
filter below is order dependent: candidates are visited shortest first.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .env import n_samples
from .errors import EndpointMismatch

__all__ = [
    "Path",
    "paths_to_json",
    "paths_from_json",
    "uvd_deformable",
    "find_distinct_paths",
    "shorten_path",
    "filter_paths",
]

ENDPOINT_TOL = 1e-9
# shortened paths keep this fraction of delta_d as extra clearance, so that
# two taut paths around the same corner stay mutually deformable
SHORTEN_MARGIN = 0.5
# forward/backward pass pairs at most
SHORTEN_ROUNDS = 4


class Path:
    """Polyline parameterised by normalised arc length ``s in [0, 1]``."""

    __slots__ = ("waypoints", "cumulative", "length")

    def __init__(self, waypoints):
        w = np.asarray(waypoints, dtype=float).reshape(-1, 3)
        if len(w) > 1:
            keep = np.concatenate(([True], np.any(np.diff(w, axis=0) != 0, axis=1)))
            w = w[keep]
        if len(w) < 2:
            raise ValueError("a path needs at least two distinct waypoints")
        seg = np.linalg.norm(np.diff(w, axis=0), axis=1)
        self.waypoints = w
        self.cumulative = np.concatenate(([0.0], np.cumsum(seg)))
        self.length = float(self.cumulative[-1])

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def goal(self):
        return self.waypoints[-1]

    def __len__(self):
        return len(self.waypoints)

    def __repr__(self):
        return f"Path(n={len(self.waypoints)}, length={self.length:.3f})"

    def __eq__(self, other):
        return isinstance(other, Path) and np.array_equal(self.waypoints, other.waypoints)

    def __hash__(self):
        return hash(self.waypoints.tobytes())

    def point_at(self, s):
        """Point(s) at normalised arc length ``s``; ``point_at(0)`` is the first waypoint."""
        scalar = np.ndim(s) == 0
        arc = np.clip(np.atleast_1d(np.asarray(s, dtype=float)), 0.0, 1.0) * self.length
        cum, w = self.cumulative, self.waypoints
        pts = np.empty((len(arc), 3))
        for j in range(3):
            pts[:, j] = np.interp(arc, cum, w[:, j])
        return pts[0] if scalar else pts

    def reversed(self):
        return Path(self.waypoints[::-1])

    def densify(self, delta_d):
        """Waypoints plus evenly spaced points on every segment (spacing <= delta_d)."""
        w = self.waypoints
        chunks = []
        for a, b in zip(w[:-1], w[1:]):
            n = max(1, math.ceil(float(np.linalg.norm(b - a)) / delta_d))
            t = np.arange(n)[:, None] / n
            chunks.append(a + t * (b - a))
        chunks.append(w[-1:])
        return np.concatenate(chunks)

    def to_dict(self):
        return {"length": self.length, "waypoints": self.waypoints.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["waypoints"])


def paths_to_json(paths, **extra):
    return json.dumps({**extra, "paths": [p.to_dict() for p in paths]}, indent=1)


def paths_from_json(text):
    data = json.loads(text)
    return [Path.from_dict(d) for d in data["paths"]]


def _check_endpoints(p1, p2):
    if (np.max(np.abs(p1.start - p2.start)) > ENDPOINT_TOL
            or np.max(np.abs(p1.goal - p2.goal)) > ENDPOINT_TOL):
        raise EndpointMismatch(
            f"paths do not share endpoints: {p1.start}->{p1.goal} vs {p2.start}->{p2.goal}"
        )


def uvd_deformable(env, p1, p2, delta_d):
    """True iff the two paths lie in the same uniform visibility deformation class.

    Both paths are sampled at ``n + 1`` matched parameters with
    ``n = ceil(max(len1, len2) / delta_d)`` and every connecting segment is
    collision-checked at resolution ``delta_d``.
    """
    if not delta_d > 0:
        raise ValueError("delta_d must be positive")
    _check_endpoints(p1, p2)
    if p1 is p2 or np.array_equal(p1.waypoints, p2.waypoints):
        return True
    # canonical argument order makes the floating-point evaluation symmetric
    if (p2.length, p2.waypoints.tobytes()) < (p1.length, p1.waypoints.tobytes()):
        p1, p2 = p2, p1
    n = max(1, math.ceil(max(p1.length, p2.length) / delta_d))
    s = np.arange(n + 1) / n
    return bool(np.all(env.segments_free(p1.point_at(s), p2.point_at(s), delta_d)))


def find_distinct_paths(graph, start, goal, budget, max_paths=None):
    """All simple vertex paths start -> goal whose length does not exceed ``budget``.

    ``graph`` needs ``num_vertices`` and ``edges`` (objects with ``i``, ``j``,
    ``path`` and ``length``).  Parallel edges are explored independently.
    Output order is deterministic: neighbours by ascending vertex id, then
    edge id.  Each returned :class:`Path` concatenates the edge polylines.
    """
    adj = [[] for _ in range(graph.num_vertices)]
    for eid, e in enumerate(graph.edges):
        adj[e.i].append((e.j, eid))
        if e.j != e.i:
            adj[e.j].append((e.i, eid))
    for lst in adj:
        lst.sort()

    results = []
    on_path = [False] * graph.num_vertices
    trail = []  # (edge id, traversed forward?)

    def emit():
        pieces = []
        for eid, forward in trail:
            w = graph.edges[eid].path.waypoints
            w = w if forward else w[::-1]
            pieces.append(w if not pieces else w[1:])
        results.append(Path(np.concatenate(pieces)))

    def dfs(u, acc):
        if max_paths is not None and len(results) >= max_paths:
            return
        if u == goal:
            emit()
            return
        on_path[u] = True
        for v, eid in adj[u]:
            if on_path[v]:
                continue
            e = graph.edges[eid]
            nxt = acc + e.length
            if nxt > budget:
                continue
            trail.append((eid, e.i == u))
            dfs(v, nxt)
            trail.pop()
        on_path[u] = False

    if start == goal:
        return results
    dfs(start, 0.0)
    return results


def _first_blocked(env, anchor, pts, lo, delta_d, chunk=64):
    """Index of the first sample in ``pts[lo:]`` not visible from ``anchor`` (None if all are)."""
    last = len(pts) - 1
    while lo <= last:
        hi = min(last, lo + chunk - 1)
        free = env.segments_free(np.repeat(anchor[None], hi - lo + 1, axis=0), pts[lo:hi + 1], delta_d)
        blocked = np.flatnonzero(~free)
        if len(blocked):
            return lo + int(blocked[0])
        lo = hi + 1
    return None


def _sdf_gradient(env, q, h=1e-4):
    offs = np.vstack([np.eye(3) * h, -np.eye(3) * h])
    d = env.sdf(q + offs)
    return (d[:3] - d[3:]) / (2 * h)


def _pushed_waypoint(env, anchor, target, delta_d, max_steps=8):
    """Collision point of ``anchor -> target`` pushed out of the obstacle.

    The first colliding sample is moved across the segment direction along
    the distance gradient until it is free and visible from ``anchor`` and
    from ``target``.  Returns None when no such point is found.
    """
    d = target - anchor
    n = n_samples(float(np.linalg.norm(d)), delta_d)
    t = np.arange(n) / max(n - 1, 1)
    pts = anchor + t[:, None] * d
    bad = np.flatnonzero(~env.is_free(pts))
    if not len(bad):
        return None
    c = pts[bad[0]]
    g = _sdf_gradient(env, c)
    u = d / np.linalg.norm(d)
    g = g - g.dot(u) * u
    norm = np.linalg.norm(g)
    if not norm > 1e-9:
        return None
    g /= norm
    for k in range(1, max_steps + 1):
        q = c + k * delta_d * g
        if not env.is_free(q)[0]:
            continue
        ok = env.segments_free(np.array([anchor, q]), np.array([q, target]), delta_d)
        if ok.all():
            return q
    return None


def _greedy_pass(env, pts, delta_d):
    # anchors may leave the input polyline when a blocked shortcut is pushed clear
    out = [pts[0]]
    anchor, idx = pts[0], 1
    on_path = 0  # index of the anchor in pts, -1 when pushed off the polyline
    last = len(pts) - 1
    while True:
        j = _first_blocked(env, anchor, pts, idx, delta_d)
        if j is None:
            out.append(pts[last])
            break
        q = _pushed_waypoint(env, anchor, pts[j], delta_d)
        if q is not None:
            anchor, idx, on_path = q, j, -1
        elif j - 1 > on_path or on_path < 0:
            anchor, idx, on_path = pts[j - 1], j, j - 1
        else:
            # the input segment itself: free at the original clearance
            anchor, idx, on_path = pts[j], j + 1, j
        out.append(anchor)
    return np.array(out)


def _fan_free(env, a, b, c, delta_d):
    # every segment from a to a sample of b -> c is free: abc sweeps no obstacle
    n = n_samples(float(np.linalg.norm(c - b)), delta_d)
    t = np.arange(n) / max(n - 1, 1)
    pts = b + t[:, None] * (c - b)
    return bool(env.segments_free(np.repeat(a[None], n, axis=0), pts, delta_d).all())


def _prune_vertices(env, w, delta_d):
    keep = [w[0]]
    for i in range(1, len(w) - 1):
        if not _fan_free(env, keep[-1], w[i], w[i + 1], delta_d):
            keep.append(w[i])
    keep.append(w[-1])
    return np.array(keep)


def _slide_vertices(env, w, delta_d):
    """Drop removable vertices, then move the rest toward their neighbours' midpoint.

    A vertex is dropped when the triangle it spans with the previous kept
    vertex and its successor is free.  A remaining vertex advances in
    steps of ``delta_d / 2`` and stops before the first position where it
    or one of its two segments collides, so it never passes through an
    obstacle.
    """
    w = _prune_vertices(env, w, delta_d)
    for i in range(1, len(w) - 1):
        v = w[i]
        target = 0.5 * (w[i - 1] + w[i + 1])
        dist = float(np.linalg.norm(target - v))
        steps = int(math.ceil(dist / (0.5 * delta_d)))
        if steps == 0:
            continue
        cand = v + (np.arange(1, steps + 1) / steps)[:, None] * (target - v)
        ok = env.is_free(cand)
        ok &= env.segments_free(np.repeat(w[i - 1][None], steps, axis=0), cand, delta_d)
        ok &= env.segments_free(cand, np.repeat(w[i + 1][None], steps, axis=0), delta_d)
        bad = np.flatnonzero(~ok)
        stop = steps if not len(bad) else int(bad[0])
        if stop > 0:
            w[i] = cand[stop - 1]
    return w


def _offset_vertices(env, w, margin, delta_d):
    # lift vertices that touch the clearance boundary a little further out
    w = w.copy()
    for i in range(1, len(w) - 1):
        g = _sdf_gradient(env, w[i])
        norm = np.linalg.norm(g)
        if not norm > 1e-9:
            continue
        q = w[i] + margin * g / norm
        if (env.is_free(q)[0]
                and env.segments_free(np.array([w[i - 1], q]), np.array([q, w[i + 1]]), delta_d).all()):
            w[i] = q
    return w


def shorten_path(env, p, delta_d, rounds=SHORTEN_ROUNDS):
    """Forward then backward greedy visibility shortcutting.

    The path is densified at ``delta_d``; from each anchor the samples are
    visited in order until the first one that is not visible.  The first
    collision point of that blocked shortcut, pushed clear of the obstacle
    along the distance gradient, becomes the next anchor (or the last
    visible sample when pushing fails).  Stopping at the first blocked
    sample keeps the result close to the input instead of jumping through
    another opening.  The backward pass repeats this from the goal end on
    the forward result, then every vertex slides toward the midpoint of its
    neighbours while it stays free (see :func:`_slide_vertices`).  The
    sequence is repeated up to ``rounds`` times while the length still
    drops by more than ``delta_d``.  Finally interior vertices are moved
    ``SHORTEN_MARGIN * delta_d`` away from the nearest obstacle where that
    keeps the path free.  Endpoints are preserved and length never
    increases.
    """
    best = p
    for _ in range(max(1, rounds)):
        fwd = _greedy_pass(env, best.densify(delta_d), delta_d)
        back = _greedy_pass(env, Path(fwd).densify(delta_d)[::-1], delta_d)[::-1]
        out = Path(_slide_vertices(env, Path(back).waypoints, delta_d))
        if out.length > best.length - delta_d:
            if out.length < best.length:
                best = out
            break
        best = out
    if best is p:
        return p
    lifted = Path(_offset_vertices(env, best.waypoints, SHORTEN_MARGIN * delta_d, delta_d))
    return lifted if lifted.length <= p.length else best


def filter_paths(env, paths, kappa_s, delta_d, shortened=False):
    """Shorten, prune by length ratio, then keep one path per UVD class.

    Returns the surviving paths sorted by length.  With ``shortened=True``
    the inputs are taken as already shortened.
    """
    if kappa_s < 1:
        raise ValueError("kappa_s must be >= 1")
    if not paths:
        return []
    short = list(paths) if shortened else [shorten_path(env, p, delta_d) for p in paths]
    best = min(p.length for p in short)
    survivors = [p for p in short if p.length <= kappa_s * best]
    order = sorted(range(len(survivors)), key=lambda i: (survivors[i].length, i))
    kept = []
    for i in order:
        cand = survivors[i]
        if all(not uvd_deformable(env, cand, k, delta_d) for k in kept):
            kept.append(cand)
    return kept
