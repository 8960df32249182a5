"""Dense informed probabilistic roadmap and single-source shortest paths."""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidQuery, SamplingExhausted, StartGoalDisconnected

__all__ = [
    "Roadmap",
    "sample_informed",
    "in_spheroid",
    "build_prm",
    "dijkstra_shortest",
    "bellman_ford",
]

MAX_REJECTIONS = 1000


@dataclass
class Roadmap:
    """Undirected roadmap; node 0 is the start and node 1 the goal by construction."""

    nodes: np.ndarray
    adjacency: list
    start_id: int = 0
    goal_id: int = 1
    shortest_len: float | None = None

    @property
    def num_nodes(self):
        return len(self.nodes)

    @property
    def num_edges(self):
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self):
        """Sorted ``(u, v, length)`` triples with ``u < v``."""
        return [(u, v, w) for u, nbrs in enumerate(self.adjacency) for v, w in nbrs if u < v]

    @classmethod
    def from_edges(cls, nodes, edges, start_id=0, goal_id=1):
        """Build a roadmap from node coordinates and ``(u, v)`` pairs (Euclidean weights)."""
        nodes = np.asarray(nodes, dtype=float)
        adjacency = [[] for _ in range(len(nodes))]
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v or (min(u, v), max(u, v)) in seen:
                continue
            seen.add((min(u, v), max(u, v)))
            w = float(np.linalg.norm(nodes[u] - nodes[v]))
            adjacency[u].append((v, w))
            adjacency[v].append((u, w))
        for nbrs in adjacency:
            nbrs.sort()
        rm = cls(nodes, adjacency, start_id, goal_id)
        dist, _ = dijkstra_shortest(rm, start_id)
        rm.shortest_len = dist[goal_id] if math.isfinite(dist[goal_id]) else None
        return rm

    def validate(self, env=None, delta_d=None):
        """Raise ``AssertionError`` if a structural invariant is broken."""
        nodes = self.nodes
        lookup = [dict(nbrs) for nbrs in self.adjacency]
        for u, nbrs in enumerate(self.adjacency):
            assert len(lookup[u]) == len(nbrs), f"duplicate edge at node {u}"
            for v, w in nbrs:
                assert u != v, f"self edge at {u}"
                assert lookup[v].get(u) == w, f"edge {u}-{v} not mirrored"
                assert math.isclose(w, float(np.linalg.norm(nodes[u] - nodes[v])), rel_tol=1e-12, abs_tol=1e-12)
        if env is not None:
            assert np.all(env.is_free(nodes)), "roadmap contains a node in collision"
            if delta_d is not None:
                e = self.edges()
                if e:
                    uv = np.array([(u, v) for u, v, _ in e])
                    assert np.all(env.segments_free(nodes[uv[:, 0]], nodes[uv[:, 1]], delta_d))

    def to_json(self):
        return json.dumps(
            {
                "nodes": self.nodes.tolist(),
                "edges": [[u, v] for u, v, _ in self.edges()],
                "start": self.start_id,
                "goal": self.goal_id,
            }
        )


def _basis(axis, planar):
    e1 = axis / np.linalg.norm(axis)
    if planar:
        e2 = np.array([-e1[1], e1[0], 0.0])
        return e1, e2 / np.linalg.norm(e2), None
    helper = np.eye(3)[int(np.argmin(np.abs(e1)))]
    e2 = np.cross(e1, helper)
    e2 /= np.linalg.norm(e2)
    e3 = np.cross(e1, e2)
    return e1, e2, e3


def in_spheroid(points, q_start, q_goal, kappa_e=2.0):
    """Membership in the prolate spheroid with foci start/goal and major axis kappa_e*|goal-start|."""
    p = np.asarray(points, dtype=float).reshape(-1, 3)
    s = np.asarray(q_start, dtype=float)
    g = np.asarray(q_goal, dtype=float)
    major = kappa_e * np.linalg.norm(g - s)
    return np.linalg.norm(p - s, axis=1) + np.linalg.norm(p - g, axis=1) <= major * (1 + 1e-12)


def sample_informed(env, q_start, q_goal, count, rng, kappa_e=2.0, plane_z=None,
                    max_rejections=MAX_REJECTIONS):
    """Draw ``count`` free configurations uniformly from spheroid ∩ bounds.

    With ``plane_z`` set, sampling is restricted to the ellipse in the plane
    ``z = plane_z`` (planar scenes).  Raises :class:`SamplingExhausted` when
    more than ``max_rejections`` consecutive candidates are rejected.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return np.zeros((0, 3))
    if not kappa_e > 1.0:
        raise ValueError("kappa_e must exceed 1")
    s = np.asarray(q_start, dtype=float)
    g = np.asarray(q_goal, dtype=float)
    dist = float(np.linalg.norm(g - s))
    if dist == 0:
        raise InvalidQuery("start and goal coincide", stage="sampling")
    planar = plane_z is not None
    a = 0.5 * kappa_e * dist
    b = math.sqrt(a * a - 0.25 * dist * dist)
    e1, e2, e3 = _basis(g - s, planar)
    center = 0.5 * (s + g)
    if planar:
        center = center.copy()
        center[2] = plane_z
    dim = 2 if planar else 3

    out = []
    have = 0
    carry = 0
    while have < count:
        batch = max(256, 4 * (count - have))
        x = rng.standard_normal((batch, dim))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        x *= rng.random((batch, 1)) ** (1.0 / dim)
        pts = center + a * x[:, :1] * e1 + b * x[:, 1:2] * e2
        if not planar:
            pts = pts + b * x[:, 2:3] * e3
        ok = env.is_free(pts)
        pos = np.flatnonzero(ok)
        gaps = np.diff(np.concatenate(([-1], pos))) - 1
        if len(gaps):
            gaps[0] += carry
        need = count - have
        if np.any(gaps[:need] > max_rejections):
            raise SamplingExhausted(
                f"more than {max_rejections} consecutive rejections after {have} samples"
            )
        take = pos[:need]
        out.append(pts[take])
        have += len(take)
        if have < count:
            carry = (carry if len(pos) == 0 else 0) + batch - 1 - (pos[-1] if len(pos) else -1)
            if carry > max_rejections:
                raise SamplingExhausted(
                    f"more than {max_rejections} consecutive rejections after {have} samples"
                )
    return np.concatenate(out)[:count]


def _knn_pairs(nodes, k):
    n = len(nodes)
    kk = min(k + 1, n)
    tree = cKDTree(nodes)
    dist, idx = tree.query(nodes, k=kk)
    dist = dist.reshape(n, kk)
    idx = idx.reshape(n, kk)
    pairs = []
    for u in range(n):
        cand = [(d, v) for d, v in zip(dist[u], idx[u]) if v != u]
        cand.sort()
        for _, v in cand[:k]:
            pairs.append((min(u, v), max(u, v)))
    if not pairs:
        return np.zeros((0, 2), dtype=int)
    return np.unique(np.array(pairs, dtype=int), axis=0)


def build_prm(env, q_start, q_goal, num_samples, k, delta_d, rng, kappa_e=2.0, plane_z=None):
    """Informed PRM with k-nearest-neighbour straight-line connections.

    Node 0 is ``q_start``, node 1 is ``q_goal``.  Raises
    :class:`StartGoalDisconnected` when the roadmap has no start-goal path.
    """
    s = np.asarray(q_start, dtype=float)
    g = np.asarray(q_goal, dtype=float)
    if np.array_equal(s, g):
        raise InvalidQuery("start and goal coincide")
    for name, q in (("start", s), ("goal", g)):
        if not env.is_free(q)[0]:
            raise InvalidQuery(f"{name} {q.tolist()} is not collision-free")
    if k < 1:
        raise ValueError("k must be >= 1")
    samples = sample_informed(env, s, g, num_samples, rng, kappa_e=kappa_e, plane_z=plane_z)
    nodes = np.vstack([s, g, samples])
    pairs = _knn_pairs(nodes, k)
    adjacency = [[] for _ in range(len(nodes))]
    if len(pairs):
        a = nodes[pairs[:, 0]]
        b = nodes[pairs[:, 1]]
        free = env.segments_free(a, b, delta_d)
        lengths = np.linalg.norm(b - a, axis=1)
        for (u, v), w, ok in zip(pairs.tolist(), lengths.tolist(), free.tolist()):
            if ok:
                adjacency[u].append((v, w))
                adjacency[v].append((u, w))
    for nbrs in adjacency:
        nbrs.sort()
    rm = Roadmap(nodes, adjacency)
    dist, _ = dijkstra_shortest(rm, 0)
    if not math.isfinite(dist[1]):
        raise StartGoalDisconnected(
            f"no start-goal path in roadmap with {len(nodes)} nodes and {rm.num_edges} edges"
        )
    rm.shortest_len = dist[1]
    return rm


def dijkstra_shortest(roadmap, source):
    """Single-source shortest paths; returns ``(dist, parent)`` lists (inf / -1 if unreachable)."""
    n = roadmap.num_nodes
    dist = [math.inf] * n
    parent = [-1] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    adjacency = roadmap.adjacency
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def bellman_ford(roadmap, source):
    """Reference shortest distances (O(VE)) used to cross-check Dijkstra."""
    n = roadmap.num_nodes
    dist = [math.inf] * n
    dist[source] = 0.0
    edges = roadmap.edges()
    for _ in range(max(n - 1, 1)):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist
