"""Shortest-path-forest clustering of a dense roadmap and sparse graph assembly.

Every roadmap node is attached to the centroid with the cheapest path to
it (a multi-source Dijkstra).  For each pair of neighbouring clusters the
cheapest and the most expensive centroid-to-centroid path crossing their
border are kept.  When these two paths are not UVD-deformable the border
hides a second corridor and a new centroid is placed on the expensive one.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .topology import Path, uvd_deformable

__all__ = [
    "ClusterForest",
    "ClusterConnection",
    "SparseEdge",
    "SparseGraph",
    "cluster_graph",
    "add_centroid",
    "find_cluster_edges",
    "iterate_clustering",
]


@dataclass
class ClusterForest:
    roadmap: object
    centroids: list
    value: list
    cluster: list
    parent: list

    @property
    def forest_edges(self):
        return [(p, v) for v, p in enumerate(self.parent) if p >= 0]

    def chain(self, node):
        """Nodes from ``node`` up to the root of its tree (inclusive)."""
        out = [node]
        while self.parent[out[-1]] >= 0:
            out.append(self.parent[out[-1]])
            if len(out) > len(self.parent):
                raise RuntimeError("cycle in cluster forest")
        return out

    def validate(self, tol=1e-9):
        n = len(self.value)
        weights = [dict(a) for a in self.roadmap.adjacency]
        for cid, c in enumerate(self.centroids):
            assert self.value[c] == 0.0 and self.cluster[c] == cid and self.parent[c] == -1
        for v in range(n):
            p = self.parent[v]
            if self.cluster[v] < 0:
                assert math.isinf(self.value[v]) and p == -1
                continue
            assert math.isfinite(self.value[v])
            if p >= 0:
                assert v in weights[p], f"parent link {p}->{v} is not a roadmap edge"
                assert self.cluster[p] == self.cluster[v]
                expect = self.value[p] + weights[p][v]
                assert abs(self.value[v] - expect) <= tol * max(1.0, expect)
            root = self.chain(v)[-1]
            assert root == self.centroids[self.cluster[v]], f"node {v} roots at {root}"

    def to_dict(self):
        return {
            "centroids": list(self.centroids),
            "cluster": list(self.cluster),
            "parent": list(self.parent),
        }


@dataclass
class ClusterConnection:
    """Cheapest and most expensive recorded paths between clusters ``i < j``."""

    i: int
    j: int
    min_cost: float
    min_bridge: tuple
    max_cost: float
    max_bridge: tuple
    min_nodes: list = field(default_factory=list)
    max_nodes: list = field(default_factory=list)
    pi_min: Path | None = None
    pi_max: Path | None = None
    deformable: bool | None = None
    bridges: list = field(default_factory=list, repr=False)

    @property
    def ratio(self):
        return self.max_cost / self.min_cost if self.min_cost > 0 else math.inf


@dataclass
class SparseEdge:
    i: int
    j: int
    path: Path
    length: float
    kind: str = "min"


@dataclass
class SparseGraph:
    vertices: list
    edges: list

    @property
    def num_vertices(self):
        return len(self.vertices)

    def to_dict(self):
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"i": e.i, "j": e.j, "kind": e.kind, "length": e.length,
                 "waypoints": e.path.waypoints.tolist()}
                for e in self.edges
            ],
        }


def _bridge_nodes(forest, v, n):
    return forest.chain(v)[::-1] + forest.chain(n)


def cluster_graph(roadmap, centroids):
    """Grow a shortest-path forest from ``centroids``; collect border connections.

    Returns ``(forest, connections)``; connections are sorted by cluster pair.
    Ties keep the incumbent label (strict ``<``); heap ties pop the lower
    node id first.  A border edge is scored once, when its second endpoint
    is settled, so both endpoint costs are final.
    """
    if not centroids:
        raise ValueError("need at least one centroid")
    if len(set(centroids)) != len(centroids):
        raise ValueError("centroids must be distinct")
    n = roadmap.num_nodes
    value = [math.inf] * n
    cluster = [-1] * n
    parent = [-1] * n
    settled = [False] * n
    for cid, c in enumerate(centroids):
        if not 0 <= c < n:
            raise ValueError(f"centroid {c} is not a node")
        value[c] = 0.0
        cluster[c] = cid
    heap = [(0.0, c) for c in centroids]
    heapq.heapify(heap)
    adjacency = roadmap.adjacency
    best = {}

    while heap:
        d, v = heapq.heappop(heap)
        if settled[v] or d > value[v]:
            continue
        settled[v] = True
        cv = cluster[v]
        for u, w in adjacency[v]:
            nd = d + w
            if nd < value[u]:
                value[u] = nd
                cluster[u] = cv
                parent[u] = v
                heapq.heappush(heap, (nd, u))
            elif settled[u] and cluster[u] != cv:
                cost = nd + value[u]
                if cv < cluster[u]:
                    key, bridge = (cv, cluster[u]), (v, u)
                else:
                    key, bridge = (cluster[u], cv), (u, v)
                rec = best.get(key)
                if rec is None:
                    best[key] = [cost, bridge, cost, bridge, [(cost, bridge)]]
                else:
                    rec[4].append((cost, bridge))
                    if cost < rec[0]:
                        rec[0], rec[1] = cost, bridge
                    if cost >= rec[2]:
                        rec[2], rec[3] = cost, bridge

    forest = ClusterForest(roadmap, list(centroids), value, cluster, parent)
    nodes = roadmap.nodes
    connections = []
    for (i, j), (cmin, bmin, cmax, bmax, bridges) in sorted(best.items()):
        mn = _bridge_nodes(forest, *bmin)
        mx = _bridge_nodes(forest, *bmax)
        connections.append(ClusterConnection(
            i, j, cmin, bmin, cmax, bmax, mn, mx,
            Path(nodes[mn]), Path(nodes[mx]), bridges=bridges,
        ))
    return forest, connections


def _ensure_deformable(env, conn, delta_d, forest=None):
    """Decide ``conn.deformable``; with ``forest`` given, look past a deformable longest path.

    The longest recorded path often runs through the same corridor as the
    shortest one while a second corridor carries slightly cheaper border
    edges.  Remaining bridges are then tried from the most expensive down
    and the first one not deformable to the shortest path replaces the max
    connection.
    """
    if conn.deformable is not None:
        return conn.deformable
    if conn.min_bridge == conn.max_bridge:
        conn.deformable = True
    else:
        conn.deformable = uvd_deformable(env, conn.pi_min, conn.pi_max, delta_d)
    if conn.deformable and forest is not None and len(conn.bridges) > 2:
        nodes = forest.roadmap.nodes
        skip = {conn.min_bridge, conn.max_bridge}
        for cost, bridge in sorted(conn.bridges, key=lambda cb: (-cb[0], cb[1])):
            if bridge in skip:
                continue
            chain = _bridge_nodes(forest, *bridge)
            path = Path(nodes[chain])
            if not uvd_deformable(env, conn.pi_min, path, delta_d):
                conn.max_cost, conn.max_bridge, conn.max_nodes, conn.pi_max = cost, bridge, chain, path
                conn.deformable = False
                break
    return conn.deformable


def add_centroid(env, forest, connections, delta_d):
    """Pick a new centroid on the most stretched non-deformable connection.

    Returns ``(node_id, can_add)``.  ``can_add`` is false when every
    connection is deformable (or no non-deformable connection offers a
    node that is not already a centroid), in which case ``node_id`` is None.
    """
    candidates = []
    for conn in connections:
        if not _ensure_deformable(env, conn, delta_d, forest):
            candidates.append(conn)
    candidates.sort(key=lambda c: (-c.ratio, c.i, c.j))
    taken = set(forest.centroids)
    for conn in candidates:
        a, b = conn.max_bridge
        first, second = sorted((a, b), key=lambda v: (-forest.value[v], v))
        for node in (first, second):
            if node not in taken:
                return node, True
    return None, False


def find_cluster_edges(forest, connections, env=None, delta_d=None, include_max=True):
    """Sparse graph over the centroids.

    Each neighbouring cluster pair contributes its cheapest connection; the
    most expensive one is added as a parallel edge when it is not
    UVD-deformable to the cheapest (requires ``env`` and ``delta_d`` unless
    already decided during centroid selection).
    """
    edges = []
    for conn in connections:
        edges.append(SparseEdge(conn.i, conn.j, conn.pi_min, conn.pi_min.length, "min"))
        if not include_max or conn.min_bridge == conn.max_bridge:
            continue
        if conn.deformable is None:
            if env is None or delta_d is None:
                raise ValueError("env and delta_d are needed to test max connections")
            _ensure_deformable(env, conn, delta_d, forest)
        if not conn.deformable:
            edges.append(SparseEdge(conn.i, conn.j, conn.pi_max, conn.pi_max.length, "max"))
    return SparseGraph(list(forest.centroids), edges)


def iterate_clustering(roadmap, env, M, delta_d, include_max=True):
    """Add centroids until all connections are deformable or ``M`` clusters exist.

    Starts from the start and goal nodes.  The roadmap is re-clustered
    after the last centroid is added so the sparse graph always reflects
    the final centroid set.  Returns ``(forest, sparse_graph)``.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    centroids = [roadmap.start_id, roadmap.goal_id]
    forest, connections = cluster_graph(roadmap, centroids)
    while len(centroids) < M:
        node, can_add = add_centroid(env, forest, connections, delta_d)
        if not can_add:
            break
        centroids.append(node)
        forest, connections = cluster_graph(roadmap, centroids)
    graph = find_cluster_edges(forest, connections, env, delta_d, include_max)
    return forest, graph


def dump_clustering(forest, graph):
    return json.dumps({"forest": forest.to_dict(), "sparse": graph.to_dict()})
