"""Brute-force ground truth for the number of UVD classes in small scenes.

A regular lattice (8-connected in a plane, 26-connected in 3D) is built over
the free space.  Paths from start to goal no longer than ``budget_ratio``
times the lattice shortest path are enumerated shortest first and
partitioned greedily with :func:`uvd_deformable`.

Two enumeration modes are available:

``exhaustive=True``
    literal depth-first enumeration of every simple lattice path under the
    budget.  The count of such paths grows exponentially with the lattice
    size, so this only works on tiny lattices.
default
    label-setting search: partial paths are expanded in order of length and
    a partial path reaching a node is discarded when it is UVD-deformable to
    a shorter partial path already kept at that node.  Its continuations
    are then matched by the continuations of the kept one, so every class
    is still represented by its shortest member.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import TooLarge
from .env import WallWithWindows
from .topology import Path, shorten_path, uvd_deformable

__all__ = ["OracleResult", "Lattice", "build_lattice", "enumerate_classes", "window_classes"]


@dataclass
class OracleResult:
    class_representatives: list
    class_count: int
    lattice_shortest: float
    paths_examined: int

    def shortened(self, env, delta_d):
        return [shorten_path(env, p, delta_d) for p in self.class_representatives]


@dataclass
class Lattice:
    points: np.ndarray
    adjacency: list
    start: int
    goal: int


def _offsets(planar):
    if planar:
        rng = [(dx, dy, 0) for dx in (-1, 0, 1) for dy in (-1, 0, 1)]
    else:
        rng = list(itertools.product((-1, 0, 1), repeat=3))
    return np.array([o for o in rng if any(o)], dtype=int)


def build_lattice(env, q_start, q_goal, pitch, delta_d, plane_z=None, max_nodes=5000):
    """Free lattice nodes plus start/goal, joined by collision-free edges."""
    lo, hi = env.bounds.lo, env.bounds.hi
    planar = plane_z is not None
    counts = np.floor((hi - lo) / pitch + 1e-9).astype(int) + 1
    if planar:
        counts[2] = 1
    total = int(np.prod(counts))
    if total > max_nodes * 4:
        raise TooLarge(f"lattice of {total} cells exceeds the safety cap")
    idx = np.indices(counts).reshape(3, -1).T
    pts = lo + idx * pitch
    if planar:
        pts[:, 2] = plane_z
    free = env.is_free(pts)
    for q in (q_start, q_goal):
        free &= np.linalg.norm(pts - np.asarray(q, dtype=float), axis=1) > 1e-9
    if free.sum() > max_nodes:
        raise TooLarge(f"{int(free.sum())} free lattice nodes exceed max_nodes={max_nodes}")
    node_of = -np.ones(total, dtype=int)
    node_of[np.flatnonzero(free)] = np.arange(int(free.sum()))
    points = pts[free]
    cell = idx[free]

    pairs = []
    for off in _offsets(planar):
        if tuple(off) <= (0, 0, 0):
            continue  # each undirected edge once
        nb = cell + off
        inside = np.all((nb >= 0) & (nb < counts), axis=1)
        flat = np.ravel_multi_index(nb[inside].T, counts)
        tgt = node_of[flat]
        src = np.flatnonzero(inside)
        ok = tgt >= 0
        pairs.append(np.stack([src[ok], tgt[ok]], axis=1))
    pairs = np.concatenate(pairs) if pairs else np.zeros((0, 2), dtype=int)

    # start and goal join every lattice node of their surrounding cell block
    s = len(points)
    extra = np.array([q_start, q_goal], dtype=float)
    points = np.vstack([points, extra])
    links = []
    reach = pitch * (math.sqrt(2.0) if planar else math.sqrt(3.0)) + 1e-9
    for k, q in enumerate(extra):
        d = np.linalg.norm(points[:s] - q, axis=1)
        near = np.flatnonzero(d <= reach)
        links.extend((s + k, int(v)) for v in near)
    if np.linalg.norm(extra[0] - extra[1]) <= reach:
        links.append((s, s + 1))
    if links:
        pairs = np.concatenate([pairs, np.array(links, dtype=int)])
    if len(pairs):
        ok = env.segments_free(points[pairs[:, 0]], points[pairs[:, 1]], delta_d)
        pairs = pairs[ok]
    adjacency = [[] for _ in range(len(points))]
    lengths = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=1) if len(pairs) else []
    for (u, v), w in zip(pairs.tolist(), np.asarray(lengths).tolist()):
        adjacency[u].append((v, w))
        adjacency[v].append((u, w))
    for a in adjacency:
        a.sort()
    return Lattice(points, adjacency, s, s + 1)


def _distances_to(lattice, target):
    dist = [math.inf] * len(lattice.points)
    dist[target] = 0.0
    heap = [(0.0, target)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in lattice.adjacency[u]:
            if d + w < dist[v]:
                dist[v] = d + w
                heapq.heappush(heap, (d + w, v))
    return dist


def _partition(env, paths, delta_d):
    reps = []
    for p in sorted(paths, key=lambda p: p.length):
        if all(not uvd_deformable(env, p, r, delta_d) for r in reps):
            reps.append(p)
    return reps


def _exhaustive(env, lattice, h, budget, delta_d, max_paths):
    pts = lattice.points
    found = []
    on = [False] * len(pts)
    trail = [lattice.start]

    def dfs(u, acc):
        if u == lattice.goal:
            found.append(Path(pts[trail]))
            if len(found) > max_paths:
                raise TooLarge(f"more than {max_paths} simple paths under the budget")
            return
        on[u] = True
        for v, w in lattice.adjacency[u]:
            if not on[v] and acc + w + h[v] <= budget:
                trail.append(v)
                dfs(v, acc + w)
                trail.pop()
        on[u] = False

    dfs(lattice.start, 0.0)
    return _partition(env, found, delta_d), len(found)


def _label_setting(env, lattice, h, budget, delta_d, max_labels):
    pts = lattice.points
    # label: (node, parent label, length)
    labels = []
    at_node = {}
    heap = [(0.0, 0, lattice.start, -1)]
    seq = itertools.count(1)
    popped = 0
    goal_reps = []

    def nodes_of(lab):
        out = []
        while lab >= 0:
            out.append(labels[lab][0])
            lab = labels[lab][1]
        return out[::-1]

    while heap:
        length, _, u, parent = heapq.heappop(heap)
        popped += 1
        if parent >= 0:
            prefix_nodes = nodes_of(parent) + [u]
            prefix = Path(pts[prefix_nodes])
            if any(uvd_deformable(env, prefix, other, delta_d) for other in at_node.get(u, ())):
                continue
        else:
            prefix_nodes = [u]
            prefix = None
        lab = len(labels)
        labels.append((u, parent, length))
        if len(labels) > max_labels:
            raise TooLarge(f"more than {max_labels} labels")
        if prefix is not None:
            at_node.setdefault(u, []).append(prefix)
        if u == lattice.goal:
            goal_reps.append(prefix)
            continue
        visited = set(prefix_nodes)
        for v, w in lattice.adjacency[u]:
            if v not in visited and length + w + h[v] <= budget:
                heapq.heappush(heap, (length + w, next(seq), v, lab))
    return goal_reps, popped


def enumerate_classes(env, q_start, q_goal, grid_pitch, budget_ratio, delta_d,
                      plane_z=None, exhaustive=False, max_nodes=5000,
                      max_paths=200_000, max_labels=200_000):
    """Enumerate UVD classes of start-goal paths within a length budget.

    Returns an :class:`OracleResult` whose representatives are the shortest
    lattice path found in each class, sorted by length.  Raises
    :class:`TooLarge` when a safety cap is exceeded.
    """
    if budget_ratio < 1:
        raise ValueError("budget_ratio must be >= 1")
    lattice = build_lattice(env, q_start, q_goal, grid_pitch, delta_d, plane_z, max_nodes)
    h = _distances_to(lattice, lattice.goal)
    shortest = h[lattice.start]
    if not math.isfinite(shortest):
        return OracleResult([], 0, math.inf, 0)
    budget = budget_ratio * shortest * (1 + 1e-12)
    if exhaustive:
        reps, examined = _exhaustive(env, lattice, h, budget, delta_d, max_paths)
    else:
        reps, examined = _label_setting(env, lattice, h, budget, delta_d, max_labels)
    reps = sorted(reps, key=lambda p: p.length)
    return OracleResult(reps, len(reps), shortest, examined)


def window_classes(env, q_start, q_goal, budget_ratio, delta_d):
    """Class representatives for scenes made of parallel walls with windows.

    Every path from start to goal has to cross each wall through one of its
    windows, so the candidate classes are the window combinations.  Each
    combination yields the polyline through the window centres, which is
    shortened; the results are pruned by ``budget_ratio`` times the shortest
    and deduplicated with :func:`uvd_deformable`, shortest first.
    """
    s = np.asarray(q_start, dtype=float)
    g = np.asarray(q_goal, dtype=float)
    walls = [p for p in env.primitives if isinstance(p, WallWithWindows)]
    if len({w.axis for w in walls}) > 1:
        raise ValueError("walls must share one normal axis")
    walls.sort(key=lambda w: (w.low + w.high) / 2 * np.sign(g[w.axis] - s[w.axis] or 1))
    options = []
    for w in walls:
        u, v = [a for a in range(3) if a != w.axis]
        opts = []
        for u0, v0, u1, v1 in w.windows:
            q = s.copy()
            q[w.axis] = (w.low + w.high) / 2
            q[u] = (u0 + u1) / 2
            # stay in the query plane when the window spans it
            q[v] = s[v] if v0 < s[v] < v1 else (v0 + v1) / 2
            opts.append(q)
        options.append(opts)
    cands = []
    for combo in itertools.product(*options):
        p = Path(np.vstack([s, *combo, g]))
        w = p.waypoints
        if np.all(env.segments_free(w[:-1], w[1:], delta_d)):
            cands.append(shorten_path(env, p, delta_d))
    if not cands:
        return []
    best = min(p.length for p in cands)
    cands = [p for p in cands if p.length <= budget_ratio * best]
    return _partition(env, cands, delta_d)
