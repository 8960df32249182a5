"""End-to-end distinct path planning."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .clustering import iterate_clustering
from .errors import InvalidQuery
from .roadmap import build_prm
from .topology import filter_paths, find_distinct_paths, paths_to_json

__all__ = ["PlannerParams", "PlanResult", "plan", "PRESETS"]


@dataclass(frozen=True)
class PlannerParams:
    num_samples: int = 500
    k: int = 14
    M: int = 9
    kappa_p: float = 1.8
    kappa_s: float = 1.5
    delta_d: float = 0.1
    clearance: float = 0.3
    kappa_e: float = 2.0
    seed: int = 0
    plane_z: float | None = None
    include_max_edges: bool = True

    def __post_init__(self):
        if self.kappa_p < 1 or self.kappa_s < 1:
            raise ValueError("kappa_p and kappa_s must be >= 1")
        if not self.delta_d > 0:
            raise ValueError("delta_d must be positive")
        if self.M < 2 or self.k < 1 or self.num_samples < 0:
            raise ValueError("need M >= 2, k >= 1, num_samples >= 0")
        if self.clearance < 0:
            raise ValueError("clearance must be >= 0")

    def with_(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self):
        return asdict(self)


# Per scene family, as used in the evaluation of the method.
PRESETS = {
    "windows": PlannerParams(500, 14, 9, 1.8, 1.5, 0.1, 0.3),
    "poles": PlannerParams(300, 14, 20, 1.6, 1.2, 0.2, 0.3),
    "building": PlannerParams(1000, 14, 20, 1.8, 1.5, 0.2, 0.2),
}


@dataclass
class PlanResult:
    paths: list
    stats: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self):
        return paths_to_json(self.paths, stats=self.stats)


def plan(env, q_start, q_goal, params, return_graphs=False):
    """Find pairwise non-UVD-deformable paths from ``q_start`` to ``q_goal``.

    ``env.clearance`` is replaced by ``params.clearance``.  Stage timings
    (milliseconds) are reported in ``PlanResult.timings``; everything else
    is a deterministic function of the inputs and ``params.seed``.
    """
    env = env.with_clearance(params.clearance)
    s = np.asarray(q_start, dtype=float)
    g = np.asarray(q_goal, dtype=float)
    if np.array_equal(s, g):
        raise InvalidQuery("start and goal coincide")
    for name, q in (("start", s), ("goal", g)):
        if not env.is_free(q)[0]:
            raise InvalidQuery(f"{name} {q.tolist()} is not collision-free")
    if params.plane_z is not None and not (s[2] == g[2] == params.plane_z):
        raise InvalidQuery("planar query must lie in the plane z = plane_z")
    rng = np.random.default_rng(params.seed)

    t0 = time.perf_counter()
    roadmap = build_prm(env, s, g, params.num_samples, params.k, params.delta_d, rng,
                        kappa_e=params.kappa_e, plane_z=params.plane_z)
    t1 = time.perf_counter()
    forest, graph = iterate_clustering(roadmap, env, params.M, params.delta_d,
                                       include_max=params.include_max_edges)
    t2 = time.perf_counter()
    budget = params.kappa_p * roadmap.shortest_len
    raw = find_distinct_paths(graph, 0, 1, budget)
    t3 = time.perf_counter()
    paths = filter_paths(env, raw, params.kappa_s, params.delta_d)
    t4 = time.perf_counter()

    result = PlanResult(
        paths,
        stats={
            "num_nodes": roadmap.num_nodes,
            "num_edges": roadmap.num_edges,
            "num_centroids": graph.num_vertices,
            "num_sparse_edges": len(graph.edges),
            "num_raw_paths": len(raw),
            "shortest_len": roadmap.shortest_len,
        },
        timings={
            "prm_ms": 1e3 * (t1 - t0),
            "cluster_ms": 1e3 * (t2 - t1),
            "dfs_ms": 1e3 * (t3 - t2),
            "filter_ms": 1e3 * (t4 - t3),
        },
    )
    if return_graphs:
        return result, roadmap, forest, graph
    return result
