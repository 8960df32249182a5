"""Compare planner output with lattice-oracle classes on the small planar scenes.

Run: python demos/oracle_vs_planner.py [seeds]
"""
import sys

from topopaths.planner import plan
from topopaths.scenarios import oracle_references, small_scenes
from topopaths.topology import uvd_deformable

seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 5

for sc in small_scenes():
    p = sc.params
    env = sc.env.with_clearance(p.clearance)
    refs = oracle_references(sc, pitch=0.5)
    found = []
    for seed in range(seeds):
        paths = plan(sc.env, sc.start, sc.goal, p.with_(seed=seed)).paths
        found.append(sum(any(uvd_deformable(env, q, r, p.delta_d) for q in paths) for r in refs))
    print(f"{sc.name:20s} oracle classes {len(refs)}  planner matched per seed {found}")
