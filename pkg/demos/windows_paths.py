"""Plan distinct paths through the 1-3-1 windows map and draw them.

Run: python demos/windows_paths.py [spec] [seed]
Writes windows_<spec>.svg next to this script.
"""
import os
import sys

from topopaths import generate_scenario, plan
from topopaths.svg import render_svg

spec = sys.argv[1] if len(sys.argv) > 1 else "1-3-1"
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0

sc = generate_scenario(spec)
params = sc.params.with_(seed=seed)
res, roadmap, forest, graph = plan(sc.env, sc.start, sc.goal, params, return_graphs=True)

print(f"{sc.name}: {len(res.paths)} distinct paths from {roadmap.num_nodes} nodes "
      f"and {graph.num_vertices} clusters")
for i, p in enumerate(res.paths):
    print(f"  path {i}: {p.length:.2f} m, {len(p)} waypoints")
print("stage times (ms):", {k: round(v, 1) for k, v in res.timings.items()})

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), f"windows_{spec}.svg")
env = sc.env.with_clearance(params.clearance)
with open(out, "w") as fh:
    fh.write(render_svg(env, res.paths, sc.start, sc.goal, params.plane_z, roadmap, title=sc.name))
print("wrote", out)
