"""Distinct path counts on pole grids of growing size.

Run: python demos/poles_counts.py [trials]
"""
import sys

import numpy as np

from topopaths import plan
from topopaths.scenarios import poles_scene

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 10

for count in (4, 9, 16):
    sc = poles_scene(count)
    n = [len(plan(sc.env, sc.start, sc.goal, sc.params.with_(seed=s)).paths) for s in range(trials)]
    print(f"{count:2d} poles: best {max(n)}, average {np.mean(n):.2f} ± {np.std(n):.2f}")
