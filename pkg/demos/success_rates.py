"""Small seeded benchmark over a few windows maps, printed as a success table.

Run: python demos/success_rates.py [trials]
"""
import sys

from topopaths.bench import run_bench
from topopaths.scenarios import generate_scenario

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20

for spec in ("0-2-0", "1-2-1", "1-3-0", "1-3-1"):
    rep = run_bench(generate_scenario(spec), trials)
    agg = rep.aggregates()
    print(f"{rep.table_row():60s} mean {agg['mean_stage_ms']['total_ms']:.0f} ms/trial")
