"""Seeded batch runs of the planner with success-rate statistics."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import PlanningError
from .planner import plan
from .topology import uvd_deformable

__all__ = ["TrialRecord", "BenchReport", "run_trial", "run_bench", "CSV_COLUMNS"]

CSV_COLUMNS = ("trial", "seed", "time_prm_ms", "time_cluster_ms", "time_dfs_ms",
               "time_filter_ms", "n_paths", "lengths", "matched_refs")


@dataclass
class TrialRecord:
    trial: int
    seed: int
    timings: dict
    lengths: list
    matched_refs: list
    error: str | None = None

    @property
    def n_paths(self):
        return len(self.lengths)


@dataclass
class BenchReport:
    scenario: str
    trials: list = field(default_factory=list)
    n_refs: int = 0

    def success_rates(self):
        """Percentage of trials whose output matched each reference path."""
        if not self.trials:
            return []
        hits = np.zeros(self.n_refs)
        for t in self.trials:
            for r in t.matched_refs:
                hits[r] += 1
        return (100.0 * hits / len(self.trials)).tolist()

    def aggregates(self, timings=True):
        counts = np.array([t.n_paths for t in self.trials], dtype=float)
        # n-shortest: mean length of each trial's shortest path, over trials with a path
        shortest = [min(t.lengths) for t in self.trials if t.lengths]
        stage = {}
        for key in (("prm_ms", "cluster_ms", "dfs_ms", "filter_ms", "total_ms") if timings else ()):
            vals = [t.timings[key] for t in self.trials if key in t.timings]
            if vals:
                stage[key] = float(np.mean(vals))
        out = {
            "scenario": self.scenario,
            "trials": len(self.trials),
            "errors": sum(t.error is not None for t in self.trials),
            "success_pct": self.success_rates(),
            "best": int(counts.max()) if counts.size else 0,
            "average": float(counts.mean()) if counts.size else 0.0,
            "stddev": float(counts.std()) if counts.size else 0.0,
            "mean_n_shortest": float(np.mean(shortest)) if shortest else None,
        }
        if timings:
            out["mean_stage_ms"] = stage
        return out

    def table_row(self):
        """One line in the style of a success/quantity table."""
        a = self.aggregates()
        succ = " ".join(f"{s:.0f}" for s in a["success_pct"]) or "-"
        return (f"{a['scenario']}: success {succ} | paths best {a['best']} "
                f"avg {a['average']:.2f}±{a['stddev']:.2f}")

    def to_csv(self, timings=True):
        """CSV text; with ``timings=False`` the time columns are left empty so
        two runs with the same seeds produce identical bytes."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for t in self.trials:
            times = [f"{t.timings.get(k, 0.0):.3f}" if timings else ""
                     for k in ("prm_ms", "cluster_ms", "dfs_ms", "filter_ms")]
            w.writerow([t.trial, t.seed, *times, t.n_paths,
                        ";".join(f"{x:.6f}" for x in t.lengths),
                        ";".join(str(r) for r in t.matched_refs)])
        return buf.getvalue()

    def to_json(self, timings=True):
        return json.dumps(self.aggregates(timings), indent=1)


def run_trial(scenario, seed, trial=0, params=None):
    """Plan once with ``seed`` and score the output against the references."""
    params = (params or scenario.params).with_(seed=seed)
    try:
        res = plan(scenario.env, scenario.start, scenario.goal, params)
    except PlanningError as exc:
        return TrialRecord(trial, seed, {}, [], [], error=str(exc))
    env = scenario.env.with_clearance(params.clearance)
    matched = [i for i, ref in enumerate(scenario.reference_paths)
               if any(uvd_deformable(env, ref, p, params.delta_d) for p in res.paths)]
    timings = dict(res.timings)
    timings["total_ms"] = sum(res.timings.values())
    return TrialRecord(trial, seed, timings, [p.length for p in res.paths], matched)


def run_bench(scenario, trials, seed_base=0, params=None, progress=None):
    """Run ``trials`` independent trials; trial ``i`` uses seed ``seed_base + i``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    report = BenchReport(scenario.name, n_refs=len(scenario.reference_paths))
    for i in range(trials):
        rec = run_trial(scenario, seed_base + i, i, params)
        report.trials.append(rec)
        if progress is not None:
            progress(rec)
    return report
