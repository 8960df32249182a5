"""Command line entry point: ``topopaths gen|plan|bench|oracle``."""
from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import run_bench
from .errors import BadSpec, PlanningError, TooLarge
from .oracle import enumerate_classes
from .planner import plan
from .scenarios import generate_scenario, load_scenario, save_scenario
from .svg import render_svg
from .topology import paths_to_json

OVERRIDES = (("samples", "num_samples", int), ("k", "k", int), ("m", "M", int),
             ("kappa_p", "kappa_p", float), ("kappa_s", "kappa_s", float),
             ("delta_d", "delta_d", float), ("clearance", "clearance", float))


def _scenario_args(p, refs=True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="scenario JSON file")
    src.add_argument("--family", help="generator spec, e.g. 1-3-1, poles:16, building, small:disk")
    p.set_defaults(no_refs=not refs)
    if refs:
        p.add_argument("--no-refs", action="store_true",
                       help="skip reference path generation for --family windows scenes")


def _param_args(p):
    p.add_argument("--seed", type=int, default=None)
    for flag, _, typ in OVERRIDES:
        p.add_argument("--" + flag.replace("_", "-"), dest=flag, type=typ, default=None)


def _load(args, refs=True):
    if args.scenario:
        return load_scenario(args.scenario)
    return generate_scenario(args.family, with_references=refs and not args.no_refs)


def _params(args, scenario):
    changes = {field: getattr(args, flag) for flag, field, _ in OVERRIDES}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return scenario.params.with_(**changes)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def cmd_gen(args):
    sc = generate_scenario(args.family)
    if args.out in (None, "-"):
        json.dump(sc.to_dict(), sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        save_scenario(sc, args.out)
        print(f"{sc.name}: {len(sc.env.primitives)} primitives, "
              f"{len(sc.reference_paths)} reference paths -> {args.out}", file=sys.stderr)
    return 0


def cmd_plan(args):
    sc = _load(args, refs=False)
    params = _params(args, sc)
    try:
        res, roadmap, _, _ = plan(sc.env, sc.start, sc.goal, params, return_graphs=True)
    except PlanningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(args.out, res.to_json() + "\n")
    if args.svg:
        env = sc.env.with_clearance(params.clearance)
        _write(args.svg, render_svg(env, res.paths, sc.start, sc.goal, params.plane_z,
                                    roadmap if args.roadmap else None, title=sc.name))
    if args.timings:
        print(json.dumps(res.timings), file=sys.stderr)
    return 0 if res.paths else 1


def cmd_bench(args):
    sc = _load(args)
    params = _params(args, sc)
    report = run_bench(sc, args.trials, args.seed_base, params)
    out = args.out or "bench"
    _write(out + ".csv", report.to_csv(timings=not args.no_timings))
    _write(out + ".json", report.to_json(timings=not args.no_timings) + "\n")
    print(report.table_row())
    return 0


def cmd_oracle(args):
    sc = _load(args, refs=False)
    p = _params(args, sc)
    env = sc.env.with_clearance(p.clearance)
    ratio = args.budget_ratio if args.budget_ratio is not None else p.kappa_s
    try:
        res = enumerate_classes(env, sc.start, sc.goal, args.pitch, ratio, p.delta_d,
                                plane_z=p.plane_z)
    except TooLarge as exc:
        print(f"error: TooLarge: {exc}", file=sys.stderr)
        return 2
    _write(args.out, paths_to_json(res.class_representatives, class_count=res.class_count) + "\n")
    print(f"{sc.name}: {res.class_count} classes", file=sys.stderr)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="topopaths",
                                 description="Distinct path planning with clustered roadmaps.")
    sub = ap.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("gen", help="generate a scenario JSON file")
    g.add_argument("--family", required=True, help="e.g. 1-3-1, 1s-2-1s, poles:16, building")
    g.add_argument("--out", help="output file (default stdout)")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("plan", help="run the planner once")
    _scenario_args(p, refs=False)
    _param_args(p)
    p.add_argument("--out", help="paths JSON (default stdout)")
    p.add_argument("--svg", help="write a top-down SVG here")
    p.add_argument("--roadmap", action="store_true", help="draw the roadmap in the SVG")
    p.add_argument("--timings", action="store_true", help="print stage timings to stderr")
    p.set_defaults(func=cmd_plan)

    b = sub.add_parser("bench", help="seeded batch run with success statistics")
    _scenario_args(b)
    _param_args(b)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--seed-base", type=int, default=0)
    b.add_argument("--out", help="report prefix; writes PREFIX.csv and PREFIX.json")
    b.add_argument("--no-timings", action="store_true",
                   help="leave CSV timing columns empty for byte-stable output")
    b.set_defaults(func=cmd_bench)

    o = sub.add_parser("oracle", help="enumerate path classes on a lattice")
    _scenario_args(o, refs=False)
    _param_args(o)
    o.add_argument("--pitch", type=float, default=0.5)
    o.add_argument("--budget-ratio", type=float, default=None)
    o.add_argument("--out", help="representatives JSON (default stdout)")
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "seed_base", None) is not None and args.seed is not None:
        args.seed_base = args.seed
    try:
        return args.func(args)
    except (BadSpec, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
