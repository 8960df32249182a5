"""Scene generators and the JSON scenario format.

Scenario JSON schema::

    {
      "name": str,
      "bounds": [[x, y, z], [x, y, z]],
      "primitives": [                      # or "voxel_file": "map.vox"
        {"type": "sphere", "center": [..], "radius": r},
        {"type": "box", "min": [..], "max": [..]},
        {"type": "wall", "axis": 0|1|2, "low": a, "high": b,
         "face_min": [u, v], "face_max": [u, v], "windows": [[u0, v0, u1, v1], ...]}
      ],
      "start": [x, y, z], "goal": [x, y, z],
      "params": {PlannerParams fields},
      "reference_paths": [{"length": m, "waypoints": [[x, y, z], ...]}, ...]   # optional
    }
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field, fields

import numpy as np

from .env import Bounds, Box, Environment, Sphere, WallWithWindows, read_vox
from .errors import BadSpec
from .oracle import enumerate_classes, window_classes
from .planner import PRESETS, PlannerParams
from .topology import Path, uvd_deformable

__all__ = [
    "Scenario",
    "generate_scenario",
    "windows_scene",
    "poles_scene",
    "building_scene",
    "small_scenes",
    "load_scenario",
    "save_scenario",
]

WINDOWS_SIZE = (27.0, 26.7, 8.0)
WALL_SLOTS = (6.0, 13.5, 21.0)
WALL_THICKNESS = 0.2
WINDOW_WIDTH = 4.0
# n windows on a wall are spaced WINDOW_SPAN / n apart around the middle
WINDOW_SPAN = 24.0
SIDE_OFFSET = 6.0


@dataclass
class Scenario:
    name: str
    env: Environment
    start: np.ndarray
    goal: np.ndarray
    params: PlannerParams
    reference_paths: list = field(default_factory=list)
    voxel_file: str | None = None

    def validate_references(self):
        env = self.env.with_clearance(self.params.clearance)
        dd = self.params.delta_d
        refs = self.reference_paths
        for p in refs:
            w = p.waypoints
            assert np.all(env.segments_free(w[:-1], w[1:], dd)), f"{self.name}: reference in collision"
        for a in range(len(refs)):
            for b in range(a + 1, len(refs)):
                assert not uvd_deformable(env, refs[a], refs[b], dd), f"{self.name}: references {a},{b} deformable"

    def to_dict(self):
        out = {"name": self.name,
               "bounds": [list(self.env.bounds.min_corner), list(self.env.bounds.max_corner)]}
        if self.voxel_file is not None:
            out["voxel_file"] = self.voxel_file
        else:
            out["primitives"] = [_prim_to_dict(p) for p in self.env.primitives]
        out["start"] = self.start.tolist()
        out["goal"] = self.goal.tolist()
        out["params"] = self.params.to_dict()
        out["reference_paths"] = [p.to_dict() for p in self.reference_paths]
        return out


def _prim_to_dict(p):
    if isinstance(p, Sphere):
        return {"type": "sphere", "center": list(p.center), "radius": p.radius}
    if isinstance(p, Box):
        return {"type": "box", "min": list(p.min), "max": list(p.max)}
    return {"type": "wall", "axis": p.axis, "low": p.low, "high": p.high,
            "face_min": list(p.face_min), "face_max": list(p.face_max),
            "windows": [list(w) for w in p.windows]}


def _prim_from_dict(d):
    kind = d.get("type")
    if kind == "sphere":
        return Sphere(tuple(d["center"]), float(d["radius"]))
    if kind == "box":
        return Box(tuple(d["min"]), tuple(d["max"]))
    if kind == "wall":
        return WallWithWindows(int(d["axis"]), float(d["low"]), float(d["high"]),
                               tuple(d["face_min"]), tuple(d["face_max"]),
                               tuple(tuple(w) for w in d.get("windows", [])))
    raise BadSpec(f"unknown primitive type {kind!r}")


def save_scenario(scenario, path):
    with open(path, "w") as fh:
        json.dump(scenario.to_dict(), fh, indent=1)


def load_scenario(path):
    with open(path) as fh:
        data = json.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    names = {f.name for f in fields(PlannerParams)}
    params = PlannerParams(**{k: v for k, v in data.get("params", {}).items() if k in names})
    if "voxel_file" in data:
        vox = data["voxel_file"]
        env = read_vox(vox if os.path.isabs(vox) else os.path.join(base, vox), params.clearance)
    else:
        lo, hi = data["bounds"]
        env = Environment(Bounds(tuple(lo), tuple(hi)),
                          tuple(_prim_from_dict(p) for p in data.get("primitives", [])),
                          clearance=params.clearance)
    refs = [Path.from_dict(p) for p in data.get("reference_paths", [])]
    return Scenario(data.get("name", os.path.basename(path)), env,
                    np.asarray(data["start"], dtype=float), np.asarray(data["goal"], dtype=float),
                    params, refs, data.get("voxel_file"))


_WALL_TOKEN = re.compile(r"^(\d)(s?)$")


def _parse_windows_spec(spec):
    parts = spec.split("-")
    if len(parts) != 3:
        raise BadSpec(f"windows spec {spec!r} must name three walls, e.g. '1-3-1'")
    walls = []
    for tok in parts:
        m = _WALL_TOKEN.match(tok)
        if not m:
            raise BadSpec(f"bad wall token {tok!r} in {spec!r}")
        count, side = int(m.group(1)), bool(m.group(2))
        if count == 0 and side:
            raise BadSpec(f"missing wall cannot be a side wall in {spec!r}")
        walls.append((count, side))
    if all(c == 0 for c, _ in walls):
        raise BadSpec(f"{spec!r} has no walls")
    return walls


def windows_scene(spec, with_references=True, oracle_pitch=None):
    """Parallel walls across the map with rectangular windows.

    ``spec`` lists the window count of each of three wall slots; ``0`` drops
    the wall and an ``s`` suffix shifts that wall's windows off-centre.
    The scene is planar (``z = 4``).  Reference paths come from the window
    combination oracle, or from the lattice oracle when ``oracle_pitch`` is
    given (much slower).
    """
    walls = _parse_windows_spec(spec)
    sx, sy, sz = WINDOWS_SIZE
    mid = sy / 2
    zc = sz / 2
    prims = []
    for slot, (count, side) in zip(WALL_SLOTS, walls):
        if count == 0:
            continue
        offset = SIDE_OFFSET if side else 0.0
        spacing = WINDOW_SPAN / count
        centers = [mid + offset + (i - (count - 1) / 2) * spacing for i in range(count)]
        wins = []
        for c in centers:
            lo, hi = c - WINDOW_WIDTH / 2, c + WINDOW_WIDTH / 2
            if lo <= 0 or hi >= sy:
                raise BadSpec(f"window at y={c} does not fit in {spec!r}")
            wins.append((lo, 1.0, hi, sz - 1.0))
        prims.append(WallWithWindows(0, slot - WALL_THICKNESS / 2, slot + WALL_THICKNESS / 2,
                                     (0.0, 0.0), (sy, sz), tuple(wins)))
    params = PRESETS["windows"].with_(plane_z=zc)
    env = Environment(Bounds((0, 0, 0), WINDOWS_SIZE), tuple(prims), clearance=params.clearance)
    sc = Scenario(f"windows-{spec}", env, np.array([1.5, mid, zc]), np.array([sx - 1.5, mid, zc]), params)
    if with_references:
        if oracle_pitch is None:
            env_c = env.with_clearance(params.clearance)
            sc.reference_paths = window_classes(env_c, sc.start, sc.goal, params.kappa_s, params.delta_d)
        else:
            sc.reference_paths = oracle_references(sc, pitch=oracle_pitch)
    return sc


def oracle_references(scenario, pitch=0.5, budget_ratio=None):
    """Shortened oracle class representatives, used as success-rate references."""
    p = scenario.params
    env = scenario.env.with_clearance(p.clearance)
    ratio = p.kappa_s if budget_ratio is None else budget_ratio
    res = enumerate_classes(env, scenario.start, scenario.goal, pitch, ratio, p.delta_d,
                            plane_z=p.plane_z)
    refs = []
    for r in res.shortened(env, p.delta_d):
        if all(not uvd_deformable(env, r, k, p.delta_d) for k in refs):
            refs.append(r)
    return sorted(refs, key=lambda r: r.length)


def poles_scene(count=16, spacing="uniform", half_width=0.2):
    """Vertical square poles on a near-square grid in a 10 x 10 x 2.8 m box (planar)."""
    if count < 1:
        raise BadSpec("poles need count >= 1")
    size = (10.0, 10.0, 2.8)
    cols = int(np.ceil(np.sqrt(count)))
    rows = int(np.ceil(count / cols))
    if spacing == "uniform":
        xs = np.linspace(2.5, 7.5, cols) if cols > 1 else np.array([5.0])
        ys = np.linspace(2.5, 7.5, rows) if rows > 1 else np.array([5.0])
    else:
        try:
            step = float(spacing)
        except (TypeError, ValueError):
            raise BadSpec(f"pole spacing {spacing!r} is neither 'uniform' nor a number") from None
        if step <= 2 * half_width:
            raise BadSpec("pole spacing must exceed pole width")
        xs = 5.0 + (np.arange(cols) - (cols - 1) / 2) * step
        ys = 5.0 + (np.arange(rows) - (rows - 1) / 2) * step
        if xs.min() - half_width < 1.5 or xs.max() + half_width > 8.5 or ys.min() < 0 or ys.max() > 10:
            raise BadSpec("pole grid does not fit between start and goal")
    prims = []
    for n in range(count):
        x, y = xs[n % cols], ys[n // cols]
        prims.append(Box((x - half_width, y - half_width, 0.0),
                         (x + half_width, y + half_width, size[2])))
    params = PRESETS["poles"].with_(plane_z=size[2] / 2)
    env = Environment(Bounds((0, 0, 0), size), tuple(prims), clearance=params.clearance)
    z = size[2] / 2
    # start/goal sit between pole rows so the straight line is open
    y0 = 5.0 if rows % 2 == 0 else 5.0 + (ys[1] - ys[0]) / 2 if rows > 1 else 6.0
    return Scenario(f"poles-{count}-{spacing}", env, np.array([0.5, y0, z]),
                    np.array([9.5, y0, z]), params)


def building_scene(preset="two-level"):
    """Two-storey 30 x 20 x 6.3 m building with doors, windows and stairwells (3D)."""
    if preset != "two-level":
        raise BadSpec(f"unknown building preset {preset!r}")
    sx, sy, sz = 30.0, 20.0, 6.3
    floor_lo, floor_hi = 3.0, 3.3
    t = 0.3
    prims = [
        # slab between storeys with two stairwell openings
        WallWithWindows(2, floor_lo, floor_hi, (0.0, 0.0), (sx, sy),
                        ((4.0, 8.0, 7.0, 12.0), (23.0, 8.0, 26.0, 12.0))),
    ]
    doors_low = {
        10.0: ((3.0, 0.0, 4.6, 2.2), (15.0, 0.0, 16.6, 2.2), (8.5, 1.0, 10.0, 2.0)),
        20.0: ((8.0, 0.0, 9.6, 2.2), (16.0, 1.0, 17.5, 2.0)),
    }
    doors_high = {
        10.0: ((2.0, floor_hi, 3.6, floor_hi + 2.2), (12.0, floor_hi, 13.6, floor_hi + 2.2)),
        20.0: ((5.0, floor_hi, 6.6, floor_hi + 2.2), (16.0, floor_hi, 17.6, floor_hi + 2.2),
               (10.0, floor_hi + 1.0, 11.5, floor_hi + 2.0)),
    }
    for x, wins in doors_low.items():
        prims.append(WallWithWindows(0, x - t / 2, x + t / 2, (0.0, 0.0), (sy, floor_lo), wins))
    for x, wins in doors_high.items():
        prims.append(WallWithWindows(0, x - t / 2, x + t / 2, (0.0, floor_hi), (sy, sz), wins))
    # corridor wall on the lower storey, split by a door
    prims.append(WallWithWindows(1, 10.0 - t / 2, 10.0 + t / 2, (0.0, 0.0), (10.0, floor_lo),
                                 ((6.0, 0.0, 7.6, 2.2),)))
    params = PRESETS["building"]
    env = Environment(Bounds((0, 0, 0), (sx, sy, sz)), tuple(prims), clearance=params.clearance)
    return Scenario(f"building-{preset}", env, np.array([2.0, 2.0, 1.5]),
                    np.array([28.0, 18.0, 4.8]), params)


def small_scenes():
    """Ten planar scenes with at most three obstacles, used for oracle checks."""
    b = Bounds((0, 0, 0), (10, 8, 2))
    z = 1.0
    layouts = {
        "empty": [],
        "disk": [Sphere((5, 4, z), 1.0)],
        "disk-offset": [Sphere((5, 4.5, z), 1.0)],
        "box": [Box((4, 3, 0), (6, 5, 2))],
        "two-disks": [Sphere((5, 2.8, z), 0.8), Sphere((5, 5.2, z), 0.8)],
        "series": [Sphere((3.5, 4, z), 0.8), Sphere((6.5, 4, z), 0.8)],
        "slot": [Box((4.8, 0, 0), (5.2, 3.0, 2)), Box((4.8, 5.0, 0), (5.2, 8, 2))],
        "disk-box": [Sphere((3.5, 4, z), 0.8), Box((6, 3.2, 0), (7, 4.8, 2))],
        "three-column": [Sphere((5, 2.0, z), 0.6), Sphere((5, 4.0, z), 0.6), Sphere((5, 6.0, z), 0.6)],
        "triangle": [Sphere((3.8, 4, z), 0.7), Sphere((6.2, 2.6, z), 0.7), Sphere((6.2, 5.4, z), 0.7)],
    }
    params = PlannerParams(num_samples=300, k=14, M=20, kappa_p=2.0, kappa_s=1.5,
                           delta_d=0.1, clearance=0.2, plane_z=z)
    out = []
    for name, prims in layouts.items():
        env = Environment(b, tuple(prims), clearance=params.clearance)
        out.append(Scenario(f"small-{name}", env, np.array([1.0, 4.0, z]), np.array([9.0, 4.0, z]), params))
    return out


def generate_scenario(family, arg=None, with_references=True, **kwargs):
    """Build a scenario by family name: ``windows``, ``poles``, ``building`` or ``small``.

    ``windows`` takes a spec such as ``"1-3-1"``; ``poles`` takes the pole
    count (and ``spacing``); ``building`` takes a preset name.  A bare string
    like ``"1-3-1"`` or ``"poles:16"`` is also accepted as ``family``.
    Only windows scenes carry reference paths.
    """
    if arg is None and family not in ("windows", "poles", "building", "small"):
        if ":" in family:
            family, arg = family.split(":", 1)
        elif _looks_like_windows(family):
            family, arg = "windows", family
    if family == "windows":
        if arg is None:
            raise BadSpec("windows family needs a spec such as '1-3-1'")
        return windows_scene(str(arg), with_references=with_references, **kwargs)
    if family == "poles":
        return poles_scene(int(arg) if arg is not None else 16, **kwargs)
    if family == "building":
        return building_scene(arg or "two-level")
    if family == "small":
        by_name = {sc.name.removeprefix("small-"): sc for sc in small_scenes()}
        if arg not in by_name:
            raise BadSpec(f"unknown small scene {arg!r}; choose from {sorted(by_name)}")
        return by_name[arg]
    raise BadSpec(f"unknown scenario family {family!r}")


def _looks_like_windows(text):
    try:
        _parse_windows_spec(text)
    except BadSpec:
        return False
    return True
