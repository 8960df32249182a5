"""Top-down SVG rendering of a scene, its roadmap and the distinct paths."""
from __future__ import annotations

import numpy as np

from .env import Box, Sphere, WallWithWindows

__all__ = ["render_svg", "PALETTE"]

PALETTE = ("#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
           "#a65628", "#f781bf", "#17becf", "#bcbd22", "#666666")


def _obstacle_shapes(env, plane_z):
    """Yield ('rect', x0, y0, x1, y1) or ('circle', x, y, r) in world xy."""
    for prim in env.primitives:
        boxes = prim.boxes() if isinstance(prim, WallWithWindows) else [prim]
        for b in boxes:
            if isinstance(b, Sphere):
                cx, cy, cz = b.center
                r = b.radius
                if plane_z is not None:
                    dz = abs(plane_z - cz)
                    if dz >= r:
                        continue
                    r = np.sqrt(r * r - dz * dz)
                yield ("circle", cx, cy, r)
            elif isinstance(b, Box):
                if plane_z is not None and not (b.min[2] <= plane_z <= b.max[2]):
                    continue
                yield ("rect", b.min[0], b.min[1], b.max[0], b.max[1])
    if env.grid is not None:
        g = env.grid
        occ = g.occupancy
        if plane_z is not None:
            k = int(np.clip((plane_z - g.origin[2]) / g.resolution, 0, occ.shape[2] - 1))
            cols = np.argwhere(occ[:, :, k])
        else:
            cols = np.argwhere(occ.any(axis=2))
        for i, j in cols:
            x0, y0 = g.origin[0] + i * g.resolution, g.origin[1] + j * g.resolution
            yield ("rect", x0, y0, x0 + g.resolution, y0 + g.resolution)


def render_svg(env, paths, q_start, q_goal, plane_z=None, roadmap=None, width=800, title=None):
    """Return SVG text for an xy projection; y grows upward in the picture.

    With ``plane_z`` the obstacles are sliced at that height, otherwise all
    of them are projected and drawn translucent.
    """
    lo, hi = np.asarray(env.bounds.min_corner, float), np.asarray(env.bounds.max_corner, float)
    span = hi[:2] - lo[:2]
    scale = width / span[0]
    height = span[1] * scale

    def xy(x, y):
        return (x - lo[0]) * scale, height - (y - lo[1]) * scale

    fill_op = 1.0 if plane_z is not None else 0.35
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
           f'viewBox="0 0 {width:.2f} {height:.2f}">',
           f'<rect x="0" y="0" width="{width:.2f}" height="{height:.2f}" fill="white" stroke="black"/>']
    if title:
        out.append(f"<title>{title}</title>")
    for shape in _obstacle_shapes(env, plane_z):
        if shape[0] == "circle":
            _, cx, cy, r = shape
            px, py = xy(cx, cy)
            out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="{r * scale:.2f}" '
                       f'fill="#444" fill-opacity="{fill_op}"/>')
        else:
            _, x0, y0, x1, y1 = shape
            px, py = xy(x0, y1)
            out.append(f'<rect x="{px:.2f}" y="{py:.2f}" width="{(x1 - x0) * scale:.2f}" '
                       f'height="{(y1 - y0) * scale:.2f}" fill="#444" fill-opacity="{fill_op}"/>')
    if roadmap is not None:
        n = roadmap.nodes
        for u, v, _ in roadmap.edges():
            (x0, y0), (x1, y1) = xy(*n[u][:2]), xy(*n[v][:2])
            out.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y1:.2f}" '
                       f'stroke="#bbb" stroke-width="0.5"/>')
    for i, p in enumerate(paths):
        pts = " ".join("%.2f,%.2f" % xy(*w[:2]) for w in p.waypoints)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{PALETTE[i % len(PALETTE)]}" '
                   f'stroke-width="2.5"/>')
    for q, colour in ((q_start, "#2ca02c"), (q_goal, "#d62728")):
        px, py = xy(q[0], q[1])
        out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="6" fill="{colour}" stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
