"""Obstacle fields, signed distances and collision queries.

Two representations are supported: a set of analytic primitives (spheres,
axis-aligned boxes and walls with rectangular window cutouts) whose signed
distance is exact, and a voxel grid carrying a Euclidean signed distance
field that is sampled with trilinear interpolation.

A configuration ``q`` is free iff it lies inside the bounds and
``sdf(q) > clearance``.  Segment checks are resolution limited: a segment is
free iff ``ceil(len / delta_d) + 1`` evenly spaced samples (both endpoints
included) are free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import ndimage

__all__ = [
    "Bounds",
    "Sphere",
    "Box",
    "WallWithWindows",
    "VoxelGrid",
    "Environment",
    "build_esdf",
    "brute_force_esdf",
    "sdf",
    "is_free",
    "segment_free",
    "read_vox",
    "write_vox",
]

_CHUNK = 16384


def _as_points(q):
    arr = np.asarray(q, dtype=float)
    return arr.reshape(-1, 3)


@dataclass(frozen=True)
class Bounds:
    min_corner: tuple
    max_corner: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min_corner)
        hi = tuple(float(v) for v in self.max_corner)
        if len(lo) != 3 or len(hi) != 3:
            raise ValueError("bounds need 3D corners")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"min_corner must be < max_corner componentwise: {lo} {hi}")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def lo(self):
        return np.array(self.min_corner)

    @property
    def hi(self):
        return np.array(self.max_corner)

    def _arrays(self):
        cached = self.__dict__.get("_cache")
        if cached is None:
            cached = (np.array(self.min_corner), np.array(self.max_corner))
            object.__setattr__(self, "_cache", cached)
        return cached

    @property
    def size(self):
        return self.hi - self.lo

    def contains(self, points):
        p = _as_points(points)
        lo, hi = self._arrays()
        return np.all((p >= lo) & (p <= hi), axis=1)


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if not self.radius > 0:
            raise ValueError("sphere radius must be positive")

    def sdf(self, points):
        p = _as_points(points)
        return np.linalg.norm(p - np.array(self.center), axis=1) - self.radius


@dataclass(frozen=True)
class Box:
    min: tuple
    max: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min)
        hi = tuple(float(v) for v in self.max)
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"box min must be < max componentwise: {lo} {hi}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)

    @property
    def center(self):
        return 0.5 * (np.array(self.min) + np.array(self.max))

    @property
    def half(self):
        return 0.5 * (np.array(self.max) - np.array(self.min))

    def sdf(self, points):
        p = _as_points(points)
        return _box_sdf(p, self.center[None, :], self.half[None, :])[:, 0]


@dataclass(frozen=True)
class WallWithWindows:
    """A slab perpendicular to ``axis`` with rectangular openings.

    The slab spans ``[low, high]`` along ``axis``.  Its face is the rectangle
    ``face_min``..``face_max`` in the two remaining axes (in increasing axis
    order), and every window is ``(u0, v0, u1, v1)`` in the same face
    coordinates.  Windows may touch the face border (doors) but not overlap.
    """

    axis: int
    low: float
    high: float
    face_min: tuple
    face_max: tuple
    windows: tuple = ()

    def __post_init__(self):
        if self.axis not in (0, 1, 2):
            raise ValueError("axis must be 0, 1 or 2")
        if not self.low < self.high:
            raise ValueError("wall low must be < high")
        fmin = tuple(float(v) for v in self.face_min)
        fmax = tuple(float(v) for v in self.face_max)
        if not (fmin[0] < fmax[0] and fmin[1] < fmax[1]):
            raise ValueError("degenerate wall face")
        wins = tuple(tuple(float(v) for v in w) for w in self.windows)
        for u0, v0, u1, v1 in wins:
            if not (u0 < u1 and v0 < v1):
                raise ValueError(f"degenerate window {(u0, v0, u1, v1)}")
            if u0 < fmin[0] or v0 < fmin[1] or u1 > fmax[0] or v1 > fmax[1]:
                raise ValueError(f"window {(u0, v0, u1, v1)} outside wall face")
        for a in range(len(wins)):
            for b in range(a + 1, len(wins)):
                wa, wb = wins[a], wins[b]
                if wa[0] < wb[2] and wb[0] < wa[2] and wa[1] < wb[3] and wb[1] < wa[3]:
                    raise ValueError("wall windows overlap")
        object.__setattr__(self, "face_min", fmin)
        object.__setattr__(self, "face_max", fmax)
        object.__setattr__(self, "windows", wins)

    def boxes(self):
        """Decompose the solid part of the wall into disjoint boxes."""
        (fu0, fv0), (fu1, fv1) = self.face_min, self.face_max
        ucuts = sorted({fu0, fu1, *[w[0] for w in self.windows], *[w[2] for w in self.windows]})
        out = []
        for ua, ub in zip(ucuts[:-1], ucuts[1:]):
            if ub <= ua:
                continue
            um = 0.5 * (ua + ub)
            holes = sorted((w[1], w[3]) for w in self.windows if w[0] <= um <= w[2])
            v = fv0
            spans = []
            for h0, h1 in holes:
                if h0 > v:
                    spans.append((v, h0))
                v = max(v, h1)
            if v < fv1:
                spans.append((v, fv1))
            for va, vb in spans:
                out.append(self._box(ua, ub, va, vb))
        return out

    def _box(self, ua, ub, va, vb):
        others = [a for a in range(3) if a != self.axis]
        lo = [0.0, 0.0, 0.0]
        hi = [0.0, 0.0, 0.0]
        lo[self.axis], hi[self.axis] = self.low, self.high
        lo[others[0]], hi[others[0]] = ua, ub
        lo[others[1]], hi[others[1]] = va, vb
        return Box(tuple(lo), tuple(hi))

    def sdf(self, points):
        p = _as_points(points)
        boxes = self.boxes()
        if not boxes:
            return np.full(len(p), np.inf)
        c = np.array([b.center for b in boxes])
        h = np.array([b.half for b in boxes])
        return _box_sdf(p, c, h).min(axis=1)


def _box_sdf(p, centers, halves):
    """Exact signed distance of points (N, 3) to boxes (B, 3) -> (N, B)."""
    q = np.abs(p[:, None, :] - centers[None, :, :]) - halves[None, :, :]
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=2)
    inside = np.minimum(q.max(axis=2), 0.0)
    return outside + inside


@dataclass
class VoxelGrid:
    origin: np.ndarray
    resolution: float
    occupancy: np.ndarray
    esdf: np.ndarray

    @property
    def dims(self):
        return tuple(self.occupancy.shape)

    def cell_centers(self):
        idx = np.indices(self.dims).reshape(3, -1).T
        return self.origin + (idx + 0.5) * self.resolution

    def sample(self, points):
        """Trilinear interpolation of the ESDF lattice (cell-centred)."""
        p = _as_points(points)
        dims = np.array(self.dims)
        g = (p - self.origin) / self.resolution - 0.5
        g = np.clip(g, 0.0, dims - 1)
        i0 = np.minimum(np.floor(g).astype(int), np.maximum(dims - 2, 0))
        f = g - i0
        i1 = np.minimum(i0 + 1, dims - 1)
        out = np.zeros(len(p))
        for cx in (0, 1):
            ix = i1[:, 0] if cx else i0[:, 0]
            wx = f[:, 0] if cx else 1.0 - f[:, 0]
            for cy in (0, 1):
                iy = i1[:, 1] if cy else i0[:, 1]
                wy = f[:, 1] if cy else 1.0 - f[:, 1]
                for cz in (0, 1):
                    iz = i1[:, 2] if cz else i0[:, 2]
                    wz = f[:, 2] if cz else 1.0 - f[:, 2]
                    out += wx * wy * wz * self.esdf[ix, iy, iz]
        return out


def build_esdf(occupancy, resolution, origin=(0.0, 0.0, 0.0)):
    """Signed Euclidean distance transform of a boolean occupancy lattice.

    Free cells carry the distance from their centre to the nearest occupied
    cell centre, occupied cells carry minus the distance to the nearest free
    cell centre.  When one of the two sets is empty the distance is capped at
    the grid diagonal.
    """
    occ = np.asarray(occupancy, dtype=bool)
    if occ.ndim != 3 or min(occ.shape) < 1:
        raise ValueError("occupancy must be a 3D lattice with at least one cell per axis")
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    cap = float(np.linalg.norm(occ.shape)) * resolution
    if occ.any():
        to_occ = ndimage.distance_transform_edt(~occ) * resolution
    else:
        to_occ = np.full(occ.shape, cap)
    if (~occ).any():
        to_free = ndimage.distance_transform_edt(occ) * resolution
    else:
        to_free = np.full(occ.shape, cap)
    esdf = np.where(occ, -to_free, to_occ)
    return VoxelGrid(np.asarray(origin, dtype=float), float(resolution), occ, esdf)


def brute_force_esdf(occupancy, resolution):
    """O(N^2) reference for :func:`build_esdf`, used in tests."""
    occ = np.asarray(occupancy, dtype=bool)
    cap = float(np.linalg.norm(occ.shape)) * resolution
    idx = np.indices(occ.shape).reshape(3, -1).T.astype(float)
    flat = occ.reshape(-1)
    out = np.empty(len(idx))
    for n, c in enumerate(idx):
        others = idx[~flat] if flat[n] else idx[flat]
        if len(others) == 0:
            d = cap
        else:
            d = np.sqrt(((others - c) ** 2).sum(axis=1)).min() * resolution
        out[n] = -d if flat[n] else d
    return out.reshape(occ.shape)


@dataclass(frozen=True)
class Environment:
    """Bounded obstacle field with a spherical robot of radius ``clearance``."""

    bounds: Bounds
    primitives: tuple = ()
    grid: VoxelGrid | None = None
    clearance: float = 0.0
    _spheres: tuple = field(default=None, init=False, repr=False, compare=False)
    _boxes: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.clearance < 0:
            raise ValueError("clearance must be >= 0")
        if self.grid is not None and self.primitives:
            raise ValueError("an environment is either primitive-based or grid-based")
        prims = tuple(self.primitives)
        object.__setattr__(self, "primitives", prims)
        centers, radii, bc, bh = [], [], [], []
        for prim in prims:
            if isinstance(prim, Sphere):
                centers.append(prim.center)
                radii.append(prim.radius)
            elif isinstance(prim, Box):
                bc.append(prim.center)
                bh.append(prim.half)
            elif isinstance(prim, WallWithWindows):
                for b in prim.boxes():
                    bc.append(b.center)
                    bh.append(b.half)
            else:
                raise TypeError(f"unsupported primitive {prim!r}")
        object.__setattr__(
            self, "_spheres",
            (np.array(centers, dtype=float).reshape(-1, 3), np.array(radii, dtype=float)),
        )
        object.__setattr__(
            self, "_boxes",
            (np.array(bc, dtype=float).reshape(-1, 3), np.array(bh, dtype=float).reshape(-1, 3)),
        )

    @property
    def lipschitz(self):
        # Grid ESDFs jump by two cells across the surface; sample densely.
        return None if self.grid is not None else 1.0

    def with_clearance(self, clearance):
        return Environment(self.bounds, self.primitives, self.grid, clearance)

    def sdf(self, points):
        p = _as_points(points)
        if self.grid is not None:
            return self.grid.sample(p)
        out = np.full(len(p), np.inf)
        sc, sr = self._spheres
        bc, bh = self._boxes
        for s in range(0, len(p), _CHUNK):
            chunk = p[s:s + _CHUNK]
            part = out[s:s + _CHUNK]
            if len(sr):
                d = np.linalg.norm(chunk[:, None, :] - sc[None, :, :], axis=2) - sr[None, :]
                np.minimum(part, d.min(axis=1), out=part)
            if len(bh):
                np.minimum(part, _box_sdf(chunk, bc, bh).min(axis=1), out=part)
        return out

    def is_free(self, points):
        p = _as_points(points)
        return self.bounds.contains(p) & (self.sdf(p) > self.clearance)

    def segments_free(self, a, b, delta_d):
        """Vectorised :func:`segment_free` over segment arrays ``a[i] -> b[i]``."""
        if not delta_d > 0:
            raise ValueError("delta_d must be positive")
        a = _as_points(a)
        b = _as_points(b)
        d = b - a
        length = np.linalg.norm(d, axis=1)
        n = np.ceil(length / delta_d).astype(np.int64) + 1
        ok = self.bounds.contains(a) & self.bounds.contains(b)
        if self.lipschitz is None:
            return ok & self._dense_check(a, d, n, ok)
        sc, sr = self._spheres
        bc, bh = self._boxes
        out = ok.copy()
        _march_kernel(np.ascontiguousarray(a), np.ascontiguousarray(d), length, n,
                      float(self.clearance), sc, sr, bc, bh, out)
        return out

    def segments_free_dense(self, a, b, delta_d):
        """Reference implementation evaluating every sample; used in tests."""
        a = _as_points(a)
        b = _as_points(b)
        d = b - a
        n = np.ceil(np.linalg.norm(d, axis=1) / delta_d).astype(np.int64) + 1
        ok = self.bounds.contains(a) & self.bounds.contains(b)
        return ok & self._dense_check(a, d, n, ok)

    def _dense_check(self, a, d, n, ok):
        res = ok.copy()
        todo = np.flatnonzero(ok)
        # bounded batches keep memory flat for very long segments
        start = 0
        while start < len(todo):
            stop = start
            total = 0
            while stop < len(todo) and (total == 0 or total + n[todo[stop]] <= _CHUNK * 4):
                total += n[todo[stop]]
                stop += 1
            seg = todo[start:stop]
            counts = n[seg]
            owner = np.repeat(np.arange(len(seg)), counts)
            offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
            denom = np.maximum(counts - 1, 1)[owner]
            t = offs / denom
            pts = a[seg][owner] + t[:, None] * d[seg][owner]
            free = self.sdf(pts) > self.clearance
            res[seg] = np.logical_and.reduceat(free, np.cumsum(counts) - counts)
            start = stop
        return res

    def segment_free(self, a, b, delta_d):
        return bool(self.segments_free(a, b, delta_d)[0])


@njit(cache=True)
def _point_sdf(px, py, pz, sc, sr, bc, bh):
    best = np.inf
    for s in range(sr.shape[0]):
        dx = px - sc[s, 0]
        dy = py - sc[s, 1]
        dz = pz - sc[s, 2]
        v = math.sqrt(dx * dx + dy * dy + dz * dz) - sr[s]
        if v < best:
            best = v
    for j in range(bh.shape[0]):
        qx = abs(px - bc[j, 0]) - bh[j, 0]
        qy = abs(py - bc[j, 1]) - bh[j, 1]
        qz = abs(pz - bc[j, 2]) - bh[j, 2]
        ox = max(qx, 0.0)
        oy = max(qy, 0.0)
        oz = max(qz, 0.0)
        v = math.sqrt(ox * ox + oy * oy + oz * oz) + min(max(qx, max(qy, qz)), 0.0)
        if v < best:
            best = v
    return best


@njit(cache=True)
def _march_kernel(a, d, length, n, clearance, sc, sr, bc, bh, out):
    # Exact sampled semantics: a sample with margin r certifies every sample
    # closer than r (1-Lipschitz sdf), so those are skipped, never assumed.
    for i in range(a.shape[0]):
        if not out[i]:
            continue
        ni = n[i]
        h = length[i] / (ni - 1) if ni > 1 else 0.0
        k = 0
        while True:
            t = k / (ni - 1) if ni > 1 else 0.0
            margin = _point_sdf(a[i, 0] + t * d[i, 0], a[i, 1] + t * d[i, 1],
                                a[i, 2] + t * d[i, 2], sc, sr, bc, bh) - clearance
            if margin <= 0.0:
                out[i] = False
                break
            if h == 0.0:
                break
            margin = min(margin, length[i] + 1.0)
            step = int(math.ceil(margin * (1.0 - 1e-9) / h))
            if step < 1:
                step = 1
            k += step
            if k > ni - 1:
                break


def sdf(env, q):
    """Signed distance (m) at ``q``; arrays of points give arrays."""
    out = env.sdf(q)
    return float(out[0]) if np.ndim(q) == 1 else out


def is_free(env, q):
    out = env.is_free(q)
    return bool(out[0]) if np.ndim(q) == 1 else out


def segment_free(env, a, b, delta_d):
    return env.segment_free(a, b, delta_d)


def read_vox(path, clearance=0.0):
    """Load a ``VOX`` map into a grid-backed :class:`Environment`.

    Format: one header line ``VOX nx ny nz resolution ox oy oz`` followed by
    ``nx*ny*nz`` ASCII bytes (``0`` free, ``1`` occupied), x varying fastest.
    """
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        body = fh.read()
    if len(header) != 8 or header[0] != "VOX":
        raise ValueError(f"{path}: bad VOX header")
    nx, ny, nz = (int(v) for v in header[1:4])
    res = float(header[4])
    origin = np.array([float(v) for v in header[5:8]])
    body = body.strip(b"\r\n")
    if len(body) != nx * ny * nz:
        raise ValueError(f"{path}: expected {nx * ny * nz} cells, found {len(body)}")
    flat = np.frombuffer(body, dtype=np.uint8)
    if not np.all((flat == ord("0")) | (flat == ord("1"))):
        raise ValueError(f"{path}: cells must be '0' or '1'")
    occ = (flat == ord("1")).reshape((nx, ny, nz), order="F")
    grid = build_esdf(occ, res, origin)
    bounds = Bounds(tuple(origin), tuple(origin + np.array([nx, ny, nz]) * res))
    return Environment(bounds, grid=grid, clearance=clearance)


def write_vox(path, occupancy, resolution, origin=(0.0, 0.0, 0.0)):
    occ = np.asarray(occupancy, dtype=bool)
    nx, ny, nz = occ.shape
    ox, oy, oz = (float(v) for v in origin)
    header = f"VOX {nx} {ny} {nz} {float(resolution)!r} {ox!r} {oy!r} {oz!r}\n"
    body = np.where(occ.reshape(-1, order="F"), ord("1"), ord("0")).astype(np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(body)


def segment_point_distance(a, b, p):
    """Closed-form distance from point ``p`` to segment ``[a, b]``."""
    a, b, p = (np.asarray(v, dtype=float) for v in (a, b, p))
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(a + t * ab - p))


def n_samples(length, delta_d):
    return int(math.ceil(length / delta_d)) + 1
