"""Spatial kernels: line of sight, occupancy grids, and A* with string pulling.

These inner loops dominate benchmark runtime, so they are compiled with
numba when available. Setting PARLEY_BACKEND=numpy (or a missing numba)
selects the plain-Python execution of the very same functions; results are
identical either way, only speed differs.
"""

from __future__ import annotations

import math
import os

import numpy as np

_BACKEND = os.environ.get("PARLEY_BACKEND", "auto").lower()
if _BACKEND not in ("auto", "numba", "numpy"):
    raise ValueError(f"PARLEY_BACKEND must be auto, numba, or numpy, not {_BACKEND!r}")

USING_NUMBA = False
if _BACKEND in ("auto", "numba"):
    try:
        from numba import njit

        USING_NUMBA = True
    except ImportError:
        if _BACKEND == "numba":
            raise


def _maybe_jit(fn):
    if USING_NUMBA:
        return njit(cache=True)(fn)
    return fn


@_maybe_jit
def _orient(ax, ay, bx, by, cx, cy):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if v > 1e-12:
        return 1
    if v < -1e-12:
        return -1
    return 0


@_maybe_jit
def _on_segment(ax, ay, bx, by, px, py):
    return (
        min(ax, bx) - 1e-12 <= px <= max(ax, bx) + 1e-12
        and min(ay, by) - 1e-12 <= py <= max(ay, by) + 1e-12
    )


@_maybe_jit
def _segments_cross(ax, ay, bx, by, cx, cy, dx, dy):
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == 0 and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if o2 == 0 and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    if o3 == 0 and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if o4 == 0 and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    return False


@_maybe_jit
def _seg_blocked(px, py, qx, qy, edges):
    for i in range(edges.shape[0]):
        if _segments_cross(px, py, qx, qy, edges[i, 0], edges[i, 1], edges[i, 2], edges[i, 3]):
            return True
    return False


@_maybe_jit
def _point_in_poly(x, y, verts, lo, hi):
    inside = False
    j = hi - 1
    for i in range(lo, hi):
        xi, yi = verts[i, 0], verts[i, 1]
        xj, yj = verts[j, 0], verts[j, 1]
        if (yi > y) != (yj > y):
            t = (y - yi) / (yj - yi)
            if x < xi + t * (xj - xi):
                inside = not inside
        j = i
    return inside


@_maybe_jit
def _point_segment_dist2(px, py, ax, ay, bx, by):
    dx = bx - ax
    dy = by - ay
    denom = dx * dx + dy * dy
    if denom <= 0.0:
        ex = px - ax
        ey = py - ay
        return ex * ex + ey * ey
    t = ((px - ax) * dx + (py - ay) * dy) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    ex = px - (ax + t * dx)
    ey = py - (ay + t * dy)
    return ex * ex + ey * ey


@_maybe_jit
def _occupancy(nx, ny, minx, miny, cell, verts, offsets, inflate):
    occ = np.zeros((ny, nx), np.uint8)
    inf2 = inflate * inflate
    for j in range(ny):
        cy = miny + (j + 0.5) * cell
        for i in range(nx):
            cx = minx + (i + 0.5) * cell
            blocked = False
            for p in range(offsets.shape[0] - 1):
                lo = offsets[p]
                hi = offsets[p + 1]
                if _point_in_poly(cx, cy, verts, lo, hi):
                    blocked = True
                    break
                k = hi - 1
                for m in range(lo, hi):
                    if (
                        _point_segment_dist2(
                            cx, cy, verts[k, 0], verts[k, 1], verts[m, 0], verts[m, 1]
                        )
                        <= inf2
                    ):
                        blocked = True
                        break
                    k = m
                if blocked:
                    break
            if blocked:
                occ[j, i] = 1
    return occ


@_maybe_jit
def _heap_push(fs, hs, ids, size, f, h, idx):
    k = size
    fs[k] = f
    hs[k] = h
    ids[k] = idx
    while k > 0:
        parent = (k - 1) // 2
        if (fs[k], hs[k], ids[k]) < (fs[parent], hs[parent], ids[parent]):
            fs[k], fs[parent] = fs[parent], fs[k]
            hs[k], hs[parent] = hs[parent], hs[k]
            ids[k], ids[parent] = ids[parent], ids[k]
            k = parent
        else:
            break
    return size + 1


@_maybe_jit
def _heap_pop(fs, hs, ids, size):
    top_f = fs[0]
    top_id = ids[0]
    size -= 1
    fs[0] = fs[size]
    hs[0] = hs[size]
    ids[0] = ids[size]
    k = 0
    while True:
        left = 2 * k + 1
        right = left + 1
        smallest = k
        if left < size and (fs[left], hs[left], ids[left]) < (fs[smallest], hs[smallest], ids[smallest]):
            smallest = left
        if right < size and (fs[right], hs[right], ids[right]) < (fs[smallest], hs[smallest], ids[smallest]):
            smallest = right
        if smallest == k:
            break
        fs[k], fs[smallest] = fs[smallest], fs[k]
        hs[k], hs[smallest] = hs[smallest], hs[k]
        ids[k], ids[smallest] = ids[smallest], ids[k]
        k = smallest
    return top_f, top_id, size


@_maybe_jit
def _astar(occ, si, sj, gi, gj):
    """8-connected A* over the occupancy grid; deterministic tie-breaks by
    (f, h, cell index). Returns parent array, or an empty one on failure."""
    ny, nx = occ.shape
    n = nx * ny
    sqrt2 = math.sqrt(2.0)
    g = np.full(n, 1e18)
    parent = np.full(n, -1, np.int64)
    closed = np.zeros(n, np.uint8)
    cap = 16 * n + 64
    fs = np.empty(cap)
    hs = np.empty(cap)
    ids = np.empty(cap, np.int64)
    size = 0
    start = sj * nx + si
    goal = gj * nx + gi
    g[start] = 0.0
    dx0 = abs(gi - si)
    dy0 = abs(gj - sj)
    h0 = (dx0 + dy0) + (sqrt2 - 2.0) * min(dx0, dy0)
    size = _heap_push(fs, hs, ids, size, h0, h0, start)
    found = False
    while size > 0:
        _, current, size = _heap_pop(fs, hs, ids, size)
        if closed[current] == 1:
            continue
        closed[current] = 1
        if current == goal:
            found = True
            break
        ci = current % nx
        cj = current // nx
        for dj in range(-1, 2):
            for di in range(-1, 2):
                if di == 0 and dj == 0:
                    continue
                ni = ci + di
                nj = cj + dj
                if ni < 0 or nj < 0 or ni >= nx or nj >= ny:
                    continue
                if occ[nj, ni] == 1:
                    continue
                if di != 0 and dj != 0:
                    # no corner cutting through blocked orthogonals
                    if occ[cj, ni] == 1 or occ[nj, ci] == 1:
                        continue
                    step = sqrt2
                else:
                    step = 1.0
                nidx = nj * nx + ni
                if closed[nidx] == 1:
                    continue
                ng = g[current] + step
                if ng < g[nidx] - 1e-12:
                    g[nidx] = ng
                    parent[nidx] = current
                    ddx = abs(gi - ni)
                    ddy = abs(gj - nj)
                    h = (ddx + ddy) + (sqrt2 - 2.0) * min(ddx, ddy)
                    if size < cap:
                        size = _heap_push(fs, hs, ids, size, ng + h, h, nidx)
    if not found:
        return np.full(1, -1, np.int64)
    # path length, then cells goal -> start
    count = 1
    cur = goal
    while cur != start:
        cur = parent[cur]
        count += 1
    out = np.empty(count, np.int64)
    cur = goal
    for k in range(count):
        out[count - 1 - k] = cur
        cur = parent[cur]
    return out


@_maybe_jit
def _grid_clear(occ, x0, y0, x1, y1):
    """Every cell sampled along the segment (grid coordinates) is free."""
    ny, nx = occ.shape
    dist = math.hypot(x1 - x0, y1 - y0)
    steps = int(dist / 0.33) + 1
    for s in range(steps + 1):
        t = s / steps
        x = x0 + (x1 - x0) * t
        y = y0 + (y1 - y0) * t
        i = int(x)
        j = int(y)
        if i < 0 or j < 0 or i >= nx or j >= ny:
            return False
        if occ[j, i] == 1:
            return False
    return True


# ---------------------------------------------------------------------------
# Python-facing API
# ---------------------------------------------------------------------------


def obstacle_edges(obstacles) -> np.ndarray:
    """(n, 4) array of segments from a list of polygons."""
    rows = []
    for poly in obstacles:
        m = len(poly)
        for i in range(m):
            x1, y1 = poly[i]
            x2, y2 = poly[(i + 1) % m]
            rows.append((x1, y1, x2, y2))
    if not rows:
        return np.zeros((0, 4), dtype=np.float64)
    return np.asarray(rows, dtype=np.float64)


def line_of_sight(edges: np.ndarray, p, q) -> bool:
    if edges.shape[0] == 0:
        return True
    return not _seg_blocked(float(p[0]), float(p[1]), float(q[0]), float(q[1]), edges)


def point_in_region(region, p) -> bool:
    verts = np.asarray(region, dtype=np.float64)
    return bool(_point_in_poly(float(p[0]), float(p[1]), verts, 0, verts.shape[0]))


class NavGrid:
    """Uniform occupancy grid over the world bounds with A* + string pulling."""

    def __init__(self, bounds, obstacles, cell: float = 0.25, inflate: float = 0.3):
        self.minx, self.miny, self.maxx, self.maxy = (float(v) for v in bounds)
        self.cell = float(cell)
        self.nx = max(1, int(math.ceil((self.maxx - self.minx) / self.cell)))
        self.ny = max(1, int(math.ceil((self.maxy - self.miny) / self.cell)))
        verts_list = []
        offsets = [0]
        for poly in obstacles:
            verts_list.extend(poly)
            offsets.append(len(verts_list))
        verts = (
            np.asarray(verts_list, dtype=np.float64)
            if verts_list
            else np.zeros((0, 2), dtype=np.float64)
        )
        self.occ = _occupancy(
            self.nx,
            self.ny,
            self.minx,
            self.miny,
            self.cell,
            verts,
            np.asarray(offsets, dtype=np.int64),
            float(inflate),
        )
        self.edges = obstacle_edges(obstacles)

    def to_cell(self, p) -> tuple[int, int]:
        i = int((p[0] - self.minx) / self.cell)
        j = int((p[1] - self.miny) / self.cell)
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)

    def to_world(self, i: int, j: int) -> tuple[float, float]:
        return (
            self.minx + (i + 0.5) * self.cell,
            self.miny + (j + 0.5) * self.cell,
        )

    def is_free(self, p) -> bool:
        i, j = self.to_cell(p)
        return self.occ[j, i] == 0

    def nearest_free_cell(self, p) -> tuple[int, int] | None:
        i0, j0 = self.to_cell(p)
        if self.occ[j0, i0] == 0:
            return i0, j0
        for radius in range(1, max(self.nx, self.ny)):
            best = None
            for dj in range(-radius, radius + 1):
                for di in range(-radius, radius + 1):
                    if max(abs(di), abs(dj)) != radius:
                        continue
                    i, j = i0 + di, j0 + dj
                    if 0 <= i < self.nx and 0 <= j < self.ny and self.occ[j, i] == 0:
                        d = (di * di + dj * dj, j, i)
                        if best is None or d < best[0]:
                            best = (d, i, j)
            if best is not None:
                return best[1], best[2]
        return None

    def path(self, start, goal, snap_goal: bool = True) -> list[tuple[float, float]] | None:
        """World-coordinate waypoints from start to goal, or None.

        With snap_goal, a blocked goal redirects to the nearest free cell
        (right for region centroids); without it, a blocked goal is simply
        unreachable (right for explicit point commands)."""
        s = self.nearest_free_cell(start)
        if s is None:
            return None
        if not snap_goal and not self.is_free(goal):
            return None
        gcell = self.nearest_free_cell(goal)
        if gcell is None:
            return None
        cells = _astar(self.occ, s[0], s[1], gcell[0], gcell[1])
        if cells.shape[0] == 1 and cells[0] == -1:
            return None
        pts = [(int(c) % self.nx, int(c) // self.nx) for c in cells]
        pulled = self._string_pull(pts)
        goal_cell_of_request = self.to_cell(goal)
        exact_goal_ok = gcell == goal_cell_of_request and self.is_free(goal)
        end = (float(goal[0]), float(goal[1])) if exact_goal_ok else self.to_world(*gcell)
        waypoints = [(float(start[0]), float(start[1]))]
        for i, j in pulled[1:-1]:
            waypoints.append(self.to_world(i, j))
        waypoints.append(end)
        return waypoints

    def _string_pull(self, cells: list[tuple[int, int]]) -> list[tuple[int, int]]:
        if len(cells) <= 2:
            return cells
        out = [cells[0]]
        anchor = 0
        k = 1
        while k < len(cells) - 1:
            a = cells[anchor]
            b = cells[k + 1]
            if _grid_clear(
                self.occ, a[0] + 0.5, a[1] + 0.5, b[0] + 0.5, b[1] + 0.5
            ):
                k += 1
                continue
            out.append(cells[k])
            anchor = k
            k += 1
        out.append(cells[-1])
        return out
