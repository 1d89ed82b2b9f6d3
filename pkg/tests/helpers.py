"""Independent oracles for the unit and acceptance tests.

Each helper recomputes an expected result with a deliberately different
algorithm from the implementation (boundary-crossing enumeration instead of
incremental DDA, exhaustive path search instead of Dijkstra, full rescans
instead of incremental updates) so tests never compare code with itself.
"""

from __future__ import annotations

import math
from collections import deque


def raycast_oracle(blocked, x, y, angle, max_range, res):
    """First blocked cell along a ray, by enumerating every lattice-line
    crossing, sorting, and classifying the midpoint of each segment.

    Returns (entry_distance, (ix, iy)) or None. `blocked(ix, iy)` is a
    predicate that must also cover out-of-bounds cells.
    """
    ix0 = math.floor(x / res)
    iy0 = math.floor(y / res)
    if blocked(ix0, iy0):
        return 0.0, (ix0, iy0)
    dx, dy = math.cos(angle), math.sin(angle)
    crossings = [0.0]
    if dx != 0.0:
        span = sorted((x, x + max_range * dx))
        for k in range(math.floor(span[0] / res), math.ceil(span[1] / res) + 1):
            t = (k * res - x) / dx
            if 1e-15 < t < max_range:
                crossings.append(t)
    if dy != 0.0:
        span = sorted((y, y + max_range * dy))
        for k in range(math.floor(span[0] / res), math.ceil(span[1] / res) + 1):
            t = (k * res - y) / dy
            if 1e-15 < t < max_range:
                crossings.append(t)
    crossings.sort()
    crossings.append(max_range)
    for a, b in zip(crossings, crossings[1:]):
        if b - a < 1e-13:
            continue
        tm = (a + b) / 2.0
        cell = (math.floor((x + tm * dx) / res), math.floor((y + tm * dy) / res))
        if blocked(*cell):
            return a, cell
    return None


def best_path_bruteforce(edges, source, target):
    """Cheapest path by exhaustive simple-path enumeration; ties broken by
    the lexicographically smallest tuple of edge ids.

    `edges` is {edge_id: (source, target, cost)}. Returns (cost, edge_ids)
    or None when the target is unreachable.
    """
    by_source: dict = {}
    for eid, (s, t, c) in edges.items():
        by_source.setdefault(s, []).append((eid, t, c))
    best: tuple[float, tuple] | None = None

    def dfs(node, visited, cost, path):
        nonlocal best
        if node == target:
            cand = (cost, tuple(path))
            if best is None or cand < best:
                best = cand
            return
        for eid, nxt, c in by_source.get(node, ()):
            if nxt in visited:
                continue
            if best is not None and cost + c > best[0]:
                continue
            visited.add(nxt)
            path.append(eid)
            dfs(nxt, visited, cost + c, path)
            path.pop()
            visited.remove(nxt)

    dfs(source, {source}, 0.0, [])
    return best


def dijkstra_costs_bruteforce(edges, source):
    """Min cost to every node by exhaustive enumeration (small graphs only)."""
    nodes = set()
    for eid, (s, t, _) in edges.items():
        nodes.add(s)
        nodes.add(t)
    nodes.add(source)
    out = {source: 0.0}
    for node in nodes:
        if node == source:
            continue
        found = best_path_bruteforce(edges, source, node)
        if found is not None:
            out[node] = found[0]
    return out


def corridor_clear_bruteforce(occupied_cells, res, ax, ay, bx, by, radius):
    """True when no occupied cell center is within `radius` of segment AB.

    `occupied_cells` is an iterable of (ix, iy) grid indices.
    """
    abx, aby = bx - ax, by - ay
    ab2 = abx * abx + aby * aby
    for ix, iy in occupied_cells:
        px = (ix + 0.5) * res
        py = (iy + 0.5) * res
        if ab2 < 1e-18:
            d2 = (px - ax) ** 2 + (py - ay) ** 2
        else:
            u = ((px - ax) * abx + (py - ay) * aby) / ab2
            u = max(0.0, min(1.0, u))
            d2 = (px - (ax + u * abx)) ** 2 + (py - (ay + u * aby)) ** 2
        if d2 < radius * radius:
            return False
    return True


def frontier_clusters_bruteforce(state_at, width, height):
    """Frontier cells (FREE with a 4-adjacent UNKNOWN, bounds count as
    UNKNOWN) grouped into 8-connected clusters by BFS.

    `state_at(ix, iy)` returns 0 unknown / 1 free / 2 occupied for any index.
    Returns a list of frozensets of (ix, iy).
    """
    def is_frontier(ix, iy):
        if state_at(ix, iy) != 1:
            return False
        for jx, jy in ((ix + 1, iy), (ix - 1, iy), (ix, iy + 1), (ix, iy - 1)):
            if not (0 <= jx < width and 0 <= jy < height) or state_at(jx, jy) == 0:
                return True
        return False

    cells = {(ix, iy) for ix in range(width) for iy in range(height) if is_frontier(ix, iy)}
    clusters = []
    while cells:
        seed = cells.pop()
        group = {seed}
        queue = deque([seed])
        while queue:
            cx, cy = queue.popleft()
            for nx in (cx - 1, cx, cx + 1):
                for ny in (cy - 1, cy, cy + 1):
                    if (nx, ny) in cells:
                        cells.remove((nx, ny))
                        group.add((nx, ny))
                        queue.append((nx, ny))
        clusters.append(frozenset(group))
    return clusters


def reachable_component_bruteforce(is_floor, width, height, start):
    """4-connected floor component containing `start`, via BFS on a deque."""
    if not is_floor(*start):
        return set()
    seen = {start}
    queue = deque([start])
    while queue:
        ix, iy = queue.popleft()
        for jx, jy in ((ix + 1, iy), (ix - 1, iy), (ix, iy + 1), (ix, iy - 1)):
            if 0 <= jx < width and 0 <= jy < height and (jx, jy) not in seen and is_floor(jx, jy):
                seen.add((jx, jy))
                queue.append((jx, jy))
    return seen
