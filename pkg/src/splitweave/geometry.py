"""Canvas fragmentation: grid / brick / stripes / voronoi splits, shared-edge
merging and polygon insetting.

All geometry is plain double-precision tuples, no rounding anywhere (the SVG
emitter rounds at the very end). Canonical polygon orientation is positive
shoelace area in the y-down pixel frame. The voronoi construction is
half-plane clipping of the canvas rectangle per site: O(n^2) overall, but
robust and bit-deterministic, which matters more than speed at n <= 256.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .core import CanvasSpec, FieldExpr
from .errors import DegenerateSites, FieldTypeError, RangeError, UnsupportedTopology
from .fields import FieldContext, eval_int
from .rng import Rng, derive

Point = tuple[float, float]
Polygon = tuple[Point, ...]

MIN_FRAGMENT_AREA = 1.0  # px^2; smaller fragments are dropped with a warning
COLLAPSE_AREA = 1e-3  # px^2; inset results below this count as empty
SITE_EPSILON = 1e-6  # px; closer voronoi sites count as coincident
SNAP_TOLERANCE = 1e-6  # px; vertex clustering tolerance for merges
MITER_LIMIT = 4.0


def signed_area(poly: Polygon) -> float:
    a = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        a += x0 * y1 - x1 * y0
    return 0.5 * a


def polygon_area(poly: Polygon) -> float:
    return abs(signed_area(poly))


def polygon_centroid(poly: Polygon) -> Point:
    a = signed_area(poly)
    if abs(a) < 1e-12:
        xs = [p[0] for p in poly]
        ys = [p[1] for p in poly]
        return (sum(xs) / len(xs), sum(ys) / len(ys))
    cx = cy = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    return (cx / (6.0 * a), cy / (6.0 * a))


def ensure_positive(poly: Polygon) -> Polygon:
    return poly if signed_area(poly) >= 0 else tuple(reversed(poly))


def polygon_bbox(poly: Polygon) -> tuple[float, float, float, float]:
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return (min(xs), min(ys), max(xs), max(ys))


def is_convex(poly: Polygon, eps: float = 1e-9) -> bool:
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        cx, cy = poly[(i + 2) % n]
        if (bx - ax) * (cy - by) - (by - ay) * (cx - bx) < -eps:
            return False
    return True


def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        if v > 1e-12:
            return 1
        if v < -1e-12:
            return -1
        return 0

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def is_simple(poly: Polygon) -> bool:
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            if _segments_cross(a, b, poly[j], poly[(j + 1) % n]):
                return False
    return True


def point_in_polygon(pt: Point, poly: Polygon) -> bool:
    x, y = pt
    inside = False
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            t = (y - y0) / (y1 - y0)
            if x < x0 + t * (x1 - x0):
                inside = not inside
    return inside


def clip_halfplane(poly: Polygon, qx: float, qy: float, nx: float, ny: float) -> Polygon:
    """Keep the part of poly where (p - q) . n <= 0 (Sutherland-Hodgman)."""
    out: list[Point] = []
    n = len(poly)
    if n == 0:
        return ()
    prev = poly[-1]
    dprev = (prev[0] - qx) * nx + (prev[1] - qy) * ny
    for cur in poly:
        dcur = (cur[0] - qx) * nx + (cur[1] - qy) * ny
        if dprev <= 0.0:
            out.append(prev)
            if dcur > 0.0:
                t = dprev / (dprev - dcur)
                out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
        elif dcur <= 0.0:
            t = dprev / (dprev - dcur)
            out.append((prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])))
        prev, dprev = cur, dcur
    return tuple(out) if len(out) >= 3 else ()


def transform_polygon(poly: Polygon, m: tuple[float, float, float, float, float, float]) -> Polygon:
    a, b, c, d, e, f = m
    return tuple((a * x + c * y + e, b * x + d * y + f) for x, y in poly)


# ---------------------------------------------------------------------------
# Fragments


@dataclass(frozen=True)
class Fragment:
    id: int
    row: Optional[int]
    col: Optional[int]
    boundary: Polygon
    centroid: Point
    area: float


@dataclass(frozen=True)
class FragmentSet:
    fragments: tuple[Fragment, ...]
    source_kind: str
    warnings: tuple[str, ...] = ()

    @property
    def row_count(self) -> Optional[int]:
        rows = [f.row for f in self.fragments if f.row is not None]
        return max(rows) + 1 if rows else None

    @property
    def col_count(self) -> Optional[int]:
        cols = [f.col for f in self.fragments if f.col is not None]
        return max(cols) + 1 if cols else None


def _make_fragment(fid: int, row, col, boundary: Polygon) -> Fragment:
    boundary = ensure_positive(boundary)
    return Fragment(fid, row, col, boundary, polygon_centroid(boundary), polygon_area(boundary))


def _finalize(cells: list[tuple[Optional[int], Optional[int], Polygon]], kind: str) -> FragmentSet:
    """Drop sub-pixel slivers, then assign contiguous ids in list order."""
    warnings = []
    kept = []
    for row, col, poly in cells:
        if polygon_area(poly) < MIN_FRAGMENT_AREA:
            warnings.append(f"dropped {kind} fragment with area < {MIN_FRAGMENT_AREA} px^2")
            continue
        kept.append((row, col, poly))
    frags = tuple(_make_fragment(i, row, col, poly) for i, (row, col, poly) in enumerate(kept))
    return FragmentSet(frags, kind, tuple(warnings))


def split_grid(canvas: CanvasSpec, rows: int, cols: int) -> FragmentSet:
    if not (1 <= rows <= 64 and 1 <= cols <= 64):
        raise RangeError(f"grid rows/cols must lie in 1..64, got {rows}x{cols}")
    w, h = float(canvas.width), float(canvas.height)
    xs = [c * w / cols for c in range(cols + 1)]
    ys = [r * h / rows for r in range(rows + 1)]
    cells = []
    for r in range(rows):
        for c in range(cols):
            poly = ((xs[c], ys[r]), (xs[c + 1], ys[r]), (xs[c + 1], ys[r + 1]), (xs[c], ys[r + 1]))
            cells.append((r, c, poly))
    return _finalize(cells, "grid")


def split_brick(canvas: CanvasSpec, rows: int, cols: int, offset: float) -> FragmentSet:
    if not (1 <= rows <= 64 and 1 <= cols <= 64):
        raise RangeError(f"brick rows/cols must lie in 1..64, got {rows}x{cols}")
    if not 0.0 <= offset < 1.0:
        raise RangeError(f"brick offset must lie in [0,1), got {offset}")
    w, h = float(canvas.width), float(canvas.height)
    ys = [r * h / rows for r in range(rows + 1)]
    cells = []
    for r in range(rows):
        if r % 2 == 1 and offset > 0.0:
            # shifted row: clamped cuts plus the right edge -> cols+1 cells
            cuts = [min(w, max(0.0, (c - offset) * w / cols)) for c in range(cols + 1)]
            cuts.append(w)
        else:
            cuts = [c * w / cols for c in range(cols + 1)]
        col = 0
        for i in range(len(cuts) - 1):
            x0, x1 = cuts[i], cuts[i + 1]
            if x1 - x0 <= 0.0:
                continue
            poly = ((x0, ys[r]), (x1, ys[r]), (x1, ys[r + 1]), (x0, ys[r + 1]))
            cells.append((r, col, poly))
            col += 1
    return _finalize(cells, "brick")


def split_stripes(canvas: CanvasSpec, n: int, orientation: str) -> FragmentSet:
    if not 1 <= n <= 128:
        raise RangeError(f"stripes n must lie in 1..128, got {n}")
    if orientation not in ("horizontal", "vertical"):
        raise RangeError(f"unknown stripes orientation {orientation!r}")
    w, h = float(canvas.width), float(canvas.height)
    cells = []
    if orientation == "horizontal":
        ys = [i * h / n for i in range(n + 1)]
        for i in range(n):
            poly = ((0.0, ys[i]), (w, ys[i]), (w, ys[i + 1]), (0.0, ys[i + 1]))
            cells.append((i, None, poly))
    else:
        xs = [i * w / n for i in range(n + 1)]
        for i in range(n):
            poly = ((xs[i], 0.0), (xs[i + 1], 0.0), (xs[i + 1], h), (xs[i], h))
            cells.append((None, i, poly))
    return _finalize(cells, "stripes")


def _voronoi_cell(rect: Polygon, sites: list[Point], i: int) -> Polygon:
    cell = rect
    sx, sy = sites[i]
    for j, (ox, oy) in enumerate(sites):
        if j == i:
            continue
        # keep points closer to site i: (p - midpoint) . (other - site) <= 0
        mx, my = (sx + ox) * 0.5, (sy + oy) * 0.5
        cell = clip_halfplane(cell, mx, my, ox - sx, oy - sy)
        if not cell:
            break
    return cell


def split_voronoi(canvas: CanvasSpec, n: int, seed: int, relax_iters: int) -> FragmentSet:
    if not 2 <= n <= 256:
        raise RangeError(f"voronoi n must lie in 2..256, got {n}")
    if not 0 <= relax_iters <= 5:
        raise RangeError(f"voronoi relax iterations must lie in 0..5, got {relax_iters}")
    w, h = float(canvas.width), float(canvas.height)
    rect: Polygon = ((0.0, 0.0), (w, 0.0), (w, h), (0.0, h))

    sites: list[Point] = []
    for attempt in range(8):
        rng = Rng(derive(seed, "voronoi-sites", attempt))
        candidate = [(rng.uniform(0.0, w), rng.uniform(0.0, h)) for _ in range(n)]
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                dx = candidate[i][0] - candidate[j][0]
                dy = candidate[i][1] - candidate[j][1]
                if dx * dx + dy * dy < SITE_EPSILON * SITE_EPSILON:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            sites = candidate
            break
    else:
        raise DegenerateSites(f"could not draw {n} distinct voronoi sites after 8 attempts")

    for _ in range(relax_iters):
        sites = [polygon_centroid(_voronoi_cell(rect, sites, i)) for i in range(len(sites))]

    order = sorted(range(len(sites)), key=lambda i: (sites[i][1], sites[i][0], i))
    cells = []
    for i in order:
        cells.append((None, None, _voronoi_cell(rect, sites, i)))
    return _finalize(cells, "voronoi")


# ---------------------------------------------------------------------------
# Merging


def _snap_vertices(polys: list[Polygon]) -> dict[Point, Point]:
    """Cluster near-coincident vertices (numerical twins from clipping) to a
    shared representative, chosen deterministically as the cluster minimum."""
    points = sorted({p for poly in polys for p in poly})
    rep: dict[Point, Point] = {}
    clusters: list[list[Point]] = []
    for p in points:
        placed = False
        for cluster in reversed(clusters):
            q = cluster[0]
            if p[0] - q[0] > SNAP_TOLERANCE:
                break
            if abs(p[0] - q[0]) <= SNAP_TOLERANCE and abs(p[1] - q[1]) <= SNAP_TOLERANCE:
                cluster.append(p)
                placed = True
                break
        if not placed:
            clusters.append([p])
    for cluster in clusters:
        anchor = min(cluster)
        for p in cluster:
            rep[p] = anchor
    return rep


def _subdivide_edges(poly: Polygon, vertices: set[Point]) -> list[tuple[Point, Point]]:
    """Split each edge at snap vertices lying on it (handles T-junctions)."""
    edges: list[tuple[Point, Point]] = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        abx, aby = b[0] - a[0], b[1] - a[1]
        length2 = abx * abx + aby * aby
        if length2 == 0.0:
            continue
        on_edge = []
        for v in vertices:
            if v == a or v == b:
                continue
            t = ((v[0] - a[0]) * abx + (v[1] - a[1]) * aby) / length2
            if t <= 1e-12 or t >= 1.0 - 1e-12:
                continue
            px, py = a[0] + t * abx, a[1] + t * aby
            if abs(px - v[0]) <= SNAP_TOLERANCE and abs(py - v[1]) <= SNAP_TOLERANCE:
                on_edge.append((t, v))
        prev = a
        for _, v in sorted(on_edge):
            edges.append((prev, v))
            prev = v
        edges.append((prev, b))
    return edges


def _remove_collinear(poly: Polygon) -> Polygon:
    out = list(poly)
    changed = True
    while changed and len(out) > 3:
        changed = False
        for i in range(len(out)):
            a = out[i - 1]
            b = out[i]
            c = out[(i + 1) % len(out)]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(cross) < 1e-7:
                del out[i]
                changed = True
                break
    return tuple(out)


def _canonical_start(poly: Polygon) -> Polygon:
    k = min(range(len(poly)), key=lambda i: (poly[i][1], poly[i][0]))
    return poly[k:] + poly[:k]


def _dissolve(polys: list[Polygon], all_vertices: set[Point], snap: dict[Point, Point]) -> Polygon:
    """Outer contour of an edge-connected group: cancel opposite directed
    edges, then stitch the survivors into one loop."""
    counts: dict[tuple[Point, Point], int] = {}
    for poly in polys:
        snapped = tuple(snap[p] for p in poly)
        dedup = tuple(p for i, p in enumerate(snapped) if p != snapped[i - 1])
        for a, b in _subdivide_edges(dedup, all_vertices):
            if a == b:
                continue
            counts[(a, b)] = counts.get((a, b), 0) + 1
    survivors: dict[Point, list[Point]] = {}
    n_edges = 0
    for (a, b), c in sorted(counts.items()):
        net = c - counts.get((b, a), 0)
        if net > 0:
            if net > 1:
                raise UnsupportedTopology("merge produced an overlapping boundary edge")
            survivors.setdefault(a, []).append(b)
            n_edges += 1
    if not survivors:
        raise UnsupportedTopology("merge dissolved every boundary edge")
    for a, outs in survivors.items():
        if len(outs) > 1:
            raise UnsupportedTopology("merge boundary touches itself at a vertex")
    start = min(survivors)
    loop = [start]
    cur = survivors[start][0]
    used = 1
    while cur != start:
        loop.append(cur)
        nxt = survivors.get(cur)
        if not nxt:
            raise UnsupportedTopology("merge boundary does not close")
        cur = nxt[0]
        used += 1
    if used != n_edges:
        raise UnsupportedTopology("merge produced a hole")
    return _canonical_start(_remove_collinear(ensure_positive(tuple(loop))))


def merge_fragments(fs: FragmentSet, group_key: Union[FieldExpr, int], canvas: CanvasSpec,
                    program_seed: int = 0) -> FragmentSet:
    """Dissolve fragments sharing a key into one fragment per edge-connected
    component. Output fragments carry no row/col and fresh contiguous ids
    ordered by ascending minimum constituent id."""
    frags = fs.fragments
    if not frags:
        return fs
    row_count, col_count = fs.row_count, fs.col_count
    keys = []
    for f in frags:
        ctx = FieldContext(f.id, f.row, f.col, f.centroid, len(frags),
                           row_count, col_count, canvas, program_seed)
        try:
            keys.append(eval_int(group_key, ctx))
        except FieldTypeError:
            raise
    snap = _snap_vertices([f.boundary for f in frags])
    all_vertices = set(snap.values())

    # adjacency over shared (subdivided, snapped) undirected edges
    edge_owner: dict[tuple[Point, Point], list[int]] = {}
    for idx, f in enumerate(frags):
        snapped = tuple(snap[p] for p in f.boundary)
        dedup = tuple(p for i, p in enumerate(snapped) if p != snapped[i - 1])
        for a, b in _subdivide_edges(dedup, all_vertices):
            key = (a, b) if a <= b else (b, a)
            edge_owner.setdefault(key, []).append(idx)

    parent = list(range(len(frags)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for owners in edge_owner.values():
        for i in range(1, len(owners)):
            a, b = find(owners[0]), find(owners[i])
            if a != b and keys[owners[0]] == keys[owners[i]]:
                parent[max(a, b)] = min(a, b)

    groups: dict[int, list[int]] = {}
    for idx in range(len(frags)):
        groups.setdefault(find(idx), []).append(idx)

    merged: list[tuple[int, Polygon]] = []
    for members in groups.values():
        min_id = min(frags[i].id for i in members)
        if len(members) == 1:
            merged.append((min_id, frags[members[0]].boundary))
        else:
            merged.append((min_id, _dissolve([frags[i].boundary for i in members],
                                             all_vertices, snap)))
    merged.sort(key=lambda item: item[0])
    cells = [(None, None, poly) for _, poly in merged]
    out = _finalize(cells, fs.source_kind)
    return FragmentSet(out.fragments, fs.source_kind, fs.warnings + out.warnings)


# ---------------------------------------------------------------------------
# Insetting


def _dist_point_segment(p: Point, a: Point, b: Point) -> float:
    abx, aby = b[0] - a[0], b[1] - a[1]
    length2 = abx * abx + aby * aby
    if length2 == 0.0:
        return math.sqrt((p[0] - a[0]) ** 2 + (p[1] - a[1]) ** 2)
    t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / length2
    t = min(1.0, max(0.0, t))
    qx, qy = a[0] + t * abx, a[1] + t * aby
    return math.sqrt((p[0] - qx) ** 2 + (p[1] - qy) ** 2)


def _min_boundary_distance(p: Point, poly: Polygon) -> float:
    n = len(poly)
    return min(_dist_point_segment(p, poly[i], poly[(i + 1) % n]) for i in range(n))


def _erode_convex(poly: Polygon, d: float) -> Polygon:
    out = poly
    n = len(poly)
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        length = math.sqrt(ex * ex + ey * ey)
        if length < 1e-12:
            continue
        nx, ny = -ey / length, ex / length  # inward for positive orientation
        # keep points at depth >= d behind this edge
        out = clip_halfplane(out, ax + d * nx, ay + d * ny, -nx, -ny)
        if not out:
            return ()
    return out


def polygon_inset(poly: Polygon, d: float) -> Polygon:
    """Inward offset by d with miter joins (limit 4, bevel fallback).

    Returns () when the offset collapses the polygon. If the literal miter
    construction self-intersects (short edges vanishing under a large inset)
    a convex input falls back to exact half-plane erosion.
    """
    if d < 0:
        raise RangeError(f"inset distance must be >= 0, got {d}")
    if d == 0:
        return poly
    poly = ensure_positive(poly)
    n = len(poly)
    normals: list[Point] = []
    for i in range(n):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        length = math.sqrt(ex * ex + ey * ey)
        if length < 1e-12:
            normals.append((0.0, 0.0))
        else:
            normals.append((-ey / length, ex / length))

    # At a convex corner the join is simply the intersection of the adjacent
    # offset lines (the eroded region's own corner). The miter limit applies
    # at reflex corners, where the join spike points into the material: past
    # the limit it is beveled with the two per-edge foot points.
    out: list[tuple[Point, bool]] = []  # (vertex, needs depth-d check)
    for i in range(n):
        np_, nc = normals[i - 1], normals[i]
        px, py = poly[i]
        ex0, ey0 = px - poly[i - 1][0], py - poly[i - 1][1]
        ex1, ey1 = poly[(i + 1) % n][0] - px, poly[(i + 1) % n][1] - py
        convex = ex0 * ey1 - ey0 * ex1 >= 0.0
        ax, ay = poly[i - 1][0] + d * np_[0], poly[i - 1][1] + d * np_[1]
        bx, by = px + d * np_[0], py + d * np_[1]
        cx, cy = px + d * nc[0], py + d * nc[1]
        dx, dy = poly[(i + 1) % n][0] + d * nc[0], poly[(i + 1) % n][1] + d * nc[1]
        r1x, r1y = bx - ax, by - ay
        r2x, r2y = dx - cx, dy - cy
        denom = r1x * r2y - r1y * r2x
        if abs(denom) < 1e-12:  # collinear edges
            out.append(((cx, cy), convex))
            continue
        t = ((cx - ax) * r2y - (cy - ay) * r2x) / denom
        mx, my = ax + t * r1x, ay + t * r1y
        miter = math.sqrt((mx - px) ** 2 + (my - py) ** 2)
        if not convex and miter / d > MITER_LIMIT:
            out.append(((bx, by), False))
            out.append(((cx, cy), False))
        else:
            out.append(((mx, my), convex))

    dedup: list[tuple[Point, bool]] = []
    for p, check in out:
        if not dedup or p != dedup[-1][0]:
            dedup.append((p, check))
    if len(dedup) > 1 and dedup[0][0] == dedup[-1][0]:
        dedup.pop()
    cleaned = tuple(p for p, _ in dedup)
    if (len(cleaned) >= 3 and signed_area(cleaned) >= COLLAPSE_AREA and is_simple(cleaned)
            and all(point_in_polygon(p, poly) for p in cleaned)
            and all(_min_boundary_distance(p, poly) >= d - 1e-6
                    for p, check in dedup if check)):
        return cleaned
    if is_convex(poly):
        eroded = _erode_convex(poly, d)
        if eroded and polygon_area(eroded) >= COLLAPSE_AREA:
            return eroded
    return ()
