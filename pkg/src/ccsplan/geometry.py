"""Planar footprint geometry for the primitive object proxies.

Footprints are either axis-aligned rectangles (blocks) or disks (everything
else).  Overlap tests are strict: touching boundaries do not count, so stacked
or side-by-side blocks are not reported as interpenetrating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from shapely.geometry import MultiPoint, Point, Polygon
from shapely.ops import unary_union

EPS = 1e-9


@dataclass(frozen=True)
class Footprint:
    kind: str  # "box" | "disk"
    cx: float
    cy: float
    hx: float = 0.0
    hy: float = 0.0
    r: float = 0.0

    def contains_point(self, px: float, py: float, eps: float = EPS) -> bool:
        if self.kind == "box":
            return abs(px - self.cx) <= self.hx + eps and abs(py - self.cy) <= self.hy + eps
        return math.hypot(px - self.cx, py - self.cy) <= self.r + eps

    def distance_to_point(self, px: float, py: float) -> float:
        """Zero inside, Euclidean distance to the region outside."""
        if self.kind == "box":
            dx = max(abs(px - self.cx) - self.hx, 0.0)
            dy = max(abs(py - self.cy) - self.hy, 0.0)
            return math.hypot(dx, dy)
        return max(math.hypot(px - self.cx, py - self.cy) - self.r, 0.0)

    def corners(self) -> list[tuple[float, float]]:
        return [(self.cx + sx * self.hx, self.cy + sy * self.hy) for sx in (-1, 1) for sy in (-1, 1)]

    def polygon(self, resolution: int = 32) -> Polygon:
        if self.kind == "box":
            return Polygon([
                (self.cx - self.hx, self.cy - self.hy), (self.cx + self.hx, self.cy - self.hy),
                (self.cx + self.hx, self.cy + self.hy), (self.cx - self.hx, self.cy + self.hy),
            ])
        return Point(self.cx, self.cy).buffer(self.r, resolution)


def footprint_of(obj) -> Footprint:
    x, y = obj.pose.x, obj.pose.y
    if obj.shape.kind == "box":
        hx, hy, _ = obj.shape.half_extents
        return Footprint("box", x, y, hx=hx, hy=hy)
    return Footprint("disk", x, y, r=obj.shape.radius)


def disk_overlaps(cx: float, cy: float, r: float, fp: Footprint, eps: float = EPS) -> bool:
    """Disk of radius r (r may be 0 for a point) overlaps fp with positive depth."""
    if r <= 0:
        if fp.kind == "box":
            return abs(cx - fp.cx) < fp.hx - eps and abs(cy - fp.cy) < fp.hy - eps
        return math.hypot(cx - fp.cx, cy - fp.cy) < fp.r - eps
    return fp.distance_to_point(cx, cy) < r - eps


def footprints_overlap(a: Footprint, b: Footprint, eps: float = EPS) -> bool:
    if a.kind == "box" and b.kind == "box":
        return (abs(a.cx - b.cx) < a.hx + b.hx - eps) and (abs(a.cy - b.cy) < a.hy + b.hy - eps)
    if a.kind == "disk" and b.kind == "disk":
        return math.hypot(a.cx - b.cx, a.cy - b.cy) < a.r + b.r - eps
    box, disk = (a, b) if a.kind == "box" else (b, a)
    return box.distance_to_point(disk.cx, disk.cy) < disk.r - eps


def footprint_within_disk(fp: Footprint, cx: float, cy: float, R: float, eps: float = EPS) -> bool:
    if fp.kind == "box":
        return all(math.hypot(px - cx, py - cy) <= R + eps for px, py in fp.corners())
    return math.hypot(fp.cx - cx, fp.cy - cy) + fp.r <= R + eps


def point_segment_distance(p: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_cross(p1, p2, q1, q2, eps: float = 1e-12) -> bool:
    """Proper intersection: the segments cross at a single interior point."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    return ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and \
           ((d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps))


def point_in_polygon(p: Sequence[float], poly: Sequence[Sequence[float]]) -> bool:
    """Even-odd ray casting."""
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xs = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xs > x:
                inside = not inside
    return inside


def support_hull(own: Footprint, supporters: Iterable[Footprint]):
    """Convex hull of the contact patches between ``own`` and each supporter."""
    mine = own.polygon()
    patches = []
    for fp in supporters:
        patch = mine.intersection(fp.polygon())
        if not patch.is_empty and patch.area > 0:
            patches.append(patch)
    if not patches:
        return None
    return unary_union(patches).convex_hull


def com_supported(own: Footprint, supporters: Iterable[Footprint], margin: float = 0.0,
                  eps: float = 1e-9) -> bool:
    hull = support_hull(own, supporters)
    if hull is None:
        return False
    if margin > 0:
        hull = hull.buffer(-margin)
        if hull.is_empty:
            return False
    return hull.distance(Point(own.cx, own.cy)) <= eps


def convex_hull_points(points: Iterable[Sequence[float]]):
    return MultiPoint([tuple(p) for p in points]).convex_hull
