"""Motif registry: the builtin vector tile library plus user-supplied assets.

A motif's geometry is one or more closed contours normalized into the unit
box (aspect preserved, centered); nested contours render with the even-odd
rule, which is how the ring and crescent get their holes. User assets are SVG
files restricted to straight-line outlines (polygon/polyline elements or
paths using M/L/H/V/Z), exactly one outline per file.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import MotifParseError, UnknownMotif

Contour = tuple[tuple[float, float], ...]

BUILTIN_IDS = ("circle", "ring", "square", "diamond", "triangle",
               "star5", "cross", "crescent", "petal", "stripebar")

CIRCLE_SEGMENTS = 64


@dataclass(frozen=True)
class MotifDef:
    motif_id: str
    source: str  # "builtin" | "userFile"
    contours: tuple[Contour, ...]

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p[0] for c in self.contours for p in c]
        ys = [p[1] for c in self.contours for p in c]
        return (min(xs), min(ys), max(xs), max(ys))


def _circle_points(cx: float, cy: float, r: float, segments: int = CIRCLE_SEGMENTS,
                   start: float = 0.0, end: float = 2 * math.pi,
                   closed: bool = True) -> list[tuple[float, float]]:
    count = segments if closed else segments + 1
    pts = []
    for i in range(count):
        a = start + (end - start) * i / segments
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    return pts


def _normalize(contours: list[list[tuple[float, float]]]) -> tuple[Contour, ...]:
    """Fit into the unit box preserving aspect, centered."""
    xs = [p[0] for c in contours for p in c]
    ys = [p[1] for c in contours for p in c]
    w, h = max(xs) - min(xs), max(ys) - min(ys)
    scale = 1.0 / max(w, h) if max(w, h) > 0 else 1.0
    ox = (1.0 - w * scale) / 2.0 - min(xs) * scale
    oy = (1.0 - h * scale) / 2.0 - min(ys) * scale
    return tuple(tuple((x * scale + ox, y * scale + oy) for x, y in c) for c in contours)


def _star(points: int, outer: float, inner: float) -> list[tuple[float, float]]:
    pts = []
    for i in range(points * 2):
        r = outer if i % 2 == 0 else inner
        a = -math.pi / 2 + math.pi * i / points
        pts.append((r * math.cos(a), r * math.sin(a)))
    return pts


def _crescent() -> list[list[tuple[float, float]]]:
    # outer disc minus an offset cutter disc, sampled as two arcs
    R, cx = 0.5, 0.0
    r, dx = 0.42, 0.22  # cutter radius and center offset
    # circle intersection (standard two-circle geometry)
    a = (dx * dx + R * R - r * r) / (2 * dx)
    h = math.sqrt(R * R - a * a)
    alpha = math.atan2(h, a)          # half-angle of kept outer arc
    beta = math.atan2(h, a - dx)      # angle of the cutter arc endpoints
    outer = _circle_points(cx, 0.0, R, 48, alpha, 2 * math.pi - alpha, closed=False)
    inner = _circle_points(dx, 0.0, r, 32, -beta, beta, closed=False)
    return [outer + inner]


def _petal() -> list[list[tuple[float, float]]]:
    # vesica piscis: two symmetric circular arcs
    r, d = 1.0, 1.2
    h = math.sqrt(r * r - (d / 2) ** 2)
    alpha = math.atan2(h, d / 2)
    left = _circle_points(-d / 2, 0.0, r, 24, -alpha, alpha, closed=False)
    right = _circle_points(d / 2, 0.0, r, 24, math.pi - alpha, math.pi + alpha, closed=False)
    return [left + right]


def _build_builtins() -> dict[str, MotifDef]:
    shapes: dict[str, list[list[tuple[float, float]]]] = {
        "circle": [_circle_points(0.5, 0.5, 0.5)],
        "ring": [_circle_points(0.5, 0.5, 0.5),
                 list(reversed(_circle_points(0.5, 0.5, 0.3)))],
        "square": [[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]],
        "diamond": [[(0.5, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 0.5)]],
        "triangle": [[(0.5, 0.0), (1.0, 1.0), (0.0, 1.0)]],
        "star5": [_star(5, 0.5, 0.19)],
        "cross": [[(0.35, 0.0), (0.65, 0.0), (0.65, 0.35), (1.0, 0.35), (1.0, 0.65),
                   (0.65, 0.65), (0.65, 1.0), (0.35, 1.0), (0.35, 0.65), (0.0, 0.65),
                   (0.0, 0.35), (0.35, 0.35)]],
        "crescent": _crescent(),
        "petal": _petal(),
        "stripebar": [[(0.0, 0.36), (1.0, 0.36), (1.0, 0.64), (0.0, 0.64)]],
    }
    return {name: MotifDef(name, "builtin", _normalize(contours))
            for name, contours in shapes.items()}


_BUILTINS = _build_builtins()


class MotifRegistry:
    def __init__(self, motifs: dict[str, MotifDef]):
        self._motifs = dict(motifs)

    def get(self, motif_id: str) -> MotifDef:
        try:
            return self._motifs[motif_id]
        except KeyError:
            raise UnknownMotif(f"unknown motif {motif_id!r}; known: {self.ids()}") from None

    def __contains__(self, motif_id: str) -> bool:
        return motif_id in self._motifs

    def ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._motifs))

    def defs(self) -> tuple[MotifDef, ...]:
        return tuple(self._motifs[i] for i in self.ids())


_PATH_TOKEN = re.compile(r"([MmLlHhVvZz])|(-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)")


def _parse_path_d(d: str) -> list[list[tuple[float, float]]]:
    tokens = _PATH_TOKEN.findall(d)
    leftover = _PATH_TOKEN.sub("", d).replace(",", "").strip()
    if leftover:
        raise ValueError(f"unsupported path data near {leftover[:12]!r}")
    contours: list[list[tuple[float, float]]] = []
    cur: list[tuple[float, float]] = []
    x = y = 0.0
    i, cmd = 0, None
    nums: list[float] = []
    flat: list[tuple[str, float]] = []
    for letter, num in tokens:
        if letter:
            flat.append(("cmd", letter))
        else:
            flat.append(("num", float(num)))
    idx = 0

    def take(n: int) -> list[float]:
        nonlocal idx
        vals = []
        for _ in range(n):
            if idx >= len(flat) or flat[idx][0] != "num":
                raise ValueError("path data ended mid-command")
            vals.append(flat[idx][1])
            idx += 1
        return vals

    while idx < len(flat):
        kind, val = flat[idx]
        if kind == "cmd":
            cmd = val
            idx += 1
            if cmd in "Zz":
                if cur:
                    contours.append(cur)
                    cur = []
                continue
        elif cmd is None:
            raise ValueError("path data must start with a command")
        if cmd in "Mm":
            dx, dy = take(2)
            if cmd == "m":
                x, y = x + dx, y + dy
            else:
                x, y = dx, dy
            if cur:
                contours.append(cur)
            cur = [(x, y)]
            cmd = "L" if cmd == "M" else "l"  # subsequent pairs are linetos
        elif cmd in "Ll":
            dx, dy = take(2)
            x, y = (x + dx, y + dy) if cmd == "l" else (dx, dy)
            cur.append((x, y))
        elif cmd in "Hh":
            (dx,) = take(1)
            x = x + dx if cmd == "h" else dx
            cur.append((x, y))
        elif cmd in "Vv":
            (dy,) = take(1)
            y = y + dy if cmd == "v" else dy
            cur.append((x, y))
        else:
            raise ValueError(f"unsupported path command {cmd!r} (only M/L/H/V/Z)")
    if cur:
        contours.append(cur)
    return [c for c in contours if len(c) >= 3]


def _read_motif_file(path: Path) -> list[list[tuple[float, float]]]:
    tree = ET.parse(path)
    contours: list[list[tuple[float, float]]] = []
    for el in tree.iter():
        tag = el.tag.rsplit("}", 1)[-1]
        if tag in ("polygon", "polyline"):
            raw = (el.get("points") or "").replace(",", " ").split()
            if len(raw) % 2 != 0:
                raise ValueError("odd number of point coordinates")
            pts = [(float(raw[i]), float(raw[i + 1])) for i in range(0, len(raw), 2)]
            if len(pts) >= 3:
                contours.append(pts)
        elif tag == "path":
            contours.extend(_parse_path_d(el.get("d") or ""))
    if len(contours) == 0:
        raise ValueError("no outline found (need polygon/polyline or M/L/H/V/Z path)")
    if len(contours) > 1:
        raise ValueError(f"expected a single outline, found {len(contours)}")
    return contours


def load_motif_library(directory: Optional[str] = None) -> MotifRegistry:
    """Builtins plus user motifs (ids prefixed 'user/'). Raises
    MotifParseError naming every offending file."""
    motifs = dict(_BUILTINS)
    if directory:
        root = Path(directory)
        if not root.is_dir():
            raise MotifParseError(f"motif directory {directory!r} does not exist", [str(root)])
        bad: list[str] = []
        messages: list[str] = []
        for path in sorted(root.glob("*.svg")):
            try:
                contours = _read_motif_file(path)
            except (ValueError, ET.ParseError) as exc:
                bad.append(str(path))
                messages.append(f"{path.name}: {exc}")
                continue
            motif_id = f"user/{path.stem}"
            motifs[motif_id] = MotifDef(motif_id, "userFile", _normalize(contours))
        if bad:
            raise MotifParseError("unreadable motif files: " + "; ".join(messages), bad)
    return MotifRegistry(motifs)


def builtin_registry() -> MotifRegistry:
    return MotifRegistry(_BUILTINS)
