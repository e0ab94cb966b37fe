"""Default rasterizer plug (Pillow). Raster bytes sit outside the
determinism contract; SVG is the ground-truth channel. Rendering is done at
2x and downsampled for tolerable edges."""

from __future__ import annotations

import io
import math

from PIL import Image, ImageDraw

from .geometry import Polygon, point_in_polygon, polygon_area
from .motifs import MotifRegistry
from .render import FilledPath, MotifInstance, SceneGraph, StrokedPath

SUPERSAMPLE = 2
ARC_SEGMENTS = 12


def _flatten_rounded(polygon: Polygon, radius: float) -> list[tuple[float, float]]:
    if radius <= 0:
        return list(polygon)
    n = len(polygon)
    lengths = []
    for i in range(n):
        ax, ay = polygon[i]
        bx, by = polygon[(i + 1) % n]
        lengths.append(math.sqrt((bx - ax) ** 2 + (by - ay) ** 2) or 1e-9)
    out: list[tuple[float, float]] = []
    for i in range(n):
        px, py = polygon[i]
        qx, qy = polygon[i - 1]
        nx, ny = polygon[(i + 1) % n]
        rc = min(radius, lengths[i - 1] / 2.0, lengths[i] / 2.0)
        if rc < 1e-6:
            out.append((px, py))
            continue
        t_in = (px - (px - qx) / lengths[i - 1] * rc, py - (py - qy) / lengths[i - 1] * rc)
        t_out = (px + (nx - px) / lengths[i] * rc, py + (ny - py) / lengths[i] * rc)
        out.append(t_in)
        # quadratic approximation of the corner arc through the vertex
        for k in range(1, ARC_SEGMENTS):
            t = k / ARC_SEGMENTS
            a = (1 - t) ** 2
            b = 2 * (1 - t) * t
            c = t * t
            out.append((a * t_in[0] + b * px + c * t_out[0],
                        a * t_in[1] + b * py + c * t_out[1]))
        out.append(t_out)
    return out


class PillowRasterizer:
    """Renders a SceneGraph to PNG bytes (RGB), size x size pixels."""

    def rasterize(self, scene: SceneGraph, registry: MotifRegistry, size: int) -> bytes:
        ss = SUPERSAMPLE
        W, H = size * ss, size * ss
        sx = W / scene.canvas.width
        sy = H / scene.canvas.height
        img = Image.new("RGB", (W, H), (scene.canvas.background.r,
                                        scene.canvas.background.g,
                                        scene.canvas.background.b))
        for el in scene.elements:
            overlay = img if el.opacity >= 1.0 else Image.new("RGBA", (W, H), (0, 0, 0, 0))
            draw = ImageDraw.Draw(overlay, "RGBA")
            alpha = 255 if el.opacity >= 1.0 else max(0, min(255, round(el.opacity * 255)))
            if isinstance(el, FilledPath):
                pts = [(x * sx, y * sy) for x, y in _flatten_rounded(el.polygon, el.corner_radius)]
                if len(pts) >= 3:
                    draw.polygon(pts, fill=(el.fill.r, el.fill.g, el.fill.b, alpha))
            elif isinstance(el, StrokedPath):
                pts = [(x * sx, y * sy) for x, y in _flatten_rounded(el.polygon, el.corner_radius)]
                if len(pts) >= 2:
                    width = max(1, round(el.stroke_width * sx))
                    draw.line(pts + [pts[0]], fill=(el.stroke.r, el.stroke.g, el.stroke.b, alpha),
                              width=width, joint="curve")
            elif isinstance(el, MotifInstance):
                self._draw_motif(overlay, el, registry, sx, sy, alpha)
            if overlay is not img:
                img = Image.alpha_composite(img.convert("RGBA"), overlay).convert("RGB")
        img = img.resize((size, size), Image.LANCZOS)
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    def _draw_motif(self, img: Image.Image, el: MotifInstance, registry: MotifRegistry,
                    sx: float, sy: float, alpha: int):
        motif = registry.get(el.motif_id)
        a, b, c, d, e, f = el.transform
        contours = []
        for contour in motif.contours:
            contours.append([((a * x + c * y + e) * sx, (b * x + d * y + f) * sy)
                             for x, y in contour])
        # even-odd via alternating mask paint: outer-first by |area|
        order = sorted(range(len(contours)), key=lambda i: -polygon_area(tuple(contours[i])))
        mask = Image.new("L", img.size, 0)
        mdraw = ImageDraw.Draw(mask)
        for rank, idx in enumerate(order):
            pts = contours[idx]
            if len(pts) >= 3:
                depth = sum(1 for j in order[:rank]
                            if point_in_polygon(pts[0], tuple(contours[j])))
                mdraw.polygon(pts, fill=255 if depth % 2 == 0 else 0)
        color = el.fill
        rgb = (color.r, color.g, color.b) if color is not None else (0, 0, 0)
        solid = Image.new("RGBA", img.size, rgb + (alpha,))
        if img.mode == "RGBA":
            img.paste(solid, (0, 0), Image.composite(mask, Image.new("L", img.size, 0), mask))
        else:
            img.paste(solid.convert("RGB"), (0, 0), mask)
