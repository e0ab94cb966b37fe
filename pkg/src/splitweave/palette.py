"""Seeded palette sampling with a legibility floor.

Schemes are classic hue-offset families (analogous +-30deg, complementary
180deg, triadic +-120deg, monochrome). Every palette is rejection-sampled
until all color pairs are at least CIE76 deltaE 10 apart; if 32 draws fail,
lightness is spread on an even ladder, which separates pairs by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Color
from .rng import Rng, derive

SCHEMES = ("analogous", "complementary", "triadic", "monochrome")
MIN_DELTA_E = 10.0
MAX_REJECTION_DRAWS = 32

_SCHEME_OFFSETS = {
    "analogous": (0.0, 30.0, -30.0, 60.0, -60.0, 90.0),
    "complementary": (0.0, 180.0, 30.0, 210.0, -30.0, 150.0),
    "triadic": (0.0, 120.0, -120.0, 60.0, 180.0, -60.0),
    "monochrome": (0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
}


def hsl_to_color(h: float, s: float, l: float) -> Color:
    h = h % 360.0
    c = (1.0 - abs(2.0 * l - 1.0)) * s
    x = c * (1.0 - abs((h / 60.0) % 2.0 - 1.0))
    m = l - c / 2.0
    sector = int(h // 60.0) % 6
    r1, g1, b1 = ((c, x, 0), (x, c, 0), (0, c, x), (0, x, c), (x, 0, c), (c, 0, x))[sector]
    return Color(*(min(255, max(0, math.floor((v + m) * 255.0 + 0.5))) for v in (r1, g1, b1)))


def _srgb_to_linear(u: float) -> float:
    return u / 12.92 if u <= 0.04045 else ((u + 0.055) / 1.055) ** 2.4


def color_to_lab(c: Color) -> tuple[float, float, float]:
    """sRGB -> XYZ (D65) -> CIELAB, standard constants."""
    rl = _srgb_to_linear(c.r / 255.0)
    gl = _srgb_to_linear(c.g / 255.0)
    bl = _srgb_to_linear(c.b / 255.0)
    x = (0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl) / 0.95047
    y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl
    z = (0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl) / 1.08883

    def f(t: float) -> float:
        return t ** (1.0 / 3.0) if t > 0.008856 else 7.787 * t + 16.0 / 116.0

    fx, fy, fz = f(x), f(y), f(z)
    return (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def delta_e(a: Color, b: Color) -> float:
    la, aa, ba = color_to_lab(a)
    lb, ab, bb = color_to_lab(b)
    return math.sqrt((la - lb) ** 2 + (aa - ab) ** 2 + (ba - bb) ** 2)


@dataclass(frozen=True)
class Palette:
    colors: tuple[Color, ...]
    scheme: str

    def lightest(self) -> Color:
        return max(self.colors, key=lambda c: (color_to_lab(c)[0], c.hex))

    def darkest(self) -> Color:
        return min(self.colors, key=lambda c: (color_to_lab(c)[0], c.hex))


def _legible(colors: list[Color]) -> bool:
    for i in range(len(colors)):
        for j in range(i + 1, len(colors)):
            if delta_e(colors[i], colors[j]) < MIN_DELTA_E:
                return False
    return True


def sample_palette(seed: int) -> Palette:
    rng = Rng(derive(seed, "palette"))
    scheme = SCHEMES[rng.randint(0, len(SCHEMES) - 1)]
    count = rng.randint(3, 6)
    base_hue = rng.uniform(0.0, 360.0)
    offsets = _SCHEME_OFFSETS[scheme]

    for _ in range(MAX_REJECTION_DRAWS):
        colors = []
        for i in range(count):
            h = base_hue + offsets[i % len(offsets)]
            if scheme == "monochrome":
                # keep chroma high enough that 8-bit rounding moves the
                # recoverable hue by well under a degree
                s = rng.uniform(0.5, 0.75)
                l = rng.uniform(0.25, 0.78)
            else:
                s = rng.uniform(0.45, 0.9)
                l = rng.uniform(0.3, 0.78)
            colors.append(hsl_to_color(h, s, l))
        if _legible(colors):
            return Palette(tuple(colors), scheme)

    # deterministic fallback: even lightness ladder separates every pair
    lo, hi = 0.22, 0.82
    for widen in range(10):
        colors = []
        for i in range(count):
            h = base_hue + offsets[i % len(offsets)]
            l = lo + (hi - lo) * i / max(1, count - 1)
            colors.append(hsl_to_color(h, 0.55, l))
        if _legible(colors):
            return Palette(tuple(colors), scheme)
        lo, hi = max(0.12, lo - 0.02), min(0.88, hi + 0.02)
    raise AssertionError("palette fallback failed to separate colors")
