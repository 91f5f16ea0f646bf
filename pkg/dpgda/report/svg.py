# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from typing import Dict, Optional, Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np


def fmt(value) -> str:
    """6 significant digits, no negative zero; NaN renders as ``n/a``."""
    value = float(value)
    if np.isnan(value):
        return "n/a"
    text = f"{value:.6g}"
    return "0" if text == "-0" else text


def _attrs(extra: Optional[Dict[str, object]]) -> str:
    if not extra:
        return ""
    return " " + " ".join(f"{key}={quoteattr(str(value))}" for key, value in extra.items())


class SvgCanvas:
    """Accumulates SVG 1.1 primitives into a document string."""

    def __init__(self, width: float, height: float, title: str = ""):
        self.width = width
        self.height = height
        self.svg = (f'<?xml version="1.0" standalone="no"?>\n'
                    f'<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
                    f'"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
                    f'<svg version="1.1" width="{width:.0f}" height="{height:.0f}" '
                    f'viewBox="0 0 {width:.0f} {height:.0f}" xmlns="http://www.w3.org/2000/svg" '
                    f'font-family="sans-serif" font-size="11">\n')
        if title:
            self.svg += f"<title>{escape(title)}</title>\n"

    def group_start(self, attr: Optional[Dict[str, object]] = None):
        self.svg += f"<g{_attrs(attr)}>\n"

    def group_end(self):
        self.svg += "</g>\n"

    def filled_rectangle(self, x1, y1, x2, y2, fill, extra: Optional[Dict[str, object]] = None):
        self.svg += (f'<rect x="{x1:.2f}" y="{y1:.2f}" width="{x2 - x1:.2f}" height="{y2 - y1:.2f}" '
                     f'fill="{fill}"{_attrs(extra)}/>\n')

    def line(self, x1, y1, x2, y2, stroke="#333333", extra: Optional[Dict[str, object]] = None):
        self.svg += (f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                     f'stroke="{stroke}"{_attrs(extra)}/>\n')

    def circle(self, cx, cy, r, fill, extra: Optional[Dict[str, object]] = None):
        self.svg += f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{fill}"{_attrs(extra)}/>\n'

    def text(self, x, y, string, anchor: str = "start", extra: Optional[Dict[str, object]] = None):
        self.svg += (f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}"{_attrs(extra)}>'
                     f'{escape(str(string))}</text>\n')

    def get_svg(self) -> str:
        return f"{self.svg}</svg>\n"


def color_scale(values: np.ndarray, low: str = "#f7fbff", high: str = "#08306b") -> Sequence[str]:
    """
    Min-max normalises `values` onto a two-colour ramp. A constant (or empty)
    array maps every entry to `low`; NaN entries render grey.
    """
    values = np.asarray(values, dtype=np.float64)
    finite = values[np.isfinite(values)]
    lo_rgb = np.array([int(low[i:i + 2], 16) for i in (1, 3, 5)], dtype=np.float64)
    hi_rgb = np.array([int(high[i:i + 2], 16) for i in (1, 3, 5)], dtype=np.float64)
    span = float(finite.max() - finite.min()) if finite.size else 0.0
    colors = []
    for value in values.ravel():
        if not np.isfinite(value):
            colors.append("#bdbdbd")
            continue
        t = (value - finite.min()) / span if span > 0 else 0.0
        rgb = np.rint(lo_rgb + t * (hi_rgb - lo_rgb)).astype(int)
        colors.append("#{:02x}{:02x}{:02x}".format(*rgb))
    return colors
