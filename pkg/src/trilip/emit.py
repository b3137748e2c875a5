"""Output formats: JSON with 17 significant digits, CSV and schematic SVG."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    # keep it a JSON number that reads back as a float
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON; floats always carry 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# SVG


class Svg:
    """Minimal SVG canvas mapping a world box onto ``width x height`` pixels."""

    def __init__(self, lo, hi, width: int = 600, margin: int = 30):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        span = np.maximum(hi - lo, 1e-12)
        self.scale = (width - 2 * margin) / span.max()
        self.lo, self.margin = lo, margin
        self.width = width
        self.height = int(round(2 * margin + span[1] * self.scale))
        self.items: list[str] = []

    def _xy(self, p) -> tuple[str, str]:
        x = self.margin + (p[0] - self.lo[0]) * self.scale
        y = self.height - self.margin - (p[1] - self.lo[1]) * self.scale
        return f"{x:.3f}", f"{y:.3f}"

    def polygon(self, pts, stroke="black", fill="none", width=1.0, dash=None):
        s = " ".join(",".join(self._xy(p)) for p in pts)
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<polygon points="{s}" stroke="{stroke}" fill="{fill}" '
                          f'stroke-width="{width}"{d}/>')

    def polyline(self, pts, stroke="black", width=1.0):
        s = " ".join(",".join(self._xy(p)) for p in pts)
        self.items.append(f'<polyline points="{s}" stroke="{stroke}" fill="none" '
                          f'stroke-width="{width}"/>')

    def circle(self, p, r=3.0, stroke="black", fill="white"):
        x, y = self._xy(p)
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{r}" stroke="{stroke}" fill="{fill}"/>')

    def text(self, p, s, size=12, anchor="middle"):
        x, y = self._xy(p)
        self.items.append(f'<text x="{x}" y="{y}" font-size="{size}" '
                          f'text-anchor="{anchor}" font-family="sans-serif">{s}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, *self.items, "</svg>"]) + "\n"


def fit(points: np.ndarray, width: int = 600) -> Svg:
    pts = np.asarray(points, float).reshape(-1, 2)
    return Svg(pts.min(axis=0), pts.max(axis=0), width)


# equilateral picture of the angle simplex: theta -> sum theta_i / pi * corner_i
_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def angle_model_xy(angles) -> np.ndarray:
    return np.asarray(angles, float) / math.pi @ _CORNERS
