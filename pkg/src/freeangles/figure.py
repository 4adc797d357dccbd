"""Histogram-plus-density figures as standalone SVG, with a CSV pair for replotting."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .laws import SpectralLaw
from .montecarlo import EmpiricalDistribution, Histogram, histogram

WIDTH, HEIGHT = 720, 420
MARGIN = dict(left=60, right=20, top=40, bottom=50)


@dataclass(frozen=True, eq=False)
class FigureSpec:
    hist: Histogram
    overlay: SpectralLaw | None = None
    x_range: tuple[float, float] | None = None
    y_max: float | None = None
    title: str = ""
    grid_points: int = 2000

    def __post_init__(self):
        if self.hist.counts.size < 1:
            raise ValueError("figure needs at least one bin")

    @classmethod
    def build(
        cls,
        emp: EmpiricalDistribution,
        overlay: SpectralLaw | None = None,
        bins: int | None = None,
        title: str = "",
        x_range: tuple[float, float] | None = None,
    ) -> "FigureSpec":
        return cls(histogram(emp, bins, x_range), overlay, x_range, None, title)

    def ranges(self) -> tuple[float, float, float, float]:
        e = self.hist.edges
        x0, x1 = self.x_range if self.x_range else (float(e[0]), float(e[-1]))
        if self.overlay is not None and self.overlay.pieces and self.x_range is None:
            lo, hi = self.overlay.bounds
            x0, x1 = min(x0, lo), max(x1, hi)
        if x1 <= x0:
            x1 = x0 + 1.0
        top = float(self.hist.heights.max()) if self.hist.heights.size else 1.0
        y1 = self.y_max if self.y_max else 1.25 * top if top > 0 else 1.0
        return x0, x1, 0.0, y1

    def overlay_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """The overlay density on a grid covering the plotted range."""
        if self.overlay is None:
            return np.zeros(0), np.zeros(0)
        x0, x1, _, _ = self.ranges()
        x = np.linspace(x0, x1, self.grid_points)
        # include points just inside every piece so each edge is drawn
        extra = []
        for p in self.overlay.pieces:
            d = 1e-6 * (p.b - p.a)
            extra += [p.a, p.a + d, p.b - d, p.b]
        x = np.unique(np.concatenate([x, np.clip(extra, x0, x1)]))
        return x, self.overlay.density(x)


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg(spec: FigureSpec) -> str:
    x0, x1, y0, y1 = spec.ranges()
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (np.asarray(x) - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + ph - (np.clip(np.asarray(y), y0, y1) - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if spec.title:
        out.append(
            f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-family="sans-serif" '
            f'font-size="15">{escape(spec.title)}</text>'
        )
    h = spec.hist
    out.append('<g fill="#9ecae1" stroke="#3182bd" stroke-width="0.5">')
    for a, b, ht in zip(h.edges[:-1], h.edges[1:], h.heights):
        if ht <= 0:
            continue
        xa, xb = float(sx(a)), float(sx(b))
        ya = float(sy(ht))
        out.append(
            f'<rect x="{xa:.2f}" y="{ya:.2f}" width="{max(xb - xa, 0.0):.2f}" '
            f'height="{MARGIN["top"] + ph - ya:.2f}"/>'
        )
    out.append("</g>")
    gx, gy = spec.overlay_grid()
    if gx.size:
        # break the polyline outside the support so gaps stay visible
        segments, cur = [], []
        for x, y in zip(gx, gy):
            if y > 0:
                cur.append(f"{float(sx(x)):.2f},{float(sy(y)):.2f}")
            elif cur:
                segments.append(cur)
                cur = []
        if cur:
            segments.append(cur)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="#d62728" stroke-width="1.5" points="{" ".join(seg)}"/>')
    base = MARGIN["top"] + ph
    out.append(
        f'<line x1="{MARGIN["left"]}" y1="{base}" x2="{MARGIN["left"] + pw}" y2="{base}" stroke="black"/>'
    )
    out.append(
        f'<line x1="{MARGIN["left"]}" y1="{MARGIN["top"]}" x2="{MARGIN["left"]}" y2="{base}" stroke="black"/>'
    )
    for t in np.linspace(x0, x1, 6):
        out.append(
            f'<text x="{float(sx(t)):.2f}" y="{base + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in np.linspace(y0, y1, 5):
        out.append(
            f'<text x="{MARGIN["left"] - 6}" y="{float(sy(t)) + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def overlay_csv(spec: FigureSpec) -> str:
    x, d = spec.overlay_grid()
    lines = ["x,density"] + [f"{float(a)!r},{float(b)!r}" for a, b in zip(x, d)]
    return "\n".join(lines) + "\n"


def write_figure(spec: FigureSpec, svg_path: str | Path, csv_pair: bool = True) -> list[Path]:
    """Write the SVG and, optionally, ``<stem>_hist.csv`` and ``<stem>_density.csv``."""
    svg_path = Path(svg_path)
    written = []
    try:
        svg_path.write_text(render_svg(spec))
        written.append(svg_path)
        if csv_pair:
            hp = svg_path.with_name(svg_path.stem + "_hist.csv")
            dp = svg_path.with_name(svg_path.stem + "_density.csv")
            hp.write_text(spec.hist.to_csv())
            dp.write_text(overlay_csv(spec))
            written += [hp, dp]
    except OSError as exc:
        raise OSError(f"cannot write figure to {exc.filename or svg_path}: {exc.strerror}") from exc
    return written
