"""Minimal self-contained SVG charts (line panels and paired histograms)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["line_panels", "histogram_pair"]

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
WIDTH = 640
PANEL_H = 240
MARGIN = dict(left=70, right=20, top=30, bottom=45)


def _num(v):
    return f"{v:.2f}"


def _label(v):
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.0e}"
    return f"{v:.3g}"


class _Axes:
    def __init__(self, x0, y0, w, h, xlim, ylim, logx=False, logy=False):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.logx, self.logy = logx, logy
        self.xlim = tuple(map(self._tx, xlim))
        self.ylim = tuple(map(self._ty, ylim))
        if self.xlim[0] == self.xlim[1]:
            self.xlim = (self.xlim[0] - 0.5, self.xlim[1] + 0.5)
        if self.ylim[0] == self.ylim[1]:
            self.ylim = (self.ylim[0] - 0.5, self.ylim[1] + 0.5)

    def _tx(self, v):
        return math.log10(v) if self.logx else v

    def _ty(self, v):
        return math.log10(v) if self.logy else v

    def px(self, v):
        lo, hi = self.xlim
        return self.x0 + (self._tx(v) - lo) / (hi - lo) * self.w

    def py(self, v):
        lo, hi = self.ylim
        return self.y0 + self.h - (self._ty(v) - lo) / (hi - lo) * self.h

    def ticks(self, axis, n=5):
        lo, hi = self.xlim if axis == "x" else self.ylim
        log = self.logx if axis == "x" else self.logy
        if log:
            return [10.0**e for e in range(math.ceil(lo - 1e-9), math.floor(hi + 1e-9) + 1)]
        return [lo + (hi - lo) * i / (n - 1) for i in range(n)]

    def frame(self, title, xlabel, ylabel):
        out = [
            f'<rect x="{_num(self.x0)}" y="{_num(self.y0)}" width="{_num(self.w)}" '
            f'height="{_num(self.h)}" fill="none" stroke="#444"/>',
            f'<text x="{_num(self.x0 + self.w / 2)}" y="{_num(self.y0 - 10)}" '
            f'text-anchor="middle" font-size="13">{escape(title)}</text>',
            f'<text x="{_num(self.x0 + self.w / 2)}" y="{_num(self.y0 + self.h + 35)}" '
            f'text-anchor="middle" font-size="11">{escape(xlabel)}</text>',
            f'<text x="{_num(self.x0 - 55)}" y="{_num(self.y0 + self.h / 2)}" text-anchor="middle" '
            f'font-size="11" transform="rotate(-90 {_num(self.x0 - 55)} {_num(self.y0 + self.h / 2)})">'
            f"{escape(ylabel)}</text>",
        ]
        for t in self.ticks("x"):
            x = self.px(t)
            out.append(f'<line x1="{_num(x)}" y1="{_num(self.y0 + self.h)}" x2="{_num(x)}" '
                       f'y2="{_num(self.y0 + self.h + 4)}" stroke="#444"/>')
            out.append(f'<text x="{_num(x)}" y="{_num(self.y0 + self.h + 16)}" '
                       f'text-anchor="middle" font-size="10">{_label(t)}</text>')
        for t in self.ticks("y"):
            y = self.py(t)
            out.append(f'<line x1="{_num(self.x0 - 4)}" y1="{_num(y)}" x2="{_num(self.x0)}" '
                       f'y2="{_num(y)}" stroke="#444"/>')
            out.append(f'<text x="{_num(self.x0 - 6)}" y="{_num(y + 3)}" '
                       f'text-anchor="end" font-size="10">{_label(t)}</text>')
        return out


def _document(height, body):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">\n'
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def _legend(x, y, names):
    out = []
    for i, name in enumerate(names):
        color = COLORS[i % len(COLORS)]
        yy = y + 14 * i
        out.append(f'<line x1="{_num(x)}" y1="{_num(yy)}" x2="{_num(x + 18)}" y2="{_num(yy)}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{_num(x + 22)}" y="{_num(yy + 4)}" font-size="10">{escape(name)}</text>')
    return out


def line_panels(panels, xlabel, logx=False):
    """Stacked line charts sharing an x axis.

    ``panels`` is a list of dicts with keys ``title``, ``ylabel``,
    ``series`` (name -> (xs, ys)) and optional ``logy``.
    """
    body = []
    w = WIDTH - MARGIN["left"] - MARGIN["right"]
    h = PANEL_H - MARGIN["top"] - MARGIN["bottom"]
    for i, panel in enumerate(panels):
        logy = panel.get("logy", False)
        xs = [x for sx, _ in panel["series"].values() for x in sx]
        ys = [y for _, sy in panel["series"].values() for y in sy]
        if logy:
            ys = [y for y in ys if y > 0] or [1.0]
        ax = _Axes(MARGIN["left"], i * PANEL_H + MARGIN["top"], w, h,
                   (min(xs), max(xs)), (min(ys), max(ys)), logx=logx, logy=logy)
        body += ax.frame(panel["title"], xlabel, panel["ylabel"])
        for j, (sx, sy) in enumerate(panel["series"].values()):
            pts = " ".join(f"{_num(ax.px(x))},{_num(ax.py(y))}"
                           for x, y in zip(sx, sy) if not (logy and y <= 0))
            color = COLORS[j % len(COLORS)]
            body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
            for p in pts.split():
                cx, cy = p.split(",")
                body.append(f'<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>')
        if len(panel["series"]) > 1:
            body += _legend(ax.x0 + ax.w - 120, ax.y0 + 12, list(panel["series"]))
    return _document(PANEL_H * len(panels), body)


def histogram_pair(edges, before, after, title, labels=("before", "after")):
    """Two step histograms over shared bin edges."""
    w = WIDTH - MARGIN["left"] - MARGIN["right"]
    h = PANEL_H + 60 - MARGIN["top"] - MARGIN["bottom"]
    top = max(max(before), max(after), 1)
    ax = _Axes(MARGIN["left"], MARGIN["top"], w, h, (edges[0], edges[-1]), (0, top))
    body = ax.frame(title, "cosine similarity", "pair count")
    for j, counts in enumerate((before, after)):
        pts = [f"{_num(ax.px(edges[0]))},{_num(ax.py(0))}"]
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            pts.append(f"{_num(ax.px(lo))},{_num(ax.py(c))}")
            pts.append(f"{_num(ax.px(hi))},{_num(ax.py(c))}")
        pts.append(f"{_num(ax.px(edges[-1]))},{_num(ax.py(0))}")
        body.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                    f'stroke="{COLORS[j]}" stroke-width="1.5"/>')
    body += _legend(ax.x0 + 10, ax.y0 + 12, labels)
    return _document(PANEL_H + 60, body)
