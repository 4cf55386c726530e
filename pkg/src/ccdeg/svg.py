"""Hand-rolled SVG output: polylines, markers and axis ticks, nothing more."""

from __future__ import annotations


class SvgCanvas:
    """Fixed-size canvas mapping data coordinates to pixels."""

    def __init__(self, xlim: tuple[float, float], ylim: tuple[float, float],
                 width: int = 640, height: int = 440, margin: int = 52):
        self.width = width
        self.height = height
        self.margin = margin
        pad_x = 0.05 * (xlim[1] - xlim[0] or 1.0)
        pad_y = 0.05 * (ylim[1] - ylim[0] or 1.0)
        self.xlim = (xlim[0] - pad_x, xlim[1] + pad_x)
        self.ylim = (ylim[0] - pad_y, ylim[1] + pad_y)
        self.elements: list[str] = []

    def _tx(self, x: float) -> float:
        frac = (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0])
        return self.margin + frac * (self.width - 2 * self.margin)

    def _ty(self, y: float) -> float:
        frac = (y - self.ylim[0]) / (self.ylim[1] - self.ylim[0])
        return self.height - self.margin - frac * (self.height - 2 * self.margin)

    def polyline(self, points, stroke: str = "#1f4e8c", width: float = 1.6,
                 dash: str | None = None):
        coords = " ".join(f"{self._tx(x):.2f},{self._ty(y):.2f}" for x, y in points)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<polyline fill="none" stroke="{stroke}" stroke-width="{width}"'
            f'{dash_attr} points="{coords}"/>'
        )

    def segment(self, p0, p1, stroke: str = "#555555", width: float = 1.0,
                dash: str | None = None):
        self.polyline([p0, p1], stroke, width, dash)

    def marker(self, x: float, y: float, r: float = 3.0, fill: str = "#c0392b"):
        self.elements.append(
            f'<circle cx="{self._tx(x):.2f}" cy="{self._ty(y):.2f}" r="{r}" fill="{fill}"/>'
        )

    def label(self, x: float, y: float, text: str, size: int = 11,
              fill: str = "#222222", anchor: str = "middle"):
        self.elements.append(
            f'<text x="{self._tx(x):.2f}" y="{self._ty(y):.2f}" font-size="{size}"'
            f' fill="{fill}" text-anchor="{anchor}" font-family="monospace">{text}</text>'
        )

    def axes(self, ticks: int = 5, title: str = ""):
        x0, x1 = self.xlim
        y0, y1 = self.ylim
        frame = [(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)]
        self.polyline(frame, stroke="#333333", width=1.0)
        for k in range(ticks + 1):
            xt = x0 + (x1 - x0) * k / ticks
            yt = y0 + (y1 - y0) * k / ticks
            px, py = self._tx(xt), self._ty(y0)
            self.elements.append(
                f'<line x1="{px:.2f}" y1="{py:.2f}" x2="{px:.2f}" y2="{py + 5:.2f}"'
                f' stroke="#333333" stroke-width="1"/>'
            )
            self.elements.append(
                f'<text x="{px:.2f}" y="{py + 18:.2f}" font-size="10" fill="#333333"'
                f' text-anchor="middle" font-family="monospace">{xt:.3g}</text>'
            )
            px, py = self._tx(x0), self._ty(yt)
            self.elements.append(
                f'<line x1="{px - 5:.2f}" y1="{py:.2f}" x2="{px:.2f}" y2="{py:.2f}"'
                f' stroke="#333333" stroke-width="1"/>'
            )
            self.elements.append(
                f'<text x="{px - 8:.2f}" y="{py + 3:.2f}" font-size="10" fill="#333333"'
                f' text-anchor="end" font-family="monospace">{yt:.3g}</text>'
            )
        if title:
            self.elements.append(
                f'<text x="{self.width / 2:.2f}" y="{self.margin - 16:.2f}" font-size="13"'
                f' fill="#111111" text-anchor="middle" font-family="monospace">{title}</text>'
            )

    def to_string(self) -> str:
        body = "\n".join(self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}"'
            f' height="{self.height}" viewBox="0 0 {self.width} {self.height}">\n'
            f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )
