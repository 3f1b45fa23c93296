"""Minimal hand-written SVG line charts."""

from __future__ import annotations

from xml.sax.saxutils import escape


def line_chart(xs, ys, circled=(), title="", x_label="", y_label="",
               width=640, height=400, margin=56) -> str:
    """Polyline of (xs, ys); each (x_i, x_j) pair in ``circled`` gets a ring
    around the segment joining those two data points."""
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    if not xs:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw, ph = width - 2 * margin, height - 2 * margin

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * ph

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{margin / 2:.0f}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" font-size="12">{escape(x_label)}</text>',
        f'<text x="14" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {height / 2:.0f})">{escape(y_label)}</text>',
    ]
    for v, anchor, x, y in ((x0, "start", sx(x0), height - margin + 16),
                            (x1, "end", sx(x1), height - margin + 16)):
        out.append(f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}" font-size="11">{v:g}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{margin - 6}" y="{sy(v) + 4:.2f}" text-anchor="end" font-size="11">{v:g}</text>')
    out.append(f'<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{pts}"/>')
    index = {x: i for i, x in enumerate(xs)}
    for a, b in circled:
        i, j = index[float(a)], index[float(b)]
        cx = (sx(xs[i]) + sx(xs[j])) / 2
        cy = (sy(ys[i]) + sy(ys[j])) / 2
        r = max(8.0, 0.6 * abs(complex(sx(xs[j]) - sx(xs[i]), sy(ys[j]) - sy(ys[i]))))
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="none" stroke="crimson" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
