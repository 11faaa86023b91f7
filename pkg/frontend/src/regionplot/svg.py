"""Deterministic SVG rendering of frontier curves.

Plain string assembly, fixed figure geometry, no timestamps and no
environment-dependent state, so identical inputs yield byte-identical
files. Each curve's polyline also carries its data coordinates in a
``data-points`` attribute for downstream checks.
"""

from __future__ import annotations

import math

from .model import FrontierCurve

WIDTH, HEIGHT = 720, 540
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72, 24, 48, 56

# fixed palette and drawing order
SET_STYLE = {
    "in": ("#1f77b4", "inner (factorized encoders)"),
    "cap13": ("#d62728", "outer intersection"),
    "out1": ("#ff7f0e", "outer (chain conditions)"),
    "out3": ("#2ca02c", "outer (spectral conditions)"),
}
FALLBACK_COLORS = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < 1e-15 else t)
        t += step
    return ticks


def _fmt_num(x: float) -> str:
    return f"{x:.6g}"


def _fmt_px(x: float) -> str:
    return f"{x:.2f}"


def render_svg(curves: list[FrontierCurve], title: str) -> str:
    """One figure: R1 on x, R2 on y, one frontier polyline per set."""
    xs = [x for c in curves for x in c.xs()]
    ys = [y for c in curves for y in c.ys()]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi - x_lo < 1e-12:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi - y_lo < 1e-12:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad_x = 0.05 * (x_hi - x_lo)
    pad_y = 0.05 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(
        f'<text x="{WIDTH / 2:.0f}" y="26" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>'
    )

    # axes box
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        X = px(t)
        out.append(
            f'<line x1="{_fmt_px(X)}" y1="{MARGIN_T + plot_h}" '
            f'x2="{_fmt_px(X)}" y2="{MARGIN_T + plot_h + 5}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{_fmt_px(X)}" y="{MARGIN_T + plot_h + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt_num(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        Y = py(t)
        out.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt_px(Y)}" '
            f'x2="{MARGIN_L}" y2="{_fmt_px(Y)}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt_px(Y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt_num(t)}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + plot_w / 2:.0f}" y="{HEIGHT - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">R1 (bits)</text>'
    )
    out.append(
        f'<text x="20" y="{MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {MARGIN_T + plot_h / 2:.0f})">R2 (bits)</text>'
    )

    ordered = [c for sid in SET_STYLE for c in curves if c.set_id == sid]
    ordered += [c for c in curves if c.set_id not in SET_STYLE]
    legend_y = MARGIN_T + 14
    fallback = iter(FALLBACK_COLORS)
    for c in ordered:
        color, label = SET_STYLE.get(c.set_id, (next(fallback), c.set_id))
        pix = " ".join(f"{_fmt_px(px(x))},{_fmt_px(py(y))}" for x, y in c.points)
        data = " ".join(f"{x:.12g}:{y:.12g}" for x, y in c.points)
        out.append(
            f'<polyline data-set="{c.set_id}" data-points="{data}" points="{pix}" '
            f'fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
        for x, y in c.points:
            out.append(
                f'<circle cx="{_fmt_px(px(x))}" cy="{_fmt_px(py(y))}" r="2.6" '
                f'fill="{color}"/>'
            )
        lx = MARGIN_L + plot_w - 210
        out.append(
            f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 26}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        out.append(
            f'<text x="{lx + 32}" y="{legend_y + 4}" font-family="sans-serif" '
            f'font-size="12">{c.set_id}: {label}</text>'
        )
        legend_y += 18
    out.append("</svg>")
    return "\n".join(out) + "\n"


def make_title(meta: dict) -> str:
    cfg = meta.get("config", {})
    d = cfg.get("D", ["?", "?"])
    sizes = cfg.get("sizes", {})
    return (
        f"Rate-region frontiers: D=({_fmt_num(d[0])}, {_fmt_num(d[1])}), "
        f"|X1|={sizes.get('x1', '?')}, |X2|={sizes.get('x2', '?')}"
    )
