"""Dependency-free SVG emission: rating bars, PDP/forecast lines, signed
Shapley bars. Charts are deliberately plain; interactivity lives in the UI."""

from __future__ import annotations

_FONT = 'font-family="sans-serif" font-size="12"'


def _header(width, height):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">'
            f'<rect width="{width}" height="{height}" fill="white"/>')


def _scale(values, lo=None, hi=None):
    vmin = min(values) if lo is None else lo
    vmax = max(values) if hi is None else hi
    if vmax == vmin:
        vmax = vmin + 1.0
    return vmin, vmax


def bar_chart(labels, values, title="", width=640, height=360,
              highlight: dict | None = None) -> str:
    """Vertical bars; `highlight` maps label -> fill color."""
    pad, base = 60, height - 60
    vmin, vmax = _scale(list(values) + [0.0])
    span = vmax - vmin
    n = len(values)
    slot = (width - 2 * pad) / max(n, 1)
    parts = [_header(width, height)]
    parts.append(f'<text x="{width/2}" y="24" text-anchor="middle" {_FONT} '
                 f'font-size="15">{_esc(title)}</text>')
    y0 = base - (0.0 - vmin) / span * (base - 60)
    parts.append(f'<line x1="{pad}" y1="{y0}" x2="{width-pad}" y2="{y0}" stroke="#888"/>')
    for i, (lab, val) in enumerate(zip(labels, values)):
        x = pad + i * slot + slot * 0.15
        w = slot * 0.7
        y = base - (val - vmin) / span * (base - 60)
        top, h = (y, y0 - y) if val >= 0 else (y0, y - y0)
        color = (highlight or {}).get(lab, "#4878a8")
        parts.append(f'<rect x="{x:.1f}" y="{top:.1f}" width="{w:.1f}" '
                     f'height="{max(h, 0.5):.1f}" fill="{color}"/>')
        parts.append(f'<text x="{x + w/2:.1f}" y="{base + 16}" text-anchor="middle" '
                     f'{_FONT}>{_esc(str(lab)[:14])}</text>')
        parts.append(f'<text x="{x + w/2:.1f}" y="{top - 4:.1f}" text-anchor="middle" '
                     f'{_FONT}>{val:.3g}</text>')
    parts.append("</svg>")
    return "".join(parts)


def line_chart(x_values, series: dict, title="", width=640, height=360,
               x_label="", y_label="") -> str:
    """series: name -> list of y values over the shared x grid."""
    pad, base = 60, height - 50
    all_y = [v for ys in series.values() for v in ys]
    vmin, vmax = _scale(all_y)
    span = vmax - vmin
    xmin, xmax = _scale([float(x) for x in x_values])
    xspan = xmax - xmin
    colors = ["#4878a8", "#d1605e", "#6aa56e", "#b8860b", "#8064a2", "#5f9ea0"]
    parts = [_header(width, height)]
    parts.append(f'<text x="{width/2}" y="24" text-anchor="middle" {_FONT} '
                 f'font-size="15">{_esc(title)}</text>')
    parts.append(f'<line x1="{pad}" y1="{base}" x2="{width-40}" y2="{base}" stroke="#888"/>')
    parts.append(f'<line x1="{pad}" y1="{base}" x2="{pad}" y2="50" stroke="#888"/>')
    for k, (name, ys) in enumerate(series.items()):
        pts = []
        for x, y in zip(x_values, ys):
            px = pad + (float(x) - xmin) / xspan * (width - pad - 40)
            py = base - (y - vmin) / span * (base - 60)
            pts.append(f"{px:.1f},{py:.1f}")
        color = colors[k % len(colors)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6" '
                     f'points="{" ".join(pts)}"/>')
        parts.append(f'<text x="{width - 150}" y="{50 + 16 * k}" fill="{color}" {_FONT}>'
                     f'{_esc(name)}</text>')
    parts.append(f'<text x="{width/2}" y="{height - 10}" text-anchor="middle" {_FONT}>'
                 f'{_esc(x_label)}</text>')
    parts.append(f'<text x="16" y="{height/2}" transform="rotate(-90 16 {height/2})" '
                 f'text-anchor="middle" {_FONT}>{_esc(y_label)}</text>')
    parts.append("</svg>")
    return "".join(parts)


def signed_bar_chart(labels, values, title="", width=640, height=None) -> str:
    """Horizontal signed bars (Shapley attributions)."""
    row_h = 22
    height = height or (80 + row_h * len(labels))
    pad = 170
    vmax = max(abs(v) for v in values) or 1.0
    mid = pad + (width - pad - 30) / 2
    halfspan = (width - pad - 30) / 2
    parts = [_header(width, height)]
    parts.append(f'<text x="{width/2}" y="24" text-anchor="middle" {_FONT} '
                 f'font-size="15">{_esc(title)}</text>')
    parts.append(f'<line x1="{mid}" y1="40" x2="{mid}" y2="{height-30}" stroke="#888"/>')
    for i, (lab, val) in enumerate(zip(labels, values)):
        y = 48 + i * row_h
        w = abs(val) / vmax * halfspan
        x = mid if val >= 0 else mid - w
        color = "#d1605e" if val >= 0 else "#4878a8"
        parts.append(f'<rect x="{x:.1f}" y="{y}" width="{max(w, 0.5):.1f}" height="14" '
                     f'fill="{color}"/>')
        parts.append(f'<text x="{pad - 6}" y="{y + 11}" text-anchor="end" {_FONT}>'
                     f'{_esc(str(lab)[:24])}</text>')
        parts.append(f'<text x="{(mid + (w + 6) * (1 if val >= 0 else -1)):.1f}" '
                     f'y="{y + 11}" {_FONT} '
                     f'text-anchor="{"start" if val >= 0 else "end"}">{val:+.3g}</text>')
    parts.append("</svg>")
    return "".join(parts)


def _esc(s: str) -> str:
    return (str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
