"""Plain-text profile format, JSON metadata, tables and plot series."""
import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .grid_ops import GridProfile

_HEADER_KEYS = ("L", "h", "label", "c", "delta")


def _fmt(v):
    return format(float(v), ".17g")


def write_profile(path, profile, **header):
    """Write ``# key=value`` header lines then ``x,value`` rows (17 digits)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"L": profile.L, "h": profile.h, "label": profile.label}
    meta.update({k: v for k, v in header.items() if v is not None})
    lines = [f"# {k}={_fmt(v) if isinstance(v, (float, int)) and not isinstance(v, bool) else v}"
             for k, v in meta.items()]
    lines.append("x,value")
    x = profile.x
    lines.extend(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x, profile.values))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_profile(path):
    """Inverse of :func:`write_profile`; returns ``(profile, header)``."""
    header, rows = {}, []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                header[key.strip()] = val.strip()
            elif line == "x,value":
                continue
            else:
                rows.append(line.split(","))
    try:
        L, h = float(header["L"]), float(header["h"])
    except KeyError as exc:
        raise ValidationError(f"profile header lacks {exc}") from exc
    data = np.array(rows, dtype=float)
    prof = GridProfile(L, h, data[:, 1], header.get("label", ""))
    if not np.array_equal(prof.x, data[:, 0]):
        raise ValidationError("x column does not match the header grid")
    for k in ("c", "delta"):
        if k in header:
            header[k] = float(header[k])
    return prof, header


def clean(obj):
    """Make metadata JSON-safe: numpy scalars to Python, NaN/inf to ``None``."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(clean(data), indent=2, allow_nan=False) + "\n")
    return path


def write_table(path, columns, rows, mode="w"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    new = mode == "w" or not path.exists()
    with open(path, mode) as fh:
        if new:
            fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")
    return path


def write_series(path, x, y, names=("x", "y")):
    return write_table(path, names, zip(x, y))


def render_svg(path, series, title="", xlabel="", ylabel="", loglog=False,
               size=(480, 360)):
    """Minimal line chart; ``series`` is a list of ``(name, x, y)``."""
    W, H = size
    pad = 50
    xs, ys = [], []
    data = []
    for name, x, y in series:
        x, y = np.asarray(x, float), np.asarray(y, float)
        if loglog:
            keep = (x > 0) & (y > 0)
            x, y = np.log10(x[keep]), np.log10(y[keep])
        data.append((name, x, y))
        xs.append(x)
        ys.append(y)
    xa, ya = np.concatenate(xs), np.concatenate(ys)
    x0, x1 = float(xa.min()), float(xa.max())
    y0, y1 = float(ya.min()), float(ya.max())
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (W - 2 * pad)

    def py(v):
        return H - pad - (v - y0) / (y1 - y0) * (H - 2 * pad)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">',
           f'<rect x="{pad}" y="{pad}" width="{W - 2 * pad}" height="{H - 2 * pad}" '
           'fill="none" stroke="#444"/>',
           f'<text x="{W / 2:.1f}" y="{pad / 2:.1f}" text-anchor="middle">{title}</text>',
           f'<text x="{W / 2:.1f}" y="{H - 10}" text-anchor="middle">{xlabel}</text>',
           f'<text x="12" y="{H / 2:.1f}" transform="rotate(-90 12 {H / 2:.1f})" '
           f'text-anchor="middle">{ylabel}</text>']
    for i, (name, x, y) in enumerate(data):
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        col = colors[i % len(colors)]
        out.append(f'<polyline fill="none" stroke="{col}" points="{pts}"/>')
        out.append(f'<text x="{W - pad + 4}" y="{pad + 14 * (i + 1)}" fill="{col}" '
                   f'font-size="10">{name}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")
    return path
