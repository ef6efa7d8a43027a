"""Deterministic JSON, CSV and SVG output."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .dynamics import IterateTrace

SVG_W, SVG_H = 640, 480
_MARGIN = 60


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    return path


def write_json(obj, path: str | Path) -> Path:
    return write_text(path, dumps(obj))


def write_trace_csv(trace: IterateTrace, path: str | Path) -> Path:
    return write_text(path, trace.to_csv())


def spectrum_csv(points: Iterable[complex]) -> str:
    rows = ["re,im"] + [f"{complex(z).real!r},{complex(z).imag!r}" for z in points]
    return "\n".join(rows) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _log_scale(lo: float, hi: float, a: float, b: float):
    llo, lhi = math.log10(lo), math.log10(hi)
    if lhi <= llo:
        lhi = llo + 1.0
    return lambda v: a + (math.log10(v) - llo) / (lhi - llo) * (b - a)


def _polyline(xs, ys, color: str, dash: str | None = None) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{extra} points="{pts}"/>'


def trace_svg(trace: IterateTrace, title: str = "") -> str:
    """Log-log plot of n against the Cesaro norm, with the reference bound dashed."""
    ns, ce, ref = [], [], []
    for e in trace.entries:
        if e.cesaro_norm is not None and e.cesaro_norm.value > 0:
            ns.append(e.n)
            ce.append(e.cesaro_norm.value)
        if e.reference_bound is not None and e.reference_bound > 0:
            ref.append((e.n, e.reference_bound))
    x0, x1 = _MARGIN, SVG_W - _MARGIN // 2
    y0, y1 = SVG_H - _MARGIN, _MARGIN // 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" '
        f'viewBox="0 0 {SVG_W} {SVG_H}">',
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>',
    ]
    all_n = ns + [n for n, _ in ref]
    all_v = ce + [v for _, v in ref]
    if all_n:
        sx = _log_scale(min(all_n), max(all_n), x0, x1)
        sy = _log_scale(min(all_v), max(all_v), y0, y1)
        if ns:
            parts.append(_polyline([sx(n) for n in ns], [sy(v) for v in ce], "#1f77b4"))
        if ref:
            parts.append(_polyline([sx(n) for n, _ in ref], [sy(v) for _, v in ref], "#d62728", "6,4"))
        parts.append(
            f'<text x="{x0}" y="{SVG_H - 20}" font-size="12">n = {min(all_n)} .. {max(all_n)} (log)</text>'
        )
        parts.append(
            f'<text x="10" y="{y1 - 8}" font-size="12">cesaro norm {min(all_v):.3e} .. {max(all_v):.3e} (log)</text>'
        )
    if title:
        parts.append(f'<text x="{x1}" y="{y1 - 8}" font-size="12" text-anchor="end">{_escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def spectrum_svg(points: Iterable[complex], title: str = "") -> str:
    """Scatter of sample points with the unit circle and the point 1 marked."""
    pts = np.asarray(list(points), dtype=complex)
    extent = max(1.0, float(np.abs(pts).max()) if pts.size else 1.0) * 1.1
    half = (min(SVG_W, SVG_H) - 2 * _MARGIN) / 2
    cx, cy = SVG_W / 2, SVG_H / 2

    def sx(z):
        return cx + z.real / extent * half, cy - z.imag / extent * half

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" '
        f'viewBox="0 0 {SVG_W} {SVG_H}">',
        f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(half / extent)}" fill="none" stroke="gray"/>',
    ]
    for z in pts:
        x, y = sx(z)
        parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.5" fill="#1f77b4"/>')
    x, y = sx(1 + 0j)
    parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="none" stroke="#d62728"/>')
    if title:
        parts.append(f'<text x="10" y="20" font-size="12">{_escape(title)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_report(payload, fmt: str, out: str | Path) -> Path:
    """Write ``payload`` as ``json``, ``csv`` or ``svg`` to the file ``out``."""
    if fmt == "json":
        data = payload.to_dict() if hasattr(payload, "to_dict") else payload
        return write_json(data, out)
    if fmt == "csv":
        if isinstance(payload, IterateTrace):
            return write_trace_csv(payload, out)
        return write_text(out, spectrum_csv(payload))
    if fmt == "svg":
        if isinstance(payload, IterateTrace):
            return write_text(out, trace_svg(payload))
        return write_text(out, spectrum_svg(payload))
    raise ValueError(f"unknown format {fmt!r}")
