"""Dependency-free SVG trajectory plots."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")
_W, _H = 960, 540
_MARGIN = 60


def _scale(v, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return out_lo + (np.asarray(v, dtype=np.float64) - lo) / span * (out_hi - out_lo)


def _polyline(xs, ys, color, width=1.5, dash=None):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline fill="none" stroke="{color}" stroke-width="{width}"'
            f'{dash_attr} points="{pts}"/>')


def write_trajectory_svg(path: str | Path, times_s: np.ndarray,
                         series: Mapping[str, np.ndarray],
                         band: tuple[np.ndarray, np.ndarray] | None = None,
                         reference: Sequence[float] | None = None) -> None:
    """Plot RPM trajectories over time; optional +/-sigma band and reference."""
    t = np.asarray(times_s, dtype=np.float64)
    stacks = [np.asarray(v, dtype=np.float64) for v in series.values()]
    if band is not None:
        stacks += [np.asarray(band[0]), np.asarray(band[1])]
    if reference is not None:
        stacks.append(np.asarray(reference, dtype=np.float64))
    allv = np.concatenate(stacks)
    r_lo, r_hi = float(np.min(allv)), float(np.max(allv))
    pad = 0.05 * (r_hi - r_lo if r_hi > r_lo else 1.0)
    r_lo, r_hi = r_lo - pad, r_hi + pad
    t_lo, t_hi = float(t[0]), float(t[-1])

    def sx(v):
        return _scale(v, t_lo, t_hi, _MARGIN, _W - _MARGIN / 2)

    def sy(v):
        return _scale(v, r_lo, r_hi, _H - _MARGIN, _MARGIN / 2)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if band is not None:
        bx = np.concatenate([sx(t), sx(t)[::-1]])
        by = np.concatenate([sy(band[0]), sy(band[1])[::-1]])
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(bx, by))
        parts.append(f'<polygon fill="#1f77b4" fill-opacity="0.18" stroke="none" points="{pts}"/>')
    if reference is not None:
        parts.append(_polyline(sx(t), sy(np.asarray(reference)), "#444444", 1.0, dash="5,4"))

    legend_y = _MARGIN / 2 + 8
    for i, (name, vals) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        parts.append(_polyline(sx(t), sy(np.asarray(vals)), color))
        parts.append(f'<text x="{_W - 180}" y="{legend_y + 16 * i}" font-size="12" '
                     f'fill="{color}" font-family="sans-serif">{name}</text>')
    if reference is not None:
        parts.append(f'<text x="{_W - 180}" y="{legend_y + 16 * len(series)}" font-size="12" '
                     f'fill="#444444" font-family="sans-serif">reference</text>')

    # axes with a handful of ticks
    parts.append(f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN / 2}" '
                 f'y2="{_H - _MARGIN}" stroke="black"/>')
    parts.append(f'<line x1="{_MARGIN}" y1="{_MARGIN / 2}" x2="{_MARGIN}" '
                 f'y2="{_H - _MARGIN}" stroke="black"/>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        tv = t_lo + frac * (t_hi - t_lo)
        rv = r_lo + frac * (r_hi - r_lo)
        parts.append(f'<text x="{sx(tv):.1f}" y="{_H - _MARGIN + 18}" font-size="11" '
                     f'text-anchor="middle" font-family="sans-serif">{tv:.2f}</text>')
        parts.append(f'<text x="{_MARGIN - 8:.1f}" y="{sy(rv):.1f}" font-size="11" '
                     f'text-anchor="end" font-family="sans-serif">{rv:.0f}</text>')
    parts.append(f'<text x="{(_W) / 2}" y="{_H - 12}" font-size="12" text-anchor="middle" '
                 f'font-family="sans-serif">time (s)</text>')
    parts.append(f'<text x="16" y="{_H / 2}" font-size="12" text-anchor="middle" '
                 f'font-family="sans-serif" transform="rotate(-90 16 {_H / 2})">RPM</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
