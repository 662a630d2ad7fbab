"""Minimal SVG line plots and heatmaps. Output depends only on the data."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

W, H, PAD = 640, 420, 56
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _span(v: np.ndarray) -> tuple[float, float]:
    lo, hi = float(np.nanmin(v)), float(np.nanmax(v))
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def _frame(title: str, xlabel: str, ylabel: str, xr, yr) -> list[str]:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{PAD}" y="{PAD}" width="{W - 2 * PAD}" height="{H - 2 * PAD}" fill="none" stroke="black"/>',
        f'<text x="{W / 2}" y="{PAD / 2}" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {H / 2})">{ylabel}</text>',
    ]
    for v, x, anchor in ((xr[0], PAD, "start"), (xr[1], W - PAD, "end")):
        out.append(f'<text x="{x}" y="{H - PAD + 16}" text-anchor="{anchor}" font-size="10">{v:.4g}</text>')
    for v, y in ((yr[0], H - PAD), (yr[1], PAD + 10)):
        out.append(f'<text x="{PAD - 4}" y="{y}" text-anchor="end" font-size="10">{v:.4g}</text>')
    return out


def line_plot(path, x, ys: Sequence, labels: Sequence[str] = (), title: str = "", xlabel: str = "", ylabel: str = "") -> Path:
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for y in ys]
    xr, yr = _span(x), _span(np.concatenate(ys))
    sx = (W - 2 * PAD) / (xr[1] - xr[0])
    sy = (H - 2 * PAD) / (yr[1] - yr[0])
    out = _frame(title, xlabel, ylabel, xr, yr)
    for i, y in enumerate(ys):
        pts = " ".join(f"{_f(PAD + (a - xr[0]) * sx)},{_f(H - PAD - (b - yr[0]) * sy)}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" stroke-width="1.2" points="{pts}"/>')
        if i < len(labels):
            out.append(f'<text x="{W - PAD - 4}" y="{PAD + 16 + 14 * i}" text-anchor="end" font-size="11" fill="{COLORS[i % len(COLORS)]}">{labels[i]}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def heatmap(path, values, x_range, y_range, title: str = "", xlabel: str = "", ylabel: str = "", max_cells: int = 96) -> Path:
    """Diverging blue/white/red map of ``values[i, j]`` (i along x, j along y), block-averaged to at most ``max_cells`` per axis."""
    v = np.asarray(values, dtype=float)
    fx = max(1, -(-v.shape[0] // max_cells))
    fy = max(1, -(-v.shape[1] // max_cells))
    nx, ny = v.shape[0] // fx, v.shape[1] // fy
    v = v[: nx * fx, : ny * fy].reshape(nx, fx, ny, fy).mean(axis=(1, 3))
    scale = float(np.max(np.abs(v))) or 1.0
    cw, ch = (W - 2 * PAD) / nx, (H - 2 * PAD) / ny
    out = _frame(title, xlabel, ylabel, x_range, y_range)
    for i in range(nx):
        for j in range(ny):
            t = v[i, j] / scale
            r, g, b = (255, int(255 * (1 - t)), int(255 * (1 - t))) if t >= 0 else (int(255 * (1 + t)), int(255 * (1 + t)), 255)
            out.append(
                f'<rect x="{_f(PAD + i * cw)}" y="{_f(H - PAD - (j + 1) * ch)}" width="{_f(cw + 0.3)}" height="{_f(ch + 0.3)}" fill="rgb({r},{g},{b})"/>'
            )
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
