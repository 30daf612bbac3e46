"""Dependency-free SVG line charts of aggregate metrics against K."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from .io import read_aggregates

METRICS = {
    "fitness": ("fitness_mean", "fitness_se", "Fitness"),
    "hamming": ("hamming_mean", "hamming_se", "Hamming distance (initial to best)"),
    "evaluations": ("evaluations_mean", "evaluations_se", "Evaluations"),
    "normalized_fitness": ("normalized_fitness_mean", "normalized_fitness_se", "Fitness / global max"),
}
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 30, 50


@dataclass(frozen=True)
class PlotSpec:
    metric: str
    series: tuple[str, ...]
    input: Path
    output: Path
    title: str = ""


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def render_svg(rows: list[dict], metric: str, series, title: str = "") -> str:
    """SVG text for ``metric`` vs K, one line per series with +-1 SE bars."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; available: {', '.join(METRICS)}")
    mean_key, se_key, label = METRICS[metric]
    available = sorted({r["algorithm"] for r in rows}, key=str)
    missing = [s for s in series if s not in available]
    if missing:
        raise ValueError(f"unknown series {missing}; available: {', '.join(available)}")
    if any(r.get(mean_key) is None for r in rows if r["algorithm"] in series):
        raise ValueError(f"metric {metric!r} not present in the aggregates")

    data = {s: sorted((r["k"], r[mean_key], r[se_key] or 0.0) for r in rows if r["algorithm"] == s) for s in series}
    ks = [k for pts in data.values() for k, _, _ in pts]
    lows = [m - e for pts in data.values() for _, m, e in pts]
    highs = [m + e for pts in data.values() for _, m, e in pts]
    kmin, kmax = min(ks), max(ks)
    ymin, ymax = min(lows), max(highs)
    pad = (ymax - ymin) * 0.05 or abs(ymax) * 0.05 or 1.0
    ymin, ymax = ymin - pad, ymax + pad
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(k):
        return LEFT + (pw * (k - kmin) / (kmax - kmin) if kmax > kmin else pw / 2)

    def sy(v):
        return TOP + ph * (1 - (v - ymin) / (ymax - ymin))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{LEFT + pw / 2:.2f}" y="18" text-anchor="middle">{escape(title)}</text>')
    for k in sorted(set(ks)):
        x = sx(k)
        out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 4}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 17}" text-anchor="middle">{k}</text>')
    for v in _ticks(ymin, ymax):
        y = sy(v)
        out.append(f'<line x1="{LEFT - 4}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 7}" y="{y + 4:.2f}" text-anchor="end">{v:.4g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">K</text>')
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{escape(label)}</text>'
    )
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = data[s]
        path = " ".join(f"{sx(k):.2f},{sy(m):.2f}" for k, m, _ in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for k, m, e in pts:
            x = sx(k)
            out.append(f'<line x1="{x:.2f}" y1="{sy(m - e):.2f}" x2="{x:.2f}" y2="{sy(m + e):.2f}" stroke="{color}"/>')
            out.append(f'<circle cx="{x:.2f}" cy="{sy(m):.2f}" r="2.5" fill="{color}"/>')
        ly = TOP + 10 + 18 * i
        lx = LEFT + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(s)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot(spec: PlotSpec) -> Path:
    rows = read_aggregates(spec.input)
    series = spec.series or tuple(dict.fromkeys(r["algorithm"] for r in rows))
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    spec.output.write_text(render_svg(rows, spec.metric, series, spec.title))
    return spec.output
