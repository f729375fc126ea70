from __future__ import annotations
import io
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

# fixed salt and no timestamp so reruns give identical files
SVG_RC = {"svg.hashsalt": "nematic-shear", "svg.fonttype": "none", "path.simplify": False}


def _render(fig: Figure) -> str:
    buf = io.StringIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def plot_bifurcation(rows: Iterable[Sequence], poles: Sequence[float], minima: Sequence[Tuple[float, float]]) -> str:
    """(ubar, beta) branches; rows are (ubar, beta, interval, side, sign_Dprime)."""
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    groups: Dict[Tuple[int, str], List[Tuple[float, float]]] = {}
    for u, b, n, side, _sign in rows:
        groups.setdefault((int(n), str(side)), []).append((float(u), float(b)))
    for (n, side), pts in sorted(groups.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=".", lw=1.0, label=f"I{n} {side}")
    for beta in poles:
        ax.axhline(beta, color="0.6", ls="--", lw=0.8)
    if minima:
        ax.plot([m[0] for m in minima], [m[1] for m in minima], "kx", label="pliegue")
    ax.set_xlabel("ubar")
    ax.set_ylabel("beta")
    if groups:
        ax.legend(fontsize=7)
    return _render(fig)


def plot_d_graph(beta: Sequence[float], D: Sequence[float], poles: Sequence[float]) -> str:
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    ax.semilogy(beta, D, ".", ms=2)
    for p in poles:
        ax.axvline(p, color="0.6", ls="--", lw=0.8)
    ax.set_xlabel("beta")
    ax.set_ylabel("D(beta)")
    return _render(fig)


def plot_series(x: Sequence[float], series: Dict[str, Sequence[float]], xlabel: str,
                ylabel: str = "", logy: bool = False, title: Optional[str] = None) -> str:
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.subplots()
    for name, y in series.items():
        ax.plot(x, y, lw=1.0, label=name)
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    if ylabel:
        ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=7)
    return _render(fig)
