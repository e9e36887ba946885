"""Render simulation figure grids to PNG with a non-interactive backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .monte_carlo import ComponentSummary, FigureData  # noqa: E402


def _panel(ax, grid, comp: ComponentSummary, name: str):
    ax.plot(grid, comp.true, color="black", lw=1.2, label="true")
    ax.plot(grid, comp.mean, color="tab:blue", lw=1.2, label="mean estimate")
    ax.plot(grid, comp.band_low, color="tab:blue", ls="--", lw=0.8, label="mean plug-in band")
    ax.plot(grid, comp.band_high, color="tab:blue", ls="--", lw=0.8)
    ax.plot(grid, comp.mc_low, color="tab:red", ls=":", lw=0.8, label="MC 1.96 sd band")
    ax.plot(grid, comp.mc_high, color="tab:red", ls=":", lw=0.8)
    ax.set_title(name)
    ax.set_xlabel("y")
    ax.set_ylim(-0.02, 1.02)


def render_figure(fig_data: FigureData, directory, stem: str = "components") -> list[Path]:
    """Write one PNG per component into ``directory``; returns the paths.

    Metadata that would vary between runs is stripped so repeated renders
    are byte-identical.
    """
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, comp in (("G", fig_data.G), ("H", fig_data.H)):
        fig, ax = plt.subplots(figsize=(5.0, 3.6), dpi=100)
        _panel(ax, fig_data.grid, comp, name)
        ax.legend(loc="best", fontsize=7, frameon=False)
        fig.tight_layout()
        path = out_dir / f"{stem}_{name}.png"
        fig.savefig(path, format="png", metadata={"Software": None})
        plt.close(fig)
        paths.append(path)
    return paths
