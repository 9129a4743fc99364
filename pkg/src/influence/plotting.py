"""Keep/hide grid of a matching table, written to an image file."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from .analysis import MatchingTable  # noqa: E402


def plot_matching_table(table: MatchingTable, path, title: str = "", state_names=None) -> None:
    """Draw states as rows and variables as columns; dark cells are kept."""
    states = sorted(table.entries)
    universe = list(table.universe)
    grid = np.zeros((len(states), max(len(universe), 1)))
    for i, s in enumerate(states):
        keep = set(table.entries[s][0])
        for j, v in enumerate(universe):
            grid[i, j] = v in keep

    width = 1.2 + 0.6 * max(len(universe), 1)
    height = 1.2 + 0.35 * max(len(states), 1)
    fig, ax = plt.subplots(figsize=(width, height))
    ax.imshow(grid, cmap=ListedColormap(["#f2f2f2", "#2b5c8a"]), vmin=0, vmax=1, aspect="auto")
    ax.set_xticks(range(len(universe)))
    ax.set_xticklabels(universe)
    ax.set_yticks(range(len(states)))
    names = state_names or {}
    ax.set_yticklabels([f"{s} {names[s]}" if s in names else str(s) for s in states])
    ax.set_xlabel("variable")
    ax.set_ylabel("state")
    ax.xaxis.set_ticks_position("top")
    ax.xaxis.set_label_position("top")
    ax.set_xticks(np.arange(-0.5, len(universe), 1), minor=True)
    ax.set_yticks(np.arange(-0.5, len(states), 1), minor=True)
    ax.grid(which="minor", color="white", linewidth=1.5)
    ax.tick_params(which="minor", length=0)
    if title:
        ax.set_title(title, fontsize=10, pad=24)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
