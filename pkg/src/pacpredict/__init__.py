"""Pac-Man move-prediction workbench.

Two decision-theoretic predictors over a deterministic tick engine: a
per-state simple-feature model scored over full multi-actor look-ahead
trees, and a per-path Behavlet model over Pac-Man-only plans with
probabilistic ghost projection, plus the evaluation harness (accuracy,
streaks, timing, parameter sweep, leave-one-out ablation) and a live play
server with real-time prediction.
"""

__version__ = "0.1.0"

from importlib import resources


def default_maze_text() -> str:
    """Contents of the bundled census-exact maze (182 cells, 143/32/7)."""
    return resources.files("pacpredict.data").joinpath("default_maze.txt").read_text()
