"""Shared fixtures: bundled maze, a small playable maze, corpus caching."""

from __future__ import annotations

import random

import pytest

import pacpredict
from pacpredict.engine import EngineConfig, GameState, initial_state, step
from pacpredict.maze import Maze, load_maze

# Small playable maze: outer ring, two vertical connectors, a proper ghost
# house (2x2 starts + airlock + single exit) and one teleport tunnel.
MINI_MAZE = """\
###############
#o.....P.....o#
#.#.#######.#.#
#.#.#######.#.#
T.#.##GG###.#.T
#.#.##GG###.#.#
#.#.##H####.#.#
#o......F....o#
###############
"""

# Straight corridor with dead ends; legal for analysis, not for play.
CORRIDOR_MAZE = """\
#########
#P......#
#########
"""


@pytest.fixture(scope="session")
def default_maze() -> Maze:
    return load_maze(pacpredict.default_maze_text())


@pytest.fixture(scope="session")
def mini_maze() -> Maze:
    return load_maze(MINI_MAZE)


@pytest.fixture(scope="session")
def corridor_maze() -> Maze:
    return load_maze(CORRIDOR_MAZE)


def drive_game(maze: Maze, seed: int, ticks: int,
               config: EngineConfig | None = None) -> list[GameState]:
    """Play `ticks` random-but-seeded legal moves; returns visited states."""
    from pacpredict.engine import pacman_moves

    config = config or EngineConfig()
    rng = random.Random(seed)
    state = initial_state(maze, seed)
    states = [state]
    for _ in range(ticks):
        if state.game_over:
            break
        moves = pacman_moves(maze, state.pacman.cell)
        state, _ = step(state, rng.choice(moves), maze, config)
        states.append(state)
    return states


def sample_midgame_states(maze: Maze, n: int, seed: int = 404,
                          warmup: int = 12) -> list[GameState]:
    """Deterministic bag of mid-game states for oracle comparisons."""
    states = []
    game_seed = seed
    while len(states) < n:
        run = drive_game(maze, game_seed, warmup + 3 * (len(states) % 5))
        if not run[-1].game_over:
            states.append(run[-1])
        game_seed += 1
    return states
