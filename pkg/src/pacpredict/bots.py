"""Scripted players standing in for human test subjects.

Four policies with distinct temperaments generate the committed corpora:
`random` (uniform legal moves), `greedy_pills` (shortest path to pills with
basic ghost avoidance), `hunter` (prioritises power pills and Frightened
ghosts) and `cautious` (maximises ghost distance under pressure).  Every
policy is deterministic given its seed.
"""

from __future__ import annotations

import random

from .engine import GameState, Mode, pacman_moves
from .maze import Maze

POLICY_IDS = ("greedy_pills", "hunter", "cautious", "random")


class BotPolicy:
    """Base: choose a legal heading for the current state."""

    id = "base"

    def __init__(self, seed: int = 0):
        self.rng = random.Random(seed)

    def choose(self, state: GameState, maze: Maze) -> int:
        raise NotImplementedError


class RandomPolicy(BotPolicy):
    id = "random"

    def choose(self, state, maze):
        return self.rng.choice(pacman_moves(maze, state.pacman.cell))


def _chase_cells(state):
    return [g.cell for g in state.ghosts
            if g.mode == Mode.CHASE and not g.home]


def _frightened_cells(state):
    return [g.cell for g in state.ghosts
            if g.mode == Mode.FRIGHTENED and not g.home]


def _safe_moves(state, maze, danger_radius=1):
    """Moves whose target is not on or next to a chasing ghost."""
    chase = _chase_cells(state)
    moves = pacman_moves(maze, state.pacman.cell)
    if not chase:
        return moves
    safe = []
    for h in moves:
        nxt = maze.move_to[state.pacman.cell][h]
        row = maze.dist_row(nxt)
        if all(row[c] > danger_radius for c in chase):
            safe.append(h)
    return safe or moves


def _toward(state, maze, targets, moves):
    """Move minimising distance to the nearest target."""
    best_h, best_d = moves[0], None
    for h in moves:
        nxt = maze.move_to[state.pacman.cell][h]
        row = maze.dist_row(nxt)
        ds = [row[t] for t in targets if row[t] >= 0]
        d = min(ds) if ds else maze.n_cells
        if best_d is None or d < best_d:
            best_h, best_d = h, d
    return best_h


class GreedyPillsPolicy(BotPolicy):
    id = "greedy_pills"

    def choose(self, state, maze):
        moves = _safe_moves(state, maze)
        targets = state.pills or state.power_pills
        if not targets:
            return moves[0]
        return _toward(state, maze, targets, moves)


class HunterPolicy(BotPolicy):
    id = "hunter"

    def choose(self, state, maze):
        moves = _safe_moves(state, maze)
        frightened = _frightened_cells(state)
        if frightened:
            return _toward(state, maze, frightened, moves)
        if state.power_pills:
            row = maze.dist_row(state.pacman.cell)
            threats = [row[c] for c in _chase_cells(state) if row[c] >= 0]
            if threats and min(threats) <= 8:
                return _toward(state, maze, state.power_pills, moves)
        targets = state.pills or state.power_pills
        if not targets:
            return moves[0]
        return _toward(state, maze, targets, moves)


class CautiousPolicy(BotPolicy):
    id = "cautious"

    def choose(self, state, maze):
        chase = _chase_cells(state)
        moves = pacman_moves(maze, state.pacman.cell)
        if chase:
            row = maze.dist_row(state.pacman.cell)
            threats = [row[c] for c in chase if row[c] >= 0]
            if threats and min(threats) <= 4:
                best_h, best_d = moves[0], -1
                for h in moves:
                    nxt = maze.move_to[state.pacman.cell][h]
                    nrow = maze.dist_row(nxt)
                    d = min(nrow[c] for c in chase)
                    if d > best_d:
                        best_h, best_d = h, d
                return best_h
        targets = state.pills or state.power_pills
        if not targets:
            return moves[0]
        return _toward(state, maze, targets, _safe_moves(state, maze))


def make_policy(policy_id: str, seed: int = 0) -> BotPolicy:
    classes = {cls.id: cls for cls in
               (RandomPolicy, GreedyPillsPolicy, HunterPolicy, CautiousPolicy)}
    try:
        return classes[policy_id](seed)
    except KeyError:
        raise ValueError(f"unknown bot policy {policy_id!r}; "
                         f"choose from {POLICY_IDS}") from None
