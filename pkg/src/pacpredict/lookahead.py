"""Future-state enumeration for both predictors.

Three related searches over the engine:

* `enumerate_plans` walks Pac-Man-only move sequences to a fixed depth,
  pruning the reversal heading once the corridor run exceeds the
  back-tracking limit lambda.  Ghosts advance inside each simulated state
  through the normal engine step (deterministic given the root rng), so
  every plan state replays exactly.
* `expand_full_tree` branches every actor: Pac-Man choices times the
  support of each ghost's move distribution, with each node carrying the
  product of ghost-move probabilities along its path.
* `project_ghost_beliefs` pushes each ghost's move distribution forward
  cell-wise, yielding per-step probability maps over cells with Pac-Man
  (and the lead ghost, for the mirroring personality) frozen at their
  current positions.

Plans stop early only at Pac-Man's death or a level clear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .engine import (
    LEVEL_CLEARED,
    PACMAN_DIED,
    EngineConfig,
    GameState,
    GhostState,
    Mode,
    apply_moves,
    ghost_move_distribution,
    pacman_moves,
    step,
)
from .maze import Maze, reverse_heading

MAX_DEPTH = 9  # anything deeper is offline-only: minutes per state
PAPER_DEPTHS = tuple(range(4, 10))
PAPER_LAMBDAS = tuple(range(3, 7))

DEFAULT_NODE_CAP = 5_000_000

# Instrumentation: Model 2 must never build a multi-actor tree, so every
# full-tree expansion (materialised or streamed) bumps this counter.
_full_tree_calls = 0


def full_tree_call_count() -> int:
    return _full_tree_calls


def reset_full_tree_counter() -> None:
    global _full_tree_calls
    _full_tree_calls = 0


def _note_full_tree_call() -> None:
    global _full_tree_calls
    _full_tree_calls += 1


class ResourceError(RuntimeError):
    """Search exceeded the configured node cap; run it offline instead."""


@dataclass(frozen=True)
class SearchParams:
    """Look-ahead depth (t_max) and back-tracking limit lambda."""

    depth: int = 4
    lam: int = 5

    def __post_init__(self):
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must be in 1..{MAX_DEPTH}, got {self.depth}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")

    @property
    def t_max(self) -> int:
        return self.depth


@dataclass(frozen=True)
class Plan:
    """One Pac-Man move sequence and the states it induces (s^1..s^{t_a})."""

    headings: tuple[int, ...]
    states: tuple[GameState, ...]

    @property
    def leaf(self) -> GameState:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.headings)


def enumerate_plans(state: GameState, params: SearchParams, maze: Maze,
                    config: EngineConfig | None = None,
                    run_length: int | None = None) -> list[Plan]:
    """All Pac-Man-only walks of length <= depth under reversal pruning.

    At each step the reversal of the incoming heading is dropped iff the
    corridor run preceding that step exceeds lambda; if pruning would leave
    no move (a dead end) the reversal survives, since only death or level
    end may cut a plan short.
    """
    config = config or EngineConfig()
    plans: list[Plan] = []
    root_run = state.pacman.run_length if run_length is None else run_length

    def walk(s: GameState, run: int, heading_in: int, depth_left: int,
             headings: list[int], states: list[GameState]) -> None:
        if depth_left == 0:
            plans.append(Plan(tuple(headings), tuple(states)))
            return
        moves = pacman_moves(maze, s.pacman.cell)
        if run > params.lam:
            kept = [h for h in moves if h != reverse_heading(heading_in)]
            if kept:
                moves = kept
        for h in moves:
            child, record = step(s, h, maze, config)
            headings.append(h)
            states.append(child)
            if PACMAN_DIED in record.events or LEVEL_CLEARED in record.events:
                plans.append(Plan(tuple(headings), tuple(states)))
            else:
                next_run = run + 1 if h == heading_in else 1
                walk(child, next_run, h, depth_left - 1, headings, states)
            headings.pop()
            states.pop()

    walk(state, root_run, state.pacman.heading, params.depth, [], [])
    return plans


@dataclass
class TreeNode:
    """A full-tree node: the state, its path probability, its children."""

    state: GameState
    prob: float
    children: list[tuple[int, "TreeNode"]] = field(default_factory=list)

    def count(self) -> int:
        return 1 + sum(child.count() for _, child in self.children)


def _ghost_move_combos(state: GameState, maze: Maze, config: EngineConfig):
    """Cartesian product of per-ghost move supports with probabilities."""
    per_ghost = []
    for i, ghost in enumerate(state.ghosts):
        dist = ghost_move_distribution(
            maze, config, i, ghost, state.tick,
            state.pacman.cell, state.pacman.heading,
            state.ghosts[0].cell if state.ghosts else state.pacman.cell,
        )
        per_ghost.append(sorted(dist.items(), key=lambda kv: (kv[0] is None, kv[0])))
    for combo in product(*per_ghost):
        p = 1.0
        for _, q in combo:
            p *= q
        yield tuple(h for h, _ in combo), p


def expand_full_tree(state: GameState, params: SearchParams, maze: Maze,
                     config: EngineConfig | None = None,
                     node_cap: int = DEFAULT_NODE_CAP) -> TreeNode:
    """Materialise the multi-actor look-ahead tree to the configured depth.

    Every node's probability is the product of ghost-move probabilities
    along its path (Pac-Man moves are the decision variable).  Exceeding
    node_cap raises ResourceError: that depth is offline-only.
    """
    config = config or EngineConfig()
    _note_full_tree_call()
    root = TreeNode(state=state, prob=1.0)
    nodes = 1

    def expand(node: TreeNode, depth_left: int) -> None:
        nonlocal nodes
        if depth_left == 0:
            return
        for h in pacman_moves(maze, node.state.pacman.cell):
            for ghost_moves, p in _ghost_move_combos(node.state, maze, config):
                child_state, record = apply_moves(
                    node.state, h, ghost_moves, maze, config)
                child = TreeNode(state=child_state, prob=node.prob * p)
                nodes += 1
                if nodes > node_cap:
                    raise ResourceError(
                        f"full look-ahead tree exceeded {node_cap} nodes at "
                        f"depth {params.depth}; use the offline mode"
                    )
                node.children.append((h, child))
                if not (PACMAN_DIED in record.events
                        or LEVEL_CLEARED in record.events):
                    expand(child, depth_left - 1)

    expand(root, params.depth)
    return root


def iter_tree_states(state: GameState, depth: int, maze: Maze,
                     config: EngineConfig, node_cap: int = DEFAULT_NODE_CAP):
    """Stream (first_heading, state, prob) over the full tree without
    materialising it; same expansion order and cap semantics as
    expand_full_tree, and counted by the same instrumentation."""
    _note_full_tree_call()
    nodes = 1

    def walk(s: GameState, prob: float, first: int | None, depth_left: int):
        nonlocal nodes
        if depth_left == 0:
            return
        for h in pacman_moves(maze, s.pacman.cell):
            head = first if first is not None else h
            for ghost_moves, p in _ghost_move_combos(s, maze, config):
                child, record = apply_moves(s, h, ghost_moves, maze, config)
                nodes += 1
                if nodes > node_cap:
                    raise ResourceError(
                        f"full look-ahead tree exceeded {node_cap} nodes; "
                        f"use the offline mode"
                    )
                yield head, child, prob * p
                if not (PACMAN_DIED in record.events
                        or LEVEL_CLEARED in record.events):
                    yield from walk(child, prob * p, head, depth_left - 1)

    yield from walk(state, 1.0, None, depth)


@dataclass(frozen=True)
class GhostBeliefs:
    """Per-ghost, per-step probability maps over cells."""

    depth: int
    maps: tuple[tuple[dict[int, float], ...], ...]  # [ghost][step-1]

    def distribution(self, ghost: int, t: int) -> dict[int, float]:
        """Cell probabilities for `ghost` after t moves (1-based)."""
        return self.maps[ghost][t - 1]

    def expected_distance(self, maze: Maze, cell: int, ghost: int, t: int) -> float:
        """Belief-weighted shortest distance from `cell` to the ghost."""
        row = maze.dist_row(cell)
        fallback = maze.n_cells
        return sum(p * (row[c] if row[c] >= 0 else fallback)
                   for c, p in self.maps[ghost][t - 1].items())


def project_ghost_beliefs(state: GameState, depth: int, maze: Maze,
                          config: EngineConfig | None = None) -> GhostBeliefs:
    """Push each ghost's move rule forward `depth` steps, cell-wise.

    Particles carry (cell, heading, mode) so reversal exclusion and the
    eaten-ghost revival stay exact; Pac-Man and the lead ghost are frozen
    at their current cells, and mode timers do not advance (the projection
    models ghost kinematics only).  Frightened ghosts hold position on odd
    ticks, mirroring their half speed in the engine.
    """
    config = config or EngineConfig()
    all_maps: list[tuple[dict[int, float], ...]] = []
    pac_cell = state.pacman.cell
    pac_heading = state.pacman.heading
    ghost0_cell = state.ghosts[0].cell if state.ghosts else pac_cell

    for i, ghost in enumerate(state.ghosts):
        particles: dict[tuple[int, int, int, int], float] = {
            (ghost.cell, ghost.heading, int(ghost.mode), ghost.release): 1.0
        }
        steps: list[dict[int, float]] = []
        for k in range(depth):
            tick = state.tick + k
            advanced: dict[tuple[int, int, int, int], float] = {}
            for (cell, heading, mode, release), weight in particles.items():
                shadow = GhostState(cell=cell, heading=heading, mode=mode,
                                    home=cell in maze.house, release=release)
                dist = ghost_move_distribution(
                    maze, config, i, shadow, tick,
                    pac_cell, pac_heading, ghost0_cell,
                )
                next_release = max(0, release - 1)
                for h, p in dist.items():
                    if h is None:
                        key = (cell, heading, mode, next_release)
                    else:
                        nxt = maze.move_to[cell][h]
                        new_mode = mode
                        if (mode == Mode.EATEN and i < len(maze.ghost_starts)
                                and nxt == maze.ghost_starts[i]):
                            new_mode = int(Mode.CHASE)
                        key = (nxt, h, new_mode, next_release)
                    advanced[key] = advanced.get(key, 0.0) + weight * p
            particles = advanced
            marginal: dict[int, float] = {}
            for (cell, _, _, _), weight in particles.items():
                marginal[cell] = marginal.get(cell, 0.0) + weight
            steps.append(marginal)
        all_maps.append(tuple(steps))

    return GhostBeliefs(depth=depth, maps=tuple(all_maps))
