"""Deterministic tick-based Pac-Man rules.

One tick moves every actor exactly one cell.  A GameState is an immutable
value; `step` returns a fresh state plus a TickRecord describing what
happened.  All randomness (Frightened ghosts only) flows through the
integer `rng_state` carried by the state, so equal inputs always produce
bitwise-equal outputs and hypothetical look-ahead never disturbs the live
game.

Resolution order within a tick:
  1. Pac-Man moves and consumes (pill / power pill / fruit)
  2. ghosts move (Frightened ghosts only on even ticks, half speed)
  3. collisions, including same-tick cell swaps
  4. hunt timer decrements
  5. fruit spawn / despawn
  6. extra-life check
  7. level-clear check
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

from .maze import (
    DOWN,
    HEADINGS,
    LEFT,
    RIGHT,
    UP,
    Maze,
    reverse_heading,
)

PACMAN = "pacman"

# TickRecord event labels.
PILL_EATEN = "PillEaten"
POWER_PILL_EATEN = "PowerPillEaten"
GHOST_EATEN = "GhostEaten"
FRUIT_EATEN = "FruitEaten"
PACMAN_DIED = "PacManDied"
LIFE_GAINED = "LifeGained"
LEVEL_CLEARED = "LevelCleared"
TELEPORT_USED = "TeleportUsed"


class RuleError(RuntimeError):
    """Raised when a step is driven with an impossible move."""


class Mode(IntEnum):
    CHASE = 0
    FRIGHTENED = 1
    EATEN = 2


@dataclass(frozen=True)
class EngineConfig:
    pill_score: int = 10
    power_pill_score: int = 50
    fruit_score: int = 100
    ghost_scores: tuple[int, int, int, int] = (200, 400, 800, 1600)
    extra_life_interval: int = 10_000
    hunt_base_ticks: int = 40
    hunt_per_level: int = 5
    hunt_floor_ticks: int = 10
    fruit_pill_threshold: int = 70
    fruit_duration_ticks: int = 60
    clyde_range: int = 8
    starting_lives: int = 3
    ghost_release_interval: int = 14  # staggered exit from the house

    def hunt_duration(self, level: int) -> int:
        return max(self.hunt_floor_ticks,
                   self.hunt_base_ticks - self.hunt_per_level * (level - 1))


@dataclass(frozen=True)
class PacmanState:
    cell: int
    heading: int
    run_length: int  # consecutive ticks on the current heading


@dataclass(frozen=True)
class GhostState:
    cell: int
    heading: int
    mode: int
    home: bool  # inside the ghost house
    release: int = 0  # ticks left before this ghost may leave the house


@dataclass(frozen=True)
class GameState:
    tick: int
    pacman: PacmanState
    ghosts: tuple[GhostState, ...]
    pills: frozenset[int]
    power_pills: frozenset[int]
    fruit_present: bool
    fruit_remaining: int
    fruit_spawned: bool
    hunt_timer: int
    hunt_chain: int
    pills_eaten: int
    score: int
    lives: int
    level: int
    rng_state: int

    @property
    def game_over(self) -> bool:
        return self.lives <= 0


@dataclass(frozen=True)
class TickRecord:
    tick: int
    pacman_cell: int
    pacman_heading: int
    ghosts: tuple[tuple[int, int], ...]  # (cell, mode) per ghost
    score_delta: int
    events: tuple[str, ...]


# ---------------------------------------------------------------------------
# Seedable value-typed RNG (splitmix64): the state is a plain int so game
# states stay cheap to copy and logs stay reproducible across platforms.

_MASK64 = (1 << 64) - 1


def _mix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


def seed_rng(seed: int) -> int:
    state = (seed * 0x2545F4914F6CDD1D + 0x123456789ABCDEF) & _MASK64
    state, _ = _mix64(state)
    return state


def rng_choice_index(state: int, n: int) -> tuple[int, int]:
    state, value = _mix64(state)
    return state, value % n


# ---------------------------------------------------------------------------


def initial_state(maze: Maze, seed: int, level: int = 1,
                  config: EngineConfig | None = None) -> GameState:
    """Fresh game at the given level; deterministic in (maze, seed, level)."""
    if len(maze.ghost_starts) != 4:
        raise RuleError("playable maze requires 4 ghost starts")
    config = config or EngineConfig()
    pac = PacmanState(
        cell=maze.pacman_start,
        heading=_initial_heading(maze, maze.pacman_start),
        run_length=0,
    )
    ghosts = _starting_ghosts(maze, config)
    return GameState(
        tick=0,
        pacman=pac,
        ghosts=ghosts,
        pills=maze.pill_layout,
        power_pills=maze.power_pill_layout,
        fruit_present=False,
        fruit_remaining=0,
        fruit_spawned=False,
        hunt_timer=0,
        hunt_chain=0,
        pills_eaten=0,
        score=0,
        lives=config.starting_lives,
        level=level,
        rng_state=seed_rng(seed),
    )


def _starting_ghosts(maze: Maze, config: EngineConfig) -> tuple[GhostState, ...]:
    return tuple(
        GhostState(cell=c, heading=UP, mode=Mode.CHASE, home=c in maze.house,
                   release=(i + 1) * config.ghost_release_interval)
        for i, c in enumerate(maze.ghost_starts)
    )


def _initial_heading(maze: Maze, cell: int) -> int:
    for h in HEADINGS:
        target = maze.move_to[cell][h]
        if target is not None and target not in maze.house:
            return h
    return UP


def pacman_moves(maze: Maze, cell: int) -> list[int]:
    """Headings Pac-Man may take: navigable, never into the ghost house."""
    row = maze.move_to[cell]
    return [h for h in HEADINGS
            if row[h] is not None and row[h] not in maze.house]


def legal_moves(state: GameState, actor, maze: Maze) -> list[int]:
    """Legal headings in canonical (Up, Left, Down, Right) order.

    `actor` is the string "pacman" or a ghost index.  Chase-mode ghosts
    exclude the reversal of their heading (classic constraint) unless that
    would leave no move at all.
    """
    if actor == PACMAN:
        return pacman_moves(maze, state.pacman.cell)
    ghost = state.ghosts[actor]
    row = maze.move_to[ghost.cell]
    moves = [h for h in HEADINGS if row[h] is not None]
    if ghost.mode == Mode.CHASE and not ghost.home:
        forward = [h for h in moves if h != reverse_heading(ghost.heading)]
        if forward:
            return forward
    return moves


# ---------------------------------------------------------------------------
# Ghost policy.  A single kinematic rule backs the engine, the full-tree
# expansion and the belief projection: callers supply the (possibly frozen)
# positions the ghost reacts to.


def ghost_target(maze: Maze, config: EngineConfig, index: int,
                 pacman_cell: int, pacman_heading: int, ghost0_cell: int,
                 ghost_cell: int) -> int:
    """Per-personality chase target, always a navigable cell."""
    if index == 0:
        return pacman_cell
    if index == 1:
        cell = pacman_cell
        for _ in range(4):
            nxt = maze.move_to[cell][pacman_heading]
            if nxt is None:
                break
            cell = nxt
        return cell
    if index == 2:
        pr, pc = maze.cell_rc[pacman_cell]
        gr, gc = maze.cell_rc[ghost0_cell]
        mr = min(max(2 * pr - gr, 0), maze.height - 1)
        mc = min(max(2 * pc - gc, 0), maze.width - 1)
        mirrored = maze.cell_at(mr, mc)
        return mirrored if mirrored is not None else pacman_cell
    d = maze.distance(ghost_cell, pacman_cell)
    if d is not None and d > config.clyde_range:
        return pacman_cell
    return maze.corner_anchors[2]  # bottom-left retreat


def ghost_move_distribution(maze: Maze, config: EngineConfig, index: int,
                            ghost: GhostState, tick: int, pacman_cell: int,
                            pacman_heading: int, ghost0_cell: int,
                            ) -> dict[int | None, float]:
    """Probability over this tick's headings (None = hold position).

    Deterministic modes give a point mass; Frightened ghosts move uniformly
    over legal non-reversal headings on even ticks and hold on odd ticks.
    """
    row = maze.move_to[ghost.cell]
    legal = [h for h in HEADINGS if row[h] is not None]
    if not legal:
        return {None: 1.0}

    if ghost.mode == Mode.EATEN:
        if index >= len(maze.ghost_starts):
            return {None: 1.0}  # analysis maze without a house: park
        target = maze.ghost_starts[index]
        return {_greedy_heading(maze, ghost.cell, legal, target): 1.0}

    if ghost.home:
        if ghost.release > 0:
            return {None: 1.0}  # still queued inside the house
        target = maze.house_exit
        return {_greedy_heading(maze, ghost.cell, legal, target): 1.0}

    # Outside the house, live ghosts never re-enter it.
    outside = [h for h in legal if row[h] not in maze.house]
    if not outside:
        outside = legal
    no_reverse = [h for h in outside if h != reverse_heading(ghost.heading)]
    options = no_reverse if no_reverse else outside

    if ghost.mode == Mode.FRIGHTENED:
        if tick % 2 != 0:
            return {None: 1.0}
        p = 1.0 / len(options)
        return {h: p for h in options}

    target = ghost_target(maze, config, index, pacman_cell, pacman_heading,
                          ghost0_cell, ghost.cell)
    return {_greedy_heading(maze, ghost.cell, options, target): 1.0}


def _greedy_heading(maze: Maze, cell: int, options: list[int], target: int) -> int:
    best_h, best_d = options[0], None
    for h in options:
        nxt = maze.move_to[cell][h]
        d = maze.dist_row(nxt)[target]
        if d < 0:
            d = maze.n_cells * 2  # unreachable, rank last
        if best_d is None or d < best_d:
            best_h, best_d = h, d
    return best_h


def _apply_ghost_move(maze: Maze, index: int, ghost: GhostState,
                      heading: int | None) -> GhostState:
    release = max(0, ghost.release - 1)
    if heading is None:
        return replace(ghost, release=release)
    cell = maze.move_to[ghost.cell][heading]
    mode = ghost.mode
    if mode == Mode.EATEN and cell == maze.ghost_starts[index]:
        mode = Mode.CHASE
    return GhostState(cell=cell, heading=heading, mode=mode,
                      home=cell in maze.house, release=release)


# ---------------------------------------------------------------------------


def step(state: GameState, pacman_heading: int, maze: Maze,
         config: EngineConfig | None = None) -> tuple[GameState, TickRecord]:
    """Advance one tick; Frightened ghosts sample through rng_state."""
    config = config or EngineConfig()
    rng = state.rng_state
    ghost_headings: list[int | None] = []
    for i, ghost in enumerate(state.ghosts):
        dist = ghost_move_distribution(
            maze, config, i, ghost, state.tick,
            state.pacman.cell, state.pacman.heading, state.ghosts[0].cell,
        )
        if len(dist) == 1:
            ghost_headings.append(next(iter(dist)))
        else:
            options = sorted(dist)  # uniform case: all keys are headings
            rng, idx = rng_choice_index(rng, len(options))
            ghost_headings.append(options[idx])
    new_state, record = apply_moves(state, pacman_heading, tuple(ghost_headings),
                                    maze, config)
    return replace(new_state, rng_state=rng), record


def apply_moves(state: GameState, pacman_heading: int,
                ghost_headings: tuple[int | None, ...], maze: Maze,
                config: EngineConfig) -> tuple[GameState, TickRecord]:
    """Advance one tick with every ghost's move fixed by the caller.

    This is the deterministic core shared by `step` and the full-tree
    expansion; rng_state passes through untouched.
    """
    events: list[str] = []
    score = state.score

    # 1. Pac-Man moves and consumes.
    moves = pacman_moves(maze, state.pacman.cell)
    if pacman_heading not in moves:
        if state.pacman.heading in moves:
            pacman_heading = state.pacman.heading
        else:
            raise RuleError(
                f"no legal fallback for heading {pacman_heading} "
                f"at cell {state.pacman.cell}"
            )
    applied_heading = pacman_heading
    if maze.is_teleport_move(state.pacman.cell, pacman_heading):
        events.append(TELEPORT_USED)
    prev_pac_cell = state.pacman.cell
    pac_cell = maze.move_to[prev_pac_cell][pacman_heading]
    run = state.pacman.run_length + 1 if pacman_heading == state.pacman.heading else 1
    pacman = PacmanState(cell=pac_cell, heading=pacman_heading, run_length=run)

    pills = state.pills
    power_pills = state.power_pills
    pills_eaten = state.pills_eaten
    hunt_timer = state.hunt_timer
    hunt_chain = state.hunt_chain
    fruit_present = state.fruit_present
    fruit_remaining = state.fruit_remaining
    fruit_spawned = state.fruit_spawned
    ghosts = list(state.ghosts)

    if pac_cell in pills:
        pills = pills - {pac_cell}
        pills_eaten += 1
        score += config.pill_score
        events.append(PILL_EATEN)
    elif pac_cell in power_pills:
        power_pills = power_pills - {pac_cell}
        score += config.power_pill_score
        hunt_timer = config.hunt_duration(state.level)
        hunt_chain = 0
        ghosts = [
            g if g.mode == Mode.EATEN else replace(g, mode=Mode.FRIGHTENED)
            for g in ghosts
        ]
        events.append(POWER_PILL_EATEN)
    if fruit_present and pac_cell == maze.fruit_cell:
        fruit_present = False
        fruit_remaining = 0
        score += config.fruit_score
        events.append(FRUIT_EATEN)

    # 2. Ghosts move.
    prev_cells = [g.cell for g in ghosts]
    ghosts = [
        _apply_ghost_move(maze, i, g, ghost_headings[i])
        for i, g in enumerate(ghosts)
    ]

    # 3. Collisions (same cell, or swapped cells this tick).
    lives = state.lives
    died = False
    for i, ghost in enumerate(ghosts):
        hit = ghost.cell == pac_cell or (
            ghost.cell == prev_pac_cell and prev_cells[i] == pac_cell
        )
        if not hit:
            continue
        if ghost.mode == Mode.FRIGHTENED:
            score += config.ghost_scores[min(hunt_chain, 3)]
            hunt_chain += 1
            ghosts[i] = replace(ghost, mode=Mode.EATEN)
            events.append(GHOST_EATEN)
        elif ghost.mode == Mode.CHASE:
            events.append(PACMAN_DIED)
            lives -= 1
            died = True
            break
    if died:
        pacman, ghosts = _reset_positions(maze, config)
        hunt_timer = 0
        hunt_chain = 0
        fruit_present = False
        fruit_remaining = 0

    # 4. Hunt timer.
    if hunt_timer > 0:
        hunt_timer -= 1
        if hunt_timer == 0:
            ghosts = [
                replace(g, mode=Mode.CHASE) if g.mode == Mode.FRIGHTENED else g
                for g in ghosts
            ]

    # 5. Fruit.
    if fruit_present:
        fruit_remaining -= 1
        if fruit_remaining <= 0:
            fruit_present = False
            fruit_remaining = 0
    elif (not fruit_spawned and maze.fruit_cell is not None
          and pills_eaten >= config.fruit_pill_threshold):
        fruit_present = True
        fruit_remaining = config.fruit_duration_ticks
        fruit_spawned = True

    # 6. Extra lives.
    gained = score // config.extra_life_interval - state.score // config.extra_life_interval
    if gained > 0 and lives > 0:
        lives += gained
        events.extend([LIFE_GAINED] * gained)

    # 7. Level clear: fires on the tick the last pill is consumed.
    level = state.level
    consumed = PILL_EATEN in events or POWER_PILL_EATEN in events
    if consumed and not pills and not power_pills and lives > 0:
        events.append(LEVEL_CLEARED)
        level += 1
        pills = maze.pill_layout
        power_pills = maze.power_pill_layout
        pills_eaten = 0
        hunt_timer = 0
        hunt_chain = 0
        fruit_present = False
        fruit_remaining = 0
        fruit_spawned = False
        pacman, ghosts = _reset_positions(maze, config)

    new_state = GameState(
        tick=state.tick + 1,
        pacman=pacman,
        ghosts=tuple(ghosts),
        pills=pills,
        power_pills=power_pills,
        fruit_present=fruit_present,
        fruit_remaining=fruit_remaining,
        fruit_spawned=fruit_spawned,
        hunt_timer=hunt_timer,
        hunt_chain=hunt_chain,
        pills_eaten=pills_eaten,
        score=score,
        lives=lives,
        level=level,
        rng_state=state.rng_state,
    )
    record = TickRecord(
        tick=new_state.tick,
        pacman_cell=pacman.cell,
        pacman_heading=applied_heading,  # the move taken, not a respawn heading
        ghosts=tuple((g.cell, int(g.mode)) for g in ghosts),
        score_delta=score - state.score,
        events=tuple(events),
    )
    return new_state, record


def _reset_positions(maze: Maze,
                     config: EngineConfig) -> tuple[PacmanState, list[GhostState]]:
    pacman = PacmanState(
        cell=maze.pacman_start,
        heading=_initial_heading(maze, maze.pacman_start),
        run_length=0,
    )
    return pacman, list(_starting_ghosts(maze, config))


def resolve_pacman_heading(state: GameState, desired: int | None, maze: Maze) -> int:
    """Heading the engine will actually apply for a (possibly absent) input.

    Falls back to the current heading, then to the first legal heading in
    canonical order; this is the substitution the live server and the bots
    use so `step` never sees an impossible move.
    """
    moves = pacman_moves(maze, state.pacman.cell)
    if desired is not None and desired in moves:
        return desired
    if state.pacman.heading in moves:
        return state.pacman.heading
    return moves[0]
