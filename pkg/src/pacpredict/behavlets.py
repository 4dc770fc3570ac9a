"""The Behavlet catalog: 20 composite play features over predicted paths.

Each catalog entry couples a state-check predicate (is this feature worth
computing in this situation?) with an evaluator over a Plan, using
belief-expected ghost distances wherever a feature needs future ghost
positions.  The evaluators are documented concretizations: each keeps the
feature's core idea (pursuit, close calls, luring, vacillation, ...) while
staying computable on partially predicted state sequences, and none of
them ever consults wall-clock speed or whole-level aggregates.

Evaluator value bounds on a depth-d plan: counters are <= d (C3, C5,
Cherry, S4, P1.c), D2 <= d-1, indicators are 0/1 (C1.b, C4, C7, P1, P1.d),
distance means are <= the maze diameter and P4 <= 4 ghosts per step.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .engine import (
    GHOST_EATEN,
    LIFE_GAINED,
    PACMAN_DIED,
    POWER_PILL_EATEN,
    TELEPORT_USED,
    EngineConfig,
    GameState,
    Mode,
    TickRecord,
)
from .lookahead import GhostBeliefs, Plan
from .maze import Maze, reverse_heading


class CatalogError(KeyError):
    """Unknown Behavlet id."""


# ---------------------------------------------------------------------------
# Rolling summary of the actual (non-predicted) past.


@dataclass
class HistorySummary:
    """Bounded aggregates over the real game so far.

    Updated once per tick from the record stream; evaluators and state
    checks may consult it but never mutate it.
    """

    recent_headings: deque = field(default_factory=lambda: deque(maxlen=16))
    hunts_started: int = 0
    ghosts_eaten_total: int = 0
    deaths: deque = field(default_factory=lambda: deque(maxlen=32))
    lives_gained: int = 0
    lives_lost: int = 0
    teleport_uses: int = 0
    ticks_since_score: int = 0
    fruit_exposure_ticks: int = 0
    ticks_since_lure: int | None = None
    _near_pp_run: int = 0
    _run_start_ghost_dist: float | None = None
    _prev_chase_dist: float | None = None

    def update(self, prev_state: GameState, new_state: GameState,
               record: TickRecord, maze: Maze) -> None:
        self.recent_headings.append(record.pacman_heading)
        if POWER_PILL_EATEN in record.events:
            self.hunts_started += 1
        self.ghosts_eaten_total += record.events.count(GHOST_EATEN)
        if PACMAN_DIED in record.events:
            death_cell = maze.move_to[prev_state.pacman.cell][record.pacman_heading]
            self.deaths.append((record.tick, death_cell))
            self.lives_lost += 1
        self.lives_gained += record.events.count(LIFE_GAINED)
        self.teleport_uses += record.events.count(TELEPORT_USED)
        if record.score_delta > 0:
            self.ticks_since_score = 0
        else:
            self.ticks_since_score += 1
        if new_state.fruit_present:
            self.fruit_exposure_ticks += 1
        if self.ticks_since_lure is not None:
            self.ticks_since_lure += 1
        self._track_lure(new_state, record, maze)

    def _track_lure(self, state: GameState, record: TickRecord,
                    maze: Maze) -> None:
        # A lure: >= 3 consecutive ticks parked within 2 cells of an uneaten
        # power pill, not consuming it, while the nearest chasing ghost
        # closes in.
        row = maze.dist_row(state.pacman.cell)
        chase = [row[g.cell] for g in state.ghosts
                 if g.mode == Mode.CHASE and row[g.cell] >= 0]
        nearest_chase = min(chase) if chase else None
        near_pp = any(0 <= row[p] <= 2 for p in state.power_pills)
        if near_pp and POWER_PILL_EATEN not in record.events:
            if self._near_pp_run == 0:
                self._run_start_ghost_dist = nearest_chase
            self._near_pp_run += 1
            if (self._near_pp_run >= 3 and nearest_chase is not None
                    and self._run_start_ghost_dist is not None
                    and nearest_chase < self._run_start_ghost_dist):
                self.ticks_since_lure = 0
        else:
            self._near_pp_run = 0
            self._run_start_ghost_dist = None
        self._prev_chase_dist = nearest_chase


# ---------------------------------------------------------------------------
# Shared per-plan computation context with memoised expected distances.


@dataclass
class PlanEval:
    """One plan prepared for evaluation: memoises the expensive lookups."""

    root: GameState
    plan: Plan
    beliefs: GhostBeliefs
    history: HistorySummary | None
    maze: Maze
    config: EngineConfig
    _ghost_dist: dict = field(default_factory=dict)
    _nearest: dict = field(default_factory=dict)
    _pill_dist: dict = field(default_factory=dict)

    def state(self, t: int) -> GameState:
        return self.root if t == 0 else self.plan.states[t - 1]

    def depth(self) -> int:
        return len(self.plan.states)

    def pac_cell(self, t: int) -> int:
        return self.state(t).pacman.cell

    def ghost_distance(self, t: int, gi: int) -> float:
        """Belief-expected distance from Pac-Man's plan cell to ghost gi."""
        key = (t, gi)
        if key not in self._ghost_dist:
            if t == 0:
                row = self.maze.dist_row(self.root.pacman.cell)
                d = row[self.root.ghosts[gi].cell]
                self._ghost_dist[key] = float(d if d >= 0 else self.maze.n_cells)
            else:
                tb = min(t, self.beliefs.depth)
                self._ghost_dist[key] = self.beliefs.expected_distance(
                    self.maze, self.pac_cell(t), gi, tb)
        return self._ghost_dist[key]

    def nearest_ghost_distance(self, t: int, modes: tuple[int, ...]) -> float | None:
        """Min expected distance over ghosts whose simulated mode matches."""
        key = (t, modes)
        if key not in self._nearest:
            ds = [self.ghost_distance(t, gi)
                  for gi, g in enumerate(self.state(t).ghosts)
                  if g.mode in modes]
            self._nearest[key] = min(ds) if ds else None
        return self._nearest[key]

    def nearest_pill_distance(self, t: int) -> float | None:
        if t not in self._pill_dist:
            pills = self.state(t).pills
            if not pills:
                self._pill_dist[t] = None
            else:
                row = self.maze.dist_row(self.pac_cell(t))
                self._pill_dist[t] = min(
                    row[p] for p in pills if row[p] >= 0)
        return self._pill_dist[t]

    def death_step(self) -> int | None:
        for t in range(1, self.depth() + 1):
            if self.state(t).lives < self.state(t - 1).lives:
                return t
        return None

    def death_cell(self, t: int) -> int:
        """Cell Pac-Man stepped into on the death tick (pre-respawn)."""
        return self.maze.move_to[self.pac_cell(t - 1)][self.plan.headings[t - 1]]

    def hunt_active(self, t: int) -> bool:
        return self.state(t).hunt_timer > 0

    def score_delta(self, t: int) -> int:
        return self.state(t).score - self.state(t - 1).score

    def ghosts_eaten_at(self, t: int) -> int:
        prev, cur = self.state(t - 1).ghosts, self.state(t).ghosts
        return sum(1 for a, b in zip(prev, cur)
                   if a.mode != Mode.EATEN and b.mode == Mode.EATEN)

    def power_pill_eaten_by(self, t: int) -> bool:
        return len(self.state(t).power_pills) < len(self.root.power_pills)

    def hunt_end_step(self) -> int | None:
        """First plan step at which an active hunt has just expired."""
        for t in range(1, self.depth() + 1):
            if self.state(t - 1).hunt_timer > 0 and self.state(t).hunt_timer == 0:
                return t
        return None

    def lure_window_end(self) -> int | None:
        """End step of the first in-plan lure (see HistorySummary), if any."""
        d = self.depth()
        for start in range(1, d - 1):
            window = range(start, start + 3)
            if any(self.power_pill_eaten_by(t) for t in window):
                continue
            near = all(self._near_uneaten_power_pill(t) for t in window)
            if not near:
                continue
            d0 = self.nearest_ghost_distance(start, (int(Mode.CHASE),))
            d1 = self.nearest_ghost_distance(start + 2, (int(Mode.CHASE),))
            if d0 is not None and d1 is not None and d1 < d0:
                return start + 2
        return None

    def _near_uneaten_power_pill(self, t: int) -> bool:
        pps = self.state(t).power_pills
        if not pps:
            return False
        row = self.maze.dist_row(self.pac_cell(t))
        return any(0 <= row[p] <= 2 for p in pps)


# ---------------------------------------------------------------------------
# Evaluators.  d = plan length; values stay finite on every valid plan.

CHASING = (int(Mode.CHASE),)
FRIGHTENED = (int(Mode.FRIGHTENED),)
THREATS = (int(Mode.CHASE), int(Mode.FRIGHTENED))


def _ev_points_max(ev: PlanEval) -> float:
    return float(ev.plan.leaf.score - ev.root.score)


def _ev_a1_hunt_near_house(ev: PlanEval) -> float:
    if ev.maze.house_exit is None:
        return 0.0
    hunt_steps = [t for t in range(1, ev.depth() + 1) if ev.hunt_active(t)]
    if not hunt_steps:
        return 0.0
    exit_row = ev.maze.dist_row(ev.maze.house_exit)
    total = sum(max(exit_row[ev.pac_cell(t)], 0) for t in hunt_steps)
    return -total / len(hunt_steps)


def _ev_a4_hunt_after_expiry(ev: PlanEval) -> float:
    end = ev.hunt_end_step()
    if end is None:
        return 0.0
    pursuit = 0
    for t in range(end + 1, ev.depth() + 1):
        now = ev.nearest_ghost_distance(t, CHASING)
        before = ev.nearest_ghost_distance(t - 1, CHASING)
        if now is not None and before is not None and now < before:
            pursuit += 1
    return float(pursuit)


def _ev_a6_chase_vs_collect(ev: PlanEval) -> float:
    pursuit = approach = 0
    for t in range(1, ev.depth() + 1):
        if not ev.hunt_active(t):
            continue
        gd_now = ev.nearest_ghost_distance(t, FRIGHTENED)
        gd_prev = ev.nearest_ghost_distance(t - 1, FRIGHTENED)
        if gd_now is not None and gd_prev is not None and gd_now < gd_prev:
            pursuit += 1
        pd_now = ev.nearest_pill_distance(t)
        pd_prev = ev.nearest_pill_distance(t - 1)
        if pd_now is not None and pd_prev is not None and pd_now < pd_prev:
            approach += 1
    return float(pursuit - approach)


def _ev_c1b_trapped_and_killed(ev: PlanEval) -> float:
    t = ev.death_step()
    if t is None:
        return 0.0
    close = sum(1 for gi, g in enumerate(ev.state(t - 1).ghosts)
                if g.mode != Mode.EATEN and ev.ghost_distance(t - 1, gi) <= 2.0)
    return 1.0 if close >= 2 else 0.0


def _ev_c2a_mean_distance(ev: PlanEval) -> float:
    values = []
    for t in range(1, ev.depth() + 1):
        if ev.hunt_active(t):
            continue
        for gi, g in enumerate(ev.state(t).ghosts):
            if g.mode != Mode.EATEN:
                values.append(ev.ghost_distance(t, gi))
    return sum(values) / len(values) if values else 0.0


def _ev_c2b_mean_distance_hunt(ev: PlanEval) -> float:
    values = []
    for t in range(1, ev.depth() + 1):
        if not ev.hunt_active(t):
            continue
        for gi, g in enumerate(ev.state(t).ghosts):
            if g.mode == Mode.FRIGHTENED:
                values.append(ev.ghost_distance(t, gi))
    return sum(values) / len(values) if values else 0.0


def _ev_c3_close_calls(ev: PlanEval) -> float:
    if ev.death_step() is not None:
        return 0.0
    calls = 0
    for t in range(1, ev.depth() + 1):
        d = ev.nearest_ghost_distance(t, CHASING)
        if d is not None and d <= 2.0:
            calls += 1
    return float(calls)


def _ev_c4_caught_after_hunt(ev: PlanEval) -> float:
    end = ev.hunt_end_step()
    if end is None:
        return 0.0
    death = ev.death_step()
    return 1.0 if death is not None and end <= death <= end + 5 else 0.0


def _ev_c5_moves_without_points(ev: PlanEval) -> float:
    return float(sum(1 for t in range(1, ev.depth() + 1)
                     if ev.score_delta(t) == 0))


def _ev_c7_killed_at_house(ev: PlanEval) -> float:
    if ev.maze.house_exit is None:
        return 0.0
    t = ev.death_step()
    if t is None:
        return 0.0
    d = ev.maze.dist_row(ev.maze.house_exit)[ev.death_cell(t)]
    return 1.0 if 0 <= d <= 3 else 0.0


def _ev_cherry_onscreen(ev: PlanEval) -> float:
    return float(sum(1 for t in range(1, ev.depth() + 1)
                     if ev.state(t).fruit_present))


def _ev_d2_vacillating(ev: PlanEval) -> float:
    h = ev.plan.headings
    return float(sum(1 for i in range(1, len(h))
                     if h[i] == reverse_heading(h[i - 1])))


def _ev_p1_lure(ev: PlanEval) -> float:
    return 1.0 if ev.lure_window_end() is not None else 0.0


def _ev_p1c_ghosts_after_lure(ev: PlanEval) -> float:
    start = ev.lure_window_end()
    if start is None:
        h = ev.history
        if h is None or h.ticks_since_lure is None or h.ticks_since_lure > 10:
            return 0.0
        start = 0
    return float(sum(ev.ghosts_eaten_at(t)
                     for t in range(start + 1, ev.depth() + 1)))


def _ev_p1d_caught_during_lure(ev: PlanEval) -> float:
    lure = ev.lure_window_end()
    if lure is None:
        return 0.0
    death = ev.death_step()
    if death is None or death <= lure - 2:
        return 0.0
    return 0.0 if ev.power_pill_eaten_by(death) else 1.0


def _ev_p4_speed_of_hunt(ev: PlanEval) -> float:
    hunt_steps = sum(1 for t in range(1, ev.depth() + 1) if ev.hunt_active(t))
    eaten = sum(ev.ghosts_eaten_at(t)
                for t in range(1, ev.depth() + 1) if ev.hunt_active(t))
    return eaten / hunt_steps if hunt_steps else 0.0


def _ev_s2a_lives_gained(ev: PlanEval) -> float:
    return float(sum(max(0, ev.state(t).lives - ev.state(t - 1).lives)
                     for t in range(1, ev.depth() + 1)))


def _ev_s2b_lives_lost(ev: PlanEval) -> float:
    return float(sum(max(0, ev.state(t - 1).lives - ev.state(t).lives)
                     for t in range(1, ev.depth() + 1)))


def _ev_s4_teleport_use(ev: PlanEval) -> float:
    return float(sum(1 for t in range(1, ev.depth() + 1)
                     if ev.maze.is_teleport_move(ev.pac_cell(t - 1),
                                                 ev.plan.headings[t - 1])))


# ---------------------------------------------------------------------------
# State checks.


def _always(state, history, maze, config) -> bool:
    return True


def _hunt_context(state, history, maze, config) -> bool:
    if state.hunt_timer > 0:
        return True
    row = maze.dist_row(state.pacman.cell)
    return any(0 <= row[p] <= 10 for p in state.power_pills)


def _outside_hunt(state, history, maze, config) -> bool:
    # Counts non-hunt steps only.  Skipping is safe just when no plan step
    # can fall outside the hunt: the timer outlasts any horizon (max depth
    # 9) and neither a death (revived chase ghost in range resets the
    # timer) nor a level clear can cut the hunt short.
    if state.hunt_timer <= 9:
        return True
    if _chase_ghost_near(state, history, maze, config):
        return True
    return len(state.pills) + len(state.power_pills) <= 9


def _two_ghosts_close(state, history, maze, config) -> bool:
    row = maze.dist_row(state.pacman.cell)
    close = sum(1 for g in state.ghosts
                if g.mode == Mode.CHASE and 0 <= row[g.cell] <= 10)
    return close >= 2


def _chase_ghost_near(state, history, maze, config) -> bool:
    # 10 = depth 4 of Pac-Man travel + 4 of ghost approach + threshold 2
    row = maze.dist_row(state.pacman.cell)
    return any(g.mode == Mode.CHASE and 0 <= row[g.cell] <= 10
               for g in state.ghosts)


def _near_house(state, history, maze, config) -> bool:
    if maze.house_exit is None:
        return False
    d = maze.dist_row(state.pacman.cell)[maze.house_exit]
    return 0 <= d <= 8


def _fruit_on_screen(state, history, maze, config) -> bool:
    return state.fruit_present


def _lure_context(state, history, maze, config) -> bool:
    if history is not None and history.ticks_since_lure is not None \
            and history.ticks_since_lure <= 10:
        return True
    row = maze.dist_row(state.pacman.cell)
    return any(0 <= row[p] <= 6 for p in state.power_pills)


def _near_extra_life(state, history, maze, config) -> bool:
    # max depth-4 plan gain: pills + fruit + a full 200..1600 ghost chain
    interval = config.extra_life_interval
    return interval - state.score % interval <= 4000


def _near_teleport(state, history, maze, config) -> bool:
    row = maze.dist_row(state.pacman.cell)
    return any(0 <= row[mouth] <= 10
               for pair in maze.teleport_pairs for mouth in pair)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BehavletSpec:
    id: str
    name: str
    category: str
    weight: float
    default_usage: bool  # Table usage column: include in a final model?
    state_check: Callable
    evaluator: Callable[[PlanEval], float]


_CATALOG: tuple[BehavletSpec, ...] = (
    BehavletSpec("Points_Max", "Points_Max", "Other", 1.0, True,
                 _always, _ev_points_max),
    BehavletSpec("A1", "A1_Hunt Close To Ghost House", "Aggression", 1.0, True,
                 _hunt_context, _ev_a1_hunt_near_house),
    BehavletSpec("A4", "A4_Hunt Even After Power Pill Finishes", "Aggression",
                 1.0, True, _hunt_context, _ev_a4_hunt_after_expiry),
    BehavletSpec("A6", "A6_Chase Ghosts or Collect Dots", "Aggression",
                 1.0, True, _hunt_context, _ev_a6_chase_vs_collect),
    BehavletSpec("C1.b", "C1.b_Times Trapped and Killed", "Caution",
                 -1.0, False, _two_ghosts_close, _ev_c1b_trapped_and_killed),
    BehavletSpec("C2.a", "C2.a_Average Distance to Ghosts", "Caution",
                 1.0, True, _outside_hunt, _ev_c2a_mean_distance),
    BehavletSpec("C2.b", "C2.b_Average Distance During Hunt", "Caution",
                 -1.0, True, _hunt_context, _ev_c2b_mean_distance_hunt),
    BehavletSpec("C3", "C3_Close Calls", "Caution",
                 0.5, True, _chase_ghost_near, _ev_c3_close_calls),
    BehavletSpec("C4", "C4_Caught After Hunt", "Caution",
                 -1.0, True, _hunt_context, _ev_c4_caught_after_hunt),
    BehavletSpec("C5", "C5_Moves With No Points Scored", "Caution",
                 -1.0, True, _always, _ev_c5_moves_without_points),
    BehavletSpec("C7", "C7_Killed at Ghost House", "Caution",
                 -1.0, True, _near_house, _ev_c7_killed_at_house),
    BehavletSpec("Cherry", "Cherry Onscreen Time", "Other",
                 1.0, False, _fruit_on_screen, _ev_cherry_onscreen),
    BehavletSpec("D2", "D2_Player Vacillating", "Decisiveness",
                 -1.0, True, _always, _ev_d2_vacillating),
    BehavletSpec("P1", "P1_Wait Near Power Pill to Lure Ghosts", "Planning",
                 1.0, False, _lure_context, _ev_p1_lure),
    BehavletSpec("P1.c", "P1.c_Lure: # Ghosts Eaten After Lure", "Planning",
                 1.0, False, _lure_context, _ev_p1c_ghosts_after_lure),
    BehavletSpec("P1.d", "P1.d_Lure: Caught Before Eating Pill", "Planning",
                 -1.0, False, _lure_context, _ev_p1d_caught_during_lure),
    BehavletSpec("P4", "P4_SpeedOfHunt", "Planning",
                 1.0, True, _hunt_context, _ev_p4_speed_of_hunt),
    BehavletSpec("S2a", "S2a_Lives Gained", "Skill",
                 1.0, False, _near_extra_life, _ev_s2a_lives_gained),
    BehavletSpec("S2b", "S2b_Lives Lost", "Skill",
                 -1.0, False, _chase_ghost_near, _ev_s2b_lives_lost),
    BehavletSpec("S4", "S4_Teleport Use", "Skill",
                 1.0, False, _near_teleport, _ev_s4_teleport_use),
)

_BY_ID = {spec.id: spec for spec in _CATALOG}


def catalog() -> tuple[BehavletSpec, ...]:
    """All 20 Behavlets in the ablation report's fixed row order."""
    return _CATALOG


def catalog_ids() -> tuple[str, ...]:
    return tuple(spec.id for spec in _CATALOG)


def default_usage_ids() -> frozenset[str]:
    return frozenset(spec.id for spec in _CATALOG if spec.default_usage)


def default_weights() -> dict[str, float]:
    return {spec.id: spec.weight for spec in _CATALOG}


def get_spec(behavlet_id: str) -> BehavletSpec:
    try:
        return _BY_ID[behavlet_id]
    except KeyError:
        raise CatalogError(f"unknown Behavlet id {behavlet_id!r}") from None


def applicable_behavlets(state: GameState, history: HistorySummary | None,
                         usage_filter: frozenset[str] | set[str],
                         maze: Maze, config: EngineConfig,
                         enabled: bool = True) -> set[str]:
    """Ids from usage_filter whose state check passes.

    With the state-checker disabled the filter is returned unchanged.
    Points_Max's check is constantly true, so it survives whenever it is
    in the filter at all.
    """
    if not enabled:
        return set(usage_filter)
    return {
        bid for bid in usage_filter
        if get_spec(bid).state_check(state, history, maze, config)
    }


def evaluate_behavlet(behavlet_id: str, plan: Plan, beliefs: GhostBeliefs,
                      history: HistorySummary | None, *, root: GameState,
                      maze: Maze, config: EngineConfig | None = None) -> float:
    """Evaluate one Behavlet on one plan (fresh memo context)."""
    spec = get_spec(behavlet_id)
    ev = PlanEval(root=root, plan=plan, beliefs=beliefs, history=history,
                  maze=maze, config=config or EngineConfig())
    return spec.evaluator(ev)
