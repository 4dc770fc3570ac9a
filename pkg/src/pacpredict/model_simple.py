"""Model 1: per-state heuristic utility accumulated over the full tree.

The four features are weighted inverse-distance proximities over the items
that reward or threaten the player:

* threat: mean proximity 1/(1+d) to chasing ghosts, plus a dispersion term
  (variance of pairwise ghost distances, normalised by the squared maze
  diameter).  The dispersion encoding is a documented stand-in; the weight
  carries the sign, so threat_w <= 0.
* reward: each remaining pill contributes (1 + adjacent pills) / (1 + d).
* lives: the raw life count.
* hunt: during Hunt mode, summed proximity to Frightened ghosts; outside
  it, proximity to the nearest power pill times nearest-ghost proximity.

Per-heading scores sum p_a^t * util(s) over every state in that heading's
subtree of the multi-actor look-ahead tree.  This model has no real-time
contract and is expected to run offline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import EngineConfig, GameState, Mode, pacman_moves
from .lookahead import SearchParams, iter_tree_states
from .maze import HEADINGS, Maze


@dataclass(frozen=True)
class SimpleWeights:
    threat_w: float = -1.0
    reward_w: float = 1.0
    lives_w: float = 5.0
    hunt_w: float = 2.0

    def __post_init__(self):
        if self.threat_w > 0:
            raise ValueError("threat_w is a penalty weight and must be <= 0")


def _proximity(dist: int | None) -> float:
    if dist is None or dist < 0:
        return 0.0
    return 1.0 / (1.0 + dist)


def threat_feature(state: GameState, maze: Maze) -> float:
    chasing = [g for g in state.ghosts if g.mode == Mode.CHASE]
    if not chasing:
        return 0.0
    row = maze.dist_row(state.pacman.cell)
    mean_prox = sum(_proximity(row[g.cell]) for g in chasing) / len(chasing)
    cells = [g.cell for g in state.ghosts]
    pair_dists = []
    for i in range(len(cells)):
        di = maze.dist_row(cells[i])
        for j in range(i + 1, len(cells)):
            d = di[cells[j]]
            pair_dists.append(d if d >= 0 else maze.n_cells)
    dispersion = 0.0
    if len(pair_dists) > 1:
        mean = sum(pair_dists) / len(pair_dists)
        var = sum((d - mean) ** 2 for d in pair_dists) / len(pair_dists)
        dispersion = var / max(1, maze.diameter()) ** 2
    return mean_prox + dispersion


def reward_feature(state: GameState, maze: Maze) -> float:
    pills = state.pills
    if not pills:
        return 0.0
    row = maze.dist_row(state.pacman.cell)
    total = 0.0
    for p in pills:
        adjacent = sum(1 for n in maze.neighbors[p] if n in pills)
        d = row[p]
        total += (1 + adjacent) / (1 + (d if d >= 0 else maze.n_cells))
    return total


def hunt_feature(state: GameState, maze: Maze) -> float:
    row = maze.dist_row(state.pacman.cell)
    if state.hunt_timer > 0:
        return sum(_proximity(row[g.cell]) for g in state.ghosts
                   if g.mode == Mode.FRIGHTENED)
    if not state.power_pills:
        return 0.0
    pp_prox = max(_proximity(row[p]) for p in state.power_pills)
    chasing = [_proximity(row[g.cell]) for g in state.ghosts
               if g.mode == Mode.CHASE]
    return pp_prox * (max(chasing) if chasing else 0.0)


def state_utility(state: GameState, maze: Maze,
                  weights: SimpleWeights | None = None) -> float:
    weights = weights or SimpleWeights()
    return (weights.threat_w * threat_feature(state, maze)
            + weights.reward_w * reward_feature(state, maze)
            + weights.lives_w * state.lives
            + weights.hunt_w * hunt_feature(state, maze))


def predict_model1(state: GameState, maze: Maze,
                   params: SearchParams | None = None,
                   weights: SimpleWeights | None = None,
                   config: EngineConfig | None = None,
                   node_cap: int | None = None,
                   ) -> tuple[int, dict[int, float]]:
    """Argmax first heading under cumulative tree utility.

    Returns (heading, per-heading scores); ties break in canonical heading
    order.  Raises ResourceError when the tree exceeds the node cap.
    """
    params = params or SearchParams()
    weights = weights or SimpleWeights()
    config = config or EngineConfig()
    scores: dict[int, float] = {
        h: 0.0 for h in pacman_moves(maze, state.pacman.cell)
    }
    kwargs = {} if node_cap is None else {"node_cap": node_cap}
    for first, node_state, prob in iter_tree_states(
            state, params.depth, maze, config, **kwargs):
        scores[first] += prob * state_utility(node_state, maze, weights)
    best = None
    for h in HEADINGS:
        if h in scores and (best is None or scores[h] > scores[best]):
            best = h
    return best, scores
