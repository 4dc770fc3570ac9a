"""Model 2: per-path Behavlet utility over Pac-Man-only plans.

One call enumerates the plans, projects ghost beliefs once, restricts the
catalog through the state-checker and scores every plan as the weighted
sum of its active Behavlet values.  The first heading of the argmax plan
is the prediction; ties break toward the earlier plan, i.e. canonical
heading order.  No multi-actor tree is ever built, which is what buys the
real-time budget; wall-clock compute per call is measured and returned.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .behavlets import (
    HistorySummary,
    PlanEval,
    applicable_behavlets,
    catalog_ids,
    default_usage_ids,
    default_weights,
    get_spec,
)
from .engine import EngineConfig, GameState
from .lookahead import Plan, SearchParams, enumerate_plans, project_ghost_beliefs
from .maze import Maze


@dataclass(frozen=True)
class Model2Config:
    params: SearchParams = field(default_factory=SearchParams)
    usage_filter: frozenset[str] = field(default_factory=default_usage_ids)
    state_checker_enabled: bool = True
    weights: dict[str, float] = field(default_factory=default_weights)

    def __post_init__(self):
        unknown = set(self.usage_filter) - set(catalog_ids())
        if unknown:
            raise ValueError(f"usage filter contains unknown ids: {sorted(unknown)}")


@dataclass(frozen=True)
class Model2Prediction:
    heading: int
    plans: tuple[Plan, ...]
    utilities: tuple[float, ...]
    active_ids: frozenset[str]
    elapsed_ms: float

    @property
    def best_index(self) -> int:
        best = 0
        for i, u in enumerate(self.utilities):
            if u > self.utilities[best]:
                best = i
        return best

    @property
    def confidence(self) -> float:
        """Normalised gap between the best and second-best plan utility."""
        if len(self.utilities) < 2:
            return 1.0
        ordered = sorted(self.utilities, reverse=True)
        span = ordered[0] - ordered[-1]
        if span <= 0:
            return 0.0
        return min(1.0, (ordered[0] - ordered[1]) / span)

    def audit_trace(self) -> dict:
        """Per-plan firing trace for audit logs: which Behavlets were active
        and what each plan scored."""
        best = self.best_index
        return {
            "active": sorted(self.active_ids),
            "chosen": best,
            "plans": [
                {"headings": list(plan.headings), "utility": utility}
                for plan, utility in zip(self.plans, self.utilities)
            ],
        }


def predict_model2(state: GameState, history: HistorySummary | None,
                   maze: Maze, model_config: Model2Config | None = None,
                   engine_config: EngineConfig | None = None) -> Model2Prediction:
    model_config = model_config or Model2Config()
    engine_config = engine_config or EngineConfig()
    t0 = time.perf_counter()

    plans = enumerate_plans(state, model_config.params, maze, engine_config)
    beliefs = project_ghost_beliefs(state, model_config.params.depth, maze,
                                    engine_config)
    active = applicable_behavlets(
        state, history, model_config.usage_filter, maze, engine_config,
        enabled=model_config.state_checker_enabled)
    weighted = [(get_spec(bid).evaluator, model_config.weights.get(bid, 0.0))
                for bid in sorted(active)]

    utilities = []
    best_i = 0
    for i, plan in enumerate(plans):
        ev = PlanEval(root=state, plan=plan, beliefs=beliefs, history=history,
                      maze=maze, config=engine_config)
        total = 0.0
        for evaluator, weight in weighted:
            if weight != 0.0:
                total += weight * evaluator(ev)
        utilities.append(total)
        if total > utilities[best_i]:
            best_i = i

    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return Model2Prediction(
        heading=plans[best_i].headings[0],
        plans=tuple(plans),
        utilities=tuple(utilities),
        active_ids=frozenset(active),
        elapsed_ms=elapsed_ms,
    )
