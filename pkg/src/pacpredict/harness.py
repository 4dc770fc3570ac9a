"""Evaluation harness: accuracy, streaks, timing, sweep, ablation.

Replays stored logs tick by tick, shows each predictor the reconstructed
pre-tick state plus the history of the real past, and scores the predicted
heading against the logged one.  Per-call compute time comes from a
monotonic clock with one warm-up call excluded.  Ticks immediately after a
death or level clear are skipped (positions teleport), as are game-over
ticks; every other living tick counts, corridor ticks included.

Human-subject data is out of reach, so the committed corpora are
bot-generated with fixed seeds; the comparative claims (Model 2 beats
Model 1, Points_Max dominates the ablation) are asserted on those corpora
and are directional-only relative to the original study.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field

from scipy import stats as scipy_stats

from .behavlets import HistorySummary, catalog
from .bots import make_policy
from .engine import (
    LEVEL_CLEARED,
    PACMAN_DIED,
    EngineConfig,
    GameState,
    initial_state,
    pacman_moves,
    step,
)
from .gamelog import GameLog, check_replayable, iter_replay, new_log
from .lookahead import ResourceError, SearchParams
from .maze import Maze
from .model_behavlet import Model2Config, predict_model2
from .model_simple import SimpleWeights, predict_model1



@dataclass(frozen=True)
class CorpusSpec:
    policy: str
    games: int
    seed: int


# Committed corpora: regenerate deterministically from these seeds.
CORPORA = {
    "random100": CorpusSpec(policy="random", games=100, seed=11),
    "goal": CorpusSpec(policy="greedy_pills", games=10, seed=7),
    "loo": CorpusSpec(policy="greedy_pills", games=5, seed=23),
    "hunter": CorpusSpec(policy="hunter", games=10, seed=3),
}


# ---------------------------------------------------------------------------
# Predictors.


class RandomBaseline:
    """Uniform choice over Pac-Man's legal headings; the 36%-style floor."""

    name = "random"

    def __init__(self, maze: Maze, seed: int = 0):
        self.maze = maze
        self.rng = random.Random(seed)

    def predict(self, state: GameState, history) -> int:
        return self.rng.choice(pacman_moves(self.maze, state.pacman.cell))


class Model1Predictor:
    name = "model1"

    def __init__(self, maze: Maze, params: SearchParams | None = None,
                 weights: SimpleWeights | None = None,
                 config: EngineConfig | None = None,
                 node_cap: int | None = None):
        self.maze = maze
        self.params = params or SearchParams()
        self.weights = weights or SimpleWeights()
        self.config = config or EngineConfig()
        self.node_cap = node_cap

    def predict(self, state: GameState, history) -> int:
        heading, _ = predict_model1(state, self.maze, self.params,
                                    self.weights, self.config,
                                    node_cap=self.node_cap)
        return heading


class Model2Predictor:
    name = "model2"

    def __init__(self, maze: Maze, model_config: Model2Config | None = None,
                 config: EngineConfig | None = None,
                 audit_sink: list | None = None):
        self.maze = maze
        self.model_config = model_config or Model2Config()
        self.config = config or EngineConfig()
        self.audit_sink = audit_sink

    def predict(self, state: GameState, history) -> int:
        prediction = predict_model2(state, history, self.maze,
                                    self.model_config, self.config)
        if self.audit_sink is not None:
            self.audit_sink.append(
                {"tick": state.tick, **prediction.audit_trace()})
        return prediction.heading


# ---------------------------------------------------------------------------
# Corpus generation.


def run_bots(maze: Maze, policy_id: str, n_games: int, seed: int,
             config: EngineConfig | None = None, max_ticks: int = 3000,
             config_digest: str = "") -> list[GameLog]:
    """Play n complete logged games with the given policy; deterministic."""
    if n_games < 1:
        raise ValueError("n_games must be >= 1")
    config = config or EngineConfig()
    logs = []
    for i in range(n_games):
        game_seed = seed * 1_000_003 + i
        policy = make_policy(policy_id, seed=game_seed)
        state = initial_state(maze, game_seed, config=config)
        log = new_log(maze, game_seed, 1, config_digest, policy_id)
        for _ in range(max_ticks):
            if state.game_over:
                break
            heading = policy.choose(state, maze)
            state, record = step(state, heading, maze, config)
            log.records.append(record)
        logs.append(log)
    return logs


def corpus_logs(name: str, maze: Maze, config: EngineConfig | None = None,
                config_digest: str = "") -> list[GameLog]:
    spec = CORPORA[name]
    return run_bots(maze, spec.policy, spec.games, spec.seed, config,
                    config_digest=config_digest)


# ---------------------------------------------------------------------------
# Evaluation.


@dataclass
class GameRow:
    index: int
    seed: int
    ticks: int
    evaluated: int
    correct: int
    accuracy: float
    ms_mean: float
    streaks: list[int] = field(default_factory=list)


@dataclass
class EvalReport:
    predictor: str
    games: int
    states_evaluated: int
    correct: int
    accuracy: float
    streak_mean: float
    streak_sd: float
    ms_mean: float
    ms_median: float
    ms_sd: float
    mean_reciprocal_branching: float
    per_game: list[GameRow] = field(default_factory=list)


def should_evaluate_tick(prev_events: tuple[str, ...] | None) -> bool:
    """Both the harness and the live server skip post-transition ticks."""
    if prev_events is None:
        return True
    return PACMAN_DIED not in prev_events and LEVEL_CLEARED not in prev_events


def evaluate(logs: list[GameLog], predictor, maze: Maze,
             config: EngineConfig | None = None) -> EvalReport:
    if not logs:
        raise ValueError("no logs to evaluate")
    config = config or EngineConfig()
    rows: list[GameRow] = []
    all_streaks: list[int] = []
    times: list[float] = []
    recip_sum = 0.0
    total_eval = total_correct = 0
    warmed = False

    for gi, log in enumerate(logs):
        check_replayable(log, maze)
        history = HistorySummary()
        evaluated = correct = 0
        game_streaks: list[int] = []
        run = 0
        ms_acc = []
        prev_events: tuple[str, ...] | None = None
        for state, record in iter_replay(log, maze, config, verify=True):
            if state.game_over:
                break
            if should_evaluate_tick(prev_events):
                if not warmed:
                    predictor.predict(state, history)  # warm-up, untimed
                    warmed = True
                t0 = time.perf_counter()
                heading = predictor.predict(state, history)
                ms = (time.perf_counter() - t0) * 1000.0
                ms_acc.append(ms)
                times.append(ms)
                evaluated += 1
                recip_sum += 1.0 / len(pacman_moves(maze, state.pacman.cell))
                if heading == record.pacman_heading:
                    correct += 1
                    run += 1
                elif run:
                    game_streaks.append(run)
                    run = 0
            # advance the real history with what actually happened
            nxt, replayed = step(state, record.pacman_heading, maze, config)
            history.update(state, nxt, replayed, maze)
            prev_events = record.events
        if run:
            game_streaks.append(run)
        all_streaks.extend(game_streaks)
        total_eval += evaluated
        total_correct += correct
        rows.append(GameRow(
            index=gi, seed=log.seed, ticks=len(log.records),
            evaluated=evaluated, correct=correct,
            accuracy=correct / evaluated if evaluated else 0.0,
            ms_mean=statistics.fmean(ms_acc) if ms_acc else 0.0,
            streaks=game_streaks,
        ))

    return EvalReport(
        predictor=getattr(predictor, "name", type(predictor).__name__),
        games=len(logs),
        states_evaluated=total_eval,
        correct=total_correct,
        accuracy=total_correct / total_eval if total_eval else 0.0,
        streak_mean=statistics.fmean(all_streaks) if all_streaks else 0.0,
        streak_sd=(statistics.stdev(all_streaks)
                   if len(all_streaks) > 1 else 0.0),
        ms_mean=statistics.fmean(times) if times else 0.0,
        ms_median=statistics.median(times) if times else 0.0,
        ms_sd=statistics.stdev(times) if len(times) > 1 else 0.0,
        mean_reciprocal_branching=recip_sum / total_eval if total_eval else 0.0,
        per_game=rows,
    )


# ---------------------------------------------------------------------------
# Parameter sweep.


@dataclass
class SweepCell:
    depth: int
    lam: int
    report: EvalReport | None  # None = offline-skipped (tree cap exceeded)


@dataclass
class SweepResult:
    cells: list[SweepCell]

    def best(self) -> SweepCell | None:
        done = [c for c in self.cells if c.report is not None]
        if not done:
            return None
        return max(done, key=lambda c: (c.report.accuracy, -c.depth, -c.lam))


def parameter_sweep(logs: list[GameLog], maze: Maze, predictor_factory,
                    config: EngineConfig | None = None,
                    depths=range(4, 10), lambdas=range(3, 7)) -> SweepResult:
    """One evaluation per (depth, lambda); cells that blow the tree cap are
    marked offline-skipped rather than failed."""
    if not logs:
        raise ValueError("no logs to sweep")
    cells = []
    for depth in depths:
        for lam in lambdas:
            predictor = predictor_factory(SearchParams(depth=depth, lam=lam))
            try:
                report = evaluate(logs, predictor, maze, config)
            except ResourceError:
                report = None
            cells.append(SweepCell(depth=depth, lam=lam, report=report))
    return SweepResult(cells=cells)


# ---------------------------------------------------------------------------
# Leave-one-out ablation.


@dataclass
class LooRow:
    label: str
    excluded_id: str | None  # None for baseline / state-checker rows
    accuracy: float
    ms_per_state: float
    d_ms: float | None       # baseline_ms - run_ms (positive = faster)
    d_acc_pp: float | None   # (baseline_acc - run_acc) * 100
    usage: str


@dataclass
class LooTable:
    baseline_accuracy: float
    baseline_ms: float
    rows: list[LooRow]


def leave_one_out(logs: list[GameLog], maze: Maze,
                  config: EngineConfig | None = None,
                  model_config: Model2Config | None = None) -> LooTable:
    """Ablation rows: a full-catalog baseline, a state-checker-off row,
    then one row per excluded Behavlet, in catalog order.

    Column convention: each delta column is (baseline - excluded run), so a
    negative ms delta means the exclusion made prediction slower and a
    positive accuracy delta means it cost accuracy.
    """
    config = config or EngineConfig()
    specs = catalog()
    if model_config is None:
        model_config = Model2Config(
            usage_filter=frozenset(s.id for s in specs))
    base_report = evaluate(
        logs, Model2Predictor(maze, model_config, config), maze, config)
    rows = [LooRow("None - baseline", None, base_report.accuracy,
                   base_report.ms_mean, None, None, "-")]

    def delta_row(label, excluded_id, report, usage):
        return LooRow(
            label=label, excluded_id=excluded_id,
            accuracy=report.accuracy, ms_per_state=report.ms_mean,
            d_ms=base_report.ms_mean - report.ms_mean,
            d_acc_pp=(base_report.accuracy - report.accuracy) * 100.0,
            usage=usage,
        )

    no_checker = Model2Config(
        params=model_config.params,
        usage_filter=model_config.usage_filter,
        state_checker_enabled=False,
        weights=model_config.weights,
    )
    rows.append(delta_row(
        "State-checking code", None,
        evaluate(logs, Model2Predictor(maze, no_checker, config), maze, config),
        "Y"))

    for spec in specs:
        if spec.id not in model_config.usage_filter:
            continue
        reduced = Model2Config(
            params=model_config.params,
            usage_filter=model_config.usage_filter - {spec.id},
            state_checker_enabled=model_config.state_checker_enabled,
            weights=model_config.weights,
        )
        report = evaluate(
            logs, Model2Predictor(maze, reduced, config), maze, config)
        rows.append(delta_row(spec.name, spec.id, report,
                              "Y" if spec.default_usage else "N"))

    return LooTable(baseline_accuracy=base_report.accuracy,
                    baseline_ms=base_report.ms_mean, rows=rows)


# ---------------------------------------------------------------------------
# Speed-accuracy correlation.


def state_checker_divergence(logs: list[GameLog], maze: Maze,
                             config: EngineConfig | None = None,
                             model_config: Model2Config | None = None,
                             ) -> tuple[int, int]:
    """(ticks checked, ticks where the state-checker changed the decision).

    The checker may only skip Behavlets whose value cannot separate the
    plans of that state, so this should report zero on the bundled corpora
    at the default depth.
    """
    config = config or EngineConfig()
    on = model_config or Model2Config()
    off = Model2Config(params=on.params, usage_filter=on.usage_filter,
                       state_checker_enabled=False, weights=on.weights)
    checked = diverged = 0
    for log in logs:
        check_replayable(log, maze)
        history = HistorySummary()
        prev_events: tuple[str, ...] | None = None
        for state, record in iter_replay(log, maze, config, verify=False):
            if state.game_over:
                break
            if should_evaluate_tick(prev_events):
                checked += 1
                a = predict_model2(state, history, maze, on, config).heading
                b = predict_model2(state, history, maze, off, config).heading
                if a != b:
                    diverged += 1
            nxt, rec = step(state, record.pacman_heading, maze, config)
            history.update(state, nxt, rec, maze)
            prev_events = record.events
    return checked, diverged


@dataclass
class CorrelationResult:
    r: float | None
    p: float | None
    n: int
    undefined: bool
    reason: str = ""


def speed_accuracy_correlation(report: EvalReport) -> CorrelationResult:
    """Pearson r between per-game accuracy and per-game mean ms/state."""
    rows = report.per_game
    if len(rows) < 3:
        raise ValueError("need at least 3 per-game rows")
    acc = [r.accuracy for r in rows]
    ms = [r.ms_mean for r in rows]
    if len(set(acc)) == 1 or len(set(ms)) == 1:
        return CorrelationResult(r=None, p=None, n=len(rows), undefined=True,
                                 reason="zero variance in a column")
    r, p = scipy_stats.pearsonr(acc, ms)
    return CorrelationResult(r=float(r), p=float(p), n=len(rows),
                             undefined=False)


def pearson_from_pairs(pairs: list[tuple[float, float]]) -> CorrelationResult:
    """Correlation over raw (accuracy, ms) pairs; used by the CLI."""
    if len(pairs) < 3:
        raise ValueError("need at least 3 rows")
    xs = [a for a, _ in pairs]
    ys = [b for _, b in pairs]
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        return CorrelationResult(r=None, p=None, n=len(pairs), undefined=True,
                                 reason="zero variance in a column")
    r, p = scipy_stats.pearsonr(xs, ys)
    return CorrelationResult(r=float(r), p=float(p), n=len(pairs),
                             undefined=False)
