"""Real-time play host: engine loop, live Model 2 prediction, websocket UI.

One websocket connection = one session = one game.  The protocol is JSON
text frames:

  client -> {"type": "start", "seed": 123}          begin a game
            {"type": "input", "heading": "Left"}    steer Pac-Man
  server -> {"type": "init", ...}                   maze geometry, full pill set
            {"type": "state", ...}                  one frame per tick

Each state frame carries the prediction for the NEXT tick, so the model
has provably committed to its guess before the player's input for that
tick is read (prediction-before-action).  The frame also carries running
tallies {made, correct, streak, late}; the HUD must display these verbatim.

Two clocks: with tick_ms > 0 the loop free-runs at a fixed wall-clock
cadence, keeping only the latest queued heading per tick and marking
frames whose prediction overran the budget as late (that tick's
prediction is skipped and tallied separately).  With tick_ms == 0 the
loop is lock-step: exactly one tick per input frame, no lateness - the
mode scripted clients and the equivalence tests use.

Logs written by a session are ordinary game logs: replaying one offline
through the harness reproduces the live accuracy exactly.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .behavlets import HistorySummary
from .config import Config
from .engine import (
    GameState,
    Mode,
    initial_state,
    resolve_pacman_heading,
    step,
)
from .gamelog import new_log, serialize_log
from .harness import should_evaluate_tick
from .maze import HEADING_NAMES, Maze, heading_from_name
from .model_behavlet import predict_model2

MODE_NAMES = {int(Mode.CHASE): "chase", int(Mode.FRIGHTENED): "frightened",
              int(Mode.EATEN): "eaten"}


@dataclass
class Tallies:
    made: int = 0
    correct: int = 0
    streak: int = 0
    late: int = 0

    def as_dict(self) -> dict:
        return {"made": self.made, "correct": self.correct,
                "streak": self.streak, "late": self.late}


@dataclass
class Session:
    """One live game bound to one client connection."""

    config: Config
    maze: Maze
    seed: int
    log_dir: Path | None
    state: GameState = None
    history: HistorySummary = field(default_factory=HistorySummary)
    tallies: Tallies = field(default_factory=Tallies)
    pending_prediction: dict | None = None  # for the upcoming tick

    def __post_init__(self):
        self.engine_config = self.config.engine
        self.model_config = self.config.model2_config()
        self.state = initial_state(self.maze, self.seed,
                                   config=self.engine_config)
        self.log = new_log(self.maze, self.seed, 1, self.config.digest(),
                           "live")
        self.prev_events: tuple[str, ...] | None = None

    # -- protocol frames -----------------------------------------------------

    def init_frame(self) -> dict:
        maze = self.maze
        return {
            "type": "init",
            "width": maze.width,
            "height": maze.height,
            "rows": maze.text.splitlines(),
            "pills": [list(maze.rc(c)) for c in sorted(maze.pill_layout)],
            "power_pills": [list(maze.rc(c))
                            for c in sorted(maze.power_pill_layout)],
            "pacman": list(maze.rc(self.state.pacman.cell)),
            "ghosts": [list(maze.rc(g.cell)) for g in self.state.ghosts],
            "fruit": (list(maze.rc(maze.fruit_cell))
                      if maze.fruit_cell is not None else None),
            "seed": self.seed,
            "tick_ms": self.config.tick_ms,
            "budget_ms": self.config.budget_ms,
        }

    def state_frame(self, eaten_cells: list[int], late: bool) -> dict:
        maze, state = self.maze, self.state
        return {
            "type": "state",
            "tick": state.tick,
            "pacman": {
                "cell": list(maze.rc(state.pacman.cell)),
                "heading": HEADING_NAMES[state.pacman.heading],
            },
            "ghosts": [
                {"cell": list(maze.rc(g.cell)), "mode": MODE_NAMES[int(g.mode)]}
                for g in state.ghosts
            ],
            "eaten": [list(maze.rc(c)) for c in eaten_cells],
            "fruit": state.fruit_present,
            "score": state.score,
            "lives": state.lives,
            "mode": "hunt" if state.hunt_timer > 0 else "normal",
            "game_over": state.game_over,
            "prediction": self.pending_prediction,
            "tallies": self.tallies.as_dict(),
            "late": late,
        }

    # -- prediction & tick ----------------------------------------------------

    def compute_prediction(self) -> float:
        """Predict the next move from the current state; returns elapsed ms.

        Must run before the next input is consumed; the caller decides
        whether an overrun marks the frame late.
        """
        if self.state.game_over:
            self.pending_prediction = None
            return 0.0
        pred = predict_model2(self.state, self.history, self.maze,
                              self.model_config, self.engine_config)
        self.pending_prediction = {
            "for_tick": self.state.tick + 1,
            "heading": HEADING_NAMES[pred.heading],
            "confidence": round(pred.confidence, 4),
            "active": sorted(pred.active_ids),
        }
        return pred.elapsed_ms

    def drop_prediction_late(self) -> None:
        self.pending_prediction = None
        self.tallies.late += 1

    def apply_tick(self, desired: int | None) -> list[int]:
        """Score the pending prediction, step the engine, update history."""
        heading = resolve_pacman_heading(self.state, desired, self.maze)
        if (self.pending_prediction is not None
                and should_evaluate_tick(self.prev_events)):
            self.tallies.made += 1
            if heading_from_name(self.pending_prediction["heading"]) == heading:
                self.tallies.correct += 1
                self.tallies.streak += 1
            else:
                self.tallies.streak = 0
        before = self.state
        self.state, record = step(before, heading, self.maze,
                                  self.engine_config)
        self.history.update(before, self.state, record, self.maze)
        self.log.records.append(record)
        self.prev_events = record.events
        self.pending_prediction = None
        return sorted((before.pills - self.state.pills)
                      | (before.power_pills - self.state.power_pills))

    def flush_log(self) -> Path | None:
        if self.log_dir is None or not self.log.records:
            return None
        self.log_dir.mkdir(parents=True, exist_ok=True)
        path = self.log_dir / f"live_{self.seed}.log"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(serialize_log(self.log))
        return path


def _parse_heading(message: dict) -> int | None:
    name = message.get("heading")
    if isinstance(name, str) and name in HEADING_NAMES:
        return heading_from_name(name)
    return None


def create_app(config: Config | None = None,
               log_dir: str | Path | None = None,
               ui_dir: str | Path | None = None) -> FastAPI:
    config = config or Config()
    maze = config.load_maze()
    out = Path(log_dir) if log_dir is not None else Path(config.output_dir)
    app = FastAPI(title="pacpredict live server")
    app.state.config = config
    app.state.maze = maze

    # Serve the built web client when present (frontend/ at the repo root).
    ui = Path(ui_dir) if ui_dir is not None else Path("frontend")
    if (ui / "index.html").exists():
        from fastapi.staticfiles import StaticFiles

        if (ui / "dist").exists():
            app.mount("/dist", StaticFiles(directory=ui / "dist"),
                      name="dist")
        app.mount("/app", StaticFiles(directory=ui, html=True), name="app")

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session: Session | None = None
        try:
            # Wait for a start message (ignore inputs sent before start).
            while session is None:
                message = json.loads(await ws.receive_text())
                if message.get("type") == "start":
                    seed = int(message.get("seed", 0))
                    session = Session(config=config, maze=maze, seed=seed,
                                      log_dir=out)
            await ws.send_text(_dumps(session.init_frame()))
            session.compute_prediction()
            await ws.send_text(_dumps(session.state_frame([], False)))
            if config.tick_ms > 0:
                await _cadence_loop(ws, session, config)
            else:
                await _lockstep_loop(ws, session)
        except WebSocketDisconnect:
            pass
        finally:
            if session is not None:
                session.flush_log()

    return app


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


async def _lockstep_loop(ws: WebSocket, session: Session) -> None:
    """One tick per input frame; no cadence, no lateness."""
    while not session.state.game_over:
        message = json.loads(await ws.receive_text())
        if message.get("type") != "input":
            continue
        eaten = session.apply_tick(_parse_heading(message))
        session.compute_prediction()
        await ws.send_text(_dumps(session.state_frame(eaten, False)))


async def _cadence_loop(ws: WebSocket, session: Session,
                        config: Config) -> None:
    """Fixed wall-clock tick; latest queued heading wins, others dropped."""
    loop = asyncio.get_event_loop()
    tick_s = config.tick_ms / 1000.0
    next_tick = loop.time() + tick_s
    latest: int | None = None
    while not session.state.game_over:
        remaining = next_tick - loop.time()
        while remaining > 0:
            try:
                raw = await asyncio.wait_for(ws.receive_text(),
                                             timeout=remaining)
            except asyncio.TimeoutError:
                break
            message = json.loads(raw)
            if message.get("type") == "input":
                heading = _parse_heading(message)
                if heading is not None:
                    latest = heading
            remaining = next_tick - loop.time()
        eaten = session.apply_tick(latest)
        latest = None
        elapsed_ms = session.compute_prediction()
        late = elapsed_ms > config.budget_ms
        if late:
            session.drop_prediction_late()
        await ws.send_text(_dumps(session.state_frame(eaten, late)))
        next_tick += tick_s
