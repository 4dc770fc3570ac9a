"""Structured game logs: line-delimited JSON, one record per tick.

The first line is a header carrying the maze checksum, seed, level, config
digest, engine version and the producing policy; every following line is
one TickRecord.  Serialisation is canonical (sorted keys, no whitespace)
so the determinism contract extends to the bytes on disk.

Replaying a log re-simulates the game through the engine and verifies each
reconstructed tick against the recorded one, which is how the harness gets
byte-exact pre-tick states for the predictors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

from . import __version__
from .engine import EngineConfig, GameState, TickRecord, initial_state, step
from .maze import Maze


class LogError(RuntimeError):
    """Log cannot be replayed under the current maze/config/engine."""


@dataclass
class GameLog:
    maze_checksum: str
    seed: int
    level: int
    config_digest: str
    engine_version: str
    policy: str
    records: list[TickRecord]

    @property
    def final_score(self) -> int:
        return sum(r.score_delta for r in self.records)


def _record_to_obj(rec: TickRecord) -> dict:
    return {
        "t": rec.tick,
        "p": [rec.pacman_cell, rec.pacman_heading],
        "g": [list(g) for g in rec.ghosts],
        "d": rec.score_delta,
        "e": list(rec.events),
    }


def _record_from_obj(obj: dict) -> TickRecord:
    return TickRecord(
        tick=obj["t"],
        pacman_cell=obj["p"][0],
        pacman_heading=obj["p"][1],
        ghosts=tuple((c, m) for c, m in obj["g"]),
        score_delta=obj["d"],
        events=tuple(obj["e"]),
    )


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def serialize_log(log: GameLog) -> str:
    header = {
        "type": "header",
        "maze": log.maze_checksum,
        "seed": log.seed,
        "level": log.level,
        "config": log.config_digest,
        "engine": log.engine_version,
        "policy": log.policy,
    }
    lines = [_dumps(header)]
    lines.extend(_dumps(_record_to_obj(r)) for r in log.records)
    return "\n".join(lines) + "\n"


def parse_log(text: str) -> GameLog:
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise LogError("empty log")
    header = json.loads(lines[0])
    if header.get("type") != "header":
        raise LogError("log does not start with a header line")
    return GameLog(
        maze_checksum=header["maze"],
        seed=header["seed"],
        level=header["level"],
        config_digest=header["config"],
        engine_version=header["engine"],
        policy=header.get("policy", ""),
        records=[_record_from_obj(json.loads(line)) for line in lines[1:]],
    )


def write_log(log: GameLog, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_log(log))


def read_log(path) -> GameLog:
    with open(path, encoding="utf-8") as fh:
        return parse_log(fh.read())


def new_log(maze: Maze, seed: int, level: int, config_digest: str,
            policy: str) -> GameLog:
    return GameLog(
        maze_checksum=maze.checksum,
        seed=seed,
        level=level,
        config_digest=config_digest,
        engine_version=__version__,
        policy=policy,
        records=[],
    )


def check_replayable(log: GameLog, maze: Maze, config_digest: str | None = None) -> None:
    if log.maze_checksum != maze.checksum:
        raise LogError("maze checksum mismatch: log was produced on a different maze")
    if config_digest is not None and log.config_digest != config_digest:
        raise LogError("config digest mismatch: log was produced under a different config")
    if log.engine_version != __version__:
        raise LogError(
            f"engine version mismatch: log={log.engine_version} "
            f"current={__version__}"
        )


def iter_replay(log: GameLog, maze: Maze, config: EngineConfig | None = None,
                verify: bool = True) -> Iterator[tuple[GameState, TickRecord]]:
    """Yield (pre-tick state, record) pairs, re-simulating the whole game.

    With verify=True every re-simulated tick is checked against the logged
    one; divergence means the log is stale relative to the engine.
    """
    config = config or EngineConfig()
    state = initial_state(maze, log.seed, log.level)
    for rec in log.records:
        yield state, rec
        state, replayed = step(state, rec.pacman_heading, maze, config)
        if verify and replayed != rec:
            raise LogError(
                f"replay diverged at tick {rec.tick}: "
                f"logged={rec} replayed={replayed}"
            )


def final_state(log: GameLog, maze: Maze,
                config: EngineConfig | None = None) -> GameState:
    state = initial_state(maze, log.seed, log.level)
    config = config or EngineConfig()
    for rec in log.records:
        state, _ = step(state, rec.pacman_heading, maze, config)
    return state
