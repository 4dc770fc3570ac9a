"""Workbench configuration: INI round-trip and reproducibility digest.

A Config owns every tunable the CLI exposes: maze choice, score table and
timers, model weights, search parameters, server settings and the output
directory.  Its sha256 digest is embedded in every log header and every
artifact file, which is what makes reruns byte-comparable.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field, replace

import pacpredict

from .behavlets import catalog_ids, default_usage_ids, default_weights
from .engine import EngineConfig
from .lookahead import DEFAULT_NODE_CAP, SearchParams
from .maze import Maze, load_maze, load_maze_file
from .model_behavlet import Model2Config
from .model_simple import SimpleWeights

BUNDLED = "bundled"


@dataclass
class Config:
    maze_path: str = BUNDLED
    engine: EngineConfig = field(default_factory=EngineConfig)
    depth: int = 4
    lam: int = 5
    model1: SimpleWeights = field(default_factory=SimpleWeights)
    node_cap: int = DEFAULT_NODE_CAP
    state_checker: bool = True
    usage: frozenset = field(default_factory=default_usage_ids)
    behavlet_weights: dict = field(default_factory=default_weights)
    max_ticks: int = 3000
    server_port: int = 8000
    tick_ms: int = 96
    budget_ms: int = 96
    output_dir: str = "out"

    def search_params(self) -> SearchParams:
        return SearchParams(depth=self.depth, lam=self.lam)

    def model2_config(self, usage: frozenset | None = None,
                      state_checker: bool | None = None) -> Model2Config:
        return Model2Config(
            params=self.search_params(),
            usage_filter=usage if usage is not None else frozenset(self.usage),
            state_checker_enabled=(self.state_checker if state_checker is None
                                   else state_checker),
            weights=dict(self.behavlet_weights),
        )

    def load_maze(self) -> Maze:
        if self.maze_path == BUNDLED:
            return load_maze(pacpredict.default_maze_text())
        return load_maze_file(self.maze_path)

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp["maze"] = {"path": self.maze_path}
        e = self.engine
        cp["engine"] = {
            "pill_score": str(e.pill_score),
            "power_pill_score": str(e.power_pill_score),
            "fruit_score": str(e.fruit_score),
            "ghost_scores": ",".join(map(str, e.ghost_scores)),
            "extra_life_interval": str(e.extra_life_interval),
            "hunt_base_ticks": str(e.hunt_base_ticks),
            "hunt_per_level": str(e.hunt_per_level),
            "hunt_floor_ticks": str(e.hunt_floor_ticks),
            "fruit_pill_threshold": str(e.fruit_pill_threshold),
            "fruit_duration_ticks": str(e.fruit_duration_ticks),
            "clyde_range": str(e.clyde_range),
            "ghost_release_interval": str(e.ghost_release_interval),
        }
        cp["search"] = {"depth": str(self.depth), "lambda": str(self.lam)}
        m1 = self.model1
        cp["model1"] = {
            "threat_w": repr(m1.threat_w),
            "reward_w": repr(m1.reward_w),
            "lives_w": repr(m1.lives_w),
            "hunt_w": repr(m1.hunt_w),
            "node_cap": str(self.node_cap),
        }
        cp["model2"] = {
            "state_checker": str(self.state_checker).lower(),
            "usage": ",".join(bid for bid in catalog_ids() if bid in self.usage),
        }
        cp["behavlet_weights"] = {
            bid: repr(self.behavlet_weights.get(bid, 0.0))
            for bid in catalog_ids()
        }
        cp["eval"] = {"max_ticks": str(self.max_ticks)}
        cp["server"] = {
            "port": str(self.server_port),
            "tick_ms": str(self.tick_ms),
            "budget_ms": str(self.budget_ms),
        }
        cp["output"] = {"dir": self.output_dir}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def digest(self) -> str:
        return hashlib.sha256(self.to_ini().encode()).hexdigest()[:16]

    @classmethod
    def from_ini(cls, text: str) -> "Config":
        cp = configparser.ConfigParser()
        cp.read_string(text)
        cfg = cls()
        if cp.has_section("maze"):
            cfg.maze_path = cp.get("maze", "path", fallback=BUNDLED)
        if cp.has_section("engine"):
            s = cp["engine"]
            cfg.engine = EngineConfig(
                pill_score=s.getint("pill_score", 10),
                power_pill_score=s.getint("power_pill_score", 50),
                fruit_score=s.getint("fruit_score", 100),
                ghost_scores=tuple(int(x) for x in s.get(
                    "ghost_scores", "200,400,800,1600").split(",")),
                extra_life_interval=s.getint("extra_life_interval", 10_000),
                hunt_base_ticks=s.getint("hunt_base_ticks", 40),
                hunt_per_level=s.getint("hunt_per_level", 5),
                hunt_floor_ticks=s.getint("hunt_floor_ticks", 10),
                fruit_pill_threshold=s.getint("fruit_pill_threshold", 70),
                fruit_duration_ticks=s.getint("fruit_duration_ticks", 60),
                clyde_range=s.getint("clyde_range", 8),
                ghost_release_interval=s.getint("ghost_release_interval", 14),
            )
        if cp.has_section("search"):
            cfg.depth = cp.getint("search", "depth", fallback=4)
            cfg.lam = cp.getint("search", "lambda", fallback=5)
        if cp.has_section("model1"):
            s = cp["model1"]
            cfg.model1 = SimpleWeights(
                threat_w=s.getfloat("threat_w", -1.0),
                reward_w=s.getfloat("reward_w", 1.0),
                lives_w=s.getfloat("lives_w", 5.0),
                hunt_w=s.getfloat("hunt_w", 2.0),
            )
            cfg.node_cap = s.getint("node_cap", DEFAULT_NODE_CAP)
        if cp.has_section("model2"):
            cfg.state_checker = cp.getboolean("model2", "state_checker",
                                              fallback=True)
            usage = cp.get("model2", "usage", fallback="")
            if usage:
                cfg.usage = frozenset(x.strip() for x in usage.split(",") if x.strip())
        if cp.has_section("behavlet_weights"):
            weights = dict(default_weights())
            for bid in catalog_ids():
                key = bid.lower()  # configparser lowercases option names
                if cp.has_option("behavlet_weights", key):
                    weights[bid] = cp.getfloat("behavlet_weights", key)
            cfg.behavlet_weights = weights
        if cp.has_section("eval"):
            cfg.max_ticks = cp.getint("eval", "max_ticks", fallback=3000)
        if cp.has_section("server"):
            cfg.server_port = cp.getint("server", "port", fallback=8000)
            cfg.tick_ms = cp.getint("server", "tick_ms", fallback=96)
            cfg.budget_ms = cp.getint("server", "budget_ms", fallback=96)
        if cp.has_section("output"):
            cfg.output_dir = cp.get("output", "dir", fallback="out")
        return cfg

    @classmethod
    def from_file(cls, path) -> "Config":
        with open(path, encoding="utf-8") as fh:
            return cls.from_ini(fh.read())

    def with_search(self, depth: int | None = None,
                    lam: int | None = None) -> "Config":
        return replace(self, depth=depth if depth is not None else self.depth,
                       lam=lam if lam is not None else self.lam)
