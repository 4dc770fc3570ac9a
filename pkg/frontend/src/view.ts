// Client view state: a pure fold over incoming server frames.
//
// Nothing here simulates the game. Pills are the init set minus the cells
// the server reports eaten; HUD numbers are the server tallies verbatim
// (accuracy is only formatted, never recomputed from game state).

import {
  Cell,
  cellKey,
  GhostFrame,
  HeadingName,
  InitFrame,
  Prediction,
  ServerFrame,
  StateFrame,
  Tallies,
} from "./protocol.js";

export const FEED_SIZE = 8;

export interface MazeGeometry {
  width: number;
  height: number;
  rows: string[];
}

export interface ClientView {
  maze: MazeGeometry | null;
  pills: Set<string>;
  powerPills: Set<string>;
  pacman: { cell: Cell; heading: HeadingName } | null;
  ghosts: GhostFrame[];
  fruitCell: Cell | null;
  fruitVisible: boolean;
  tick: number;
  score: number;
  lives: number;
  huntMode: boolean;
  gameOver: boolean;
  prediction: Prediction | null;
  tallies: Tallies;
  lateFrame: boolean;
  behavletFeed: string[]; // most recent first, capped at FEED_SIZE
}

export function emptyView(): ClientView {
  return {
    maze: null,
    pills: new Set(),
    powerPills: new Set(),
    pacman: null,
    ghosts: [],
    fruitCell: null,
    fruitVisible: false,
    tick: 0,
    score: 0,
    lives: 0,
    huntMode: false,
    gameOver: false,
    prediction: null,
    tallies: { made: 0, correct: 0, streak: 0, late: 0 },
    lateFrame: false,
    behavletFeed: [],
  };
}

export function applyFrame(view: ClientView, frame: ServerFrame): ClientView {
  if (frame.type === "init") {
    return applyInit(view, frame);
  }
  return applyState(view, frame);
}

function applyInit(view: ClientView, frame: InitFrame): ClientView {
  view.maze = { width: frame.width, height: frame.height, rows: frame.rows };
  view.pills = new Set(frame.pills.map(cellKey));
  view.powerPills = new Set(frame.power_pills.map(cellKey));
  view.pacman = { cell: frame.pacman, heading: "Left" };
  view.ghosts = frame.ghosts.map((cell) => ({ cell, mode: "chase" }));
  view.fruitCell = frame.fruit;
  view.fruitVisible = false;
  view.behavletFeed = [];
  return view;
}

function applyState(view: ClientView, frame: StateFrame): ClientView {
  for (const cell of frame.eaten) {
    const key = cellKey(cell);
    view.pills.delete(key);
    view.powerPills.delete(key);
  }
  view.pacman = frame.pacman;
  view.ghosts = frame.ghosts;
  view.fruitVisible = frame.fruit;
  view.tick = frame.tick;
  view.score = frame.score;
  view.lives = frame.lives;
  view.huntMode = frame.mode === "hunt";
  view.gameOver = frame.game_over;
  view.prediction = frame.prediction;
  view.tallies = frame.tallies; // verbatim: the HUD must not recompute these
  view.lateFrame = frame.late;
  if (frame.prediction) {
    feedBehavlets(view, frame.prediction.active);
  }
  return view;
}

function feedBehavlets(view: ClientView, active: string[]): void {
  const merged = [...active];
  for (const id of view.behavletFeed) {
    if (!merged.includes(id)) {
      merged.push(id);
    }
  }
  view.behavletFeed = merged.slice(0, FEED_SIZE);
}

export function accuracyLabel(tallies: Tallies): string {
  if (tallies.made === 0) {
    return "--";
  }
  return `${((100 * tallies.correct) / tallies.made).toFixed(1)}%`;
}
