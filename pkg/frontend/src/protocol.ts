// Wire protocol types, mirroring the server's JSON frames one-to-one.

export type HeadingName = "Up" | "Left" | "Down" | "Right";
export type GhostMode = "chase" | "frightened" | "eaten";

export type Cell = [number, number]; // [row, col]

export interface InitFrame {
  type: "init";
  width: number;
  height: number;
  rows: string[];
  pills: Cell[];
  power_pills: Cell[];
  pacman: Cell;
  ghosts: Cell[];
  fruit: Cell | null;
  seed: number;
  tick_ms: number;
  budget_ms: number;
}

export interface Prediction {
  for_tick: number;
  heading: HeadingName;
  confidence: number;
  active: string[];
}

export interface Tallies {
  made: number;
  correct: number;
  streak: number;
  late: number;
}

export interface GhostFrame {
  cell: Cell;
  mode: GhostMode;
}

export interface StateFrame {
  type: "state";
  tick: number;
  pacman: { cell: Cell; heading: HeadingName };
  ghosts: GhostFrame[];
  eaten: Cell[];
  fruit: boolean;
  score: number;
  lives: number;
  mode: "hunt" | "normal";
  game_over: boolean;
  prediction: Prediction | null;
  tallies: Tallies;
  late: boolean;
}

export type ServerFrame = InitFrame | StateFrame;

export interface StartMessage {
  type: "start";
  seed?: number;
}

export interface InputMessage {
  type: "input";
  heading: HeadingName;
}

export function parseFrame(raw: string): ServerFrame {
  const obj = JSON.parse(raw);
  if (obj.type !== "init" && obj.type !== "state") {
    throw new Error(`unknown frame type: ${obj.type}`);
  }
  return obj as ServerFrame;
}

export function cellKey(cell: Cell): string {
  return `${cell[0]},${cell[1]}`;
}
