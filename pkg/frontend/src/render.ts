// Canvas rendering: geometric glyphs on a cell grid, no sprite assets.

import { Cell, cellKey, HeadingName } from "./protocol.js";
import { ClientView } from "./view.js";

export const CELL = 22; // pixels per maze cell; scale knob

const GHOST_COLORS = ["#e33", "#f8a", "#3cc", "#f90"];

export function canvasSize(view: ClientView): [number, number] {
  if (!view.maze) {
    return [0, 0];
  }
  return [view.maze.width * CELL, view.maze.height * CELL];
}

function center(cell: Cell): [number, number] {
  return [cell[1] * CELL + CELL / 2, cell[0] * CELL + CELL / 2];
}

export function draw(ctx: CanvasRenderingContext2D, view: ClientView): void {
  if (!view.maze) {
    return;
  }
  const { width, height, rows } = view.maze;
  ctx.fillStyle = "#000";
  ctx.fillRect(0, 0, width * CELL, height * CELL);

  ctx.fillStyle = "#1a1a6e";
  for (let r = 0; r < height; r += 1) {
    for (let c = 0; c < width; c += 1) {
      if (rows[r][c] === "#") {
        ctx.fillRect(c * CELL + 1, r * CELL + 1, CELL - 2, CELL - 2);
      }
    }
  }

  ctx.fillStyle = "#ffb8ae";
  for (const key of view.pills) {
    const [r, c] = key.split(",").map(Number);
    const [x, y] = center([r, c]);
    ctx.beginPath();
    ctx.arc(x, y, CELL * 0.12, 0, Math.PI * 2);
    ctx.fill();
  }
  for (const key of view.powerPills) {
    const [r, c] = key.split(",").map(Number);
    const [x, y] = center([r, c]);
    ctx.beginPath();
    ctx.arc(x, y, CELL * 0.3, 0, Math.PI * 2);
    ctx.fill();
  }

  if (view.fruitVisible && view.fruitCell) {
    const [x, y] = center(view.fruitCell);
    ctx.fillStyle = "#e33";
    ctx.beginPath();
    ctx.moveTo(x, y - CELL * 0.3);
    ctx.lineTo(x + CELL * 0.3, y);
    ctx.lineTo(x, y + CELL * 0.3);
    ctx.lineTo(x - CELL * 0.3, y);
    ctx.closePath();
    ctx.fill();
  }

  view.ghosts.forEach((ghost, i) => {
    const [x, y] = center(ghost.cell);
    ctx.fillStyle =
      ghost.mode === "frightened"
        ? "#22f"
        : ghost.mode === "eaten"
          ? "#888"
          : GHOST_COLORS[i % GHOST_COLORS.length];
    ctx.beginPath();
    ctx.arc(x, y - CELL * 0.08, CELL * 0.36, Math.PI, 0);
    ctx.lineTo(x + CELL * 0.36, y + CELL * 0.34);
    ctx.lineTo(x - CELL * 0.36, y + CELL * 0.34);
    ctx.closePath();
    ctx.fill();
  });

  if (view.pacman) {
    const [x, y] = center(view.pacman.cell);
    ctx.fillStyle = "#ff0";
    ctx.beginPath();
    ctx.arc(x, y, CELL * 0.38, 0.2 * Math.PI, 1.8 * Math.PI);
    ctx.lineTo(x, y);
    ctx.closePath();
    ctx.fill();

    if (view.prediction) {
      drawPredictionArrow(ctx, x, y, view.prediction.heading);
    }
  }
}

/** Overlay arrow on Pac-Man's cell pointing where the model predicts. */
export function drawPredictionArrow(
  ctx: CanvasRenderingContext2D,
  x: number,
  y: number,
  heading: HeadingName,
): void {
  const angle = headingAngle(heading);
  ctx.save();
  ctx.translate(x, y);
  ctx.rotate(angle);
  ctx.strokeStyle = "#0f0";
  ctx.fillStyle = "#0f0";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(0, 0);
  ctx.lineTo(CELL * 0.9, 0);
  ctx.stroke();
  ctx.beginPath();
  ctx.moveTo(CELL * 0.9, 0);
  ctx.lineTo(CELL * 0.6, -CELL * 0.18);
  ctx.lineTo(CELL * 0.6, CELL * 0.18);
  ctx.closePath();
  ctx.fill();
  ctx.restore();
}

export function headingAngle(heading: HeadingName): number {
  switch (heading) {
    case "Right":
      return 0;
    case "Down":
      return Math.PI / 2;
    case "Left":
      return Math.PI;
    case "Up":
      return -Math.PI / 2;
  }
}

/** Key used by tests to assert the overlay targets Pac-Man's cell. */
export function predictionOverlayCell(view: ClientView): string | null {
  if (!view.pacman || !view.prediction) {
    return null;
  }
  return cellKey(view.pacman.cell);
}
