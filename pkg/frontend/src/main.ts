// Browser entry point: one websocket, one canvas, one event loop.
// Rendering happens on frame arrival - there is no local game clock.

import { makeKeyHandler } from "./input.js";
import { InputMessage, parseFrame, StartMessage } from "./protocol.js";
import { canvasSize, draw } from "./render.js";
import { hudStrings } from "./hud.js";
import { applyFrame, emptyView } from "./view.js";

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el;
}

export function connectAndPlay(url: string): void {
  const canvas = byId("game") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    throw new Error("2d canvas unavailable");
  }
  const view = emptyView();
  const ws = new WebSocket(url);

  const sendInput = (message: InputMessage) => {
    if (ws.readyState === WebSocket.OPEN) {
      ws.send(JSON.stringify(message));
    }
  };
  const handleKey = makeKeyHandler(sendInput);

  ws.addEventListener("open", () => {
    const seedField = byId("seed") as HTMLInputElement;
    const start: StartMessage = { type: "start" };
    const seed = parseInt(seedField.value, 10);
    if (!Number.isNaN(seed)) {
      start.seed = seed;
    }
    ws.send(JSON.stringify(start));
    byId("status").textContent = "connected";
  });

  ws.addEventListener("message", (event) => {
    const frame = parseFrame(event.data as string);
    applyFrame(view, frame);
    if (frame.type === "init") {
      const [w, h] = canvasSize(view);
      canvas.width = w;
      canvas.height = h;
    }
    draw(ctx, view);
    const hud = hudStrings(view);
    byId("score").textContent = hud.score;
    byId("lives").textContent = hud.lives;
    byId("accuracy").textContent = hud.accuracy;
    byId("streak").textContent = hud.streak;
    byId("late").textContent = hud.late;
    byId("feed").textContent = hud.feed;
    byId("status").textContent = hud.status || "playing";
  });

  ws.addEventListener("close", () => {
    byId("status").textContent = "disconnected - reload to reconnect";
  });

  window.addEventListener("keydown", (event) => {
    if (handleKey(event.key)) {
      event.preventDefault();
    }
  });
}
