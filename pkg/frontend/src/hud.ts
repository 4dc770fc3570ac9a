// HUD text: server tallies verbatim, plus formatted accuracy.

import { accuracyLabel, ClientView } from "./view.js";

export interface HudStrings {
  score: string;
  lives: string;
  accuracy: string;
  streak: string;
  late: string;
  feed: string;
  status: string;
}

export function hudStrings(view: ClientView): HudStrings {
  const t = view.tallies;
  return {
    score: `Score ${view.score}`,
    lives: `Lives ${view.lives}`,
    accuracy: `Prediction ${t.correct}/${t.made} (${accuracyLabel(t)})`,
    streak: `Streak ${t.streak}`,
    late: view.lateFrame ? `LATE (${t.late} total)` : t.late > 0 ? `late ${t.late}` : "",
    feed: view.behavletFeed.join("  "),
    status: view.gameOver
      ? "GAME OVER"
      : view.huntMode
        ? "HUNT"
        : "",
  };
}
