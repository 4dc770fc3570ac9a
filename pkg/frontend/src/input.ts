// Keyboard handling: arrows and WASD, sent the moment the key lands.

import { HeadingName, InputMessage } from "./protocol.js";

const KEY_HEADINGS: Record<string, HeadingName> = {
  ArrowUp: "Up",
  ArrowLeft: "Left",
  ArrowDown: "Down",
  ArrowRight: "Right",
  w: "Up",
  a: "Left",
  s: "Down",
  d: "Right",
  W: "Up",
  A: "Left",
  S: "Down",
  D: "Right",
};

export function headingForKey(key: string): HeadingName | null {
  return KEY_HEADINGS[key] ?? null;
}

export type Sender = (message: InputMessage) => void;

/** Returns a key handler that forwards mapped keys synchronously. */
export function makeKeyHandler(send: Sender): (key: string) => boolean {
  return (key: string) => {
    const heading = headingForKey(key);
    if (heading === null) {
      return false;
    }
    send({ type: "input", heading });
    return true;
  };
}
