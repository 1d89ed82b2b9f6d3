// Keyboard teleoperation: while any mapped key is held at L4, a 10 Hz
// ticker sends one velocity command per tick; releasing all keys or
// leaving L4 stops the stream.

import type { ClientCommand } from "./protocol";

const KEY_AXES: Record<string, string> = {
  w: "forward", W: "forward", ArrowUp: "forward",
  s: "back", S: "back", ArrowDown: "back",
  a: "left", A: "left", ArrowLeft: "left",
  d: "right", D: "right", ArrowRight: "right",
};

export const TELEOP_HZ = 10;
const LINEAR = 0.5; // m/s
const ANGULAR = 0.9; // rad/s

export class TeleopController {
  private held = new Set<string>();
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private send: (command: ClientCommand) => void,
    private levelOf: () => number,
    private hz: number = TELEOP_HZ,
  ) {}

  // returns true when the key was consumed (so callers can preventDefault)
  keyDown(key: string): boolean {
    const axis = KEY_AXES[key];
    if (!axis || this.levelOf() !== 4) return false;
    this.held.add(axis);
    if (this.timer === null) {
      this.timer = setInterval(() => this.tick(), 1000 / this.hz);
      this.tick(); // first command immediately on press
    }
    return true;
  }

  keyUp(key: string): boolean {
    const axis = KEY_AXES[key];
    if (!axis) return false;
    this.held.delete(axis);
    if (this.held.size === 0) this.stop();
    return true;
  }

  get active(): boolean {
    return this.timer !== null;
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.held.clear();
  }

  private tick(): void {
    if (this.levelOf() !== 4 || this.held.size === 0) {
      this.stop();
      return;
    }
    let vx = 0;
    let wz = 0;
    if (this.held.has("forward")) vx += LINEAR;
    if (this.held.has("back")) vx -= LINEAR;
    if (this.held.has("left")) wz += ANGULAR;
    if (this.held.has("right")) wz -= ANGULAR;
    this.send({ type: "teleop", vx, vy: 0, wz });
  }
}
