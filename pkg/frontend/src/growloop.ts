/**
 * Hold-to-grow: while the button is held the loop ticks at 10 Hz, and each
 * tick asks the client for a 10 mm grow. The client's one-in-flight rule
 * drops a tick when the previous grow has not been answered yet.
 */

export const GROW_STEP_MM = 10;
export const GROW_INTERVAL_MS = 100;

export class GrowLoop {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(private tick: () => void) {}

  get running(): boolean {
    return this.timer !== null;
  }

  start(): void {
    if (this.timer !== null) {
      return;
    }
    this.tick();
    this.timer = setInterval(this.tick, GROW_INTERVAL_MS);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
