// Trailing-edge debouncer with single-in-flight request semantics.
//
// Edits schedule a refresh at least `delayMs` after the last change; while a
// request is in flight no new one starts, and when it settles a refresh is
// re-scheduled immediately if the config changed meanwhile. Idle sessions
// issue zero requests.

export type Clock = {
  now(): number;
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
};

export const realClock: Clock = {
  now: () => Date.now(),
  setTimeout: (fn, ms) => setTimeout(fn, ms),
  clearTimeout: (h) => clearTimeout(h as ReturnType<typeof setTimeout>),
};

export class DebouncedRefresher {
  private timer: unknown = null;
  private inFlight = false;
  private pendingAgain = false;
  requestCount = 0;

  constructor(
    private readonly run: () => Promise<void>,
    private readonly delayMs: number = 150,
    private readonly clock: Clock = realClock,
  ) {
    if (delayMs < 150) {
      throw new Error("live refresh debounce must be >= 150 ms");
    }
  }

  /** Call on every config edit. */
  poke(): void {
    if (this.timer !== null) {
      this.clock.clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.inFlight) {
      this.pendingAgain = true;
      return;
    }
    this.timer = this.clock.setTimeout(() => {
      this.timer = null;
      void this.fire();
    }, this.delayMs);
  }

  get busy(): boolean {
    return this.inFlight;
  }

  private async fire(): Promise<void> {
    this.inFlight = true;
    this.requestCount += 1;
    try {
      await this.run();
    } finally {
      this.inFlight = false;
      if (this.pendingAgain) {
        this.pendingAgain = false;
        this.poke();
      }
    }
  }
}
