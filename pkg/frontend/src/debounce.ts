/** Trailing-edge debouncer for slider drags (one call per quiet period). */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): { call: (...args: A) => void; cancel: () => void } {
  let timer: ReturnType<typeof setTimeout> | null = null;
  return {
    call(...args: A) {
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(() => {
        timer = null;
        fn(...args);
      }, waitMs);
    },
    cancel() {
      if (timer !== null) clearTimeout(timer);
      timer = null;
    },
  };
}

/**
 * Latest-wins gate keeping at most one request in flight: starting a new
 * run aborts the previous one, and a response is delivered only if nothing
 * newer started while it was in flight.
 */
export class LatestWins {
  private seq = 0;
  private controller: AbortController | null = null;

  async run<T>(factory: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const ticket = ++this.seq;
    try {
      const value = await factory(controller.signal);
      return ticket === this.seq ? value : null;
    } catch (error) {
      if (controller.signal.aborted) return null; // superseded or invalidated
      throw error;
    }
  }

  /** Abort whatever is in flight and drop its eventual response. */
  invalidate(): void {
    this.seq++;
    this.controller?.abort();
    this.controller = null;
  }
}
