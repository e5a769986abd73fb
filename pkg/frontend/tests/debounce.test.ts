import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { debounce, LatestWins } from "../src/debounce";

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("fires once per quiet period with the last arguments", () => {
    const seen: number[] = [];
    const d = debounce((v: number) => seen.push(v), 150);
    d.call(1);
    vi.advanceTimersByTime(100);
    d.call(2);
    vi.advanceTimersByTime(100);
    d.call(3);
    vi.advanceTimersByTime(150);
    expect(seen).toEqual([3]);
  });

  it("cancel drops the pending call", () => {
    const fn = vi.fn();
    const d = debounce(fn, 150);
    d.call();
    d.cancel();
    vi.advanceTimersByTime(500);
    expect(fn).not.toHaveBeenCalled();
  });
});

describe("latest-wins gate", () => {
  it("suppresses responses that were overtaken", async () => {
    const gate = new LatestWins();
    let releaseFirst!: (v: string) => void;
    const first = gate.run(
      () => new Promise<string>((resolve) => (releaseFirst = resolve)),
    );
    const second = gate.run(() => Promise.resolve("second"));
    releaseFirst("first");
    expect(await second).toBe("second");
    expect(await first).toBeNull(); // overtaken while in flight
  });

  it("delivers uncontested responses", async () => {
    const gate = new LatestWins();
    expect(await gate.run(() => Promise.resolve(42))).toBe(42);
  });

  it("invalidate drops whatever is in flight", async () => {
    const gate = new LatestWins();
    let release!: (v: number) => void;
    const pending = gate.run(() => new Promise<number>((r) => (release = r)));
    gate.invalidate();
    release(7);
    expect(await pending).toBeNull();
  });
});
