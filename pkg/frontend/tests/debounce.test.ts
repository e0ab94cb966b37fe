import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { LiveRenderer } from "../src/debounce";

type Deferred = { resolve: (v: string) => void; reject: (e: unknown) => void };

function controlledFetcher() {
  const pending: Deferred[] = [];
  const calls: string[] = [];
  const fetcher = (text: string, _seed: number) => {
    calls.push(text);
    return new Promise<string>((resolve, reject) => {
      pending.push({ resolve, reject });
    });
  };
  return { fetcher, pending, calls };
}

describe("LiveRenderer", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("coalesces rapid edits into one request for the latest text", async () => {
    const { fetcher, pending, calls } = controlledFetcher();
    const applied: string[] = [];
    const renderer = new LiveRenderer(fetcher, (o) => applied.push(o.value ?? "err"), 150);
    renderer.schedule("v1", 0);
    vi.advanceTimersByTime(60);
    renderer.schedule("v2", 0);
    vi.advanceTimersByTime(60);
    renderer.schedule("v3", 0);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["v3"]);
    pending[0].resolve("svg-v3");
    await vi.runAllTimersAsync();
    expect(applied).toEqual(["svg-v3"]);
  });

  it("keeps at most one request in flight and discards superseded responses", async () => {
    const { fetcher, pending, calls } = controlledFetcher();
    const applied: string[] = [];
    const renderer = new LiveRenderer(fetcher, (o) => applied.push(o.value ?? "err"), 150);
    renderer.schedule("first", 0);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["first"]);
    // a newer text arrives while "first" is still in flight: no second
    // network call yet, just the one-slot queue
    renderer.schedule("second", 0);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["first"]);
    // the stale response must not be displayed; the queued text fires next
    pending[0].resolve("svg-first");
    await vi.runAllTimersAsync();
    expect(applied).toEqual([]);
    expect(calls).toEqual(["first", "second"]);
    pending[1].resolve("svg-second");
    await vi.runAllTimersAsync();
    expect(applied).toEqual(["svg-second"]);
  });

  it("does not issue a request when the text is unchanged", async () => {
    const { fetcher, pending, calls } = controlledFetcher();
    const renderer = new LiveRenderer(fetcher, () => undefined, 150);
    renderer.schedule("same", 7);
    vi.advanceTimersByTime(150);
    pending[0].resolve("svg");
    await vi.runAllTimersAsync();
    renderer.schedule("same", 7); // dirty-check: no-op
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["same"]);
    expect(renderer.requestCount).toBe(1);
  });

  it("typing away and back during a flight does not re-render", async () => {
    const { fetcher, pending, calls } = controlledFetcher();
    const applied: string[] = [];
    const renderer = new LiveRenderer(fetcher, (o) => applied.push(o.value ?? "err"), 150);
    renderer.schedule("text", 0);
    vi.advanceTimersByTime(150);
    renderer.schedule("other", 0);
    vi.advanceTimersByTime(150);
    renderer.schedule("text", 0); // back to the in-flight content
    vi.advanceTimersByTime(150);
    pending[0].resolve("svg-text");
    await vi.runAllTimersAsync();
    expect(calls).toEqual(["text"]);
    expect(applied).toEqual(["svg-text"]);
  });

  it("surfaces errors and stays usable afterwards", async () => {
    const { fetcher, pending, calls } = controlledFetcher();
    const outcomes: boolean[] = [];
    const renderer = new LiveRenderer(fetcher, (o) => outcomes.push(o.ok), 150);
    renderer.schedule("bad", 0);
    vi.advanceTimersByTime(150);
    pending[0].reject(new Error("server down"));
    await vi.runAllTimersAsync();
    expect(outcomes).toEqual([false]);
    // same text again is retriable after a failure
    renderer.schedule("bad", 0);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["bad", "bad"]);
    pending[1].resolve("recovered");
    await vi.runAllTimersAsync();
    expect(outcomes).toEqual([false, true]);
  });

  it("changing the seed counts as dirty", async () => {
    const { fetcher, pending, calls } = controlledFetcher();
    const renderer = new LiveRenderer(fetcher, () => undefined, 150);
    renderer.schedule("text", 1);
    vi.advanceTimersByTime(150);
    pending[0].resolve("svg1");
    await vi.runAllTimersAsync();
    renderer.schedule("text", 2);
    vi.advanceTimersByTime(150);
    expect(calls).toEqual(["text", "text"]);
  });
});
