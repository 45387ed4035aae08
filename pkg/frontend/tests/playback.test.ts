import { describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { PlaybackController } from "../src/playback.js";

interface Deferred {
  promise: Promise<Response>;
  resolve: (r: Response) => void;
}

function deferred(): Deferred {
  let resolve!: (r: Response) => void;
  const promise = new Promise<Response>((r) => (resolve = r));
  return { promise, resolve };
}

function pngResponse(tag: number): Response {
  return new Response(new Uint8Array([tag]).buffer, {
    status: 200,
    headers: { "content-type": "image/png" },
  });
}

function makeController(fetchImpl: (url: string) => Promise<Response>) {
  const api = new ApiClient("", fetchImpl as any);
  const state = { sessionId: "s", playback: { t: 0, playing: false, fps: 10 } };
  const shown: { t: number; tag: number }[] = [];
  const controller = new PlaybackController(
    api, state, (t, png) => shown.push({ t, tag: png[0] }), () => "e1",
  );
  return { controller, state, shown };
}

describe("PlaybackController", () => {
  it("scrub-then-play shows the scrubbed frame first", async () => {
    const served: number[] = [];
    const { controller, state, shown } = makeController(async (url) => {
      const t = Number(url.split("t=")[1]);
      served.push(t);
      return pngResponse(Math.round(t * 10));
    });
    await controller.scrub(0.7);
    expect(state.playback.t).toBe(0.7);
    expect(state.playback.playing).toBe(false);
    controller.play();
    await controller.tick();
    await controller.tick();
    // the first played frame is exactly the scrubbed t
    expect(served[0]).toBe(0.7);
    expect(served[1]).toBe(0.7);
    expect(shown[0].t).toBe(0.7);
    expect(shown[1].t).toBe(0.7);
    expect(served[2]).toBeCloseTo(0.8, 12); // then t0 + 1/fps
  });

  it("keeps at most one request in flight and drops superseded frames", async () => {
    const gates: Deferred[] = [];
    const requested: number[] = [];
    const { controller, shown } = makeController((url) => {
      requested.push(Number(url.split("t=")[1]));
      const gate = deferred();
      gates.push(gate);
      return gate.promise;
    });

    const first = controller.scrub(0.1); // starts fetch #1
    const second = controller.scrub(0.2); // queued while #1 is pending
    const third = controller.scrub(0.3); // replaces the queued 0.2
    expect(requested).toEqual([0.1]); // only one request actually in flight

    gates[0].resolve(pngResponse(1));
    await vi.waitFor(() => expect(requested).toEqual([0.1, 0.3])); // 0.2 never fetched
    gates[1].resolve(pngResponse(3));
    await Promise.all([first, second, third]);

    // the 0.1 response was already superseded when it resolved
    expect(shown.map((s) => s.t)).toEqual([0.3]);
  });

  it("pausing freezes t and stops ticks from advancing", async () => {
    const { controller, state, shown } = makeController(async () => pngResponse(7));
    await controller.scrub(1.5);
    controller.play();
    await controller.tick();
    controller.pause();
    const tBefore = state.playback.t;
    await controller.tick(); // no-op while paused
    expect(state.playback.t).toBe(tBefore);
    expect(shown).toHaveLength(2); // scrub + the single played frame
  });

  it("clamps scrub times at zero", async () => {
    const { controller, state } = makeController(async () => pngResponse(0));
    await controller.scrub(-3);
    expect(state.playback.t).toBe(0);
  });
});
