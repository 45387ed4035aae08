import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { restoreSession, UiSessionState } from "../src/state.js";
import { makeStubFetch } from "./helpers.js";

describe("UiSessionState", () => {
  it("assigns distinct overlay colors and toggles visibility", () => {
    const state = new UiSessionState("s", [96, 96]);
    const a = state.addMask("m1", 10);
    const b = state.addMask("m2", 20);
    expect(a.color).not.toEqual(b.color);
    expect(a.visible).toBe(true);
    state.toggleMask("m1");
    expect(state.masks[0].visible).toBe(false);
    state.toggleMask("m1");
    expect(state.masks[0].visible).toBe(true);
  });

  it("only selects effects that belong to the session", () => {
    const state = new UiSessionState("s", [96, 96]);
    state.addEffect({ id: "e1", spec: { kind: "distort", mask: null, seed: 0, params: {}, shader_source: "" } });
    expect(state.selectedEffect).toBe("e1");
    expect(() => state.selectEffect("e99")).toThrow(/belong/);
    expect(state.selectedEffect).toBe("e1");
  });

  it("never lets t go negative", () => {
    const state = new UiSessionState("s", [96, 96]);
    state.setTime(-5);
    expect(state.playback.t).toBe(0);
    state.setTime(2.5);
    expect(state.playback.t).toBe(2.5);
  });
});

describe("restoreSession", () => {
  it("rebuilds masks and effects from GET endpoints alone", async () => {
    const { fetchImpl, calls } = makeStubFetch([
      {
        match: (url, method) => url === "/api/sessions/s7" && method === "GET",
        respond: () => ({
          status: 200,
          json: {
            id: "s7", valid_fraction: 0.8, camera_size: [128, 96],
            projector_size: [96, 96], masks: ["m1", "m2"], effects: ["e1"],
          },
        }),
      },
      {
        match: (url, method) => url === "/api/sessions/s7/effects" && method === "GET",
        respond: () => ({
          status: 200,
          json: [
            { id: "e1", spec: { kind: "tron", mask: "m1", seed: 0, params: {}, shader_source: "" } },
          ],
        }),
      },
    ]);
    const state = await restoreSession(new ApiClient("", fetchImpl), "s7");
    expect(state.sessionId).toBe("s7");
    expect(state.masks.map((m) => m.id)).toEqual(["m1", "m2"]);
    expect(state.effects).toHaveLength(1);
    expect(state.selectedEffect).toBe("e1");
    expect(calls.every((c) => c.method === "GET")).toBe(true);
  });
});
