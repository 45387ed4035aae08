import type { ApiClient } from "./api.js";

// playback keeps at most one frame request in flight; when a newer frame is
// wanted while one is pending, only the newest is remembered, and responses
// superseded by a newer request are discarded.

export interface FrameSink {
  (t: number, png: Uint8Array): void;
}

export class PlaybackController {
  private seq = 0;
  private inflight = false;
  private queued: { t: number; seq: number } | null = null;
  requestedTimes: number[] = []; // instrumentation for tests
  private baseT = 0;
  private frameIndex = 0;

  constructor(
    private api: ApiClient,
    private state: { sessionId: string; playback: { t: number; playing: boolean; fps: number } },
    private sink: FrameSink,
    private effectId: () => string | null,
  ) {}

  /** Scrub: set t directly (paused preview fetches that single frame). */
  scrub(t: number): Promise<void> {
    this.state.playback.t = Math.max(0, t);
    this.state.playback.playing = false;
    return this.requestFrame(this.state.playback.t);
  }

  /** Start playing from the current t; the first frame shown is the
   * current (scrubbed) one. */
  play(): void {
    this.state.playback.playing = true;
    this.baseT = this.state.playback.t;
    this.frameIndex = 0;
  }

  pause(): void {
    this.state.playback.playing = false;
  }

  /** Advance one playback step: t = t0 + k/fps, k = 0, 1, ... The caller
   * drives this from its timer loop. */
  async tick(): Promise<void> {
    if (!this.state.playback.playing) return;
    const t = this.baseT + this.frameIndex / this.state.playback.fps;
    this.frameIndex += 1;
    this.state.playback.t = t;
    await this.requestFrame(t);
  }

  private async requestFrame(t: number): Promise<void> {
    const effect = this.effectId();
    if (effect === null) return;
    const seq = ++this.seq;
    if (this.inflight) {
      this.queued = { t, seq }; // newest wins; older queued frames drop
      return;
    }
    await this.fetchLoop(effect, t, seq);
  }

  private async fetchLoop(effect: string, t: number, seq: number): Promise<void> {
    this.inflight = true;
    try {
      while (true) {
        this.requestedTimes.push(t);
        const png = await this.api.fetchFrame(this.state.sessionId, effect, t);
        if (seq === this.seq) {
          this.sink(t, png); // still the newest request; stale ones drop
        }
        if (this.queued === null) break;
        ({ t, seq } = this.queued);
        this.queued = null;
      }
    } finally {
      this.inflight = false;
    }
  }
}
