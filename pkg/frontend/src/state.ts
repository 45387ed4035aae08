import type { ApiClient } from "./api.js";
import type { Diagnostic, EffectEntry, MaskOverlay, PlaybackState } from "./types.js";

const OVERLAY_COLORS: [number, number, number][] = [
  [80, 200, 255],
  [255, 120, 80],
  [140, 255, 120],
  [255, 90, 200],
  [255, 220, 80],
  [150, 130, 255],
];

/** Client-side session state. All pixels live on the service; this holds
 * only ids, toggles, and playback bookkeeping. */
export class UiSessionState {
  sessionId: string;
  projectorSize: [number, number];
  masks: MaskOverlay[] = [];
  effects: EffectEntry[] = [];
  selectedEffect: string | null = null;
  playback: PlaybackState = { t: 0, playing: false, fps: 10 };
  errorBanner: string | null = null;
  inlineError: string | null = null;
  shaderDiagnostics: Diagnostic[] = [];

  constructor(sessionId: string, projectorSize: [number, number]) {
    this.sessionId = sessionId;
    this.projectorSize = projectorSize;
  }

  addMask(id: string, memberCount: number): MaskOverlay {
    const overlay: MaskOverlay = {
      id,
      color: OVERLAY_COLORS[this.masks.length % OVERLAY_COLORS.length],
      visible: true,
      memberCount,
    };
    this.masks.push(overlay);
    return overlay;
  }

  toggleMask(id: string): void {
    const mask = this.masks.find((m) => m.id === id);
    if (mask) mask.visible = !mask.visible;
  }

  addEffect(entry: EffectEntry): void {
    this.effects.push(entry);
    this.selectedEffect = entry.id;
  }

  selectEffect(id: string): void {
    if (!this.effects.some((e) => e.id === id)) {
      throw new Error(`effect ${id} does not belong to this session`);
    }
    this.selectedEffect = id;
  }

  setTime(t: number): void {
    this.playback.t = Math.max(0, t);
  }

  setError(banner: string | null, inline: string | null = null): void {
    this.errorBanner = banner;
    this.inlineError = inline;
  }
}

/** Rebuild the full state from the service: the page is reload-safe given
 * only a session id in the URL. */
export async function restoreSession(api: ApiClient, sessionId: string): Promise<UiSessionState> {
  const summary = await api.getSession(sessionId);
  const state = new UiSessionState(summary.id, summary.projector_size);
  for (const maskId of summary.masks) {
    state.addMask(maskId, 0);
  }
  state.effects = await api.listEffects(sessionId);
  if (state.effects.length > 0) {
    state.selectedEffect = state.effects[state.effects.length - 1].id;
  }
  return state;
}
